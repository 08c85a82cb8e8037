//! The planner's world model: per-cell posteriors over the latent location
//! class and the local material, plus per-rock class posteriors, with all
//! update rules.
//!
//! Updates are recursive: each observation folds into the belief as a
//! likelihood and no observation history is kept. Evidence observed at a
//! cell also updates neighboring cells through weighted log-linear pooling —
//! the neighbor's posterior is proportional to its prior times the evidence
//! likelihood raised to the normalized Gaussian weight of the neighbor.
//! Raising to a weight keeps the update closed-form, order-independent, and
//! exactly equal to single-parent Bayes when the coupling radius is zero.
//!
//! Rock posteriors are kept as accumulated observation likelihoods and
//! combined with the location-coupled prior on demand, which keeps the final
//! belief invariant to the order the observations arrived in.
//!
//! Repeat observations of the same evidence source do not double-count.
//! Readings of one rock are independent given its class but not given the
//! location, so the location message of a re-observed rock is the ratio of
//! its new to its old cumulative message — the belief-propagation update on
//! the location/rock/reading chain. Re-reading a fully classified rock
//! (or re-reading a known material cell) then moves the location belief by
//! exactly nothing, while a first observation reduces to the plain
//! `sum_r lik(r) P(r|l)` message.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::dist::Categorical;
use crate::error::{Error, Result};
use crate::grid::{BitGrid, Grid};
use crate::knowledge::KnowledgeNet;
use crate::observation::{LocalObservation, ObservedRock, Observation, RemoteObservation};
use crate::sensing::{Pose, SensorKind};
use crate::world::{footprint, GridGeometry};

/// Ids for rocks imagined while sampling observations from the belief start
/// here, so they can never collide with ground-truth rock ids.
const PHANTOM_ID_BASE: u64 = 1 << 32;

/// Poisson rate of undiscovered rocks per map-cell-sized area, used when
/// sampling hypothetical observations of unsurveyed ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RockDensityPrior {
    pub lambda: f64,
}

impl Default for RockDensityPrior {
    fn default() -> Self {
        Self { lambda: 1.0 }
    }
}

/// Belief about one tracked rock.
#[derive(Debug, Clone, PartialEq)]
pub struct RockBelief {
    /// Rock-grid cell where the rock sits.
    pub cell: (usize, usize),
    /// Map cell containing it.
    pub l_cell: (usize, usize),
    /// Accumulated observation likelihood over rock classes (normalized for
    /// numerical health; scale carries no information).
    likelihood: Categorical,
}

impl RockBelief {
    pub fn accumulated_likelihood(&self) -> &Categorical {
        &self.likelihood
    }
}

/// The full belief state. A value type: cloning yields an independent
/// snapshot, which is how planning rollouts simulate futures without
/// touching the mission belief.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    geom: GridGeometry,
    location: Grid<Categorical>,
    material: Grid<Categorical>,
    rocks: BTreeMap<u64, RockBelief>,
    /// Rock cells covered by some past remote footprint.
    surveyed: BitGrid,
    next_phantom_id: u64,
}

impl BeliefState {
    /// Uniform priors everywhere, nothing surveyed, no rocks tracked.
    pub fn uniform(geom: GridGeometry, net: &KnowledgeNet) -> Result<Self> {
        let l = Categorical::uniform(net.cardinalities.location)?;
        let b = Categorical::uniform(net.cardinalities.material)?;
        Ok(Self {
            geom,
            location: Grid::filled(geom.l_width, geom.l_height, l),
            material: Grid::filled(geom.l_width, geom.l_height, b),
            rocks: BTreeMap::new(),
            surveyed: BitGrid::new(geom.rock_width(), geom.rock_height()),
            next_phantom_id: PHANTOM_ID_BASE,
        })
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geom
    }

    pub fn location_belief(&self, cell: (usize, usize)) -> Result<&Categorical> {
        self.location.checked(cell.0, cell.1)
    }

    pub fn material_belief(&self, cell: (usize, usize)) -> Result<&Categorical> {
        self.material.checked(cell.0, cell.1)
    }

    pub fn location_grid(&self) -> &Grid<Categorical> {
        &self.location
    }

    pub fn tracked_rocks(&self) -> impl Iterator<Item = (u64, &RockBelief)> {
        self.rocks.iter().map(|(&id, rb)| (id, rb))
    }

    pub fn rock_count(&self) -> usize {
        self.rocks.len()
    }

    pub fn is_surveyed(&self, rock_cell: (usize, usize)) -> bool {
        self.surveyed.get(rock_cell.0, rock_cell.1)
    }

    /// Sum of per-cell location entropies in bits. This is the quantity the
    /// planners try to reduce.
    pub fn joint_l_entropy(&self) -> f64 {
        self.location.cells().iter().map(|c| c.entropy_bits()).sum()
    }

    /// Posterior over a tracked rock's class: the location-coupled prior
    /// (pooled over the coupling neighborhood, folded through P(R|L)) times
    /// the rock's accumulated observation likelihood.
    pub fn rock_posterior(&self, id: u64, net: &KnowledgeNet) -> Result<Categorical> {
        let rb = self
            .rocks
            .get(&id)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown rock id {id}")))?;
        let pooled = self.pooled_location(rb.l_cell, net)?;
        let prior = net.p_r_given_l.mix_rows(pooled.probs())?;
        let weights: Vec<f64> = prior
            .iter()
            .zip(rb.likelihood.probs())
            .map(|(&p, &l)| p * l)
            .collect();
        Categorical::from_weights(&weights)
    }

    /// Weighted geometric pooling of the location beliefs in the coupling
    /// neighborhood of `cell`.
    fn pooled_location(&self, cell: (usize, usize), net: &KnowledgeNet) -> Result<Categorical> {
        let weights = net
            .coupling
            .weights(cell, self.geom.l_width, self.geom.l_height);
        if weights.len() == 1 {
            return Ok(self.location.at(cell.0, cell.1).clone());
        }
        let k = net.cardinalities.location;
        let mut pooled = vec![1.0; k];
        for ((x, y), w) in weights {
            for (p, &q) in pooled.iter_mut().zip(self.location.at(x, y).probs()) {
                *p *= q.max(f64::MIN_POSITIVE).powf(w);
            }
        }
        Categorical::from_weights(&pooled)
    }

    /// Applies any observation in place.
    pub fn apply(&mut self, obs: &Observation, net: &KnowledgeNet) -> Result<()> {
        match obs {
            Observation::Remote(remote) => self.apply_remote(remote, net),
            Observation::Local(local) => self.apply_local(local, net),
        }
    }

    /// Pure variant: returns the updated belief, leaving `self` untouched.
    pub fn updated(&self, obs: &Observation, net: &KnowledgeNet) -> Result<Self> {
        let mut next = self.clone();
        next.apply(obs, net)?;
        Ok(next)
    }

    /// Folds a remote observation into the belief: marks the footprint as
    /// surveyed, accumulates each rock's reading likelihood, and applies the
    /// coupled location update around every observed rock.
    pub fn apply_remote(&mut self, obs: &RemoteObservation, net: &KnowledgeNet) -> Result<()> {
        for &cell in &obs.covered {
            if !self.geom.contains_rock(cell) {
                return Err(Error::OutOfBounds {
                    x: cell.0,
                    y: cell.1,
                    width: self.geom.rock_width(),
                    height: self.geom.rock_height(),
                });
            }
        }
        for rock in &obs.rocks {
            if !self.geom.contains_rock(rock.cell) {
                return Err(Error::OutOfBounds {
                    x: rock.cell.0,
                    y: rock.cell.1,
                    width: self.geom.rock_width(),
                    height: self.geom.rock_height(),
                });
            }
        }
        for &cell in &obs.covered {
            self.surveyed.set(cell.0, cell.1);
        }
        for rock in &obs.rocks {
            let lik = net.rock_reading_likelihood(&rock.readings)?;
            let old_cumulative = self.track_rock(rock, &lik)?;
            let new_cumulative = match rock.id {
                Some(id) => self.rocks[&id].likelihood.clone(),
                // Phantom rocks get the freshly allocated id, which is the
                // last one handed out.
                None => self.rocks[&(self.next_phantom_id - 1)].likelihood.clone(),
            };
            // The location message of this rock after vs before the reading:
            // m(l) = sum_r cumulative(r) P(r|l). Applying their ratio is the
            // exact chain update; for a first sighting the old message is
            // constant in l and this reduces to sum_r lik(r) P(r|l).
            let new_msg = net.p_r_given_l.parent_likelihood(new_cumulative.probs())?;
            let location_lik = match old_cumulative {
                Some(old) => {
                    let old_msg = net.p_r_given_l.parent_likelihood(old.probs())?;
                    new_msg
                        .iter()
                        .zip(&old_msg)
                        .map(|(&n, &o)| n / o.max(f64::MIN_POSITIVE))
                        .collect()
                }
                None => new_msg,
            };
            let l_cell = self.geom.l_cell_of(rock.cell);
            self.coupled_location_update(l_cell, &location_lik, net)?;
        }
        Ok(())
    }

    /// Folds a local material reading into the belief: direct Bayes on the
    /// cell's material belief and the coupled location update via P(B|L).
    pub fn apply_local(&mut self, obs: &LocalObservation, net: &KnowledgeNet) -> Result<()> {
        if !self.geom.contains_l(obs.cell) {
            return Err(Error::OutOfBounds {
                x: obs.cell.0,
                y: obs.cell.1,
                width: self.geom.l_width,
                height: self.geom.l_height,
            });
        }
        let k = net.cardinalities.material;
        if obs.reading >= k {
            return Err(Error::BadCardinality {
                found: obs.reading,
                min: k,
            });
        }
        let mut indicator = vec![0.0; k];
        indicator[obs.reading] = 1.0;
        let old_material = self.material.at(obs.cell.0, obs.cell.1).clone();
        let new_material = old_material.scaled_by(&indicator)?;
        // Same ratio rule as for rocks, with the material belief as the
        // cumulative evidence: a repeat reading of a known cell is inert.
        let old_msg = net.p_b_given_l.parent_likelihood(old_material.probs())?;
        let new_msg = net.p_b_given_l.parent_likelihood(new_material.probs())?;
        let location_lik: Vec<f64> = new_msg
            .iter()
            .zip(&old_msg)
            .map(|(&n, &o)| n / o.max(f64::MIN_POSITIVE))
            .collect();
        self.material.set(obs.cell.0, obs.cell.1, new_material);
        self.coupled_location_update(obs.cell, &location_lik, net)
    }

    /// The weighted log-linear neighborhood update: every cell `k` within
    /// the coupling radius of `center` gets
    /// `posterior_k ∝ prior_k * likelihood^{w_k}`.
    fn coupled_location_update(
        &mut self,
        center: (usize, usize),
        likelihood: &[f64],
        net: &KnowledgeNet,
    ) -> Result<()> {
        for ((x, y), w) in net
            .coupling
            .weights(center, self.geom.l_width, self.geom.l_height)
        {
            let updated = self.location.at(x, y).pow_scaled_by(likelihood, w)?;
            self.location.set(x, y, updated);
        }
        Ok(())
    }

    fn track_rock(&mut self, rock: &ObservedRock, likelihood: &[f64]) -> Result<()> {
        let id = match rock.id {
            Some(id) => id,
            None => {
                let id = self.next_phantom_id;
                self.next_phantom_id += 1;
                id
            }
        };
        match self.rocks.get_mut(&id) {
            Some(existing) => {
                existing.likelihood = existing.likelihood.scaled_by(likelihood)?;
            }
            None => {
                self.rocks.insert(
                    id,
                    RockBelief {
                        cell: rock.cell,
                        l_cell: self.geom.l_cell_of(rock.cell),
                        likelihood: Categorical::from_weights(likelihood)?,
                    },
                );
            }
        }
        Ok(())
    }

    /// Samples a hypothetical observation from the belief itself, used by
    /// planners to simulate futures.
    ///
    /// Local: draw a location class from the cell belief, then a material
    /// from P(B|L). Remote: already-tracked rocks inside the footprint emit
    /// readings drawn from their posterior forward through P(F|R) and
    /// P(Z|F); unsurveyed footprint ground spawns hypothetical rocks at the
    /// density prior's Poisson rate.
    pub fn sample_observation(
        &self,
        pose: &Pose,
        sensor: SensorKind,
        net: &KnowledgeNet,
        density: &RockDensityPrior,
        rng: &mut ChaCha8Rng,
    ) -> Result<Observation> {
        if !self.geom.contains_l((pose.x, pose.y)) {
            return Err(Error::OutOfBounds {
                x: pose.x,
                y: pose.y,
                width: self.geom.l_width,
                height: self.geom.l_height,
            });
        }
        match sensor {
            SensorKind::Local => {
                let cell = (pose.x, pose.y);
                let location = self.location.at(cell.0, cell.1).sample(rng);
                let reading = net.p_b_given_l.sample_child(location, rng);
                Ok(Observation::Local(LocalObservation { cell, reading }))
            }
            SensorKind::Remote => {
                let covered = footprint(pose, SensorKind::Remote, &self.geom);
                let mut rocks = Vec::new();

                // Tracked rocks inside the footprint re-emit readings.
                for (&id, rb) in &self.rocks {
                    if covered.binary_search(&rb.cell).is_err() {
                        continue;
                    }
                    let posterior = self.rock_posterior(id, net)?;
                    let rock_class = posterior.sample(rng);
                    rocks.push(ObservedRock {
                        id: Some(id),
                        cell: rb.cell,
                        readings: self.sample_readings(rock_class, net, rng),
                    });
                }

                // Unsurveyed ground may hold undiscovered rocks. Group the
                // unsurveyed footprint cells by map cell and draw a Poisson
                // count per map-cell-equivalent of fresh area.
                let mut groups: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
                for &cell in &covered {
                    if !self.surveyed.get(cell.0, cell.1) {
                        groups.entry(self.geom.l_cell_of(cell)).or_default().push(cell);
                    }
                }
                let cell_area = (self.geom.ratio * self.geom.ratio) as f64;
                for (l_cell, mut cells) in groups {
                    let rate = density.lambda * cells.len() as f64 / cell_area;
                    if rate <= 0.0 {
                        continue;
                    }
                    let poisson = Poisson::new(rate).map_err(|e| {
                        Error::InvalidConfig(format!("invalid rock density rate: {e}"))
                    })?;
                    let count = (poisson.sample(rng) as usize).min(cells.len());
                    for i in 0..count {
                        let j = rng.random_range(i..cells.len());
                        cells.swap(i, j);
                    }
                    for &cell in &cells[..count] {
                        let location = self.location.at(l_cell.0, l_cell.1).sample(rng);
                        let rock_class = net.p_r_given_l.sample_child(location, rng);
                        rocks.push(ObservedRock {
                            id: None,
                            cell,
                            readings: self.sample_readings(rock_class, net, rng),
                        });
                    }
                }

                Ok(Observation::Remote(RemoteObservation { covered, rocks }))
            }
        }
    }

    fn sample_readings(
        &self,
        rock_class: usize,
        net: &KnowledgeNet,
        rng: &mut impl Rng,
    ) -> Vec<usize> {
        (0..net.channels())
            .map(|ch| {
                let feature = net.p_f_given_r[ch].sample_child(rock_class, rng);
                net.p_z_given_f[ch].sample_child(feature, rng)
            })
            .collect()
    }
}
