//! Brute-force inference oracle for tiny instances.
//!
//! Everything here is written against raw probability tables with explicit
//! loops — deliberately independent of the library's distribution types and
//! update code. The location posterior is obtained by enumerating the full
//! joint over all location-class configurations, with each observation
//! contributing its likelihood message raised to the Gaussian neighborhood
//! weight of every coupled cell.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One observation in an oracle instance.
#[derive(Debug, Clone)]
pub enum TinyObs {
    /// Remote reading of the rock at `rocks[rock_index]`, one reading per
    /// feature channel.
    Rock { rock_index: usize, readings: Vec<usize> },
    /// Local material reading at a map cell.
    Local { cell: (usize, usize), reading: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct TinyRock {
    pub id: u64,
    pub cell: (usize, usize),
}

/// A fully specified tiny inference problem (map of at most a few cells,
/// unit rock-grid ratio).
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub width: usize,
    pub height: usize,
    pub l_classes: usize,
    pub r_classes: usize,
    pub f_classes: usize,
    pub z_classes: usize,
    pub b_classes: usize,
    pub channels: usize,
    pub sigma: f64,
    pub radius: usize,
    /// `p_r_given_l[l][r]`
    pub p_r_given_l: Vec<Vec<f64>>,
    /// `p_b_given_l[l][b]`
    pub p_b_given_l: Vec<Vec<f64>>,
    /// `p_f_given_r[channel][r][f]`
    pub p_f_given_r: Vec<Vec<Vec<f64>>>,
    /// `p_z_given_f[channel][f][z]`
    pub p_z_given_f: Vec<Vec<Vec<f64>>>,
    pub rocks: Vec<TinyRock>,
    pub observations: Vec<TinyObs>,
}

fn random_row(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Entries bounded away from zero keep posteriors far above the
    // implementation's numerical floor.
    let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn random_table(parents: usize, children: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..parents).map(|_| random_row(children, rng)).collect()
}

impl TinyInstance {
    /// Randomized instance: at most 4 cells, 2 rocks, cardinality 3,
    /// radius 1, and 1..=4 observations.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (width, height) = *[(1, 1), (2, 1), (3, 1), (4, 1), (2, 2), (1, 3)]
            .get(rng.random_range(0..6))
            .unwrap();
        let l = rng.random_range(2..=3);
        let r = rng.random_range(2..=3);
        let f = rng.random_range(2..=3);
        let z = rng.random_range(2..=3);
        let b = rng.random_range(2..=3);
        let channels = rng.random_range(1..=2);
        let sigma = 0.5 + rng.random::<f64>() * 1.5;
        let radius = rng.random_range(0..=1);
        let p_r_given_l = random_table(l, r, &mut rng);
        let p_b_given_l = random_table(l, b, &mut rng);
        let p_f_given_r: Vec<_> = (0..channels).map(|_| random_table(r, f, &mut rng)).collect();
        let p_z_given_f: Vec<_> = (0..channels).map(|_| random_table(f, z, &mut rng)).collect();

        let rock_count = rng.random_range(1..=2usize);
        let rocks: Vec<TinyRock> = (0..rock_count)
            .map(|i| TinyRock {
                id: (i + 1) as u64,
                cell: (rng.random_range(0..width), rng.random_range(0..height)),
            })
            .collect();

        // Local observations go to distinct cells so conflicting exact
        // readings cannot zero out a material belief.
        let mut local_cells: Vec<(usize, usize)> = Vec::new();
        for x in 0..width {
            for y in 0..height {
                local_cells.push((x, y));
            }
        }
        for i in (1..local_cells.len()).rev() {
            let j = rng.random_range(0..=i);
            local_cells.swap(i, j);
        }

        let obs_count = rng.random_range(1..=4usize);
        let mut observations = Vec::new();
        for _ in 0..obs_count {
            if rng.random::<f64>() < 0.6 {
                let rock_index = rng.random_range(0..rocks.len());
                let readings = (0..channels).map(|_| rng.random_range(0..z)).collect();
                observations.push(TinyObs::Rock { rock_index, readings });
            } else if let Some(cell) = local_cells.pop() {
                observations.push(TinyObs::Local {
                    cell,
                    reading: rng.random_range(0..b),
                });
            } else {
                let rock_index = rng.random_range(0..rocks.len());
                let readings = (0..channels).map(|_| rng.random_range(0..z)).collect();
                observations.push(TinyObs::Rock { rock_index, readings });
            }
        }

        Self {
            width,
            height,
            l_classes: l,
            r_classes: r,
            f_classes: f,
            z_classes: z,
            b_classes: b,
            channels,
            sigma,
            radius,
            p_r_given_l,
            p_b_given_l,
            p_f_given_r,
            p_z_given_f,
            rocks,
            observations,
        }
    }

    fn cell_count(&self) -> usize {
        self.width * self.height
    }

    /// Normalized Gaussian weights over the in-grid Euclidean ball around
    /// `center` (independent re-derivation of the coupling rule).
    fn neighborhood(&self, center: (usize, usize)) -> Vec<((usize, usize), f64)> {
        let r = self.radius as i64;
        let mut cells = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let x = center.0 as i64 + dx;
                let y = center.1 as i64 + dy;
                if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
                    continue;
                }
                let w = (-((dx * dx + dy * dy) as f64) / (2.0 * self.sigma * self.sigma)).exp();
                cells.push(((x as usize, y as usize), w));
            }
        }
        let total: f64 = cells.iter().map(|&(_, w)| w).sum();
        cells.into_iter().map(|(c, w)| (c, w / total)).collect()
    }

    /// Likelihood over rock classes of one remote observation.
    pub fn rock_likelihood(&self, readings: &[usize]) -> Vec<f64> {
        let mut lik = vec![1.0; self.r_classes];
        for (ch, &z) in readings.iter().enumerate() {
            for (rv, l) in lik.iter_mut().enumerate() {
                let mut channel = 0.0;
                for fv in 0..self.f_classes {
                    channel += self.p_f_given_r[ch][rv][fv] * self.p_z_given_f[ch][fv][z];
                }
                *l *= channel;
            }
        }
        lik
    }

    /// The per-observation likelihood message over location classes at the
    /// observation's focal cell.
    fn location_message(&self, obs: &TinyObs) -> ((usize, usize), Vec<f64>) {
        match obs {
            TinyObs::Rock { rock_index, readings } => {
                let lik = self.rock_likelihood(readings);
                let m: Vec<f64> = (0..self.l_classes)
                    .map(|l| {
                        (0..self.r_classes)
                            .map(|r| lik[r] * self.p_r_given_l[l][r])
                            .sum()
                    })
                    .collect();
                (self.rocks[*rock_index].cell, m)
            }
            TinyObs::Local { cell, reading } => {
                let m: Vec<f64> = (0..self.l_classes)
                    .map(|l| self.p_b_given_l[l][*reading])
                    .collect();
                (*cell, m)
            }
        }
    }

    /// Location marginals by full-joint enumeration: iterate every
    /// assignment of classes to cells, weight it by the uniform prior times
    /// every observation's exponentiated neighbor messages, and marginalize.
    pub fn l_marginals_by_enumeration(&self) -> Vec<Vec<f64>> {
        let cells = self.cell_count();
        let messages: Vec<((usize, usize), Vec<f64>)> = self
            .observations
            .iter()
            .map(|o| self.location_message(o))
            .collect();
        let mut marginals = vec![vec![0.0; self.l_classes]; cells];
        let mut assignment = vec![0usize; cells];
        let total_configs = self.l_classes.pow(cells as u32);
        for config in 0..total_configs {
            let mut rest = config;
            for slot in assignment.iter_mut() {
                *slot = rest % self.l_classes;
                rest /= self.l_classes;
            }
            // Uniform prior contributes a constant; drop it.
            let mut weight = 1.0;
            for (center, message) in &messages {
                for ((nx, ny), w) in self.neighborhood(*center) {
                    let class = assignment[ny * self.width + nx];
                    weight *= message[class].powf(w);
                }
            }
            for (i, &class) in assignment.iter().enumerate() {
                marginals[i][class] += weight;
            }
        }
        for row in &mut marginals {
            let total: f64 = row.iter().sum();
            for p in row.iter_mut() {
                *p /= total;
            }
        }
        marginals
    }

    /// Material posterior per cell: uniform prior times the product of exact
    /// reading indicators (readings are noiseless evidence on B).
    pub fn material_by_direct_product(&self) -> Vec<Vec<f64>> {
        let mut posts = vec![vec![1.0; self.b_classes]; self.cell_count()];
        for obs in &self.observations {
            if let TinyObs::Local { cell, reading } = obs {
                let row = &mut posts[cell.1 * self.width + cell.0];
                for (b, p) in row.iter_mut().enumerate() {
                    if b != *reading {
                        *p = 0.0;
                    }
                }
            }
        }
        for row in &mut posts {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                for p in row.iter_mut() {
                    *p /= total;
                }
            }
        }
        posts
    }

    /// Rock posterior: geometric pooling of the final location marginals
    /// over the rock's neighborhood, folded through P(R|L), times the
    /// product of the rock's observation likelihoods.
    pub fn rock_posterior(&self, rock_index: usize, l_marginals: &[Vec<f64>]) -> Vec<f64> {
        let rock = self.rocks[rock_index];
        let mut pooled = vec![1.0; self.l_classes];
        for ((nx, ny), w) in self.neighborhood(rock.cell) {
            let cell = &l_marginals[ny * self.width + nx];
            for (p, &q) in pooled.iter_mut().zip(cell) {
                *p *= q.powf(w);
            }
        }
        let pool_total: f64 = pooled.iter().sum();
        for p in pooled.iter_mut() {
            *p /= pool_total;
        }
        let mut posterior: Vec<f64> = (0..self.r_classes)
            .map(|r| {
                (0..self.l_classes)
                    .map(|l| pooled[l] * self.p_r_given_l[l][r])
                    .sum()
            })
            .collect();
        for obs in &self.observations {
            if let TinyObs::Rock { rock_index: ri, readings } = obs {
                if *ri == rock_index {
                    let lik = self.rock_likelihood(readings);
                    for (p, l) in posterior.iter_mut().zip(lik) {
                        *p *= l;
                    }
                }
            }
        }
        let total: f64 = posterior.iter().sum();
        posterior.into_iter().map(|p| p / total).collect()
    }

    pub fn observed_rock_indices(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for obs in &self.observations {
            if let TinyObs::Rock { rock_index, .. } = obs {
                if !seen.contains(rock_index) {
                    seen.push(*rock_index);
                }
            }
        }
        seen
    }
}

// Conversions from the oracle's raw tables into the library's types, so the
// same instance can drive both computations.

use surveyor_core::{
    BeliefState, Cardinalities, Cpt, GridGeometry, KnowledgeNet, LocalObservation, Observation,
    ObservedRock, RemoteObservation, SpatialCoupling,
};

impl TinyInstance {
    pub fn net(&self) -> KnowledgeNet {
        let net = KnowledgeNet {
            cardinalities: Cardinalities {
                location: self.l_classes,
                rock: self.r_classes,
                feature: self.f_classes,
                reading: self.z_classes,
                material: self.b_classes,
            },
            p_r_given_l: Cpt::from_rows(self.p_r_given_l.clone()).unwrap(),
            p_b_given_l: Cpt::from_rows(self.p_b_given_l.clone()).unwrap(),
            p_f_given_r: self
                .p_f_given_r
                .iter()
                .map(|t| Cpt::from_rows(t.clone()).unwrap())
                .collect(),
            p_z_given_f: self
                .p_z_given_f
                .iter()
                .map(|t| Cpt::from_rows(t.clone()).unwrap())
                .collect(),
            coupling: SpatialCoupling::new(self.sigma, self.radius).unwrap(),
        };
        net.validate().unwrap();
        net
    }

    pub fn geometry(&self) -> GridGeometry {
        GridGeometry {
            l_width: self.width,
            l_height: self.height,
            ratio: 1,
            fov_depth: 1,
            fov_width: 1,
        }
    }

    pub fn uniform_belief(&self) -> BeliefState {
        BeliefState::uniform(self.geometry(), &self.net()).unwrap()
    }

    pub fn observation(&self, obs: &TinyObs) -> Observation {
        match obs {
            TinyObs::Rock { rock_index, readings } => {
                let rock = self.rocks[*rock_index];
                Observation::Remote(RemoteObservation {
                    covered: vec![rock.cell],
                    rocks: vec![ObservedRock {
                        id: Some(rock.id),
                        cell: rock.cell,
                        readings: readings.clone(),
                    }],
                })
            }
            TinyObs::Local { cell, reading } => Observation::Local(LocalObservation {
                cell: *cell,
                reading: *reading,
            }),
        }
    }

    /// Applies every observation in order through the library's update path.
    pub fn posterior_belief(&self) -> BeliefState {
        let net = self.net();
        let mut belief = self.uniform_belief();
        for obs in &self.observations {
            belief.apply(&self.observation(obs), &net).unwrap();
        }
        belief
    }
}
