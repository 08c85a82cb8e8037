//! Exhaustive expectimax oracle on enumerable planning instances.
//!
//! Alternates max over legal actions with exact expectation over the
//! observation space. Usable only when the observation space is finite:
//! two map cells, binary variables, one feature channel, every rock already
//! tracked by the belief, and a zero phantom-rock rate so remote footprints
//! cannot spawn new rocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surveyor_core::{
    footprint, legal_actions, BeliefState, Cardinalities, CostModel, Cpt, GridGeometry, Heading,
    KnowledgeNet, Observation, ObservedRock, Pose, RemoteObservation, RockDensityPrior,
    SensingAction, SensingRules, SensorKind, SpatialCoupling,
};

pub struct PlannerInstance {
    pub net: KnowledgeNet,
    pub belief: BeliefState,
    pub pose: Pose,
    pub budget: u32,
    pub cost: CostModel,
    pub rules: SensingRules,
}

/// The zero rate that keeps the observation space enumerable.
pub fn no_phantoms() -> RockDensityPrior {
    RockDensityPrior { lambda: 0.0 }
}

fn binary_diag_row(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let p = 0.55 + 0.4 * rng.random::<f64>();
    vec![p, 1.0 - p]
}

fn binary_diag_table(rng: &mut ChaCha8Rng) -> Cpt {
    let row0 = binary_diag_row(rng);
    let row1 = binary_diag_row(rng);
    Cpt::from_rows(vec![row0, vec![row1[1], row1[0]]]).unwrap()
}

impl PlannerInstance {
    /// Seeded 2-cell binary instance with 0..=2 pre-tracked rocks.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geom = GridGeometry {
            l_width: 2,
            l_height: 1,
            ratio: 1,
            fov_depth: 1,
            fov_width: 1,
        };
        let net = KnowledgeNet {
            cardinalities: Cardinalities::all_equal(2),
            p_r_given_l: binary_diag_table(&mut rng),
            p_b_given_l: binary_diag_table(&mut rng),
            p_f_given_r: vec![binary_diag_table(&mut rng)],
            p_z_given_f: vec![binary_diag_table(&mut rng)],
            coupling: SpatialCoupling::new(0.5 + 1.5 * rng.random::<f64>(), rng.random_range(0..=1))
                .unwrap(),
        };
        let mut belief = BeliefState::uniform(geom, &net).unwrap();
        // Pre-track rocks by feeding setup observations through the normal
        // update path, so every remote footprint is enumerable afterwards.
        let rock_count = rng.random_range(0..=2usize);
        let mut cells = vec![(0usize, 0usize), (1, 0)];
        let j = rng.random_range(0..cells.len());
        cells.swap(0, j);
        for (i, &cell) in cells.iter().take(rock_count).enumerate() {
            let obs = RemoteObservation {
                covered: vec![cell],
                rocks: vec![ObservedRock {
                    id: Some((i + 1) as u64),
                    cell,
                    readings: vec![rng.random_range(0..2)],
                }],
            };
            belief.apply_remote(&obs, &net).unwrap();
        }
        let pose = Pose::new(
            rng.random_range(0..2),
            0,
            Heading::ALL[rng.random_range(0..8)],
        );
        let budget = rng.random_range(1..=2);
        Self {
            net,
            belief,
            pose,
            budget,
            cost: CostModel {
                remote_cost: 1,
                local_cost: 1,
            },
            rules: SensingRules::default(),
        }
    }

    fn geom(&self) -> GridGeometry {
        self.belief.geometry()
    }

    /// All first actions within 1e-9 of the optimal expectimax value.
    pub fn optimal_first_actions(&self) -> Vec<SensingAction> {
        let geom = self.geom();
        let legal = legal_actions(
            &self.pose,
            self.budget,
            &self.cost,
            geom.l_width,
            geom.l_height,
            None,
        );
        let qs: Vec<f64> = legal
            .iter()
            .map(|&a| self.q_value(&self.belief, self.pose, self.budget, a))
            .collect();
        let best = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        legal
            .into_iter()
            .zip(qs)
            .filter(|&(_, q)| (q - best).abs() < 1e-9)
            .map(|(a, _)| a)
            .collect()
    }

    fn value(&self, belief: &BeliefState, pose: Pose, remaining: u32) -> f64 {
        let geom = self.geom();
        let legal = legal_actions(
            &pose,
            remaining,
            &self.cost,
            geom.l_width,
            geom.l_height,
            None,
        );
        if legal.is_empty() {
            return 0.0;
        }
        legal
            .into_iter()
            .map(|a| self.q_value(belief, pose, remaining, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Expected total entropy drop (bits) of taking `action` and continuing
    /// optimally.
    fn q_value(&self, belief: &BeliefState, pose: Pose, remaining: u32, action: SensingAction) -> f64 {
        let geom = self.geom();
        let next_pose = surveyor_core::apply_move(
            &pose,
            action.move_kind,
            geom.l_width,
            geom.l_height,
            None,
        )
        .expect("expectimax only evaluates legal actions");
        let next_remaining =
            remaining - surveyor_core::action_cost(action, &self.cost);
        if !self.rules.fires(action.move_kind) {
            return self.value(belief, next_pose, next_remaining);
        }
        let h_before = belief.joint_l_entropy();
        match action.sensor {
            SensorKind::Local => {
                let cell_belief = belief.location_belief((next_pose.x, next_pose.y)).unwrap();
                let mut total = 0.0;
                for reading in 0..self.net.cardinalities.material {
                    let p: f64 = (0..self.net.cardinalities.location)
                        .map(|l| cell_belief.prob(l) * self.net.p_b_given_l.row(l).prob(reading))
                        .sum();
                    if p <= 0.0 {
                        continue;
                    }
                    let obs = Observation::Local(surveyor_core::LocalObservation {
                        cell: (next_pose.x, next_pose.y),
                        reading,
                    });
                    let updated = belief.updated(&obs, &self.net).unwrap();
                    let gain = h_before - updated.joint_l_entropy();
                    total += p * (gain + self.value(&updated, next_pose, next_remaining));
                }
                total
            }
            SensorKind::Remote => {
                let fp = footprint(&next_pose, SensorKind::Remote, &geom);
                let visible: Vec<(u64, (usize, usize))> = belief
                    .tracked_rocks()
                    .filter(|(_, rb)| fp.binary_search(&rb.cell).is_ok())
                    .map(|(id, rb)| (id, rb.cell))
                    .collect();
                // Reading distribution per visible rock under the current
                // belief, matching the sampler's marginal exactly.
                let reading_dists: Vec<Vec<f64>> = visible
                    .iter()
                    .map(|&(id, _)| {
                        let post = belief.rock_posterior(id, &self.net).unwrap();
                        (0..self.net.cardinalities.reading)
                            .map(|z| {
                                (0..self.net.cardinalities.rock)
                                    .map(|r| {
                                        post.prob(r)
                                            * (0..self.net.cardinalities.feature)
                                                .map(|f| {
                                                    self.net.p_f_given_r[0].row(r).prob(f)
                                                        * self.net.p_z_given_f[0].row(f).prob(z)
                                                })
                                                .sum::<f64>()
                                    })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect();
                let z_card = self.net.cardinalities.reading;
                let outcomes = z_card.pow(visible.len() as u32);
                let mut total = 0.0;
                for outcome in 0..outcomes {
                    let mut rest = outcome;
                    let mut p = 1.0;
                    let mut rocks = Vec::new();
                    for (i, &(id, cell)) in visible.iter().enumerate() {
                        let z = rest % z_card;
                        rest /= z_card;
                        p *= reading_dists[i][z];
                        rocks.push(ObservedRock {
                            id: Some(id),
                            cell,
                            readings: vec![z],
                        });
                    }
                    if p <= 0.0 {
                        continue;
                    }
                    let obs = Observation::Remote(RemoteObservation {
                        covered: fp.clone(),
                        rocks,
                    });
                    let updated = belief.updated(&obs, &self.net).unwrap();
                    let gain = h_before - updated.joint_l_entropy();
                    total += p * (gain + self.value(&updated, next_pose, next_remaining));
                }
                total
            }
        }
    }
}
