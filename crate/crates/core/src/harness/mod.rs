//! Mission executor and benchmark runner.
//!
//! A mission is the closed loop: plan an action, move, fire the sensor
//! against ground truth, fold the observation into the belief, pay the
//! cost, repeat until no legal action fits the remaining budget. Every
//! mission is fully determined by (world seed, mission seed, policy seed).

pub mod benchmark;
pub mod replay;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{BeliefState, RockDensityPrior};
use crate::error::{Error, Result};
use crate::knowledge::KnowledgeNet;
use crate::metrics::accuracy_score;
use crate::planners::{PlanContext, Policy, SearchStats};
use crate::sensing::{
    action_cost, apply_move, legal_actions, CostModel, Heading, Pose, SensingAction, SensingRules,
};
use crate::world::{true_observe, WorldState};

/// Stable seed derivation: fold the parts through splitmix64 so trial,
/// policy and budget indices produce independent streams.
pub fn derive_seed(parts: &[u64]) -> u64 {
    fn splitmix64(mut x: u64) -> u64 {
        x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        x ^ (x >> 31)
    }
    let mut acc = 0x6A09_E667_F3BC_C909u64;
    for &part in parts {
        acc = splitmix64(acc ^ part);
    }
    acc
}

/// Uniform start pose over obstacle-free map cells and the eight headings.
pub fn random_start(world: &WorldState, rng: &mut ChaCha8Rng) -> Pose {
    let (w, h) = (world.l_truth.width(), world.l_truth.height());
    loop {
        let x = rng.random_range(0..w);
        let y = rng.random_range(0..h);
        if *world.obstacles.at(x, y) {
            continue;
        }
        let heading = Heading::ALL[rng.random_range(0..8)];
        return Pose::new(x, y, heading);
    }
}

/// Per-mission knobs. `mission_seed` drives the sensor-noise stream;
/// policies carry their own seeded stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionSetup {
    pub budget: u32,
    pub cost: CostModel,
    pub rules: SensingRules,
    pub density: RockDensityPrior,
    pub start: Pose,
    pub mission_seed: u64,
}

/// One executed action with the metrics right after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub step: usize,
    pub action: SensingAction,
    pub cost: u32,
    /// Pose after the movement, i.e. where the sensor fired.
    pub pose: Pose,
    pub cumulative_cost: u32,
    pub cumulative_gain_bits: f64,
    pub accuracy: f64,
}

/// Everything a finished mission reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub policy: String,
    pub budget: u32,
    pub world_seed: u64,
    pub mission_seed: u64,
    pub start: Pose,
    pub information_gain_bits: f64,
    pub accuracy: f64,
    pub steps: usize,
    pub cost_spent: u32,
    pub trace: Vec<ActionRecord>,
    /// Wall-clock time; excluded from deterministic outputs.
    pub wall_seconds: f64,
    pub search: Option<SearchStats>,
}

/// Runs the sense-plan-act loop to budget exhaustion. The belief starts
/// uniform; every observation comes from ground truth.
pub fn run_mission(
    world: &WorldState,
    net: &KnowledgeNet,
    policy: &mut dyn Policy,
    label: &str,
    setup: &MissionSetup,
) -> Result<TrialResult> {
    let started = Instant::now();
    setup.cost.validate()?;
    let geom = world.geometry();
    if !geom.contains_l((setup.start.x, setup.start.y)) {
        return Err(Error::OutOfBounds {
            x: setup.start.x,
            y: setup.start.y,
            width: geom.l_width,
            height: geom.l_height,
        });
    }
    let mut belief = BeliefState::uniform(geom, net)?;
    let initial_entropy = belief.joint_l_entropy();
    let mut rng = ChaCha8Rng::seed_from_u64(setup.mission_seed);
    let mut pose = setup.start;
    let mut remaining = setup.budget;
    let mut trace = Vec::new();

    loop {
        let legal = legal_actions(
            &pose,
            remaining,
            &setup.cost,
            geom.l_width,
            geom.l_height,
            Some(&world.obstacles),
        );
        if legal.is_empty() {
            break;
        }
        let ctx = PlanContext {
            belief: &belief,
            pose,
            remaining,
            net,
            cost: setup.cost,
            rules: setup.rules,
            density: setup.density,
            obstacles: Some(&world.obstacles),
        };
        let action = match policy.plan(&ctx) {
            Ok(action) => action,
            Err(Error::NoLegalActions) => break,
            Err(e) => return Err(e),
        };
        let cost = action_cost(action, &setup.cost);
        if cost > remaining {
            return Err(Error::IllegalAction(format!(
                "policy '{label}' chose an action costing {cost} with {remaining} remaining"
            )));
        }
        pose = apply_move(
            &pose,
            action.move_kind,
            geom.l_width,
            geom.l_height,
            Some(&world.obstacles),
        )?;
        remaining -= cost;
        if setup.rules.fires(action.move_kind) {
            let obs = true_observe(world, &pose, action.sensor, net, &mut rng)?;
            belief.apply(&obs, net)?;
        }
        trace.push(ActionRecord {
            step: trace.len(),
            action,
            cost,
            pose,
            cumulative_cost: setup.budget - remaining,
            cumulative_gain_bits: initial_entropy - belief.joint_l_entropy(),
            accuracy: accuracy_score(&belief, world),
        });
    }

    Ok(TrialResult {
        policy: label.to_string(),
        budget: setup.budget,
        world_seed: world.config.seed,
        mission_seed: setup.mission_seed,
        start: setup.start,
        information_gain_bits: initial_entropy - belief.joint_l_entropy(),
        accuracy: accuracy_score(&belief, world),
        steps: trace.len(),
        cost_spent: setup.budget - remaining,
        trace,
        wall_seconds: started.elapsed().as_secs_f64(),
        search: policy.search_stats().copied(),
    })
}
