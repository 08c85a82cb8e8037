//! Self-contained run records and action-log replay.
//!
//! A [`RunRecord`] embeds everything a mission needs for reproduction: the
//! world config (worlds regenerate from their seed), the knowledge network,
//! the mission setup, and the executed trace. Replaying re-executes the
//! logged actions against the regenerated world with the recorded sensor
//! stream and re-derives the metrics, so a record can be audited without
//! the policy that produced it.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::knowledge::KnowledgeNet;
use crate::metrics::accuracy_score;
use crate::sensing::{action_cost, apply_move};
use crate::world::{generate, true_observe, WorldConfig};

use super::{MissionSetup, TrialResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub world_config: WorldConfig,
    pub net: KnowledgeNet,
    pub setup: MissionSetup,
    pub result: TrialResult,
}

impl RunRecord {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let record: Self = serde_json::from_reader(BufReader::new(file))?;
        record.net.validate()?;
        record.world_config.validate()?;
        Ok(record)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub information_gain_bits: f64,
    pub accuracy: f64,
    /// Largest absolute deviation between replayed and logged per-step
    /// cumulative gain.
    pub max_gain_deviation: f64,
    pub max_accuracy_deviation: f64,
}

/// Re-executes a record's action log and re-scores it.
pub fn replay(record: &RunRecord) -> Result<ReplayOutcome> {
    let world = generate(&record.world_config, &record.net)?;
    let geom = world.geometry();
    let mut belief = BeliefState::uniform(geom, &record.net)?;
    let initial_entropy = belief.joint_l_entropy();
    let mut rng = ChaCha8Rng::seed_from_u64(record.setup.mission_seed);
    let mut pose = record.setup.start;
    let mut remaining = record.setup.budget;
    let mut max_gain_dev = 0.0f64;
    let mut max_acc_dev = 0.0f64;

    for record_step in &record.result.trace {
        let action = record_step.action;
        let cost = action_cost(action, &record.setup.cost);
        if cost > remaining {
            return Err(Error::IllegalAction(format!(
                "logged step {} overspends the budget",
                record_step.step
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
        if record.setup.rules.fires(action.move_kind) {
            let obs = true_observe(&world, &pose, action.sensor, &record.net, &mut rng)?;
            belief.apply(&obs, &record.net)?;
        }
        if pose != record_step.pose {
            return Err(Error::IllegalAction(format!(
                "replayed pose diverged at step {}",
                record_step.step
            )));
        }
        let gain = initial_entropy - belief.joint_l_entropy();
        let accuracy = accuracy_score(&belief, &world);
        max_gain_dev = max_gain_dev.max((gain - record_step.cumulative_gain_bits).abs());
        max_acc_dev = max_acc_dev.max((accuracy - record_step.accuracy).abs());
    }

    Ok(ReplayOutcome {
        information_gain_bits: initial_entropy - belief.joint_l_entropy(),
        accuracy: accuracy_score(&belief, &world),
        max_gain_deviation: max_gain_dev,
        max_accuracy_deviation: max_acc_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::RockDensityPrior;
    use crate::harness::{derive_seed, run_mission};
    use crate::planners::{make_policy, PlannerConfig, PolicyKind};
    use crate::sensing::{CostModel, Heading, Pose, SensingRules};

    fn record_of(kind: PolicyKind, budget: u32) -> RunRecord {
        let net = KnowledgeNet::default();
        let world_config = WorldConfig::desk_scale(23);
        let world = generate(&world_config, &net).unwrap();
        let setup = MissionSetup {
            budget,
            cost: CostModel::sim(),
            rules: SensingRules::default(),
            density: RockDensityPrior::default(),
            start: Pose::new(4, 4, Heading::North),
            mission_seed: derive_seed(&[23, 5]),
        };
        let mut policy = make_policy(
            kind,
            &PlannerConfig {
                iterations: 10,
                greedy_samples: 4,
                seed: 3,
                ..PlannerConfig::default()
            },
        )
        .unwrap();
        let result = run_mission(&world, &net, policy.as_mut(), "p", &setup).unwrap();
        RunRecord {
            world_config,
            net,
            setup,
            result,
        }
    }

    #[test]
    fn replay_reproduces_logged_metrics_exactly() {
        for kind in [PolicyKind::Random, PolicyKind::Mcts] {
            let record = record_of(kind, 20);
            let outcome = replay(&record).unwrap();
            assert!(outcome.max_gain_deviation < 1e-9);
            assert!(outcome.max_accuracy_deviation < 1e-9);
            assert!(
                (outcome.information_gain_bits - record.result.information_gain_bits).abs() < 1e-9
            );
            assert!((outcome.accuracy - record.result.accuracy).abs() < 1e-9);
        }
    }

    #[test]
    fn record_round_trips_through_json() {
        let record = record_of(PolicyKind::Random, 10);
        let dir = std::env::temp_dir().join("surveyor_replay_roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.json");
        record.save(&path).unwrap();
        let back = RunRecord::load(&path).unwrap();
        assert_eq!(record, back);
        let outcome = replay(&back).unwrap();
        assert!(outcome.max_gain_deviation < 1e-9);
    }

    #[test]
    fn tampered_log_is_rejected() {
        let mut record = record_of(PolicyKind::Random, 10);
        if let Some(step) = record.result.trace.first_mut() {
            step.pose.x = (step.pose.x + 3) % 10;
        }
        assert!(replay(&record).is_err());
    }
}
