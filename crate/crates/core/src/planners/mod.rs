//! Planner policies behind a single interface: UCT Monte Carlo tree search
//! plus the random, fixed-pattern, and sampled-greedy baselines.

mod fixed;
mod greedy;
mod mcts;
mod random;

pub use fixed::FixedPlanner;
pub use greedy::GreedyPlanner;
pub use mcts::{rollout, ucb, MctsPlanner};
pub use random::RandomPlanner;

use serde::{Deserialize, Serialize};

use crate::belief::{BeliefState, RockDensityPrior};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::knowledge::KnowledgeNet;
use crate::sensing::{CostModel, Pose, SensingAction, SensingRules};

/// Tuning knobs shared by the policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Tree-search iterations per planning call.
    pub iterations: usize,
    /// UCB exploration constant.
    pub cp: f64,
    /// Observation samples per action for the greedy baseline.
    pub greedy_samples: usize,
    /// Seed for the policy's private random stream.
    pub seed: u64,
    /// Use log base 2 instead of the natural log in the UCB exploration
    /// term.
    pub log2_exploration: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            cp: 0.1,
            greedy_samples: 20,
            seed: 0,
            log2_exploration: false,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.cp < 0.0 {
            return Err(Error::InvalidConfig("cp must be >= 0".into()));
        }
        if self.greedy_samples == 0 {
            return Err(Error::InvalidConfig("greedy_samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// Everything a policy may look at when choosing the next action. Ground
/// truth is deliberately absent; the obstacle mask is the a-priori map the
/// robot is allowed to know.
pub struct PlanContext<'a> {
    pub belief: &'a BeliefState,
    pub pose: Pose,
    pub remaining: u32,
    pub net: &'a KnowledgeNet,
    pub cost: CostModel,
    pub rules: SensingRules,
    pub density: RockDensityPrior,
    pub obstacles: Option<&'a Grid<bool>>,
}

/// Aggregate search statistics across a policy's planning calls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub iterations: u64,
    pub rollouts: u64,
    pub reward_min: f64,
    pub reward_max: f64,
    pub search_seconds: f64,
}

impl Default for SearchStats {
    fn default() -> Self {
        Self {
            iterations: 0,
            rollouts: 0,
            reward_min: f64::INFINITY,
            reward_max: f64::NEG_INFINITY,
            search_seconds: 0.0,
        }
    }
}

impl SearchStats {
    pub fn record_reward(&mut self, reward: f64) {
        self.rollouts += 1;
        self.reward_min = self.reward_min.min(reward);
        self.reward_max = self.reward_max.max(reward);
    }

    pub fn seconds_per_iteration(&self) -> Option<f64> {
        (self.iterations > 0).then(|| self.search_seconds / self.iterations as f64)
    }
}

/// A planning policy. Policies own their random stream, so a given seed
/// replays the same decisions.
pub trait Policy {
    fn name(&self) -> &str;

    /// Chooses the next action, or `Error::NoLegalActions` when nothing fits
    /// the remaining budget (the caller then ends the mission).
    fn plan(&mut self, ctx: &PlanContext) -> Result<SensingAction>;

    fn search_stats(&self) -> Option<&SearchStats> {
        None
    }
}

/// The selectable policy family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Random,
    Fixed,
    Greedy,
    Mcts,
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "fixed" => Ok(PolicyKind::Fixed),
            "greedy" => Ok(PolicyKind::Greedy),
            "mcts" => Ok(PolicyKind::Mcts),
            other => Err(Error::InvalidConfig(format!(
                "unknown policy '{other}' (expected random, fixed, greedy, or mcts)"
            ))),
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicyKind::Random => write!(f, "random"),
            PolicyKind::Fixed => write!(f, "fixed"),
            PolicyKind::Greedy => write!(f, "greedy"),
            PolicyKind::Mcts => write!(f, "mcts"),
        }
    }
}

pub fn make_policy(kind: PolicyKind, config: &PlannerConfig) -> Result<Box<dyn Policy>> {
    config.validate()?;
    Ok(match kind {
        PolicyKind::Random => Box::new(RandomPlanner::new(config.seed)),
        PolicyKind::Fixed => Box::new(FixedPlanner::new()),
        PolicyKind::Greedy => Box::new(GreedyPlanner::new(config.clone())),
        PolicyKind::Mcts => Box::new(MctsPlanner::new(config.clone())),
    })
}
