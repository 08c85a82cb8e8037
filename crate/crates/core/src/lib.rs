//! Belief-space survey planning over gridded environments.
//!
//! The crate simulates a robot surveying a map whose cells carry a latent
//! location class. The robot holds a discrete Bayesian-network belief over
//! that class, coupled spatially between cells, and chooses among ten
//! movement+sensor actions under a sensing budget. Planners (Monte Carlo
//! tree search plus random/fixed/greedy baselines) pick actions to maximize
//! information gain on the location belief; the harness runs full missions
//! and benchmark matrices reproducibly from a master seed.

pub mod belief;
pub mod dist;
pub mod error;
pub mod grid;
pub mod harness;
pub mod knowledge;
pub mod metrics;
pub mod observation;
pub mod planners;
pub mod sensing;
pub mod stats;
pub mod world;

pub use belief::{BeliefState, RockDensityPrior};
pub use dist::{entropy, Categorical, Cpt};
pub use error::{Error, Result};
pub use harness::benchmark::{run_benchmark, BenchmarkConfig, BenchmarkReport, PolicySpec};
pub use harness::replay::{replay, RunRecord};
pub use harness::{derive_seed, random_start, run_mission, MissionSetup, TrialResult};
pub use knowledge::{Cardinalities, KnowledgeNet, SpatialCoupling};
pub use metrics::{accuracy_score, information_gain};
pub use observation::{LocalObservation, ObservedRock, Observation, RemoteObservation};
pub use planners::{
    make_policy, rollout, ucb, FixedPlanner, GreedyPlanner, MctsPlanner, PlanContext,
    PlannerConfig, Policy, PolicyKind, RandomPlanner, SearchStats,
};
pub use sensing::{
    action_cost, apply_move, legal_actions, CostModel, Heading, MoveKind, Pose, SensingAction,
    SensingRules, SensorKind,
};
pub use world::{footprint, generate, true_observe, GridGeometry, Rock, WorldConfig, WorldState};
