//! Batched trial runner: a (policy x budget x trial) matrix with paired
//! seeding, deterministic CSV output and a mean/std summary per cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::RockDensityPrior;
use crate::error::{Error, Result};
use crate::knowledge::KnowledgeNet;
use crate::planners::{make_policy, PlannerConfig, PolicyKind};
use crate::sensing::{CostModel, SensingRules};
use crate::stats::{mean, sample_std};
use crate::world::{generate, WorldConfig};

use super::{derive_seed, random_start, run_mission, MissionSetup, TrialResult};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One policy column of the benchmark matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_samples: Option<usize>,
}

impl PolicySpec {
    pub fn of_kind(kind: PolicyKind) -> Self {
        Self {
            kind,
            label: None,
            iterations: None,
            cp: None,
            greedy_samples: None,
        }
    }

    pub fn mcts(iterations: usize) -> Self {
        Self {
            iterations: Some(iterations),
            ..Self::of_kind(PolicyKind::Mcts)
        }
    }

    /// Display label: explicit label, or `mcts-<iterations>` for MCTS, or
    /// the policy name.
    pub fn resolved_label(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        match self.kind {
            PolicyKind::Mcts => format!(
                "mcts-{}",
                self.iterations.unwrap_or(PlannerConfig::default().iterations)
            ),
            other => other.to_string(),
        }
    }

    pub fn planner_config(&self, seed: u64) -> PlannerConfig {
        let defaults = PlannerConfig::default();
        PlannerConfig {
            iterations: self.iterations.unwrap_or(defaults.iterations),
            cp: self.cp.unwrap_or(defaults.cp),
            greedy_samples: self.greedy_samples.unwrap_or(defaults.greedy_samples),
            seed,
            log2_exploration: defaults.log2_exploration,
        }
    }
}

fn default_cost_preset() -> String {
    "sim".to_string()
}

fn default_paired() -> bool {
    true
}

/// Full benchmark description; serializable so a run can be replayed from
/// its manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    /// World template; the per-trial seed overrides `world.seed`.
    pub world: WorldConfig,
    pub policies: Vec<PolicySpec>,
    pub budgets: Vec<u32>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_cost_preset")]
    pub cost_preset: String,
    /// Paired evaluation: every policy/budget cell sees the same worlds and
    /// start poses. When false each cell draws fresh worlds.
    #[serde(default = "default_paired")]
    pub paired: bool,
    /// Rock-density rate the planners assume; defaults to the world's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner_density: Option<f64>,
    #[serde(default)]
    pub rules: Option<SensingRules>,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        if self.policies.is_empty() || self.budgets.is_empty() {
            return Err(Error::InvalidConfig(
                "benchmark needs at least one policy and one budget".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.budgets.iter().any(|&b| b == 0) {
            return Err(Error::InvalidConfig("budgets must be positive".into()));
        }
        CostModel::from_preset(&self.cost_preset)?;
        Ok(())
    }
}

/// Mean and sample-σ of one (policy, budget) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub policy: String,
    pub budget: u32,
    pub trials: usize,
    pub gain_mean: f64,
    pub gain_std: f64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<TrialResult>,
    pub summary: Vec<SummaryCell>,
    /// Mean wall-clock seconds per tree-search iteration, aggregated over
    /// every MCTS planning call in the run.
    pub mcts_seconds_per_iteration: Option<f64>,
    pub total_seconds: f64,
}

impl BenchmarkReport {
    /// Per-trial rows in deterministic order and formatting. Timing is
    /// deliberately excluded so reruns are byte-identical.
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "policy,budget,trial,world_seed,mission_seed,steps,cost_spent,information_gain_bits,accuracy\n",
        );
        let trials = trial_count_of(&self.rows);
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:.6},{:.6}\n",
                row.policy,
                row.budget,
                i % trials,
                row.world_seed,
                row.mission_seed,
                row.steps,
                row.cost_spent,
                row.information_gain_bits,
                row.accuracy,
            ));
        }
        out
    }

    /// Aligned mean(σ) table, one row per policy, one column pair per budget.
    pub fn summary_text(&self) -> String {
        let mut budgets: Vec<u32> = self.summary.iter().map(|c| c.budget).collect();
        budgets.sort_unstable();
        budgets.dedup();
        let mut policies: Vec<String> = Vec::new();
        for cell in &self.summary {
            if !policies.contains(&cell.policy) {
                policies.push(cell.policy.clone());
            }
        }
        let cell_of = |policy: &str, budget: u32| {
            self.summary
                .iter()
                .find(|c| c.policy == policy && c.budget == budget)
        };
        let mut out = String::new();
        for (title, pick) in [
            ("information gain (bits)", 0),
            ("accuracy score", 1),
        ] {
            out.push_str(&format!("{title}\n"));
            out.push_str(&format!("{:<12}", "policy"));
            for &b in &budgets {
                out.push_str(&format!("{:>20}", format!("budget {b}")));
            }
            out.push('\n');
            for policy in &policies {
                out.push_str(&format!("{policy:<12}"));
                for &b in &budgets {
                    match cell_of(policy, b) {
                        Some(c) => {
                            let (m, s) = if pick == 0 {
                                (c.gain_mean, c.gain_std)
                            } else {
                                (c.accuracy_mean, c.accuracy_std)
                            };
                            out.push_str(&format!("{:>20}", format!("{m:.2} ({s:.2})")));
                        }
                        None => out.push_str(&format!("{:>20}", "-")),
                    }
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }

    /// Gains of one (policy label, budget) cell in trial order.
    pub fn cell_gains(&self, policy: &str, budget: u32) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.policy == policy && r.budget == budget)
            .map(|r| r.information_gain_bits)
            .collect()
    }

    pub fn cell_accuracies(&self, policy: &str, budget: u32) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.policy == policy && r.budget == budget)
            .map(|r| r.accuracy)
            .collect()
    }
}

fn trial_count_of(rows: &[TrialResult]) -> usize {
    // Rows are emitted trial-major within each cell.
    rows.iter()
        .take_while(|r| r.policy == rows[0].policy && r.budget == rows[0].budget)
        .count()
        .max(1)
}

/// Runs the full matrix. Trials are independent and run in parallel; the
/// output order (policy-major, then budget, then trial) is deterministic.
pub fn run_benchmark(config: &BenchmarkConfig, net: &KnowledgeNet) -> Result<BenchmarkReport> {
    let started = std::time::Instant::now();
    config.validate()?;
    net.validate()?;
    let cost = CostModel::from_preset(&config.cost_preset)?;
    let rules = config.rules.unwrap_or_default();
    let density = RockDensityPrior {
        lambda: config.planner_density.unwrap_or(config.world.rock_density),
    };

    let mut tasks = Vec::new();
    for (pi, policy) in config.policies.iter().enumerate() {
        for &budget in &config.budgets {
            for trial in 0..config.trials {
                tasks.push((pi, policy.clone(), budget, trial));
            }
        }
    }

    let rows: Result<Vec<TrialResult>> = tasks
        .par_iter()
        .map(|(pi, spec, budget, trial)| {
            let world_seed = if config.paired {
                derive_seed(&[config.master_seed, 1, *trial as u64])
            } else {
                derive_seed(&[
                    config.master_seed,
                    1,
                    *trial as u64,
                    *pi as u64,
                    *budget as u64,
                ])
            };
            let mut world_config = config.world.clone();
            world_config.seed = world_seed;
            let world = generate(&world_config, net)?;
            let mut start_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[world_seed, 4]));
            let start = random_start(&world, &mut start_rng);
            let mission_seed = derive_seed(&[
                config.master_seed,
                2,
                *trial as u64,
                *pi as u64,
                *budget as u64,
            ]);
            let policy_seed = derive_seed(&[mission_seed, 3]);
            let mut policy = make_policy(spec.kind, &spec.planner_config(policy_seed))?;
            let setup = MissionSetup {
                budget: *budget,
                cost,
                rules,
                density,
                start,
                mission_seed,
            };
            run_mission(&world, net, policy.as_mut(), &spec.resolved_label(), &setup)
        })
        .collect();
    let rows = rows?;

    let mut summary = Vec::new();
    for policy in config.policies.iter().map(|p| p.resolved_label()) {
        for &budget in &config.budgets {
            let gains: Vec<f64> = rows
                .iter()
                .filter(|r| r.policy == policy && r.budget == budget)
                .map(|r| r.information_gain_bits)
                .collect();
            let accs: Vec<f64> = rows
                .iter()
                .filter(|r| r.policy == policy && r.budget == budget)
                .map(|r| r.accuracy)
                .collect();
            summary.push(SummaryCell {
                policy: policy.clone(),
                budget,
                trials: gains.len(),
                gain_mean: mean(&gains),
                gain_std: sample_std(&gains),
                accuracy_mean: mean(&accs),
                accuracy_std: sample_std(&accs),
            });
        }
    }

    let (iters, secs) = rows
        .iter()
        .filter_map(|r| r.search.as_ref())
        .fold((0u64, 0.0f64), |(i, s), st| {
            (i + st.iterations, s + st.search_seconds)
        });
    let mcts_seconds_per_iteration = (iters > 0).then(|| secs / iters as f64);

    Ok(BenchmarkReport {
        rows,
        summary,
        mcts_seconds_per_iteration,
        total_seconds: started.elapsed().as_secs_f64(),
    })
}
