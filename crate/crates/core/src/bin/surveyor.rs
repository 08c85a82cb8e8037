//! Command-line front end: generate worlds, run single missions, run
//! benchmark matrices, and replay logged runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use surveyor_core::harness::replay::{replay, RunRecord};
use surveyor_core::{
    derive_seed, generate, make_policy, random_start, run_benchmark, run_mission, BenchmarkConfig,
    CostModel, KnowledgeNet, MissionSetup, PlannerConfig, PolicyKind, RockDensityPrior,
    SensingRules, WorldConfig, WorldState,
};

#[derive(Parser)]
#[command(name = "surveyor", version, about = "Belief-space survey planning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    /// 40x40 map, 800x800 rock grid.
    Full,
    /// 10x10 map, 200x200 rock grid.
    Desk,
}

impl Scale {
    fn config(self, seed: u64) -> WorldConfig {
        match self {
            Scale::Full => WorldConfig::full_scale(seed),
            Scale::Desk => WorldConfig::desk_scale(seed),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a world from the knowledge network and write it as JSON.
    Generate {
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// World-config JSON overriding --scale/--seed.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Knowledge-network JSON (defaults to the built-in network).
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the default knowledge network as JSON (the schema other
    /// networks should follow).
    Net {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a single mission and print its metrics.
    Run(RunArgs),
    /// Run a benchmark matrix from a config file.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        net: Option<PathBuf>,
        /// Directory for results.csv and manifest.json.
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
    /// Re-execute a logged run and verify its metrics.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    policy: PolicyArg,
    #[arg(long)]
    budget: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Saved world JSON; generated from --scale/--seed when absent.
    #[arg(long)]
    world: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "desk")]
    scale: Scale,
    #[arg(long)]
    net: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    cp: f64,
    #[arg(long, default_value_t = 20)]
    greedy_samples: usize,
    #[arg(long, default_value = "sim")]
    cost_preset: String,
    /// Write the full run record (config, trace, metrics) as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy)]
struct PolicyArg(PolicyKind);

impl std::str::FromStr for PolicyArg {
    type Err = surveyor_core::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(PolicyArg(s.parse()?))
    }
}

fn load_net(path: &Option<PathBuf>) -> anyhow::Result<KnowledgeNet> {
    match path {
        Some(p) => KnowledgeNet::load(p).with_context(|| format!("loading net {}", p.display())),
        None => Ok(KnowledgeNet::default()),
    }
}

fn load_world_config(path: &Path) -> anyhow::Result<WorldConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading world config {}", path.display()))?;
    let config: WorldConfig = serde_json::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Generate {
            scale,
            seed,
            config,
            net,
            out,
        } => {
            let world_config = match config {
                Some(path) => load_world_config(&path)?,
                None => scale.config(seed),
            };
            let net = load_net(&net)?;
            let world = generate(&world_config, &net)?;
            world.save(&out)?;
            println!(
                "world: {}x{} map, {} rocks, seed {} -> {}",
                world_config.l_width,
                world_config.l_height,
                world.rocks.len(),
                world_config.seed,
                out.display()
            );
        }
        Command::Net { out } => {
            KnowledgeNet::default().save(&out)?;
            println!("default knowledge network -> {}", out.display());
        }
        Command::Run(args) => run_single(args)?,
        Command::Benchmark {
            config,
            net,
            out_dir,
        } => run_matrix(&config, &net, &out_dir)?,
        Command::Replay { log, tolerance } => {
            let record = RunRecord::load(&log)?;
            let outcome = replay(&record)?;
            println!(
                "replayed {} steps: gain {:.6} bits, accuracy {:.6}",
                record.result.steps, outcome.information_gain_bits, outcome.accuracy
            );
            println!(
                "max deviation vs log: gain {:.3e}, accuracy {:.3e}",
                outcome.max_gain_deviation, outcome.max_accuracy_deviation
            );
            if outcome.max_gain_deviation > tolerance || outcome.max_accuracy_deviation > tolerance
            {
                bail!("replay diverged beyond tolerance {tolerance}");
            }
        }
    }
    Ok(())
}

fn run_single(args: RunArgs) -> anyhow::Result<()> {
    let net = load_net(&args.net)?;
    let world: WorldState = match &args.world {
        Some(path) => WorldState::load(path)
            .with_context(|| format!("loading world {}", path.display()))?,
        None => {
            let config = args.scale.config(derive_seed(&[args.seed, 1]));
            generate(&config, &net)?
        }
    };
    let planner_config = PlannerConfig {
        iterations: args.iterations,
        cp: args.cp,
        greedy_samples: args.greedy_samples,
        seed: derive_seed(&[args.seed, 3]),
        ..PlannerConfig::default()
    };
    let mut policy = make_policy(args.policy.0, &planner_config)?;
    let label = match args.policy.0 {
        PolicyKind::Mcts => format!("mcts-{}", args.iterations),
        other => other.to_string(),
    };
    let mut start_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[args.seed, 4]));
    let setup = MissionSetup {
        budget: args.budget,
        cost: CostModel::from_preset(&args.cost_preset)?,
        rules: SensingRules::default(),
        density: RockDensityPrior {
            lambda: world.config.rock_density,
        },
        start: random_start(&world, &mut start_rng),
        mission_seed: derive_seed(&[args.seed, 2]),
    };
    let result = run_mission(&world, &net, policy.as_mut(), &label, &setup)?;
    println!(
        "{} | budget {} | steps {} | gain {:.3} bits | accuracy {:.3} | {:.2}s",
        result.policy,
        result.budget,
        result.steps,
        result.information_gain_bits,
        result.accuracy,
        result.wall_seconds
    );
    if let Some(stats) = &result.search {
        if let Some(spi) = stats.seconds_per_iteration() {
            println!(
                "search: {} iterations, {:.4}s per iteration, rewards in [{:.3}, {:.3}]",
                stats.iterations, spi, stats.reward_min, stats.reward_max
            );
        }
    }
    if let Some(out) = args.out {
        let record = RunRecord {
            world_config: world.config.clone(),
            net,
            setup,
            result,
        };
        record.save(&out)?;
        println!("run record -> {}", out.display());
    }
    Ok(())
}

fn run_matrix(config_path: &Path, net_path: &Option<PathBuf>, out_dir: &Path) -> anyhow::Result<()> {
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("reading benchmark config {}", config_path.display()))?;
    let config: BenchmarkConfig = serde_json::from_str(&text)?;
    let net = load_net(net_path)?;
    let report = run_benchmark(&config, &net)?;

    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    fs::write(&csv_path, report.csv())?;

    #[derive(serde::Serialize)]
    struct Manifest<'a> {
        config: &'a BenchmarkConfig,
        summary: &'a [surveyor_core::harness::benchmark::SummaryCell],
        total_seconds: f64,
        mcts_seconds_per_iteration: Option<f64>,
    }
    let manifest = Manifest {
        config: &config,
        summary: &report.summary,
        total_seconds: report.total_seconds,
        mcts_seconds_per_iteration: report.mcts_seconds_per_iteration,
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    print!("{}", report.summary_text());
    if let Some(spi) = report.mcts_seconds_per_iteration {
        println!("mcts: {spi:.4}s per iteration (mean over all searches)");
    }
    println!(
        "{} trials in {:.1}s -> {} and {}",
        report.rows.len(),
        report.total_seconds,
        csv_path.display(),
        manifest_path.display()
    );
    Ok(())
}
