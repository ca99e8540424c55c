mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use bgp_sdn::experiment::ConfigMap;
use clap::{Args, Parser, Subcommand, ValueEnum};

const PRECEDENCE: &str = "Settings are resolved in this order, later wins: built-in defaults, \
the `--config` file (one `key = value` per line, `#` comments), then command-line flags.

Exit codes: 0 success, 2 domain or parse error, 3 unreachable topology, 4 I/O error.";

#[derive(Debug, Parser)]
#[command(name = "bgp-sdn", version, about = "BGP convergence time with SDN clusters", after_help = PRECEDENCE)]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo runs (per point for sweeps).
    #[arg(long, global = true)]
    runs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Handling of sampled graphs that leave nodes unreachable.
    #[arg(long, global = true, value_enum)]
    policy: Option<Policy>,
    /// Graph regenerations allowed per run under `--policy regenerate`.
    #[arg(long, global = true)]
    max_retries: Option<u32>,
    /// Flat `key = value` file with defaults for this command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Policy {
    Regenerate,
    ReachableOnly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TopologyKind {
    FullMesh,
    Poisson,
    PowerLaw,
    Tiered,
    /// Configuration model given by `--mu-d` and `--cv-d` (analytic only).
    ConfigModel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Form {
    Unrolled,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Floor {
    Error,
    Clamp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Variable {
    K,
    P22,
    K1,
}

#[derive(Debug, Default, Args)]
pub struct TopologyArgs {
    #[arg(long, value_enum)]
    topology: Option<TopologyKind>,
    /// Number of ASes.
    #[arg(long)]
    n: Option<usize>,
    /// SDN cluster size.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    p_edge: Option<f64>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    d_min: Option<usize>,
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    p11: Option<f64>,
    #[arg(long)]
    p12: Option<f64>,
    #[arg(long)]
    p22: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct EvalArgs {
    /// Configuration-model closed form.
    #[arg(long, value_enum)]
    cmrg_form: Option<Form>,
    /// Reaction to expected degrees below the floor.
    #[arg(long, value_enum)]
    floor_policy: Option<Floor>,
    #[arg(long)]
    degree_floor: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form expected convergence time.
    Analytic {
        #[command(flatten)]
        topo: TopologyArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Mean degree for `--topology config-model`.
        #[arg(long)]
        mu_d: Option<f64>,
        /// Degree coefficient of variation for `--topology config-model`.
        #[arg(long)]
        cv_d: Option<f64>,
        /// Evaluate a full mesh in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Monte Carlo batch on one topology.
    Simulate {
        #[command(flatten)]
        topo: TopologyArgs,
        /// Simulate on a fixed edge-list graph instead of sampling graphs.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Fixed announcer (with `--graph`); uniform when omitted.
        #[arg(long)]
        announcer: Option<usize>,
        /// Write the first run's event trace here (with `--graph`).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Penetration sweep comparing the closed form with simulation.
    Sweep {
        #[command(flatten)]
        topo: TopologyArgs,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long, value_enum)]
        sweep: Option<Variable>,
        /// Comma-separated sweep values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Tier-1/tier-2 case study over p22 and k1.
    Core {
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        p11: Option<f64>,
        #[arg(long)]
        p12: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Comma-separated p22 values.
        #[arg(long)]
        p22_values: Option<String>,
        /// Comma-separated k1 values.
        #[arg(long)]
        k1_values: Option<String>,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Sample one graph and write it as an edge list.
    ExportGraph {
        #[command(flatten)]
        topo: TopologyArgs,
    },
    /// Read an edge list and summarize it.
    ImportGraph {
        path: PathBuf,
        /// Node to check reachability from; defaults to the first eligible one.
        #[arg(long)]
        announcer: Option<usize>,
    },
}

fn set<T: ToString>(cfg: &mut ConfigMap, key: &str, value: Option<T>) {
    if let Some(v) = value {
        cfg.set(key, v.to_string());
    }
}

impl TopologyArgs {
    fn apply(&self, cfg: &mut ConfigMap) {
        let kind = self.topology.map(|t| {
            t.to_possible_value()
                .expect("no skipped variants")
                .get_name()
                .to_string()
        });
        set(cfg, "topology", kind);
        set(cfg, "n", self.n);
        set(cfg, "k", self.k);
        set(cfg, "lambda", self.lambda);
        set(cfg, "p_edge", self.p_edge);
        set(cfg, "exponent", self.exponent);
        set(cfg, "d_min", self.d_min);
        set(cfg, "d_max", self.d_max);
        set(cfg, "n1", self.n1);
        set(cfg, "n2", self.n2);
        set(cfg, "k1", self.k1);
        set(cfg, "p11", self.p11);
        set(cfg, "p12", self.p12);
        set(cfg, "p22", self.p22);
    }
}

impl EvalArgs {
    fn apply(&self, cfg: &mut ConfigMap) {
        set(
            cfg,
            "cmrg_form",
            self.cmrg_form.map(|f| match f {
                Form::Unrolled => "unrolled",
                Form::AsPrinted => "as-printed",
            }),
        );
        set(
            cfg,
            "floor_policy",
            self.floor_policy.map(|f| match f {
                Floor::Error => "error",
                Floor::Clamp => "clamp",
            }),
        );
        set(cfg, "degree_floor", self.degree_floor);
    }
}

impl Common {
    fn apply(&self, cfg: &mut ConfigMap) {
        set(cfg, "seed", self.seed);
        set(cfg, "runs", self.runs);
        set(
            cfg,
            "policy",
            self.policy.map(|p| match p {
                Policy::Regenerate => "regenerate",
                Policy::ReachableOnly => "reachable-only",
            }),
        );
        set(cfg, "max_retries", self.max_retries);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
