//! Command-line front end for colouring experiments: enumeration, meta
//! graphs, mixing diagnostics, graph construction and bound verification.
//!
//! Run examples:
//!   recolor enumerate --family j --l 2 --delta 3
//!   recolor enumerate --graph k4.txt --k 4
//!   recolor recolouring-graph --family cycle --n 6 --k 3
//!   recolor mixing --exact --family path --n 2 --k 3
//!   recolor mixing --lowerbound --k-level 5 --delta 3 --trials 500 --seed 7
//!   recolor construct --family random-lift --delta 3 --fibers 20 --output lift.txt
//!   recolor verify --check freeze-probability --family j --l 2 --delta 3
//!   recolor random-regular-scan --n 8,12,16 --delta 3 --trials 200
//!   recolor girth-hunt --delta 3 --girth 5 --fibers 50
//!
//! Every run echoes its seed (drawn at random when absent, or taken from
//! RECOLOR_SEED) and its budgets, so a report replays byte-for-byte apart
//! from the `timing` field. The exit code is 0 exactly when every verdict
//! in the report is satisfied.

mod commands;
mod family;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use recolor_core::glauber::Restrict;
use recolor_core::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use family::GraphSource;

#[derive(Parser)]
#[command(
    name = "recolor",
    version,
    about = "Experiments on frozen colourings, recolouring graphs and single-site dynamics"
)]
struct Cli {
    /// Seed for every random choice in the run (falls back to RECOLOR_SEED,
    /// then to a randomly drawn value; always echoed in the report).
    #[arg(long, global = true, env = "RECOLOR_SEED")]
    seed: Option<u64>,

    /// Node budget for exhaustive enumeration and meta-graph construction.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget_nodes: u64,

    /// Total chain-step budget for sampling experiments.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget_steps: u64,

    /// Wall-clock budget in seconds for trial loops; 0 means no cap.
    #[arg(long, global = true, default_value_t = 0)]
    budget_seconds: u64,

    /// Destination file: the report for json format, the data series for
    /// csv, the graph text for construct.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Report format. csv needs --output (the series goes to the file, the
    /// report stays on stdout) and a command with a data series.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Count proper, frugal and frozen colourings of one graph.
    Enumerate(EnumerateArgs),
    /// Build the recolouring graph and summarize its structure.
    RecolouringGraph(RecolouringGraphArgs),
    /// Exact distance-to-uniform profiles, or the seeded slow-mixing
    /// experiment on J(2k).
    Mixing(MixingArgs),
    /// Emit a graph from a named family as edge-list text.
    Construct(ConstructArgs),
    /// Check a named bound against its exhaustive oracle.
    Verify(VerifyArgs),
    /// Frozen-colouring frequency across random regular graphs.
    RandomRegularScan(RandomRegularScanArgs),
    /// Search random lifts for a witness of the target girth.
    GirthHunt(GirthHuntArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Palette size; defaults to Δ+1 of the resolved graph.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct RecolouringGraphArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Palette size; defaults to Δ+1 of the resolved graph.
    #[arg(long)]
    k: Option<usize>,
    /// Write the meta graph as edge-list text.
    #[arg(long, value_name = "PATH")]
    export_edges: Option<PathBuf>,
    /// Write the state table (id → colouring) as JSON.
    #[arg(long, value_name = "PATH")]
    export_states: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["exact", "lowerbound"]))]
struct MixingArgs {
    /// Exact profile d(t) on a fully enumerated state space.
    #[arg(long)]
    exact: bool,
    /// Monte-Carlo lower-bound certificate on J(2k) from the planted
    /// near-frozen start.
    #[arg(long)]
    lowerbound: bool,
    #[command(flatten)]
    source: GraphSource,
    /// Palette size; defaults to Δ+1 (exact mode).
    #[arg(long)]
    k: Option<usize>,
    /// State set for the exact profile: all, or nonfrozen.
    #[arg(long, default_value = "all")]
    restrict: String,
    /// Horizon for the exact profile; defaults to doubling until the
    /// quarter mixing time appears.
    #[arg(long)]
    t_max: Option<usize>,
    /// Level parameter k of J(2k) (lower-bound mode).
    #[arg(long)]
    k_level: Option<usize>,
    /// Trajectories for the lower-bound estimate.
    #[arg(long, default_value_t = 500)]
    trials: u64,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    source: GraphSource,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: freeze-probability, greedy-upper, peel-step,
    /// frozen-count-envelope, lift-pair-identity.
    #[arg(long)]
    check: String,
    #[command(flatten)]
    source: GraphSource,
    /// Peeled vertex for peel-step; defaults to every maximum-degree vertex.
    #[arg(long)]
    x: Option<usize>,
    /// Also write one bound report per line for aggregation.
    #[arg(long, value_name = "PATH")]
    jsonl: Option<PathBuf>,
}

#[derive(Args)]
struct RandomRegularScanArgs {
    /// Vertex counts to scan (repeatable or comma-separated).
    #[arg(long, required = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Degree of the sampled graphs.
    #[arg(long)]
    delta: usize,
    /// Samples per vertex count.
    #[arg(long, default_value_t = 200)]
    trials: u64,
}

#[derive(Args)]
struct GirthHuntArgs {
    /// Degree of the lifted clique (lift degree Δ).
    #[arg(long)]
    delta: usize,
    /// Target girth.
    #[arg(long)]
    girth: usize,
    /// Copies of each base vertex.
    #[arg(long)]
    fibers: usize,
    /// Sampling budget.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Prefix for the emitted witness files
    /// (<prefix>-graph.txt, <prefix>-colouring.txt).
    #[arg(long, default_value = "witness")]
    emit: String,
}

/// Run-wide settings shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub budget_nodes: u64,
    pub budget_steps: u64,
    pub budget_seconds: u64,
    pub started: Instant,
}

impl Ctx {
    /// Whether the wall-clock budget still allows more trial work.
    pub fn time_left(&self) -> bool {
        self.budget_seconds == 0 || self.started.elapsed().as_secs() < self.budget_seconds
    }
}

#[derive(Serialize)]
pub struct Verdict {
    pub name: String,
    pub satisfied: bool,
}

/// What a command produced, before envelope assembly.
#[derive(Default)]
pub struct Outcome {
    /// Echo of the command parameters.
    pub params: Value,
    pub result: Value,
    pub verdicts: Vec<Verdict>,
    /// CSV body for commands with a plottable series.
    pub series: Option<String>,
    /// Artifact text for construct (the graph itself).
    pub artifact: Option<String>,
}

#[derive(Serialize)]
struct Budgets {
    nodes: u64,
    steps: u64,
    seconds: u64,
}

#[derive(Serialize)]
struct ConfigEcho {
    seed: u64,
    budgets: Budgets,
    output: Option<String>,
    format: &'static str,
    params: Value,
}

#[derive(Serialize)]
struct Timing {
    timestamp_ms: u128,
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct Envelope {
    command: String,
    config: ConfigEcho,
    result: Value,
    verdicts: Vec<Verdict>,
    timing: Timing,
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Enumerate(_) => "enumerate",
        Command::RecolouringGraph(_) => "recolouring-graph",
        Command::Mixing(_) => "mixing",
        Command::Construct(_) => "construct",
        Command::Verify(_) => "verify",
        Command::RandomRegularScan(_) => "random-regular-scan",
        Command::GirthHunt(_) => "girth-hunt",
    }
}

fn dispatch(command: &Command, ctx: &Ctx) -> Result<Outcome> {
    match command {
        Command::Enumerate(a) => commands::enumerate(&a.source, a.k, ctx),
        Command::RecolouringGraph(a) => commands::recolouring_graph(
            &a.source,
            a.k,
            a.export_edges.as_deref(),
            a.export_states.as_deref(),
            ctx,
        ),
        Command::Mixing(a) => {
            if a.exact {
                let restrict: Restrict = a.restrict.parse()?;
                commands::mixing_exact(&a.source, a.k, restrict, a.t_max, ctx)
            } else {
                commands::mixing_lowerbound(a.k_level, a.source.delta, a.trials, ctx)
            }
        }
        Command::Construct(a) => commands::construct(&a.source, ctx),
        Command::Verify(a) => {
            commands::verify(&a.check, &a.source, a.x, a.jsonl.as_ref(), ctx)
        }
        Command::RandomRegularScan(a) => {
            commands::random_regular_scan(&a.n, a.delta, a.trials, ctx)
        }
        Command::GirthHunt(a) => {
            commands::girth_hunt(a.delta, a.girth, a.fibers, a.trials, &a.emit, ctx)
        }
    }
}

fn emit(cli: &Cli, outcome: Outcome, envelope_json: String) -> Result<()> {
    // construct: the artifact is the primary output. With --output the
    // graph goes to the file and the report to stdout; without it the graph
    // (whose provenance header echoes the seed) is the whole output.
    if let Some(artifact) = &outcome.artifact {
        match &cli.output {
            Some(path) => {
                std::fs::write(path, artifact)?;
                println!("{envelope_json}");
            }
            None => print!("{artifact}"),
        }
        return Ok(());
    }
    match cli.format {
        Format::Json => match &cli.output {
            Some(path) => std::fs::write(path, envelope_json + "\n")?,
            None => println!("{envelope_json}"),
        },
        Format::Csv => {
            let series = outcome.series.as_ref().ok_or_else(|| {
                Error::Input("this command has no data series; use --format json".into())
            })?;
            let path = cli.output.as_ref().ok_or_else(|| {
                Error::Input(
                    "csv format needs --output so the report can stay on stdout".into(),
                )
            })?;
            std::fs::write(path, series)?;
            println!("{envelope_json}");
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let started = Instant::now();
    let timestamp_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let seed = cli.seed.unwrap_or_else(rand::random);
    let ctx = Ctx {
        seed,
        budget_nodes: cli.budget_nodes,
        budget_steps: cli.budget_steps,
        budget_seconds: cli.budget_seconds,
        started,
    };

    let mut outcome = dispatch(&cli.command, &ctx)?;
    let all_satisfied = outcome.verdicts.iter().all(|v| v.satisfied);
    let envelope = Envelope {
        command: command_name(&cli.command).to_string(),
        config: ConfigEcho {
            seed,
            budgets: Budgets {
                nodes: cli.budget_nodes,
                steps: cli.budget_steps,
                seconds: cli.budget_seconds,
            },
            output: cli.output.as_ref().map(|p| p.display().to_string()),
            format: match cli.format {
                Format::Json => "json",
                Format::Csv => "csv",
            },
            params: std::mem::take(&mut outcome.params),
        },
        result: std::mem::take(&mut outcome.result),
        verdicts: std::mem::take(&mut outcome.verdicts),
        timing: Timing { timestamp_ms, elapsed_ms: started.elapsed().as_millis() },
    };
    let envelope_json =
        serde_json::to_string_pretty(&envelope).expect("report serializes as JSON");
    emit(cli, outcome, envelope_json)?;
    Ok(all_satisfied)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
