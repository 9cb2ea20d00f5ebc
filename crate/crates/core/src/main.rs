use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use itebe::experiment::{cmd_generate, cmd_oracle, cmd_sweep, ExperimentConfig, Preset, TauGrid};
use itebe::graph::MatchingStrategy;
use itebe::itebe::SimMode;
use itebe::metrics::IntervalKind;

#[derive(Parser)]
#[command(
    name = "itebe",
    version,
    about = "ITE-BE / QAOA+ITE-BE MaxCut experiments on random 3-regular graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw graph ensembles and write them with a manifest.
    Generate(GridArgs),
    /// Run a τ/p sweep and write the aggregated CSV.
    Sweep(GridArgs),
    /// Exhaustive MaxCut and structural report for one graph file.
    Oracle {
        /// Graph JSON file.
        graph: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    GateLevel,
    ExactPath,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatchingArg {
    Greedy,
    Maximum,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntervalArg {
    Sem,
    Sigma,
}

#[derive(Args)]
struct GridArgs {
    /// Baseline grid; individual flags override it.
    #[arg(long, value_enum, default_value = "desk")]
    preset: PresetArg,
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Graphs per vertex count.
    #[arg(long)]
    graphs: Option<usize>,
    /// Bipartite 3-regular ensembles instead of u3R.
    #[arg(long)]
    bipartite: bool,
    /// Keep bipartite draws in u3R ensembles.
    #[arg(long)]
    keep_bipartite: bool,
    /// QAOA levels, comma separated (0 = pure ITE-BE).
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_steps: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// QAOA angle file (required for p > 0).
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// CSV path for `sweep`, directory for `generate`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Read graphs from a `generate` output directory.
    #[arg(long)]
    graph_dir: Option<PathBuf>,
    /// Send every edge through a generic block (no corrected matching).
    #[arg(long)]
    all_generic: bool,
    #[arg(long, value_enum)]
    matching: Option<MatchingArg>,
    #[arg(long)]
    max_restarts: Option<u64>,
    /// Interval half-width: 3·SEM (default) or 3·σ.
    #[arg(long, value_enum)]
    interval: Option<IntervalArg>,
    /// Also write one row per graph.
    #[arg(long)]
    per_graph: bool,
}

impl GridArgs {
    fn into_config(self, default_out: &str) -> itebe::Result<ExperimentConfig> {
        let mut c = ExperimentConfig::preset(match self.preset {
            PresetArg::Desk => Preset::Desk,
            PresetArg::Paper => Preset::Paper,
        });
        c.out_path = PathBuf::from(default_out);
        if let Some(v) = self.n {
            c.n_list = v;
        }
        if let Some(v) = self.graphs {
            c.graph_count = v;
        }
        c.bipartite = self.bipartite;
        c.exclude_bipartite = !self.keep_bipartite;
        if let Some(v) = self.p {
            c.p_list = v;
        }
        let min = self.tau_min.unwrap_or(c.tau_grid.min);
        let max = self.tau_max.unwrap_or(c.tau_grid.max);
        let steps = self.tau_steps.unwrap_or(c.tau_grid.steps);
        c.tau_grid = TauGrid::new(min, max, steps)?;
        if let Some(v) = self.shots {
            c.shots = v;
        }
        if let Some(v) = self.reps {
            c.repetitions = v;
        }
        if let Some(m) = self.mode {
            c.mode = match m {
                ModeArg::GateLevel => SimMode::GateLevel,
                ModeArg::ExactPath => SimMode::ExactPath,
            };
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.schedule_path = self.schedule;
        if let Some(v) = self.out {
            c.out_path = v;
        }
        c.graph_dir = self.graph_dir;
        c.matching_first = !self.all_generic;
        if let Some(m) = self.matching {
            c.matching = match m {
                MatchingArg::Greedy => MatchingStrategy::Greedy,
                MatchingArg::Maximum => MatchingStrategy::Maximum,
            };
        }
        if let Some(v) = self.max_restarts {
            c.max_restarts_per_shot = v;
        }
        if let Some(i) = self.interval {
            c.interval = match i {
                IntervalArg::Sem => IntervalKind::StandardError,
                IntervalArg::Sigma => IntervalKind::PopulationSigma,
            };
        }
        c.per_graph = self.per_graph;
        Ok(c)
    }
}

fn run(cli: Cli) -> itebe::Result<()> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = args.into_config("graphs")?;
            let manifest = cmd_generate(&cfg)?;
            println!(
                "wrote {} graphs to {}",
                manifest.graphs.len(),
                cfg.out_path.display()
            );
        }
        Command::Sweep(args) => {
            let cfg = args.into_config("sweep.csv")?;
            let rows = cmd_sweep(&cfg)?;
            println!("wrote {} rows to {}", rows.len(), cfg.out_path.display());
        }
        Command::Oracle { graph, json } => {
            let report = cmd_oracle(&graph)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
