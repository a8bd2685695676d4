use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use isoplace::experiment::{self, ExperimentConfig};
use isoplace::manager::{self, OnError, ReplayConfig};
use isoplace::rules::{self, RuleStyle};
use isoplace::{
    build_topology, generate_groups, Error, GreedyMode, Instance, NetworkProfile, Solver, Topology,
    WorkloadProfile,
};

#[derive(Parser)]
#[command(
    name = "isoplace",
    version,
    about = "Isolation-rule placement for MapReduce networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a leaf-switch topology.
    GenTopology {
        #[command(flatten)]
        network: NetworkArgs,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a placement instance with seeded application groups.
    GenInstance {
        #[command(flatten)]
        network: NetworkArgs,
        #[command(flatten)]
        workload: WorkloadArgs,
        #[arg(long, default_value_t = experiment::DEFAULT_GROUPS)]
        groups: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        rule_cost: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance and print the placement report.
    Place {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve an instance and print the installed rule tables.
    Rules {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = StyleArg::Ascii)]
        style: StyleArg,
    },
    /// Replay an event log against a topology, re-placing after every event.
    Replay {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1)]
        rule_cost: u64,
        /// Skip rejected events instead of aborting.
        #[arg(long)]
        skip_errors: bool,
    },
    /// Run a capacity sweep described by a config file; writes CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn sweep CSV files into per-profile plot data.
    PlotData {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Normal,
    Cloud,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkloadArg {
    Light,
    Heavy,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Greedy,
    Random,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Ascii,
    Listing,
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long, value_enum, default_value_t = ProfileArg::Normal)]
    profile: ProfileArg,
    #[arg(long)]
    switches: Option<u32>,
    #[arg(long)]
    nodes_per_switch: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    capacity: u64,
}

#[derive(Args)]
struct WorkloadArgs {
    #[arg(long, value_enum, default_value_t = WorkloadArg::Light)]
    workload: WorkloadArg,
    #[arg(long)]
    min_nodes: Option<u32>,
    #[arg(long)]
    max_nodes: Option<u32>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Greedy)]
    solver: SolverArg,
    /// Restore capacity taken by a group that fails (default).
    #[arg(long, conflicts_with = "faithful")]
    rollback: bool,
    /// Keep capacity taken by failed groups, as the printed procedure does.
    #[arg(long)]
    faithful: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = isoplace::oracle::DEFAULT_BOUND)]
    oracle_bound: usize,
}

impl SolverArgs {
    fn solver(&self) -> Solver {
        match self.solver {
            SolverArg::Greedy => Solver::Greedy(GreedyMode {
                rollback: !self.faithful,
            }),
            SolverArg::Random => Solver::Random { seed: self.seed },
            SolverArg::Oracle => Solver::Oracle {
                bound: self.oracle_bound,
            },
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl NetworkArgs {
    fn profile(&self) -> Result<NetworkProfile, Error> {
        match self.profile {
            ProfileArg::Normal => Ok(NetworkProfile::normal(self.capacity)),
            ProfileArg::Cloud => Ok(NetworkProfile::cloud(self.capacity)),
            ProfileArg::Custom => NetworkProfile::new(
                "custom",
                self.switches
                    .ok_or_else(|| usage("--switches is required for custom"))?,
                self.nodes_per_switch
                    .ok_or_else(|| usage("--nodes-per-switch is required for custom"))?,
                self.capacity,
            ),
        }
    }
}

impl WorkloadArgs {
    fn profile(&self) -> Result<WorkloadProfile, Error> {
        match self.workload {
            WorkloadArg::Light => Ok(WorkloadProfile::light()),
            WorkloadArg::Heavy => Ok(WorkloadProfile::heavy()),
            WorkloadArg::Custom => WorkloadProfile::new(
                "custom",
                self.min_nodes
                    .ok_or_else(|| usage("--min-nodes is required for custom"))?,
                self.max_nodes
                    .ok_or_else(|| usage("--max-nodes is required for custom"))?,
            ),
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    let mut out = output(path)?;
    let shown = path.unwrap_or(Path::new("<stdout>"));
    out.write_all(text.as_bytes())
        .map_err(|e| io_err(shown, e))?;
    out.flush().map_err(|e| io_err(shown, e))
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::GenTopology { network, output } => {
            let topo = build_topology(&network.profile()?);
            emit(output.as_deref(), &topo.to_text())
        }
        Command::GenInstance {
            network,
            workload,
            groups,
            seed,
            rule_cost,
            output,
        } => {
            let topo = build_topology(&network.profile()?);
            let gs = generate_groups(&topo, &workload.profile()?, groups, seed)?;
            let inst = Instance::new(topo, gs, rule_cost)?;
            emit(output.as_deref(), &inst.to_text())
        }
        Command::Place { instance, solver } => {
            let inst = Instance::load(&instance)?;
            let res = solver.solver().solve(&inst)?;
            emit(None, &res.to_report())
        }
        Command::Rules {
            instance,
            solver,
            style,
        } => {
            let inst = Instance::load(&instance)?;
            let res = solver.solver().solve(&inst)?;
            let tables = rules::materialize_tables(&inst, &res)?;
            let style = match style {
                StyleArg::Ascii => RuleStyle::Ascii,
                StyleArg::Listing => RuleStyle::Listing,
            };
            emit(None, &rules::render_tables(&tables, style))
        }
        Command::Replay {
            topology,
            events,
            solver,
            rule_cost,
            skip_errors,
        } => {
            let text = std::fs::read_to_string(&topology).map_err(|e| io_err(&topology, e))?;
            let topo = Topology::from_text(&text)?;
            let log = manager::load_events(&events)?;
            let cfg = ReplayConfig {
                solver: solver.solver(),
                rule_cost,
                on_error: if skip_errors {
                    OnError::Skip
                } else {
                    OnError::Abort
                },
            };
            let replay = manager::replay(&log, &topo, &cfg)?;
            let mut out = String::new();
            for (seq, why) in &replay.skipped {
                eprintln!("skipped event {seq}: {why}");
            }
            for (generation, res) in &replay.placements {
                let placed: Vec<String> = res.placed.iter().map(|g| g.to_string()).collect();
                out.push_str(&format!(
                    "generation={generation} placed={}/{} groups={}\n",
                    res.supported(),
                    res.offered(),
                    placed.join(",")
                ));
            }
            emit(None, &out)
        }
        Command::Sweep {
            config,
            output: out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let w = output(out.as_deref())?;
            experiment::write_sweep_csv(&cfg, w)
        }
        Command::PlotData { out, csv } => {
            let mut rows = Vec::new();
            for p in &csv {
                rows.extend(experiment::read_csv(p)?);
            }
            for path in experiment::emit_plot_data(&rows, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Csv(_) => 3,
        Error::OracleTooLarge { .. }
        | Error::CapacityViolation { .. }
        | Error::AccountingMismatch { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
