use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use groupsim_cli::commands::{self, RunOptions};
use groupsim_core::model::Mode;

/// Deterministic crowd simulation with dynamic group behaviors.
#[derive(Parser)]
#[command(name = "groupsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    /// Dynamic grouping pipeline.
    Dynamic,
    /// Plain per-agent avoidance baseline.
    Orca,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Dynamic => Mode::DynamicGrouping,
            ModeArg::Orca => Mode::OrcaOnly,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and export trajectory and metrics files.
    Run {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Override the scenario's simulation mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Override the scenario's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's step limit.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the trajectory plot SVG.
        #[arg(long)]
        plot: bool,
        /// Write only the metrics JSON.
        #[arg(long)]
        metrics_only: bool,
    },
    /// Generate a built-in benchmark scenario.
    Gen {
        /// Benchmark name: crosswalk, hallway, cluttered, random,
        /// random_obstacles.
        name: String,
        /// Override the agent count.
        #[arg(long)]
        agents: Option<usize>,
        /// Placement seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (default: <name>.json, "-" for stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a trajectory CSV as an SVG plot.
    Plot {
        /// Trajectory CSV file.
        trajectory: PathBuf,
        /// Scenario file providing the obstacles to draw.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Output path (default: trajectory path with .svg).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render a single-step snapshot instead of the full paths.
        #[arg(long)]
        frame: Option<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { scenario, mode, seed, max_steps, out, plot, metrics_only } => {
            let opts = RunOptions {
                mode: mode.map(Mode::from),
                seed,
                max_steps,
                out_dir: out,
                plot,
                metrics_only,
                threads: commands::threads_from_env(),
            };
            commands::cmd_run(&scenario, &opts)
        }
        Command::Gen { name, agents, seed, out } => {
            commands::cmd_gen(&name, agents, seed, out.as_deref())
        }
        Command::Plot { trajectory, scenario, out, frame } => {
            commands::cmd_plot(&trajectory, scenario.as_deref(), out.as_deref(), frame)
        }
    };
    ExitCode::from(code as u8)
}
