//! Command implementations shared by the binary and the test suites.
//!
//! Exit codes: 0 success, 2 input errors, 3 truncated runs.

use std::path::{Path, PathBuf};

use groupsim_core::engine::Simulation;
use groupsim_core::model::Mode;

use crate::generators;
use crate::plot;
use crate::scenario::{MetricsFile, ScenarioFile};
use crate::trajectory;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub max_steps: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub plot: bool,
    pub metrics_only: bool,
    pub threads: usize,
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    EXIT_INPUT
}

/// Worker cap from the `GROUPSIM_THREADS` environment variable (0 = auto);
/// unset or unparsable values run single-worker.
pub fn threads_from_env() -> usize {
    match std::env::var("GROUPSIM_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                log::warn!("ignoring unparsable GROUPSIM_THREADS={v:?}");
                1
            }
        },
        Err(_) => 1,
    }
}

pub fn cmd_run(scenario_path: &Path, opts: &RunOptions) -> i32 {
    let file = match ScenarioFile::load(scenario_path) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let mut scenario = match file.to_scenario() {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {}", scenario_path.display(), e)),
    };
    if let Some(mode) = opts.mode {
        scenario.params.mode = mode;
    }
    if let Some(seed) = opts.seed {
        scenario.params.seed = seed;
    }
    if let Some(max_steps) = opts.max_steps {
        scenario.params.max_steps = max_steps;
    }
    let max_steps = scenario.params.max_steps;
    let obstacles = scenario.obstacles.clone();

    let sim = match Simulation::with_threads(scenario, opts.threads) {
        Ok(s) => s,
        Err(e) => return fail(format!("{}: {}", scenario_path.display(), e)),
    };
    let report = sim.run();

    let out_dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        return fail(format!("{}: {}", out_dir.display(), e));
    }
    let stem = scenario_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());

    let metrics = MetricsFile::from_metrics(&report.metrics, max_steps);
    let metrics_path = out_dir.join(format!("{stem}.metrics.json"));
    if let Err(e) = std::fs::write(&metrics_path, metrics.to_json() + "\n") {
        return fail(format!("{}: {}", metrics_path.display(), e));
    }
    println!("wrote {}", metrics_path.display());

    if !opts.metrics_only {
        let traj_path = out_dir.join(format!("{stem}.traj.csv"));
        if let Err(e) = trajectory::write_csv(&report.trajectory, &traj_path) {
            return fail(format!("{}: {}", traj_path.display(), e));
        }
        println!("wrote {}", traj_path.display());

        if opts.plot {
            let svg_path = out_dir.join(format!("{stem}.traj.svg"));
            let svg = plot::render_trajectories(&report.trajectory, &obstacles);
            if let Err(e) = std::fs::write(&svg_path, svg) {
                return fail(format!("{}: {}", svg_path.display(), e));
            }
            println!("wrote {}", svg_path.display());
        }
    }

    if report.metrics.truncated {
        eprintln!("run truncated at {max_steps} steps with agents still en route");
        EXIT_TRUNCATED
    } else {
        EXIT_OK
    }
}

pub fn cmd_gen(name: &str, agents: Option<usize>, seed: u64, out: Option<&Path>) -> i32 {
    let Some(file) = generators::generate(name, agents, seed) else {
        return fail(format!(
            "unknown benchmark {name:?}; valid names: {}",
            generators::BENCHMARKS.join(", ")
        ));
    };
    if let Err(e) = file.to_scenario() {
        return fail(format!("generated scenario failed validation: {e}"));
    }
    let default_path = PathBuf::from(format!("{name}.json"));
    let path = out.unwrap_or(&default_path);
    if path.as_os_str() == "-" {
        println!("{}", file.to_json());
        return EXIT_OK;
    }
    if let Err(e) = file.save(path) {
        return fail(format!("{}: {}", path.display(), e));
    }
    println!("wrote {}", path.display());
    EXIT_OK
}

pub fn cmd_plot(
    traj_path: &Path,
    scenario_path: Option<&Path>,
    out: Option<&Path>,
    frame: Option<usize>,
) -> i32 {
    let text = match std::fs::read_to_string(traj_path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {}", traj_path.display(), e)),
    };
    let rows = match trajectory::parse_csv(&text) {
        Ok(r) => r,
        Err(e) => return fail(format!("{}: {}", traj_path.display(), e)),
    };
    let obstacles = match scenario_path {
        None => Vec::new(),
        Some(p) => match ScenarioFile::load(p).and_then(|f| f.to_scenario()) {
            Ok(s) => s.obstacles,
            Err(e) => return fail(format!("{}: {}", p.display(), e)),
        },
    };
    let svg = match frame {
        None => plot::render_trajectories(&rows, &obstacles),
        Some(step) => {
            plot::render_frame(&rows, &obstacles, step, groupsim_core::model::defaults::RADIUS)
        }
    };
    let default_path = traj_path.with_extension("svg");
    let path = out.unwrap_or(&default_path);
    if let Err(e) = std::fs::write(path, svg) {
        return fail(format!("{}: {}", path.display(), e));
    }
    println!("wrote {}", path.display());
    EXIT_OK
}
