//! Scenario file format (JSON) and metrics export.
//!
//! Parsing is strict: unknown keys are rejected and errors are reported with
//! the JSON path that caused them, so typos in parameter names cannot
//! silently fall back to defaults.

use std::fmt;
use std::path::Path;

use groupsim_core::geom::{convex_hull, Vec2};
use groupsim_core::model::{
    defaults, validate_scenario, Agent, Mode, Obstacle, Scenario, SimParams,
};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum ScenarioError {
    Io(std::io::Error),
    /// Parse failure with a path-qualified message.
    Parse(String),
    /// Model-invariant violations found by validation.
    Invalid(Vec<String>),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io(e) => write!(f, "{e}"),
            ScenarioError::Parse(msg) => write!(f, "{msg}"),
            ScenarioError::Invalid(violations) => {
                write!(f, "invalid scenario: {}", violations.join("; "))
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

fn default_radius() -> f64 {
    defaults::RADIUS
}
fn default_pref_speed() -> f64 {
    defaults::PREF_SPEED
}
fn default_max_speed() -> f64 {
    defaults::MAX_SPEED
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub id: usize,
    pub position: [f64; 2],
    #[serde(default)]
    pub velocity: [f64; 2],
    #[serde(default = "default_radius")]
    pub radius: f64,
    pub goal: [f64; 2],
    #[serde(default = "default_pref_speed")]
    pub pref_speed: f64,
    #[serde(default = "default_max_speed")]
    pub max_speed: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsFile {
    pub eps_p: f64,
    pub eps_v: f64,
    pub tau: f64,
    pub dt: f64,
    pub neighbor_radius: f64,
    pub seed: u64,
    pub max_steps: usize,
    pub goal_tolerance: f64,
    pub mode: ModeFile,
}

impl Default for ParamsFile {
    fn default() -> ParamsFile {
        ParamsFile::from_params(&SimParams::default())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeFile {
    DynamicGrouping,
    OrcaOnly,
}

impl From<ModeFile> for Mode {
    fn from(m: ModeFile) -> Mode {
        match m {
            ModeFile::DynamicGrouping => Mode::DynamicGrouping,
            ModeFile::OrcaOnly => Mode::OrcaOnly,
        }
    }
}

impl From<Mode> for ModeFile {
    fn from(m: Mode) -> ModeFile {
        match m {
            Mode::DynamicGrouping => ModeFile::DynamicGrouping,
            Mode::OrcaOnly => ModeFile::OrcaOnly,
        }
    }
}

/// The on-disk scenario document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub params: ParamsFile,
    pub agents: Vec<AgentFile>,
    #[serde(default)]
    pub obstacles: Vec<Vec<[f64; 2]>>,
}

impl ParamsFile {
    pub fn from_params(p: &SimParams) -> ParamsFile {
        ParamsFile {
            eps_p: p.eps_p,
            eps_v: p.eps_v,
            tau: p.tau,
            dt: p.dt,
            neighbor_radius: p.neighbor_radius,
            seed: p.seed,
            max_steps: p.max_steps,
            goal_tolerance: p.goal_tolerance,
            mode: p.mode.into(),
        }
    }

    pub fn to_params(&self) -> SimParams {
        SimParams {
            eps_p: self.eps_p,
            eps_v: self.eps_v,
            tau: self.tau,
            dt: self.dt,
            neighbor_radius: self.neighbor_radius,
            seed: self.seed,
            max_steps: self.max_steps,
            goal_tolerance: self.goal_tolerance,
            mode: self.mode.into(),
        }
    }
}

impl ScenarioFile {
    /// Convert to the engine model, validating all invariants.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        let agents = self
            .agents
            .iter()
            .map(|a| {
                let mut agent = Agent::new(
                    a.id,
                    Vec2::new(a.position[0], a.position[1]),
                    Vec2::new(a.goal[0], a.goal[1]),
                );
                agent.velocity = Vec2::new(a.velocity[0], a.velocity[1]);
                agent.radius = a.radius;
                agent.pref_speed = a.pref_speed;
                agent.max_speed = a.max_speed;
                agent
            })
            .collect();
        let mut obstacles = Vec::new();
        for (k, verts) in self.obstacles.iter().enumerate() {
            let points: Vec<Vec2> = verts.iter().map(|v| Vec2::new(v[0], v[1])).collect();
            let polygon = convex_hull(&points)
                .map_err(|e| ScenarioError::Parse(format!("obstacles[{k}]: {e}")))?;
            if polygon.len() < 3 {
                return Err(ScenarioError::Parse(format!(
                    "obstacles[{k}]: fewer than 3 distinct non-collinear vertices"
                )));
            }
            obstacles.push(Obstacle { polygon });
        }
        let scenario = Scenario {
            name: self.name.clone(),
            agents,
            obstacles,
            params: self.params.to_params(),
        };
        let violations = validate_scenario(&scenario);
        if violations.is_empty() {
            Ok(scenario)
        } else {
            Err(ScenarioError::Invalid(violations))
        }
    }

    pub fn from_scenario(s: &Scenario) -> ScenarioFile {
        ScenarioFile {
            name: s.name.clone(),
            params: ParamsFile::from_params(&s.params),
            agents: s
                .agents
                .iter()
                .map(|a| AgentFile {
                    id: a.id,
                    position: [a.position.x, a.position.y],
                    velocity: [a.velocity.x, a.velocity.y],
                    radius: a.radius,
                    goal: [a.goal.x, a.goal.y],
                    pref_speed: a.pref_speed,
                    max_speed: a.max_speed,
                })
                .collect(),
            obstacles: s
                .obstacles
                .iter()
                .map(|o| o.polygon.vertices().iter().map(|v| [v.x, v.y]).collect())
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<ScenarioFile, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            ScenarioError::Parse(format!("{}: {}", e.path(), e.inner()))
        })
    }

    pub fn load(path: &Path) -> Result<ScenarioFile, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(ScenarioError::Io)?;
        ScenarioFile::parse(&text).map_err(|e| match e {
            ScenarioError::Parse(msg) => {
                ScenarioError::Parse(format!("{}: {}", path.display(), msg))
            }
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_json() + "\n").map_err(ScenarioError::Io)
    }
}

/// The metrics document written next to each run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricsFile {
    pub tpf_ms_mean: f64,
    pub steps_mean: f64,
    pub collisions: usize,
    pub max_groups: usize,
    pub truncated: bool,
}

impl MetricsFile {
    pub fn from_metrics(m: &groupsim_core::engine::Metrics, max_steps: usize) -> MetricsFile {
        MetricsFile {
            tpf_ms_mean: m.tpf_ms_mean(),
            steps_mean: m.steps_mean(max_steps),
            collisions: m.collision_episodes,
            max_groups: m.max_groups,
            truncated: m.truncated,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}
