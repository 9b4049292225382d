//! Domain data model: agents, groups, obstacles, scenario configuration and
//! the bookkeeping invariants every simulation phase relies on.

use std::collections::BTreeMap;
use std::fmt;

use crate::geom::{ConvexPolygon, Vec2, EPS};

pub type AgentId = usize;
pub type GroupId = u64;

/// Which side a group passes an obstacle group on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A simulated pedestrian: a disc with a goal.
#[derive(Clone, Debug)]
pub struct Agent {
    pub id: AgentId,
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    pub goal: Vec2,
    pub pref_speed: f64,
    pub max_speed: f64,
    /// Preferred velocity toward the agent's own goal, set each step.
    pub preferred_velocity: Vec2,
    /// Preferred velocity after group-level correction; input to the final
    /// collision-avoidance pass.
    pub adapted_preferred_velocity: Vec2,
    pub group: Option<GroupId>,
    pub follow_target: Option<AgentId>,
    pub arrived: bool,
}

impl Agent {
    pub fn new(id: AgentId, position: Vec2, goal: Vec2) -> Agent {
        Agent {
            id,
            position,
            velocity: Vec2::ZERO,
            radius: defaults::RADIUS,
            goal,
            pref_speed: defaults::PREF_SPEED,
            max_speed: defaults::MAX_SPEED,
            preferred_velocity: Vec2::ZERO,
            adapted_preferred_velocity: Vec2::ZERO,
            group: None,
            follow_target: None,
            arrived: false,
        }
    }

    /// Active agents take part in grouping, avoidance and collision counts.
    pub fn is_active(&self) -> bool {
        !self.arrived
    }
}

/// A transient set of agents that navigates coherently.
#[derive(Clone, Debug)]
pub struct Group {
    pub id: GroupId,
    /// Member ids, ascending.
    pub members: Vec<AgentId>,
    pub mean_position: Vec2,
    pub mean_velocity: Vec2,
    pub leader: Option<AgentId>,
    pub temp_goal: Option<Vec2>,
    /// Retained bypass-side choices keyed by obstacle group id.
    pub side_decisions: BTreeMap<GroupId, Side>,
}

impl Group {
    pub fn new(id: GroupId, mut members: Vec<AgentId>, agents: &[Agent]) -> Group {
        members.sort_unstable();
        let (mean_position, mean_velocity) = member_stats(&members, agents);
        Group {
            id,
            members,
            mean_position,
            mean_velocity,
            leader: None,
            temp_goal: None,
            side_decisions: BTreeMap::new(),
        }
    }

    /// Recompute the cached mean position/velocity from current agent states.
    pub fn refresh_stats(&mut self, agents: &[Agent]) {
        let (p, v) = member_stats(&self.members, agents);
        self.mean_position = p;
        self.mean_velocity = v;
    }

    pub fn mean_radius(&self, agents: &[Agent]) -> f64 {
        let sum: f64 = self.members.iter().map(|&id| agents[id].radius).sum();
        sum / self.members.len() as f64
    }

    pub fn remove_member(&mut self, id: AgentId, agents: &[Agent]) {
        self.members.retain(|&m| m != id);
        if self.leader == Some(id) {
            self.leader = None;
        }
        if !self.members.is_empty() {
            self.refresh_stats(agents);
        }
    }
}

fn member_stats(members: &[AgentId], agents: &[Agent]) -> (Vec2, Vec2) {
    assert!(!members.is_empty(), "group must have at least one member");
    let mut p = Vec2::ZERO;
    let mut v = Vec2::ZERO;
    for &id in members {
        p += agents[id].position;
        v += agents[id].velocity;
    }
    let n = members.len() as f64;
    (p / n, v / n)
}

/// Arithmetic mean position and velocity over a group's current members.
pub fn group_stats(group: &Group, agents: &[Agent]) -> (Vec2, Vec2) {
    member_stats(&group.members, agents)
}

/// A static convex obstacle in world space.
#[derive(Clone, Debug)]
pub struct Obstacle {
    pub polygon: ConvexPolygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    DynamicGrouping,
    OrcaOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::DynamicGrouping => write!(f, "dynamic_grouping"),
            Mode::OrcaOnly => write!(f, "orca_only"),
        }
    }
}

pub mod defaults {
    //! Default parameters used when a scenario omits them.
    pub const RADIUS: f64 = 0.3;
    pub const PREF_SPEED: f64 = 1.4;
    pub const MAX_SPEED: f64 = 2.0;
    pub const EPS_P: f64 = 1.5;
    pub const EPS_V: f64 = 0.5;
    pub const TAU: f64 = 4.0;
    pub const DT: f64 = 0.1;
    pub const NEIGHBOR_RADIUS: f64 = 10.0;
    pub const GOAL_TOLERANCE: f64 = 0.5;
    pub const MAX_STEPS: usize = 2000;
}

/// All tunable simulation constants.
#[derive(Clone, Debug)]
pub struct SimParams {
    /// Clustering position threshold (m).
    pub eps_p: f64,
    /// Clustering velocity threshold (m/s).
    pub eps_v: f64,
    /// Collision-avoidance time horizon (s).
    pub tau: f64,
    /// Integration time step (s).
    pub dt: f64,
    /// Neighbor query radius (m).
    pub neighbor_radius: f64,
    /// RNG seed for the run.
    pub seed: u64,
    pub max_steps: usize,
    /// Arrival distance (m).
    pub goal_tolerance: f64,
    pub mode: Mode,
}

impl Default for SimParams {
    fn default() -> SimParams {
        SimParams {
            eps_p: defaults::EPS_P,
            eps_v: defaults::EPS_V,
            tau: defaults::TAU,
            dt: defaults::DT,
            neighbor_radius: defaults::NEIGHBOR_RADIUS,
            seed: 0,
            max_steps: defaults::MAX_STEPS,
            goal_tolerance: defaults::GOAL_TOLERANCE,
            mode: Mode::DynamicGrouping,
        }
    }
}

/// A world description: initial agent states, obstacles and parameters.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub agents: Vec<Agent>,
    pub obstacles: Vec<Obstacle>,
    pub params: SimParams,
}

/// Check a scenario against all model invariants. Violations are data, not
/// faults: every problem found is reported with the indices involved.
pub fn validate_scenario(s: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    let p = &s.params;
    for (name, value) in [
        ("eps_p", p.eps_p),
        ("eps_v", p.eps_v),
        ("tau", p.tau),
        ("dt", p.dt),
        ("neighbor_radius", p.neighbor_radius),
        ("goal_tolerance", p.goal_tolerance),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            out.push(format!("non-positive {name} ({value})"));
        }
    }
    if p.max_steps == 0 {
        out.push("non-positive max_steps (0)".to_string());
    }
    for (i, a) in s.agents.iter().enumerate() {
        if a.id != i {
            out.push(format!("agent {i}: id {} not dense from 0", a.id));
        }
        if !a.position.is_finite() || !a.velocity.is_finite() || !a.goal.is_finite() {
            out.push(format!("agent {i}: non-finite state"));
        }
        if !(a.radius > 0.0) {
            out.push(format!("agent {i}: non-positive radius ({})", a.radius));
        }
        if a.pref_speed < 0.0 {
            out.push(format!("agent {i}: negative pref_speed ({})", a.pref_speed));
        }
        if !(a.max_speed > 0.0) {
            out.push(format!("agent {i}: non-positive max_speed ({})", a.max_speed));
        }
        if a.max_speed + EPS < a.pref_speed {
            out.push(format!(
                "agent {i}: max_speed {} below pref_speed {}",
                a.max_speed, a.pref_speed
            ));
        }
    }
    for i in 0..s.agents.len() {
        for j in (i + 1)..s.agents.len() {
            let (a, b) = (&s.agents[i], &s.agents[j]);
            if a.position.dist(b.position) < a.radius + b.radius - EPS {
                out.push(format!("initial overlap ({i},{j})"));
            }
        }
    }
    for (k, o) in s.obstacles.iter().enumerate() {
        if o.polygon.len() < 3 {
            out.push(format!("obstacle {k}: fewer than 3 vertices"));
        }
        for (i, a) in s.agents.iter().enumerate() {
            if a.radius > 0.0 && o.polygon.distance(a.position) < a.radius - EPS {
                out.push(format!("agent {i} overlaps obstacle {k}"));
            }
        }
    }
    out
}
