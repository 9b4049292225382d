//! Run metrics: timing, steps to goal, collision episodes, group counts.

use std::collections::BTreeSet;

use crate::geom::EPS;
use crate::model::{Agent, AgentId};

/// Metrics collected over a run.
#[derive(Clone, Debug, Default)]
pub struct Metrics {
    /// Wall time of each step in milliseconds.
    pub step_times_ms: Vec<f64>,
    /// Arrival step index per agent; `None` when the agent never arrived.
    pub steps_to_goal: Vec<Option<usize>>,
    /// Cumulative pairwise collision episodes (counted once at onset).
    pub collision_episodes: usize,
    /// Number of groups at each step.
    pub group_counts: Vec<usize>,
    /// Per-step histogram of group sizes as (size, count) pairs, ascending.
    pub group_size_histograms: Vec<Vec<(usize, usize)>>,
    /// Maximum simultaneous group count over the run.
    pub max_groups: usize,
    /// True when the run hit the step limit with agents still en route.
    pub truncated: bool,
}

impl Metrics {
    pub fn tpf_ms_mean(&self) -> f64 {
        if self.step_times_ms.is_empty() {
            return 0.0;
        }
        self.step_times_ms.iter().sum::<f64>() / self.step_times_ms.len() as f64
    }

    /// Mean steps to goal over all agents; agents that never arrived count
    /// as `max_steps`.
    pub fn steps_mean(&self, max_steps: usize) -> f64 {
        if self.steps_to_goal.is_empty() {
            return 0.0;
        }
        let total: usize = self
            .steps_to_goal
            .iter()
            .map(|s| s.unwrap_or(max_steps))
            .sum();
        total as f64 / self.steps_to_goal.len() as f64
    }
}

/// Detect collision-episode onsets: a pair collides when the center distance
/// drops below the radius sum (less tolerance), and an episode is counted
/// once at onset. `candidate_pairs` must contain every currently-overlapping
/// pair as `(low_id, high_id)`; `previous` is the overlap set carried from
/// the last step. Returns the onset count and the new overlap set.
pub fn count_collisions(
    agents: &[Agent],
    candidate_pairs: impl IntoIterator<Item = (AgentId, AgentId)>,
    previous: &BTreeSet<(AgentId, AgentId)>,
) -> (usize, BTreeSet<(AgentId, AgentId)>) {
    let mut current = BTreeSet::new();
    for (a, b) in candidate_pairs {
        debug_assert!(a < b);
        let (pa, pb) = (&agents[a], &agents[b]);
        if !pa.is_active() || !pb.is_active() {
            continue;
        }
        if pa.position.dist(pb.position) < pa.radius + pb.radius - EPS {
            current.insert((a, b));
        }
    }
    let onsets = current.difference(previous).count();
    (onsets, current)
}
