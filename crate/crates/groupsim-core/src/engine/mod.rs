//! The deterministic per-step pipeline tying all phases together, plus
//! metrics collection.

mod metrics;
mod spatial;

pub use metrics::{count_collisions, Metrics};
pub use spatial::SpatialGrid;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::avoidance::{obstacle_halfplanes, orca_halfplane, solve_velocity, HalfPlane};
use crate::clustering::{form_groups, needs_recluster, SimilarityParams};
use crate::geom::{Vec2, EPS};
use crate::group_nav::{
    adapt_follower_velocity, adapt_leader_velocity, assign_followers, build_bypass_plan,
    elect_leader, group_goal, should_detach, BypassPlan,
};
use crate::model::{
    validate_scenario, Agent, AgentId, Group, GroupId, Mode, Obstacle, Scenario, SimParams,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
}

/// One exported state sample: the agent's position at the start of the step
/// and the velocity chosen during it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub agent_id: AgentId,
    pub position: Vec2,
    pub velocity: Vec2,
    /// `None` for isolated agents.
    pub group_id: Option<GroupId>,
    pub leader: bool,
}

/// Output of a full run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub trajectory: Vec<TrajectoryRow>,
    pub metrics: Metrics,
}

/// A running simulation holding the full mutable state.
pub struct Simulation {
    pub agents: Vec<Agent>,
    pub groups: BTreeMap<GroupId, Group>,
    pub obstacles: Vec<Obstacle>,
    pub params: SimParams,
    pub metrics: Metrics,
    step_index: usize,
    rng: ChaCha8Rng,
    next_group_id: GroupId,
    recluster_pending: bool,
    leader_infeasible: bool,
    overlap_set: BTreeSet<(AgentId, AgentId)>,
    trajectory: Vec<TrajectoryRow>,
    plans: Vec<BypassPlan>,
    threads: usize,
    pool: Option<rayon::ThreadPool>,
}

impl Simulation {
    /// Validate the scenario and set up the initial state. Worker count 1;
    /// see [`Simulation::with_threads`].
    pub fn new(scenario: Scenario) -> Result<Simulation, EngineError> {
        Simulation::with_threads(scenario, 1)
    }

    /// `threads` caps the worker count for the per-agent avoidance solves
    /// (0 = automatic). Output is identical for any value.
    pub fn with_threads(scenario: Scenario, threads: usize) -> Result<Simulation, EngineError> {
        let violations = validate_scenario(&scenario);
        if !violations.is_empty() {
            return Err(EngineError::InvalidScenario(violations));
        }
        let n = scenario.agents.len();
        let pool = if threads == 1 {
            None
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .ok()
        };
        let mut metrics = Metrics::default();
        metrics.steps_to_goal = vec![None; n];
        Ok(Simulation {
            agents: scenario.agents,
            groups: BTreeMap::new(),
            obstacles: scenario.obstacles,
            rng: ChaCha8Rng::seed_from_u64(scenario.params.seed),
            params: scenario.params,
            metrics,
            step_index: 0,
            next_group_id: 0,
            recluster_pending: false,
            leader_infeasible: false,
            overlap_set: BTreeSet::new(),
            trajectory: Vec::new(),
            plans: Vec::new(),
            threads,
            pool,
        })
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn all_arrived(&self) -> bool {
        self.agents.iter().all(|a| a.arrived)
    }

    /// The bypass plans computed in the most recent step.
    pub fn current_plans(&self) -> &[BypassPlan] {
        &self.plans
    }

    /// Preferred velocity toward a target at the agent's preferred speed,
    /// slowing down on final approach so the goal is not overshot.
    fn desired_velocity(agent: &Agent, target: Vec2, dt: f64) -> Vec2 {
        let to = target - agent.position;
        let dist = to.norm();
        if dist <= EPS {
            return Vec2::ZERO;
        }
        let speed = agent.pref_speed.min(dist / dt);
        to * (speed / dist)
    }

    /// Advance the simulation by one step.
    pub fn step(&mut self) {
        let start = Instant::now();
        let grouping = self.params.mode == Mode::DynamicGrouping;

        self.phase_arrivals();
        if grouping {
            self.phase_detach();
            self.phase_recluster();
            self.refresh_group_stats();
            self.phase_bypass_plans();
            self.phase_leaders_followers();
        }
        self.phase_preferred_velocities(grouping);
        self.phase_orca();
        self.record_trajectory();
        self.phase_integrate();
        self.phase_bookkeeping(grouping);

        self.metrics
            .step_times_ms
            .push(start.elapsed().as_secs_f64() * 1e3);
        self.step_index += 1;
    }

    /// Run until all agents arrive or the step limit is reached.
    pub fn run(mut self) -> RunReport {
        while self.step_index < self.params.max_steps && !self.all_arrived() {
            self.step();
        }
        self.metrics.truncated = !self.all_arrived();
        let Simulation { mut metrics, trajectory, .. } = self;
        metrics.max_groups = metrics.group_counts.iter().copied().max().unwrap_or(0);
        RunReport { trajectory, metrics }
    }

    // phase 1: freeze agents that reached their goal
    fn phase_arrivals(&mut self) {
        let tol = self.params.goal_tolerance;
        let mut arrived: Vec<AgentId> = Vec::new();
        for a in self.agents.iter().filter(|a| a.is_active()) {
            if a.position.dist(a.goal) <= tol {
                arrived.push(a.id);
            }
        }
        for id in arrived {
            self.agents[id].arrived = true;
            self.agents[id].velocity = Vec2::ZERO;
            self.agents[id].follow_target = None;
            self.metrics.steps_to_goal[id] = Some(self.step_index);
            self.leave_group(id);
        }
    }

    // phase 2: grouped agents whose own preferred velocity is collision-free
    // over the horizon leave their group
    fn phase_detach(&mut self) {
        let tau = self.params.tau;
        let dt = self.params.dt;
        let mut detached: Vec<AgentId> = Vec::new();
        for a in self.agents.iter().filter(|a| a.is_active()) {
            if a.group.is_none() {
                continue;
            }
            let v_pref = Self::desired_velocity(a, a.goal, dt);
            if should_detach(a, v_pref, &self.agents, tau) {
                detached.push(a.id);
            }
        }
        for id in detached {
            self.leave_group(id);
        }
    }

    fn leave_group(&mut self, id: AgentId) {
        let Some(gid) = self.agents[id].group.take() else {
            return;
        };
        self.agents[id].follow_target = None;
        let dissolve = {
            let group = self.groups.get_mut(&gid).expect("group exists");
            group.remove_member(id, &self.agents);
            group.members.len() < 2
        };
        if dissolve {
            let group = self.groups.remove(&gid).expect("group exists");
            for &m in &group.members {
                self.agents[m].group = None;
                self.agents[m].follow_target = None;
            }
        }
    }

    // phase 3: global re-clustering when flagged last step (and at step 0)
    fn phase_recluster(&mut self) {
        if self.step_index != 0 && !self.recluster_pending {
            return;
        }
        self.recluster_pending = false;
        for a in &mut self.agents {
            a.group = None;
            a.follow_target = None;
        }
        self.groups.clear();
        let active: Vec<&Agent> = self.agents.iter().filter(|a| a.is_active()).collect();
        let partition = form_groups(
            &active,
            SimilarityParams {
                eps_p: self.params.eps_p,
                eps_v: self.params.eps_v,
            },
        );
        for members in partition.groups {
            let gid = self.next_group_id;
            self.next_group_id += 1;
            let group = Group::new(gid, members, &self.agents);
            for &m in &group.members {
                self.agents[m].group = Some(gid);
            }
            self.groups.insert(gid, group);
        }
    }

    fn refresh_group_stats(&mut self) {
        let agents = &self.agents;
        for group in self.groups.values_mut() {
            group.refresh_stats(agents);
        }
    }

    // phase 4: per-group bypass plans
    fn phase_bypass_plans(&mut self) {
        let tau = self.params.tau;
        let ids: Vec<GroupId> = self.groups.keys().copied().collect();
        let mut plans: Vec<BypassPlan> = Vec::with_capacity(ids.len());
        for &gid in &ids {
            let group = &self.groups[&gid];
            let others: Vec<&Group> = self
                .groups
                .values()
                .filter(|g| g.id != gid)
                .collect();
            plans.push(build_bypass_plan(group, &others, &self.agents, tau, &mut self.rng));
        }
        for plan in &plans {
            let group = self.groups.get_mut(&plan.group).expect("group exists");
            group.temp_goal = plan.temp_goal;
            group.side_decisions = plan
                .entries
                .iter()
                .map(|e| (e.obstacle_group, e.side))
                .collect();
        }
        self.plans = plans;
    }

    // phase 5: leader election and follower assignment
    fn phase_leaders_followers(&mut self) {
        let mut updates: Vec<(GroupId, AgentId, BTreeMap<AgentId, AgentId>)> = Vec::new();
        for group in self.groups.values() {
            let goal = group_goal(group, &self.agents);
            let leader = elect_leader(group, goal, &self.agents);
            let fa = assign_followers(group, leader, goal, &self.agents);
            updates.push((group.id, leader, fa.follow_edges));
        }
        for (gid, leader, edges) in updates {
            let group = self.groups.get_mut(&gid).expect("group exists");
            group.leader = Some(leader);
            self.agents[leader].follow_target = None;
            for (follower, target) in edges {
                self.agents[follower].follow_target = Some(target);
            }
        }
    }

    // phase 6: preferred velocities (leaders via the group velocity-obstacle
    // solve, followers via the follow projection, everyone else toward goal)
    fn phase_preferred_velocities(&mut self, grouping: bool) {
        let dt = self.params.dt;
        let tau = self.params.tau;
        for i in 0..self.agents.len() {
            if !self.agents[i].is_active() {
                continue;
            }
            let v = Self::desired_velocity(&self.agents[i], self.agents[i].goal, dt);
            self.agents[i].preferred_velocity = v;
            self.agents[i].adapted_preferred_velocity = v;
        }
        if !grouping {
            return;
        }
        self.leader_infeasible = false;
        let mut adapted: Vec<(AgentId, Vec2)> = Vec::new();
        for group in self.groups.values() {
            let leader_id = group.leader.expect("leader elected");
            let leader = &self.agents[leader_id];
            let v_pref = match group.temp_goal {
                Some(tg) => Self::desired_velocity(leader, tg, dt),
                None => leader.preferred_velocity,
            };
            let others: Vec<&Group> = self
                .groups
                .values()
                .filter(|g| g.id != group.id)
                .collect();
            let (v, feasible) = adapt_leader_velocity(
                leader,
                v_pref,
                group.mean_velocity,
                &others,
                &self.agents,
                tau,
                leader.max_speed,
                self.params.eps_v,
            );
            if !feasible {
                self.leader_infeasible = true;
            }
            adapted.push((leader_id, v));
            for &m in &group.members {
                if m == leader_id {
                    continue;
                }
                let target = self.agents[m].follow_target.expect("follower has target");
                adapted.push((m, adapt_follower_velocity(&self.agents[m], &self.agents[target])));
            }
        }
        for (id, v) in adapted {
            self.agents[id].adapted_preferred_velocity = v;
        }
    }

    // phase 7: per-agent reciprocal collision avoidance over neighbors and
    // obstacles
    fn phase_orca(&mut self) {
        let params = &self.params;
        let grid = SpatialGrid::build(&self.agents, params.neighbor_radius);
        let agents = &self.agents;
        let obstacles = &self.obstacles;

        let solve_one = |a: &Agent| -> Option<Vec2> {
            if !a.is_active() {
                return None;
            }
            let mut constraints: Vec<HalfPlane> = Vec::new();
            for obstacle in obstacles {
                if obstacle.polygon.distance(a.position) <= params.neighbor_radius {
                    obstacle_halfplanes(
                        a,
                        obstacle,
                        params.tau,
                        params.dt,
                        params.neighbor_radius,
                        &mut constraints,
                    );
                }
            }
            for id in grid.query(agents, a.position, params.neighbor_radius, Some(a.id)) {
                constraints.push(orca_halfplane(a, &agents[id], params.tau, params.dt));
            }
            Some(
                solve_velocity(&constraints, a.adapted_preferred_velocity, a.max_speed).velocity,
            )
        };

        let velocities: Vec<Option<Vec2>> = match (&self.pool, self.threads) {
            (Some(pool), _) => pool.install(|| agents.par_iter().map(solve_one).collect()),
            (None, _) => agents.iter().map(solve_one).collect(),
        };
        for (a, v) in self.agents.iter_mut().zip(velocities) {
            if let Some(v) = v {
                a.velocity = v;
            }
        }
    }

    fn record_trajectory(&mut self) {
        for a in self.agents.iter().filter(|a| a.is_active()) {
            let leader = a
                .group
                .and_then(|gid| self.groups.get(&gid))
                .map_or(false, |g| g.leader == Some(a.id));
            self.trajectory.push(TrajectoryRow {
                step: self.step_index,
                agent_id: a.id,
                position: a.position,
                velocity: a.velocity,
                group_id: a.group,
                leader,
            });
        }
    }

    // phase 8: explicit Euler integration
    fn phase_integrate(&mut self) {
        let dt = self.params.dt;
        for a in self.agents.iter_mut().filter(|a| a.is_active()) {
            debug_assert!(a.velocity.norm() <= a.max_speed + EPS);
            a.position += a.velocity * dt;
        }
    }

    // phase 9: group stats, collision episodes, re-cluster trigger, metrics
    fn phase_bookkeeping(&mut self, grouping: bool) {
        self.refresh_group_stats();

        let grid = SpatialGrid::build(&self.agents, self.params.neighbor_radius);
        let mut pairs: Vec<(AgentId, AgentId)> = Vec::new();
        for a in self.agents.iter().filter(|a| a.is_active()) {
            for id in grid.query(&self.agents, a.position, self.params.neighbor_radius, Some(a.id)) {
                if a.id < id {
                    pairs.push((a.id, id));
                }
            }
        }
        let (onsets, current) = count_collisions(&self.agents, pairs, &self.overlap_set);
        self.metrics.collision_episodes += onsets;
        self.overlap_set = current;

        self.metrics.group_counts.push(self.groups.len());
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for g in self.groups.values() {
            *hist.entry(g.members.len()).or_insert(0) += 1;
        }
        self.metrics
            .group_size_histograms
            .push(hist.into_iter().collect());

        if grouping {
            self.recluster_pending = needs_recluster(
                &self.groups,
                &self.agents,
                self.leader_infeasible,
                self.params.eps_p,
            );
        }

        #[cfg(debug_assertions)]
        self.assert_invariants();
    }

    #[cfg(debug_assertions)]
    fn assert_invariants(&self) {
        use crate::model::group_stats;
        let mut seen: BTreeSet<AgentId> = BTreeSet::new();
        for group in self.groups.values() {
            assert!(group.members.len() >= 2, "group below minimum size");
            for &m in &group.members {
                assert!(seen.insert(m), "agent {m} in two groups");
                assert_eq!(self.agents[m].group, Some(group.id));
                assert!(self.agents[m].is_active());
            }
            if let Some(l) = group.leader {
                assert!(group.members.contains(&l), "leader is a member");
            }
            let (p, v) = group_stats(group, &self.agents);
            assert!(p.dist(group.mean_position) <= 1e-9);
            assert!(v.dist(group.mean_velocity) <= 1e-9);
        }
        for a in &self.agents {
            if a.group.is_none() {
                assert!(a.follow_target.is_none());
            }
            if let Some(t) = a.follow_target {
                assert_ne!(t, a.id);
                assert_eq!(self.agents[t].group, a.group);
            }
        }
    }
}

/// Convenience: validate and run a scenario to completion.
pub fn run(scenario: Scenario) -> Result<RunReport, EngineError> {
    Ok(Simulation::new(scenario)?.run())
}
