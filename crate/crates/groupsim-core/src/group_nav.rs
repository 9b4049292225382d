//! Inter-group least-effort bypass-side selection, intra-group
//! leader/follower maintenance, adapted preferred-velocity computation, and
//! detach decisions.

use std::collections::BTreeMap;

use rand::Rng;

use crate::avoidance::{closest_outside_union, extreme_agents, probe_group_vo};
use crate::geom::{cone_contains, cross, Vec2, EPS};
use crate::model::{Agent, AgentId, Group, GroupId, Side};

/// Desired follower spacing as a multiple of the follower radius.
pub const FOLLOW_GAP_FACTOR: f64 = 2.5;
/// Proportional gain of the follower gap regulator (1/s).
pub const FOLLOW_GAP_GAIN: f64 = 1.0;
/// Extra lateral clearance added when a temporary goal is placed beside an
/// obstacle group's extreme agent (m).
pub const TEMP_GOAL_CLEARANCE: f64 = 0.2;

/// One adopted obstacle group in a bypass plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BypassEntry {
    pub obstacle_group: GroupId,
    pub side: Side,
    /// The obstacle group's extreme agent on the chosen side.
    pub extreme_agent: AgentId,
}

/// A group's resolved bypass decision for this step. All entries share one
/// side; the temporary goal sits beside the last extreme agent.
#[derive(Clone, Debug, Default)]
pub struct BypassPlan {
    pub group: GroupId,
    pub entries: Vec<BypassEntry>,
    pub temp_goal: Option<Vec2>,
}

/// Leader and follow edges of a group. Edges form a forest rooted at the
/// leader; every follow target is at least as close to the group goal as its
/// follower.
#[derive(Clone, Debug)]
pub struct FollowAssignment {
    pub group: GroupId,
    pub leader: AgentId,
    pub follow_edges: BTreeMap<AgentId, AgentId>,
}

/// Signed effort for agent `a` to bypass group `g`: the 2D cross product of
/// the relative velocity and relative position with respect to the group
/// mean state. Proportional to the sine of the steering angle needed to
/// clear the group.
pub fn bypass_effort(a: &Agent, g: &Group) -> f64 {
    cross(a.velocity - g.mean_velocity, a.position - g.mean_position)
}

/// The side on which `g_a` bypasses `g`: right when the summed member effort
/// is negative, left otherwise.
pub fn choose_side(g_a: &Group, g: &Group, agents: &[Agent]) -> Side {
    let total: f64 = g_a
        .members
        .iter()
        .map(|&id| bypass_effort(&agents[id], g))
        .sum();
    if total < 0.0 {
        Side::Right
    } else {
        Side::Left
    }
}

fn extreme_for_side(pair: crate::avoidance::ExtremePair, side: Side) -> AgentId {
    match side {
        Side::Left => pair.left,
        Side::Right => pair.right,
    }
}

/// Build the bypass plan for `group`: pick a seed among the groups it may
/// collide with (reusing a previously decided side when one exists,
/// otherwise drawing from the seeded RNG), then repeatedly adopt further
/// colliding groups lying on the chosen side of the current extreme agent,
/// nearest in angle first. The temporary goal is offset laterally from the
/// last extreme agent by the combined radii plus a clearance.
pub fn build_bypass_plan<R: Rng>(
    group: &Group,
    others: &[&Group],
    agents: &[Agent],
    tau: f64,
    rng: &mut R,
) -> BypassPlan {
    let probe_pos = group.mean_position;
    let probe_radius = group.mean_radius(agents);
    let probe_vel = group.mean_velocity;

    // groups that may collide: their velocity obstacle (seen from the group
    // mean state) contains the group's own mean velocity. Groups whose
    // expanded hull already contains the probe cannot be bypassed cleanly
    // and are left to the infeasibility -> re-cluster path.
    let mut colliding: Vec<&Group> = Vec::new();
    for other in others {
        debug_assert!(other.id != group.id);
        match probe_group_vo(probe_pos, probe_radius, other, agents, tau) {
            Ok(cone) => {
                if cone_contains(&cone, probe_vel) {
                    colliding.push(other);
                }
            }
            Err(_) => {}
        }
    }
    if colliding.is_empty() {
        return BypassPlan {
            group: group.id,
            entries: Vec::new(),
            temp_goal: None,
        };
    }
    // candidate order: by lowest member agent id
    colliding.sort_by_key(|g| (g.members[0], g.id));

    // seed selection: continuity first, then the seeded RNG
    let persisted = colliding
        .iter()
        .position(|g| group.side_decisions.contains_key(&g.id));
    let (seed_idx, side) = match persisted {
        Some(i) => (i, group.side_decisions[&colliding[i].id]),
        None => {
            let i = rng.gen_range(0..colliding.len());
            (i, choose_side(group, colliding[i], agents))
        }
    };

    let seed = colliding[seed_idx];
    let Ok(pair) = extreme_agents(probe_pos, probe_radius, seed, agents) else {
        return BypassPlan { group: group.id, entries: Vec::new(), temp_goal: None };
    };
    let mut extreme = extreme_for_side(pair, side);
    let mut entries = vec![BypassEntry {
        obstacle_group: seed.id,
        side,
        extreme_agent: extreme,
    }];
    let mut adopted: Vec<GroupId> = vec![seed.id];

    loop {
        let extreme_dir = agents[extreme].position - probe_pos;
        // remaining colliding groups on side `side` of the ray toward the
        // current extreme agent, nearest in angle first
        let mut best: Option<(f64, &Group)> = None;
        for other in &colliding {
            if adopted.contains(&other.id) {
                continue;
            }
            let dir = other.mean_position - probe_pos;
            let lateral = cross(extreme_dir, dir);
            let on_side = match side {
                Side::Left => lateral > EPS,
                Side::Right => lateral < -EPS,
            };
            if !on_side {
                continue;
            }
            let angle = lateral.abs().atan2(extreme_dir.dot(dir));
            match best {
                Some((a, _)) if a <= angle => {}
                _ => best = Some((angle, other)),
            }
        }
        let Some((_, next)) = best else { break };
        let Ok(pair) = extreme_agents(probe_pos, probe_radius, next, agents) else {
            adopted.push(next.id);
            continue;
        };
        extreme = extreme_for_side(pair, side);
        entries.push(BypassEntry {
            obstacle_group: next.id,
            side,
            extreme_agent: extreme,
        });
        adopted.push(next.id);
    }

    let last = entries.last().unwrap();
    let e_agent = &agents[last.extreme_agent];
    let to_extreme = e_agent.position - probe_pos;
    let lateral_dir = match side {
        Side::Left => to_extreme.perp_ccw(),
        Side::Right => to_extreme.perp_cw(),
    }
    .normalized()
    .unwrap_or(Vec2::new(0.0, 1.0));
    let clearance = e_agent.radius + probe_radius + TEMP_GOAL_CLEARANCE;
    let temp_goal = e_agent.position + lateral_dir * clearance;

    BypassPlan {
        group: group.id,
        entries,
        temp_goal: Some(temp_goal),
    }
}

/// Effective group goal: the temporary goal when set, otherwise the centroid
/// of the members' own goals.
pub fn group_goal(group: &Group, agents: &[Agent]) -> Vec2 {
    if let Some(g) = group.temp_goal {
        return g;
    }
    let mut sum = Vec2::ZERO;
    for &id in &group.members {
        sum += agents[id].goal;
    }
    sum / group.members.len() as f64
}

/// The member closest to the group goal; ties go to the lower agent id.
pub fn elect_leader(group: &Group, goal: Vec2, agents: &[Agent]) -> AgentId {
    let mut best: Option<(f64, AgentId)> = None;
    for &id in &group.members {
        let d = agents[id].position.dist(goal);
        match best {
            Some((bd, _)) if bd <= d => {}
            _ => best = Some((d, id)),
        }
    }
    best.expect("group non-empty").1
}

/// Assign each non-leader its follow target: the nearest member strictly
/// closer to the group goal. Members with no strictly-closer candidate (only
/// possible under exact distance ties) follow the leader directly.
pub fn assign_followers(
    group: &Group,
    leader: AgentId,
    goal: Vec2,
    agents: &[Agent],
) -> FollowAssignment {
    let dist: BTreeMap<AgentId, f64> = group
        .members
        .iter()
        .map(|&id| (id, agents[id].position.dist(goal)))
        .collect();
    let mut follow_edges = BTreeMap::new();
    for &a in &group.members {
        if a == leader {
            continue;
        }
        let mut best: Option<(f64, AgentId)> = None;
        for &b in &group.members {
            if b == a || dist[&b] >= dist[&a] {
                continue;
            }
            let d = agents[b].position.dist(agents[a].position);
            match best {
                Some((bd, _)) if bd <= d => {}
                _ => best = Some((d, b)),
            }
        }
        follow_edges.insert(a, best.map_or(leader, |(_, b)| b));
    }
    FollowAssignment {
        group: group.id,
        leader,
        follow_edges,
    }
}

/// Adapted preferred velocity for a group leader: the velocity outside the
/// union of the velocity obstacles of all other groups that is closest to
/// the leader's preferred velocity.
///
/// Infeasibility (flagged `false`) triggers a global re-clustering. Two
/// cases count: no velocity outside the cone union exists, or the leader
/// already overlaps the expanded hull of a group moving like its own (the
/// partition then has two records for one physical cluster and must be
/// rebuilt). Overlap with a group moving differently is a transient close
/// pass: that cone is skipped and the per-agent avoidance pass handles the
/// contact.
pub fn adapt_leader_velocity(
    leader: &Agent,
    v_pref: Vec2,
    own_mean_velocity: Vec2,
    other_groups: &[&Group],
    agents: &[Agent],
    tau: f64,
    max_speed: f64,
    eps_v: f64,
) -> (Vec2, bool) {
    let mut cones = Vec::with_capacity(other_groups.len());
    let mut mergeable_overlap = false;
    for g in other_groups {
        match crate::avoidance::agent_group_vo(leader, g, agents, tau) {
            Ok(cone) => cones.push(cone),
            Err(_) => {
                if own_mean_velocity.dist(g.mean_velocity) < eps_v {
                    mergeable_overlap = true;
                }
            }
        }
    }
    match closest_outside_union(&cones, v_pref, max_speed) {
        Some(v) => (v, !mergeable_overlap),
        None => (v_pref, false),
    }
}

/// Adapted preferred velocity for a follower: the preferred velocity
/// projected onto the direction toward its follow target, plus a
/// proportional correction that regulates the following gap.
///
/// A target strictly behind the follower (relative to its own goal
/// direction) is a degenerate assignment that only occurs in
/// direction-mixed groups formed across a jam; tracking it would steer the
/// agent away from its goal, so the follower keeps its own preferred
/// velocity instead.
pub fn adapt_follower_velocity(follower: &Agent, target: &Agent) -> Vec2 {
    let to_target = target.position - follower.position;
    let Some(unit) = to_target.normalized() else {
        log::debug!(
            "follower {} coincides with target {}; keeping preferred velocity",
            follower.id,
            target.id
        );
        return follower.preferred_velocity;
    };
    if follower.preferred_velocity.dot(unit) < -EPS {
        return follower.preferred_velocity;
    }
    let desired_gap = FOLLOW_GAP_FACTOR * follower.radius;
    let gap_term = (FOLLOW_GAP_GAIN * (to_target.norm() - desired_gap))
        .clamp(-follower.pref_speed / 2.0, follower.pref_speed / 2.0);
    let speed = (follower.preferred_velocity.dot(unit) + gap_term).max(0.0);
    (unit * speed).clamp_norm(follower.max_speed)
}

/// Whether a grouped agent should detach: true when advancing it at its
/// original preferred velocity for `tau`, with every other active agent
/// holding its current velocity, produces no disc overlap.
pub fn should_detach(a: &Agent, v_pref: Vec2, agents: &[Agent], tau: f64) -> bool {
    for b in agents {
        if b.id == a.id || !b.is_active() {
            continue;
        }
        let rel_pos = b.position - a.position;
        let rel_vel = b.velocity - v_pref;
        let combined = a.radius + b.radius;
        let t_min = if rel_vel.norm_sq() <= EPS * EPS {
            0.0
        } else {
            (-rel_pos.dot(rel_vel) / rel_vel.norm_sq()).clamp(0.0, tau)
        };
        let closest = (rel_pos + rel_vel * t_min).norm_sq();
        if closest < combined * combined {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn agent(id: AgentId, pos: Vec2, vel: Vec2) -> Agent {
        let mut a = Agent::new(id, pos, pos + Vec2::new(100.0, 0.0));
        a.velocity = vel;
        a
    }

    fn static_group(id: GroupId, members: Vec<AgentId>, agents: &[Agent]) -> Group {
        Group::new(id, members, agents)
    }

    #[test]
    fn effort_orthonormal_case() {
        let agents = vec![
            agent(0, Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)),
            agent(1, Vec2::ZERO, Vec2::ZERO),
        ];
        let g = static_group(0, vec![1], &agents);
        assert_eq!(bypass_effort(&agents[0], &g), 1.0);
    }

    #[test]
    fn effort_zero_for_head_on() {
        let agents = vec![
            agent(0, Vec2::new(-3.0, 0.0), Vec2::new(1.0, 0.0)),
            agent(1, Vec2::ZERO, Vec2::ZERO),
        ];
        let g = static_group(0, vec![1], &agents);
        assert_eq!(bypass_effort(&agents[0], &g), 0.0);
    }

    #[test]
    fn effort_sign_flips_under_reflection() {
        let agents = vec![
            agent(0, Vec2::new(0.0, -1.0), Vec2::new(1.0, 0.0)),
            agent(1, Vec2::ZERO, Vec2::ZERO),
        ];
        let g = static_group(0, vec![1], &agents);
        assert_eq!(bypass_effort(&agents[0], &g), -1.0);
    }

    #[test]
    fn negative_total_effort_chooses_right() {
        // single member with E = -0.5
        let agents = vec![
            agent(0, Vec2::new(0.0, -0.5), Vec2::new(1.0, 0.0)),
            agent(1, Vec2::ZERO, Vec2::ZERO),
            agent(2, Vec2::new(0.2, 0.0), Vec2::ZERO),
        ];
        let g_a = static_group(0, vec![0], &agents);
        let g = static_group(1, vec![1, 2], &agents);
        assert_eq!(choose_side(&g_a, &g, &agents), Side::Right);
    }

    #[test]
    fn zero_effort_chooses_left() {
        let agents = vec![
            agent(0, Vec2::new(-3.0, 0.0), Vec2::new(1.0, 0.0)),
            agent(1, Vec2::ZERO, Vec2::ZERO),
        ];
        let g_a = static_group(0, vec![0], &agents);
        let g = static_group(1, vec![1], &agents);
        assert_eq!(choose_side(&g_a, &g, &agents), Side::Left);
    }

    #[test]
    fn leader_is_closest_member() {
        let agents = vec![
            agent(0, Vec2::new(3.0, 0.0), Vec2::ZERO),
            agent(1, Vec2::new(2.0, 0.0), Vec2::ZERO),
            agent(2, Vec2::new(5.0, 0.0), Vec2::ZERO),
        ];
        let g = static_group(0, vec![0, 1, 2], &agents);
        assert_eq!(elect_leader(&g, Vec2::ZERO, &agents), 1);
    }

    #[test]
    fn leader_tie_goes_to_lower_id() {
        let agents = vec![
            agent(0, Vec2::new(0.0, 2.0), Vec2::ZERO),
            agent(1, Vec2::new(0.0, -2.0), Vec2::ZERO),
        ];
        let g = static_group(0, vec![0, 1], &agents);
        assert_eq!(elect_leader(&g, Vec2::ZERO, &agents), 0);
    }

    #[test]
    fn collinear_members_chain() {
        let agents = vec![
            agent(0, Vec2::new(1.0, 0.0), Vec2::ZERO),
            agent(1, Vec2::new(2.0, 0.0), Vec2::ZERO),
            agent(2, Vec2::new(3.0, 0.0), Vec2::ZERO),
        ];
        let g = static_group(0, vec![0, 1, 2], &agents);
        let goal = Vec2::ZERO;
        let leader = elect_leader(&g, goal, &agents);
        assert_eq!(leader, 0);
        let fa = assign_followers(&g, leader, goal, &agents);
        assert_eq!(fa.follow_edges[&1], 0);
        assert_eq!(fa.follow_edges[&2], 1);
    }

    #[test]
    fn equidistant_pair_falls_back_to_leader() {
        let agents = vec![
            agent(0, Vec2::new(0.0, 2.0), Vec2::ZERO),
            agent(1, Vec2::new(0.0, -2.0), Vec2::ZERO),
        ];
        let g = static_group(0, vec![0, 1], &agents);
        let fa = assign_followers(&g, 0, Vec2::ZERO, &agents);
        assert_eq!(fa.follow_edges[&1], 0);
    }

    #[test]
    fn follower_at_desired_gap_keeps_on_axis_pref() {
        let mut follower = agent(0, Vec2::ZERO, Vec2::ZERO);
        follower.preferred_velocity = Vec2::new(1.4, 0.0);
        let target = agent(1, Vec2::new(FOLLOW_GAP_FACTOR * follower.radius, 0.0), Vec2::ZERO);
        let v = adapt_follower_velocity(&follower, &target);
        assert!(v.dist(Vec2::new(1.4, 0.0)) < 1e-9);
    }

    #[test]
    fn follower_orthogonal_pref_yields_zero() {
        let mut follower = agent(0, Vec2::ZERO, Vec2::ZERO);
        follower.preferred_velocity = Vec2::new(0.0, 1.4);
        let target = agent(1, Vec2::new(FOLLOW_GAP_FACTOR * follower.radius, 0.0), Vec2::ZERO);
        let v = adapt_follower_velocity(&follower, &target);
        assert!(v.norm() < 1e-9);
    }

    #[test]
    fn lagging_follower_speeds_up() {
        let mut follower = agent(0, Vec2::ZERO, Vec2::ZERO);
        follower.preferred_velocity = Vec2::new(1.4, 0.0);
        let desired = FOLLOW_GAP_FACTOR * follower.radius;
        let target = agent(1, Vec2::new(2.0 * desired, 0.0), Vec2::ZERO);
        let v = adapt_follower_velocity(&follower, &target);
        let expected = (1.4 + (FOLLOW_GAP_GAIN * desired).min(0.7)).min(follower.max_speed);
        assert!((v.x - expected).abs() < 1e-9);
        assert!(v.y.abs() < 1e-12);
    }

    #[test]
    fn detach_trivial_cases() {
        let lone = agent(0, Vec2::ZERO, Vec2::ZERO);
        let agents = vec![lone.clone()];
        assert!(should_detach(&agents[0], Vec2::new(1.0, 0.0), &agents, 4.0));

        let blocker = agent(1, Vec2::new(1.0, 0.0), Vec2::ZERO);
        let agents = vec![lone, blocker];
        assert!(!should_detach(&agents[0], Vec2::new(1.4, 0.0), &agents, 4.0));
        // aiming away is safe
        assert!(should_detach(&agents[0], Vec2::new(-1.4, 0.0), &agents, 4.0));
    }

    #[test]
    fn symmetric_obstacle_dead_ahead_single_entry_left() {
        // two compact groups; the observer group moves straight at the other
        let agents = vec![
            agent(0, Vec2::new(-6.0, 0.25), Vec2::new(1.0, 0.0)),
            agent(1, Vec2::new(-6.0, -0.25), Vec2::new(1.0, 0.0)),
            agent(2, Vec2::new(0.0, 0.25), Vec2::ZERO),
            agent(3, Vec2::new(0.0, -0.25), Vec2::ZERO),
        ];
        let g_a = static_group(0, vec![0, 1], &agents);
        let g_b = static_group(1, vec![2, 3], &agents);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let plan = build_bypass_plan(&g_a, &[&g_b], &agents, 8.0, &mut rng);
        assert_eq!(plan.entries.len(), 1);
        assert_eq!(plan.entries[0].side, Side::Left);
        assert_eq!(plan.entries[0].obstacle_group, 1);
        // left extreme of the obstacle group as seen from the left-moving
        // observer is the upper agent
        assert_eq!(plan.entries[0].extreme_agent, 2);
        let tg = plan.temp_goal.unwrap();
        assert!(tg.y > agents[2].position.y);
    }
}
