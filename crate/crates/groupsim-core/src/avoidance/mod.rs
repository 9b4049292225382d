//! Velocity-obstacle machinery: agent-agent ORCA half-planes with a
//! feasibility-fallback linear program, the agent-group velocity obstacle
//! built from radius-expanded member discs, and the nearest-feasible-velocity
//! search outside a union of cones.

mod lp;

pub use lp::{solve_velocity, HalfPlane, SolveResult};

use crate::geom::{
    cone_contains_with_margin, cone_from_obstacle_discs, cross, point_in_disc_hull, tangent_rays,
    Disc, GeomError, Vec2, VelocityCone, EPS,
};
use crate::model::{Agent, AgentId, Group, Obstacle};

/// Margin used when testing candidate velocities against cones: points on a
/// cone boundary count as outside.
const FEASIBILITY_MARGIN: f64 = 1e-7;

/// Safety margin (m) added to the combined radius when constructing
/// agent-agent and agent-obstacle constraints. Exact reciprocal avoidance
/// steers grazing trajectories with zero clearance; the margin keeps the
/// numerical graze from registering as contact. Collision metrics use the
/// true radii.
pub const CONSTRUCTION_MARGIN: f64 = 0.03;

/// The two group members whose expanded tangent rays bound the agent-group
/// velocity obstacle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtremePair {
    /// Member with the counterclockwise-most left tangent ray.
    pub left: AgentId,
    /// Member with the clockwise-most right tangent ray.
    pub right: AgentId,
}

fn expanded_member_discs(observer_pos: Vec2, observer_radius: f64, group: &Group, agents: &[Agent]) -> Vec<Disc> {
    group
        .members
        .iter()
        .map(|&id| {
            let m = &agents[id];
            Disc::new(m.position - observer_pos, m.radius + observer_radius)
        })
        .collect()
}

/// The velocity obstacle for `observer` induced by `group`: the cone with
/// apex at the group's mean velocity whose boundary rays are tangent to the
/// hull of the member discs each expanded by the observer radius, truncated
/// at the `tau` horizon (pass `f64::INFINITY` for the untruncated cone).
///
/// A velocity outside the returned cone guarantees no observer-group overlap
/// within `tau` while the group keeps its mean velocity.
pub fn agent_group_vo(
    observer: &Agent,
    group: &Group,
    agents: &[Agent],
    tau: f64,
) -> Result<VelocityCone, GeomError> {
    debug_assert!(!group.members.contains(&observer.id), "observer must not be a member");
    let discs = expanded_member_discs(observer.position, observer.radius, group, agents);
    cone_from_obstacle_discs(group.mean_velocity, &discs, Some(tau))
}

/// Velocity obstacle seen from an arbitrary probe state rather than a real
/// agent (used for group-vs-group collision prediction).
pub fn probe_group_vo(
    probe_pos: Vec2,
    probe_radius: f64,
    group: &Group,
    agents: &[Agent],
    tau: f64,
) -> Result<VelocityCone, GeomError> {
    let discs = expanded_member_discs(probe_pos, probe_radius, group, agents);
    cone_from_obstacle_discs(group.mean_velocity, &discs, Some(tau))
}

/// The extreme members of `group` as observed from `observer`: the member
/// whose expanded left tangent ray is counterclockwise-most and the member
/// whose expanded right tangent ray is clockwise-most. Ties go to the lower
/// agent id; both coincide for singleton groups.
pub fn extreme_agents(
    observer_pos: Vec2,
    observer_radius: f64,
    group: &Group,
    agents: &[Agent],
) -> Result<ExtremePair, GeomError> {
    let discs = expanded_member_discs(observer_pos, observer_radius, group, agents);
    if point_in_disc_hull(&discs, Vec2::ZERO) {
        return Err(GeomError::AlreadyColliding);
    }
    let mut left: Option<(Vec2, AgentId)> = None;
    let mut right: Option<(Vec2, AgentId)> = None;
    for (disc, &id) in discs.iter().zip(&group.members) {
        let (l, r) = tangent_rays(Vec2::ZERO, disc.center, disc.radius)?;
        left = Some(match left {
            Some((cur, cid)) if cross(cur, l) <= 0.0 => (cur, cid),
            _ => (l, id),
        });
        right = Some(match right {
            Some((cur, cid)) if cross(cur, r) >= 0.0 => (cur, cid),
            _ => (r, id),
        });
    }
    Ok(ExtremePair {
        left: left.unwrap().1,
        right: right.unwrap().1,
    })
}

/// Reciprocal avoidance constraint on `a`'s velocity induced by neighbor
/// `b`: if both agents pick velocities in their respective half-planes, no
/// collision occurs within `tau`. Each agent takes half the minimal
/// correction. Already-overlapping pairs get a penetration-resolution
/// constraint that pushes them apart within one `dt`.
pub fn orca_halfplane(a: &Agent, b: &Agent, tau: f64, dt: f64) -> HalfPlane {
    debug_assert!(a.id != b.id);
    let relative_position = b.position - a.position;
    let relative_velocity = a.velocity - b.velocity;
    let dist_sq = relative_position.norm_sq();
    let combined_radius = a.radius + b.radius + CONSTRUCTION_MARGIN;
    let combined_radius_sq = combined_radius * combined_radius;

    let (u, normal);
    if dist_sq > combined_radius_sq {
        let w = relative_velocity - relative_position / tau;
        let w_len_sq = w.norm_sq();
        let dot1 = w.dot(relative_position);
        if dot1 < 0.0 && dot1 * dot1 > combined_radius_sq * w_len_sq {
            // project on the cutoff circle
            let w_len = w_len_sq.sqrt();
            let unit_w = w / w_len;
            normal = unit_w;
            u = unit_w * (combined_radius / tau - w_len);
        } else {
            // project on the nearer leg
            let leg = (dist_sq - combined_radius_sq).sqrt();
            let dir = if cross(relative_position, w) > 0.0 {
                Vec2::new(
                    relative_position.x * leg - relative_position.y * combined_radius,
                    relative_position.x * combined_radius + relative_position.y * leg,
                ) / dist_sq
            } else {
                Vec2::new(
                    relative_position.x * leg + relative_position.y * combined_radius,
                    -relative_position.x * combined_radius + relative_position.y * leg,
                ) * (-1.0 / dist_sq)
            };
            let dot2 = relative_velocity.dot(dir);
            u = dir * dot2 - relative_velocity;
            normal = dir.perp_ccw();
        }
    } else {
        // already overlapping: push apart within one time step
        let inv_dt = 1.0 / dt;
        let w = relative_velocity - relative_position * inv_dt;
        match w.normalized() {
            Some(unit_w) => {
                normal = unit_w;
                u = unit_w * (combined_radius * inv_dt - w.norm());
            }
            None => {
                log::debug!(
                    "degenerate pair ({}, {}): coincident positions and velocities",
                    a.id,
                    b.id
                );
                normal = Vec2::new(1.0, 0.0);
                u = normal * (combined_radius * inv_dt);
            }
        }
    }
    HalfPlane {
        point: a.velocity + u * 0.5,
        normal,
    }
}

/// Half-plane constraints keeping `agent` out of a static convex obstacle.
/// The agent takes full responsibility; obstacles cannot yield.
///
/// While the agent is outside the polygon, each nearby edge limits the
/// approach rate toward its nearest segment point so the remaining gap
/// cannot be closed within `tau`. Constraining toward the segment (rather
/// than the edge's infinite supporting line) leaves motion past an edge's
/// end unrestricted. If the agent has penetrated the polygon, a single
/// constraint pushes it out through the nearest edge within one `dt`.
pub fn obstacle_halfplanes(
    agent: &Agent,
    obstacle: &Obstacle,
    tau: f64,
    dt: f64,
    range: f64,
    out: &mut Vec<HalfPlane>,
) {
    let verts = obstacle.polygon.vertices();
    let n = verts.len();
    if n < 3 {
        return;
    }
    if obstacle.polygon.contains(agent.position) {
        // penetration: exit through the least-deep edge line
        let mut best_exit: Option<HalfPlane> = None;
        let mut best_gap = f64::NEG_INFINITY;
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            let Some(edge_dir) = (b - a).normalized() else {
                continue;
            };
            let normal = edge_dir.perp_cw();
            let gap = (agent.position - a).dot(normal) - agent.radius - CONSTRUCTION_MARGIN;
            if gap > best_gap {
                best_gap = gap;
                best_exit = Some(HalfPlane { point: normal * (-gap / dt), normal });
            }
        }
        out.extend(best_exit);
        return;
    }
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let ab = b - a;
        let len_sq = ab.norm_sq();
        if len_sq <= EPS * EPS {
            continue;
        }
        let t = ((agent.position - a).dot(ab) / len_sq).clamp(0.0, 1.0);
        let nearest = a + ab * t;
        let Some(normal) = (agent.position - nearest).normalized() else {
            continue;
        };
        let gap = agent.position.dist(nearest) - agent.radius - CONSTRUCTION_MARGIN;
        if gap > range {
            continue;
        }
        let horizon = if gap < 0.0 { dt } else { tau };
        out.push(HalfPlane {
            point: normal * (-gap / horizon),
            normal,
        });
    }
}

/// Boundary feature of a velocity-obstacle union, in absolute velocity
/// space. The speed limit circle is also represented as a feature.
enum Feature {
    Ray { origin: Vec2, dir: Vec2 },
    Circle { center: Vec2, radius: f64 },
    Segment { a: Vec2, b: Vec2 },
}

impl Feature {
    fn project(&self, p: Vec2) -> Vec2 {
        match *self {
            Feature::Ray { origin, dir } => origin + dir * dir.dot(p - origin).max(0.0),
            Feature::Circle { center, radius } => {
                let d = (p - center).normalized().unwrap_or(Vec2::new(1.0, 0.0));
                center + d * radius
            }
            Feature::Segment { a, b } => {
                let ab = b - a;
                let len_sq = ab.norm_sq();
                if len_sq <= EPS * EPS {
                    return a;
                }
                let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
                a + ab * t
            }
        }
    }
}

fn push_line_circle(
    origin: Vec2,
    dir: Vec2,
    center: Vec2,
    radius: f64,
    t_valid: impl Fn(f64) -> bool,
    out: &mut Vec<Vec2>,
) {
    // |origin + dir t - center|^2 = radius^2, dir unit or not
    let oc = origin - center;
    let a = dir.norm_sq();
    if a <= EPS * EPS {
        return;
    }
    let b = 2.0 * dir.dot(oc);
    let c = oc.norm_sq() - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return;
    }
    let sq = disc.sqrt();
    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
        if t_valid(t) {
            out.push(origin + dir * t);
        }
    }
}

fn push_line_line(
    p1: Vec2,
    d1: Vec2,
    p2: Vec2,
    d2: Vec2,
    valid: impl Fn(f64, f64) -> bool,
    out: &mut Vec<Vec2>,
) {
    let denom = cross(d1, d2);
    if denom.abs() <= EPS {
        return;
    }
    let t1 = cross(p2 - p1, d2) / denom;
    let t2 = cross(p2 - p1, d1) / denom;
    if valid(t1, t2) {
        out.push(p1 + d1 * t1);
    }
}

fn feature_intersections(f1: &Feature, f2: &Feature, out: &mut Vec<Vec2>) {
    use Feature::*;
    match (f1, f2) {
        (Ray { origin: o1, dir: d1 }, Ray { origin: o2, dir: d2 }) => {
            push_line_line(*o1, *d1, *o2, *d2, |t, s| t >= 0.0 && s >= 0.0, out);
        }
        (Ray { origin, dir }, Circle { center, radius })
        | (Circle { center, radius }, Ray { origin, dir }) => {
            push_line_circle(*origin, *dir, *center, *radius, |t| t >= 0.0, out);
        }
        (Ray { origin, dir }, Segment { a, b }) | (Segment { a, b }, Ray { origin, dir }) => {
            push_line_line(
                *origin,
                *dir,
                *a,
                *b - *a,
                |t, s| t >= 0.0 && (0.0..=1.0).contains(&s),
                out,
            );
        }
        (Circle { center: c1, radius: r1 }, Circle { center: c2, radius: r2 }) => {
            let d = *c2 - *c1;
            let dist = d.norm();
            if dist <= EPS || dist > r1 + r2 || dist < (r1 - r2).abs() {
                return;
            }
            let a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
            let h_sq = r1 * r1 - a * a;
            if h_sq < 0.0 {
                return;
            }
            let h = h_sq.sqrt();
            let base = *c1 + d * (a / dist);
            let off = d.perp_ccw() * (h / dist);
            out.push(base + off);
            out.push(base - off);
        }
        (Circle { center, radius }, Segment { a, b })
        | (Segment { a, b }, Circle { center, radius }) => {
            push_line_circle(
                *a,
                *b - *a,
                *center,
                *radius,
                |t| (0.0..=1.0).contains(&t),
                out,
            );
        }
        (Segment { a: a1, b: b1 }, Segment { a: a2, b: b2 }) => {
            push_line_line(
                *a1,
                *b1 - *a1,
                *a2,
                *b2 - *a2,
                |t, s| (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s),
                out,
            );
        }
    }
}

fn cone_features(cone: &VelocityCone, out: &mut Vec<Feature>) {
    out.push(Feature::Ray { origin: cone.apex, dir: cone.left_dir });
    out.push(Feature::Ray { origin: cone.apex, dir: cone.right_dir });
    if let Some(cutoff) = &cone.cutoff {
        for d in &cutoff.discs {
            out.push(Feature::Circle {
                center: cone.apex + d.center,
                radius: d.radius,
            });
        }
        for b in &cutoff.bridges {
            out.push(Feature::Segment {
                a: cone.apex + b.a,
                b: cone.apex + b.b,
            });
        }
    }
}

/// The velocity outside the union of `cones` and within the speed disc that
/// is closest to `v_pref`, or `None` when no feasible candidate exists.
///
/// Exact among the enumerated candidates: the clamped preferred velocity,
/// projections of `v_pref` onto every cone boundary feature (rays, cutoff
/// arcs and cutoff bridge segments), and all pairwise intersections of
/// boundary features including the speed circle.
pub fn closest_outside_union(
    cones: &[VelocityCone],
    v_pref: Vec2,
    max_speed: f64,
) -> Option<Vec2> {
    let is_feasible = |v: Vec2| {
        v.norm() <= max_speed + EPS
            && cones
                .iter()
                .all(|c| !cone_contains_with_margin(c, v, FEASIBILITY_MARGIN))
    };

    let clamped = v_pref.clamp_norm(max_speed);
    if is_feasible(clamped) {
        return Some(clamped);
    }

    let mut features: Vec<Feature> = Vec::new();
    for cone in cones {
        cone_features(cone, &mut features);
    }
    features.push(Feature::Circle {
        center: Vec2::ZERO,
        radius: max_speed,
    });

    let mut candidates: Vec<Vec2> = Vec::with_capacity(features.len() * 3);
    for f in &features {
        candidates.push(f.project(v_pref));
    }
    for i in 0..features.len() {
        for j in (i + 1)..features.len() {
            feature_intersections(&features[i], &features[j], &mut candidates);
        }
    }

    let mut order: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (c.dist_sq(v_pref), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    for (_, i) in order {
        let c = candidates[i];
        if c.norm() > max_speed + EPS {
            continue;
        }
        if is_feasible(c) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::cone_contains;
    use crate::model::Agent;

    fn agent(id: AgentId, pos: Vec2, vel: Vec2, radius: f64) -> Agent {
        let mut a = Agent::new(id, pos, pos + Vec2::new(10.0, 0.0));
        a.velocity = vel;
        a.radius = radius;
        a
    }

    fn group_of(id: u64, members: Vec<AgentId>, agents: &[Agent]) -> Group {
        Group::new(id, members, agents)
    }

    #[test]
    fn singleton_group_vo_matches_two_agent_vo() {
        // observer r=0 at origin; member at (2,0) r=1, still: rays at +/-30 deg
        let agents = vec![
            agent(0, Vec2::ZERO, Vec2::ZERO, 1e-12),
            agent(1, Vec2::new(2.0, 0.0), Vec2::ZERO, 1.0),
        ];
        let g = group_of(0, vec![1], &agents);
        let cone = agent_group_vo(&agents[0], &g, &agents, f64::INFINITY).unwrap();
        let ang = 30f64.to_radians();
        assert!(cone.left_dir.dist(Vec2::new(ang.cos(), ang.sin())) < 1e-6);
        assert!(cone.right_dir.dist(Vec2::new(ang.cos(), -ang.sin())) < 1e-6);
        assert!(cone.cutoff.is_none());
        assert!(cone_contains(&cone, Vec2::new(1.0, 0.0)));
        assert!(!cone_contains(&cone, Vec2::new(-1.0, 0.0)));
    }

    #[test]
    fn extreme_agents_by_angular_order() {
        let agents = vec![
            agent(0, Vec2::ZERO, Vec2::ZERO, 1e-12),
            agent(1, Vec2::new(3.0, 1.0), Vec2::ZERO, 1e-12),
            agent(2, Vec2::new(4.0, 0.0), Vec2::ZERO, 1e-12),
            agent(3, Vec2::new(3.0, -1.0), Vec2::ZERO, 1e-12),
        ];
        let g = group_of(0, vec![1, 2, 3], &agents);
        let pair = extreme_agents(agents[0].position, agents[0].radius, &g, &agents).unwrap();
        assert_eq!(pair.left, 1);
        assert_eq!(pair.right, 3);
    }

    #[test]
    fn extreme_agents_singleton_coincide() {
        let agents = vec![
            agent(0, Vec2::ZERO, Vec2::ZERO, 0.3),
            agent(1, Vec2::new(5.0, 0.0), Vec2::ZERO, 0.3),
        ];
        let g = group_of(0, vec![1], &agents);
        let pair = extreme_agents(agents[0].position, agents[0].radius, &g, &agents).unwrap();
        assert_eq!(pair.left, 1);
        assert_eq!(pair.right, 1);
    }

    #[test]
    fn receding_neighbor_keeps_current_velocity_permitted() {
        // b far ahead and receding fast: no threat within tau
        let a = agent(0, Vec2::ZERO, Vec2::new(1.0, 0.0), 0.3);
        let b = agent(1, Vec2::new(10.0, 0.0), Vec2::new(3.0, 0.0), 0.3);
        let hp = orca_halfplane(&a, &b, 4.0, 0.1);
        assert!(hp.permits(a.velocity));
    }

    #[test]
    fn symmetric_head_on_constraints_mirror() {
        let a = agent(0, Vec2::ZERO, Vec2::new(1.0, 0.0), 0.3);
        let b = agent(1, Vec2::new(6.0, 0.0), Vec2::new(-1.0, 0.0), 0.3);
        let ha = orca_halfplane(&a, &b, 4.0, 0.1);
        let hb = orca_halfplane(&b, &a, 4.0, 0.1);
        // mirrored across the line joining them (the x axis): the two
        // constraints are reflections with opposite x orientation
        assert!((ha.normal.x + hb.normal.x).abs() < 1e-9);
        assert!((ha.normal.y - hb.normal.y).abs() < 1e-9 || (ha.normal.y + hb.normal.y).abs() < 1e-9);
        assert!(!ha.permits(a.velocity));
        assert!(!hb.permits(b.velocity));
    }

    #[test]
    fn coincident_pair_uses_fallback_normal() {
        let a = agent(0, Vec2::ZERO, Vec2::ZERO, 0.3);
        let b = agent(1, Vec2::ZERO, Vec2::ZERO, 0.3);
        let hp = orca_halfplane(&a, &b, 4.0, 0.1);
        assert_eq!(hp.normal, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn corridor_walls_do_not_constrain_along_axis() {
        use crate::geom::convex_hull;
        use crate::model::Obstacle;
        // long wall to the agent's left; walking parallel to it must stay
        // unconstrained even though the agent is inside the wall's long slab
        let wall = Obstacle {
            polygon: convex_hull(&[
                Vec2::new(-10.0, 1.0),
                Vec2::new(10.0, 1.0),
                Vec2::new(10.0, 3.0),
                Vec2::new(-10.0, 3.0),
            ])
            .unwrap(),
        };
        let a = agent(0, Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), 0.3);
        let mut constraints = Vec::new();
        obstacle_halfplanes(&a, &wall, 4.0, 0.1, 10.0, &mut constraints);
        assert!(!constraints.is_empty());
        let v_along = Vec2::new(1.4, 0.0);
        assert!(constraints.iter().all(|c| c.permits(v_along)), "walking parallel is free");
        // approaching the wall fast is forbidden
        assert!(constraints.iter().any(|c| !c.permits(Vec2::new(0.0, 1.0))));
        let r = solve_velocity(&constraints, v_along, 2.0);
        assert!(r.feasible);
        assert!(r.velocity.dist(v_along) < 1e-9);
    }

    #[test]
    fn penetrating_agent_gets_single_push_out() {
        use crate::geom::convex_hull;
        use crate::model::Obstacle;
        let block = Obstacle {
            polygon: convex_hull(&[
                Vec2::new(-1.0, -1.0),
                Vec2::new(1.0, -1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(-1.0, 1.0),
            ])
            .unwrap(),
        };
        let a = agent(0, Vec2::new(0.8, 0.0), Vec2::ZERO, 0.3);
        let mut constraints = Vec::new();
        obstacle_halfplanes(&a, &block, 4.0, 0.1, 10.0, &mut constraints);
        assert_eq!(constraints.len(), 1);
        // nearest exit is through the +x face
        assert!(constraints[0].normal.dist(Vec2::new(1.0, 0.0)) < 1e-9);
        assert!(!constraints[0].permits(Vec2::ZERO), "standing still stays inside");
    }

    #[test]
    fn pref_outside_all_cones_returned_unchanged() {
        let cone = VelocityCone {
            apex: Vec2::ZERO,
            left_dir: Vec2::new(0.8, 0.6),
            right_dir: Vec2::new(0.8, -0.6),
            cutoff: None,
        };
        let v = closest_outside_union(&[cone], Vec2::new(-1.0, 0.0), 2.0).unwrap();
        assert!(v.dist(Vec2::new(-1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn pref_inside_cone_projects_to_nearest_ray() {
        let cone = VelocityCone {
            apex: Vec2::ZERO,
            left_dir: Vec2::new(0.8, 0.6),
            right_dir: Vec2::new(0.8, -0.6),
            cutoff: None,
        };
        let v_pref = Vec2::new(1.0, 0.2);
        let v = closest_outside_union(&[cone.clone()], v_pref, 2.0).unwrap();
        // nearest boundary is the left ray; check it is on the ray and no
        // farther than the analytic projection
        let t = cone.left_dir.dot(v_pref);
        let proj = cone.left_dir * t;
        assert!(v.dist(proj) < 1e-6);
    }
}
