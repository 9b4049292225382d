//! Incremental 2D linear program over half-plane constraints inside a speed
//! disc, with a fallback that minimizes the maximum constraint violation
//! when the intersection is empty.

use crate::geom::{cross, Vec2};

const LP_EPS: f64 = 1e-10;

/// A linear constraint on velocity space. Velocities `v` with
/// `(v - point) . normal >= 0` are permitted.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    /// A point on the boundary line.
    pub point: Vec2,
    /// Unit normal pointing into the permitted side.
    pub normal: Vec2,
}

impl HalfPlane {
    /// Boundary direction such that the permitted side lies to its left.
    pub(crate) fn direction(&self) -> Vec2 {
        Vec2::new(self.normal.y, -self.normal.x)
    }

    pub fn permits(&self, v: Vec2) -> bool {
        self.violation(v) <= crate::geom::EPS
    }

    /// Penetration depth of `v` into the forbidden side (negative when
    /// permitted with margin).
    pub fn violation(&self, v: Vec2) -> f64 {
        -(v - self.point).dot(self.normal)
    }
}

/// Result of a velocity solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveResult {
    pub velocity: Vec2,
    /// False when the constraint intersection was empty and the returned
    /// velocity instead minimizes the maximum violation.
    pub feasible: bool,
}

/// Velocity in the intersection of `constraints` and the disc of radius
/// `max_speed` closest to `v_pref`. When the intersection is empty, the
/// velocity minimizing the maximum constraint violation is returned and
/// flagged infeasible.
pub fn solve_velocity(constraints: &[HalfPlane], v_pref: Vec2, max_speed: f64) -> SolveResult {
    debug_assert!(max_speed > 0.0);
    let mut result = Vec2::ZERO;
    match program2(constraints, max_speed, v_pref, false, &mut result) {
        None => SolveResult { velocity: result, feasible: true },
        Some(begin) => {
            program3(constraints, begin, max_speed, &mut result);
            // program3 fixes the minimal violation level but leaves ties on
            // that frontier at arbitrary extreme points; re-solve toward
            // v_pref within the constraints relaxed by that level.
            let level = constraints
                .iter()
                .map(|c| c.violation(result))
                .fold(0.0f64, f64::max)
                + 1e-9;
            let relaxed: Vec<HalfPlane> = constraints
                .iter()
                .map(|c| HalfPlane { point: c.point - c.normal * level, normal: c.normal })
                .collect();
            let mut refined = Vec2::ZERO;
            if program2(&relaxed, max_speed, v_pref, false, &mut refined).is_none() {
                result = refined;
            }
            SolveResult { velocity: result, feasible: false }
        }
    }
}

/// Optimize along the boundary line of constraint `line_no`, subject to the
/// previous constraints and the speed disc. Returns false when empty.
fn program1(
    lines: &[HalfPlane],
    line_no: usize,
    radius: f64,
    opt_velocity: Vec2,
    direction_opt: bool,
    result: &mut Vec2,
) -> bool {
    let line = &lines[line_no];
    let dir = line.direction();
    let dot = line.point.dot(dir);
    let discriminant = dot * dot + radius * radius - line.point.norm_sq();
    if discriminant < 0.0 {
        // the line misses the speed disc entirely
        return false;
    }
    let sqrt_d = discriminant.sqrt();
    let mut t_left = -dot - sqrt_d;
    let mut t_right = -dot + sqrt_d;

    for prev in lines.iter().take(line_no) {
        let prev_dir = prev.direction();
        let denominator = cross(dir, prev_dir);
        let numerator = cross(prev_dir, line.point - prev.point);
        if denominator.abs() <= LP_EPS {
            if numerator < 0.0 {
                return false;
            }
            continue;
        }
        let t = numerator / denominator;
        if denominator >= 0.0 {
            t_right = t_right.min(t);
        } else {
            t_left = t_left.max(t);
        }
        if t_left > t_right {
            return false;
        }
    }

    if direction_opt {
        if opt_velocity.dot(dir) > 0.0 {
            *result = line.point + dir * t_right;
        } else {
            *result = line.point + dir * t_left;
        }
    } else {
        let t = dir.dot(opt_velocity - line.point).clamp(t_left, t_right);
        *result = line.point + dir * t;
    }
    true
}

/// Incremental optimization over all constraints. Returns `Some(i)` when
/// constraint `i` made the program infeasible.
fn program2(
    lines: &[HalfPlane],
    radius: f64,
    opt_velocity: Vec2,
    direction_opt: bool,
    result: &mut Vec2,
) -> Option<usize> {
    if direction_opt {
        // opt_velocity is a unit direction
        *result = opt_velocity * radius;
    } else if opt_velocity.norm_sq() > radius * radius {
        *result = opt_velocity.normalized().map_or(Vec2::ZERO, |d| d * radius);
    } else {
        *result = opt_velocity;
    }
    for i in 0..lines.len() {
        if lines[i].violation(*result) > 0.0 {
            let temp = *result;
            if !program1(lines, i, radius, opt_velocity, direction_opt, result) {
                *result = temp;
                return Some(i);
            }
        }
    }
    None
}

/// Infeasible fallback: move toward the point minimizing the maximum
/// violation over all constraints (all constraints are treated as equally
/// soft).
fn program3(lines: &[HalfPlane], begin_line: usize, radius: f64, result: &mut Vec2) {
    let mut distance = 0.0;
    for i in begin_line..lines.len() {
        if lines[i].violation(*result) <= distance {
            continue;
        }
        let dir_i = lines[i].direction();
        let mut proj_lines: Vec<HalfPlane> = Vec::new();
        for line_j in lines.iter().take(i) {
            let dir_j = line_j.direction();
            let denominator = cross(dir_i, dir_j);
            let point = if denominator.abs() <= LP_EPS {
                if dir_i.dot(dir_j) > 0.0 {
                    // same direction: constraint j dominates or is dominated
                    continue;
                }
                (lines[i].point + line_j.point) * 0.5
            } else {
                lines[i].point + dir_i * (cross(dir_j, lines[i].point - line_j.point) / denominator)
            };
            let Some(direction) = (dir_j - dir_i).normalized() else {
                continue;
            };
            // permitted side left of `direction`
            proj_lines.push(HalfPlane {
                point,
                normal: direction.perp_ccw(),
            });
        }
        let temp = *result;
        if program2(&proj_lines, radius, lines[i].normal, true, result).is_some() {
            // result of this round is undefined; keep the previous best
            *result = temp;
        }
        distance = lines[i].violation(*result);
    }
}
