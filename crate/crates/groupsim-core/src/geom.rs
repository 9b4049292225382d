//! 2D vector geometry: cross products, convex hulls, tangent rays to discs,
//! velocity-obstacle cones and their membership tests.
//!
//! Everything here is pure and deterministic. A single tolerance [`EPS`]
//! governs all orientation and containment decisions.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Geometric tolerance used for all orientation/containment tests (meters,
/// or m/s in velocity space).
pub const EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("non-finite coordinate")]
    NonFinite,
    /// The observer is inside (or on) the expanded obstacle set; no tangent
    /// cone exists. Callers treat this as an immediate-collision case.
    #[error("observer already colliding with obstacle set")]
    AlreadyColliding,
}

/// A 2D vector in meters (position space) or meters/second (velocity space).
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Vec2 {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite Vec2({x}, {y})");
        Vec2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Vec2) -> f64 {
        (self - other).norm_sq()
    }

    /// Unit vector in the same direction, or `None` for (near-)zero vectors.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n <= EPS {
            None
        } else {
            Some(self / n)
        }
    }

    /// Rotate 90 degrees counterclockwise.
    pub fn perp_ccw(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Rotate 90 degrees clockwise.
    pub fn perp_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    /// Rotate by `angle` radians (counterclockwise positive).
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }

    /// Clamp the magnitude to at most `max_norm`.
    pub fn clamp_norm(self, max_norm: f64) -> Vec2 {
        let n = self.norm();
        if n > max_norm && n > 0.0 {
            self * (max_norm / n)
        } else {
            self
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        *self = *self + rhs;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        *self = *self - rhs;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// 2D scalar cross product: `a.x * b.y - a.y * b.x`.
///
/// Positive when `b` is counterclockwise of `a`.
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// A disc (filled circle).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: Vec2,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Vec2, radius: f64) -> Disc {
        debug_assert!(radius >= 0.0);
        Disc { center, radius }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.dist(self.center) <= self.radius + EPS
    }
}

/// A convex polygon with vertices in strictly counterclockwise order.
///
/// Degenerate hulls are allowed: a single vertex (point) or two vertices
/// (segment).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Build from vertices that are already a strictly-CCW convex chain.
    /// Returns `None` if the invariant does not hold.
    pub fn from_ccw_vertices(vertices: Vec<Vec2>) -> Option<ConvexPolygon> {
        if vertices.is_empty() || vertices.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let n = vertices.len();
        if n >= 2 {
            for i in 0..n {
                if vertices[i].dist(vertices[(i + 1) % n]) <= EPS && n > 1 {
                    return None;
                }
            }
        }
        if n >= 3 {
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                if cross(b - a, c - b) <= EPS {
                    return None;
                }
            }
        }
        Some(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Twice the signed area (positive for CCW polygons).
    pub fn double_signed_area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc += cross(a, b);
        }
        acc
    }

    /// True when `p` is inside or on the polygon (tolerance [`EPS`]).
    /// Degenerate polygons test distance to the point/segment.
    pub fn contains(&self, p: Vec2) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => p.dist(self.vertices[0]) <= EPS,
            2 => segment_point_distance(self.vertices[0], self.vertices[1], p) <= EPS,
            n => {
                for i in 0..n {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    // signed lateral distance of p from directed edge a->b
                    let d = b - a;
                    let len = d.norm();
                    if cross(d, p - a) < -EPS * len.max(1.0) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance(&self, p: Vec2) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => p.dist(self.vertices[0]),
            2 => segment_point_distance(self.vertices[0], self.vertices[1], p),
            n => {
                if self.contains(p) {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    best = best.min(segment_point_distance(a, b, p));
                }
                best
            }
        }
    }
}

/// Convex hull of `points` in counterclockwise order (monotone chain with
/// lexicographic ordering). Collinear boundary points are excluded; strict
/// turns only. One point yields a 1-vertex hull, collinear inputs a
/// 2-vertex hull.
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon, GeomError> {
    if points.is_empty() {
        return Err(GeomError::EmptyPointSet);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    pts.dedup_by(|a, b| a.dist(*b) <= EPS);

    if pts.len() == 1 {
        return Ok(ConvexPolygon {
            vertices: pts,
        });
    }

    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(
                lower[lower.len() - 1] - lower[lower.len() - 2],
                p - lower[lower.len() - 1],
            ) <= EPS
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(
                upper[upper.len() - 1] - upper[upper.len() - 2],
                p - upper[upper.len() - 1],
            ) <= EPS
        {
            upper.pop();
        }
        upper.push(p);
    }

    if lower.len() == 2 && upper.len() == 2 {
        // all points collinear: keep the two extremes
        return Ok(ConvexPolygon { vertices: lower });
    }

    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(ConvexPolygon { vertices: lower })
}

/// The two unit tangent directions from `observer` to the disc
/// `(center, radius)`. The first returned direction is the counterclockwise-
/// most (left), the second the clockwise-most (right). For radius 0 both
/// equal the direction toward the center.
///
/// Errors with [`GeomError::AlreadyColliding`] when the observer is inside
/// or on the disc.
pub fn tangent_rays(observer: Vec2, center: Vec2, radius: f64) -> Result<(Vec2, Vec2), GeomError> {
    let d = center - observer;
    let dist_sq = d.norm_sq();
    if dist_sq <= radius * radius + EPS {
        return Err(GeomError::AlreadyColliding);
    }
    let dist = dist_sq.sqrt();
    let dir = d / dist;
    if radius <= 0.0 {
        return Ok((dir, dir));
    }
    let sin = radius / dist;
    let cos = (1.0 - sin * sin).max(0.0).sqrt();
    // rotate dir by +alpha (left) and -alpha (right), alpha = asin(radius/dist)
    let left = Vec2::new(dir.x * cos - dir.y * sin, dir.x * sin + dir.y * cos);
    let right = Vec2::new(dir.x * cos + dir.y * sin, -dir.x * sin + dir.y * cos);
    Ok((left, right))
}

/// An outer common tangent segment of two discs that supports their hull.
#[derive(Clone, Copy, Debug)]
pub struct Bridge {
    pub a: Vec2,
    pub b: Vec2,
    /// Outward unit normal of the supporting line.
    pub normal: Vec2,
}

/// Drop discs fully contained in another disc. Deterministic: discs are kept
/// in decreasing-radius order (ties by original index).
fn prune_contained(discs: &[Disc]) -> Vec<Disc> {
    let mut order: Vec<usize> = (0..discs.len()).collect();
    order.sort_by(|&i, &j| {
        discs[j]
            .radius
            .partial_cmp(&discs[i].radius)
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut kept: Vec<Disc> = Vec::new();
    for &i in &order {
        let d = discs[i];
        let contained = kept
            .iter()
            .any(|k| k.center.dist(d.center) + d.radius <= k.radius + EPS);
        if !contained {
            kept.push(d);
        }
    }
    kept
}

/// All outer common tangent segments of `discs` that support the convex hull
/// of the union (every disc on or below the tangent line).
///
/// Together with the discs themselves these segments cover the boundary of
/// the hull of the discs.
pub fn disc_hull_bridges(discs: &[Disc]) -> Vec<Bridge> {
    let kept = prune_contained(discs);
    if kept.len() >= 2 {
        let r0 = kept[0].radius;
        if kept.iter().all(|d| (d.radius - r0).abs() <= EPS) {
            return equal_radius_bridges(&kept, r0);
        }
    }
    let mut bridges = Vec::new();
    for i in 0..kept.len() {
        for j in (i + 1)..kept.len() {
            let (ci, ri) = (kept[i].center, kept[i].radius);
            let (cj, rj) = (kept[j].center, kept[j].radius);
            let d = cj - ci;
            let len = d.norm();
            if len <= EPS {
                continue;
            }
            let dir = d / len;
            let delta = (ri - rj) / len;
            if delta.abs() > 1.0 {
                continue;
            }
            let ortho = (1.0 - delta * delta).max(0.0).sqrt();
            for sign in [1.0, -1.0] {
                let n = dir * delta + dir.perp_ccw() * (ortho * sign);
                let s = ci.dot(n) + ri;
                let supports = kept
                    .iter()
                    .all(|k| k.center.dot(n) + k.radius <= s + 1e-7);
                if supports {
                    let pa = ci + n * ri;
                    let pb = cj + n * rj;
                    if pa.dist(pb) > EPS {
                        bridges.push(Bridge { a: pa, b: pb, normal: n });
                    }
                }
            }
        }
    }
    bridges
}

/// Equal radii: the hull of the discs is the hull of the centers offset by
/// the common radius, so the bridges are exactly the offset hull edges.
fn equal_radius_bridges(discs: &[Disc], radius: f64) -> Vec<Bridge> {
    let centers: Vec<Vec2> = discs.iter().map(|d| d.center).collect();
    let hull = match convex_hull(&centers) {
        Ok(h) => h,
        Err(_) => return Vec::new(),
    };
    let verts = hull.vertices();
    let mut bridges = Vec::new();
    match verts.len() {
        0 | 1 => {}
        2 => {
            // collinear centers: tangents on both sides
            if let Some(dir) = (verts[1] - verts[0]).normalized() {
                for n in [dir.perp_ccw(), dir.perp_cw()] {
                    bridges.push(Bridge {
                        a: verts[0] + n * radius,
                        b: verts[1] + n * radius,
                        normal: n,
                    });
                }
            }
        }
        n => {
            for i in 0..n {
                let a = verts[i];
                let b = verts[(i + 1) % n];
                if let Some(dir) = (b - a).normalized() {
                    let normal = dir.perp_cw();
                    bridges.push(Bridge {
                        a: a + normal * radius,
                        b: b + normal * radius,
                        normal,
                    });
                }
            }
        }
    }
    bridges
}

/// True when `p` lies inside or on the convex hull of `discs`.
pub fn point_in_disc_hull(discs: &[Disc], p: Vec2) -> bool {
    if discs.iter().any(|d| d.contains(p)) {
        return true;
    }
    let bridges = disc_hull_bridges(discs);
    if bridges.is_empty() {
        return false;
    }
    let mut pts: Vec<Vec2> = discs.iter().map(|d| d.center).collect();
    for b in &bridges {
        pts.push(b.a);
        pts.push(b.b);
    }
    match convex_hull(&pts) {
        Ok(poly) => poly.contains(p),
        Err(_) => false,
    }
}

/// Finite-horizon truncation of a [`VelocityCone`].
///
/// Holds the obstacle discs scaled by `1/tau`, expressed relative to the
/// cone apex. A relative velocity `w` leads to a collision within the
/// horizon exactly when the segment from the origin to `w` meets the convex
/// hull of these discs.
#[derive(Clone, Debug)]
pub struct ConeCutoff {
    pub discs: Vec<Disc>,
    pub bridges: Vec<Bridge>,
}

/// A velocity obstacle: a cone in velocity space with apex at the obstacle's
/// translating velocity, bounded by two tangent rays, optionally truncated
/// at a finite time horizon.
#[derive(Clone, Debug)]
pub struct VelocityCone {
    /// Velocity-space apex (the obstacle's translating velocity).
    pub apex: Vec2,
    /// Unit direction of the counterclockwise-most boundary ray.
    pub left_dir: Vec2,
    /// Unit direction of the clockwise-most boundary ray.
    pub right_dir: Vec2,
    /// Time-horizon truncation; `None` means an infinite horizon.
    pub cutoff: Option<ConeCutoff>,
}

/// Construct the velocity cone induced by a set of obstacle discs given in
/// position space **relative to the observer** (the observer sits at the
/// origin). `apex` is the obstacle's translating velocity. A finite
/// `horizon` produces the truncated cone; `None` (or an infinite horizon)
/// the untruncated one.
///
/// Errors with [`GeomError::AlreadyColliding`] when the origin lies inside
/// the hull of the discs.
pub fn cone_from_obstacle_discs(
    apex: Vec2,
    discs: &[Disc],
    horizon: Option<f64>,
) -> Result<VelocityCone, GeomError> {
    if discs.is_empty() {
        return Err(GeomError::EmptyPointSet);
    }
    if point_in_disc_hull(discs, Vec2::ZERO) {
        return Err(GeomError::AlreadyColliding);
    }
    let mut left: Option<Vec2> = None;
    let mut right: Option<Vec2> = None;
    for d in discs {
        let (l, r) = tangent_rays(Vec2::ZERO, d.center, d.radius)?;
        left = Some(match left {
            Some(cur) if cross(cur, l) <= 0.0 => cur,
            _ => l,
        });
        right = Some(match right {
            Some(cur) if cross(cur, r) >= 0.0 => cur,
            _ => r,
        });
    }
    let cutoff = match horizon {
        Some(tau) if tau.is_finite() => {
            debug_assert!(tau > 0.0);
            let scaled: Vec<Disc> = discs
                .iter()
                .map(|d| Disc::new(d.center / tau, d.radius / tau))
                .collect();
            let bridges = disc_hull_bridges(&scaled);
            Some(ConeCutoff { discs: scaled, bridges })
        }
        _ => None,
    };
    Ok(VelocityCone {
        apex,
        left_dir: left.unwrap(),
        right_dir: right.unwrap(),
        cutoff,
    })
}

/// Membership test for a velocity cone; the boundary counts as inside.
pub fn cone_contains(cone: &VelocityCone, v: Vec2) -> bool {
    cone_contains_with_margin(cone, v, 0.0)
}

/// Membership with a shrink margin: with `margin > 0`, points within
/// `margin` of the boundary count as outside (i.e. only the eroded interior
/// is "inside"). `margin = 0` reproduces [`cone_contains`].
pub fn cone_contains_with_margin(cone: &VelocityCone, v: Vec2, margin: f64) -> bool {
    let w = v - cone.apex;
    // Lateral distances from the boundary rays; inside requires w
    // counterclockwise of the right ray and clockwise of the left ray.
    if cross(cone.right_dir, w) < margin - EPS {
        return false;
    }
    if cross(cone.left_dir, w) > -(margin - EPS) {
        return false;
    }
    match &cone.cutoff {
        None => true,
        Some(cutoff) => {
            // Collision within the horizon <=> the segment origin->w meets
            // the hull of the scaled discs.
            for d in &cutoff.discs {
                if segment_point_distance(Vec2::ZERO, w, d.center) <= d.radius - margin + EPS {
                    return true;
                }
            }
            for b in &cutoff.bridges {
                let shift = b.normal * margin;
                if segment_segment_distance(Vec2::ZERO, w, b.a - shift, b.b - shift) <= EPS {
                    return true;
                }
            }
            false
        }
    }
}

/// Distance from point `p` to segment `ab`.
pub fn segment_point_distance(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq <= EPS * EPS {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Minimum distance between segments `ab` and `cd` (0 when they intersect).
pub fn segment_segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_properly_intersect(a, b, c, d) {
        return 0.0;
    }
    segment_point_distance(a, b, c)
        .min(segment_point_distance(a, b, d))
        .min(segment_point_distance(c, d, a))
        .min(segment_point_distance(c, d, b))
}

fn segments_properly_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn cross_orthonormal_basis() {
        assert_eq!(cross(v(1.0, 0.0), v(0.0, 1.0)), 1.0);
    }

    #[test]
    fn cross_parallel_vectors() {
        assert_eq!(cross(v(2.0, 3.0), v(4.0, 6.0)), 0.0);
    }

    #[test]
    fn cross_direct_arithmetic() {
        assert_eq!(cross(v(1.0, 2.0), v(3.0, 4.0)), -2.0);
    }

    #[test]
    fn hull_drops_interior_point() {
        let pts = [
            v(0.0, 0.0),
            v(1.0, 0.0),
            v(1.0, 1.0),
            v(0.0, 1.0),
            v(0.5, 0.5),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 4);
        for p in &pts {
            assert!(hull.contains(*p));
        }
        assert!(hull.double_signed_area() > 0.0);
    }

    #[test]
    fn hull_singleton() {
        let hull = convex_hull(&[v(3.0, -2.0)]).unwrap();
        assert_eq!(hull.len(), 1);
        assert!(hull.contains(v(3.0, -2.0)));
    }

    #[test]
    fn hull_collinear_is_segment() {
        let hull = convex_hull(&[v(0.0, 0.0), v(2.0, 2.0), v(1.0, 1.0)]).unwrap();
        assert_eq!(hull.len(), 2);
        assert!(hull.contains(v(1.5, 1.5)));
        assert!(!hull.contains(v(1.0, 1.2)));
    }

    #[test]
    fn hull_empty_input_errors() {
        assert_eq!(convex_hull(&[]).unwrap_err(), GeomError::EmptyPointSet);
    }

    #[test]
    fn tangent_zero_radius() {
        let (l, r) = tangent_rays(v(0.0, 0.0), v(2.0, 0.0), 0.0).unwrap();
        assert!(l.dist(v(1.0, 0.0)) < 1e-12);
        assert!(r.dist(v(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn tangent_right_angle() {
        let s = std::f64::consts::SQRT_2 / 2.0;
        let (l, r) = tangent_rays(v(0.0, 0.0), v(2.0, 0.0), std::f64::consts::SQRT_2).unwrap();
        assert!(l.dist(v(s, s)) < 1e-12);
        assert!(r.dist(v(s, -s)) < 1e-12);
    }

    #[test]
    fn tangent_inside_disc_errors() {
        assert_eq!(
            tangent_rays(v(0.0, 0.0), v(1.0, 0.0), 2.0).unwrap_err(),
            GeomError::AlreadyColliding
        );
    }

    #[test]
    fn cone_axis_ray_inside_opposite_outside() {
        let inv = 1.0 / 2.0f64.sqrt();
        let cone = VelocityCone {
            apex: Vec2::ZERO,
            left_dir: v(inv, inv),
            right_dir: v(inv, -inv),
            cutoff: None,
        };
        assert!(cone_contains(&cone, v(1.0, 0.0)));
        assert!(!cone_contains(&cone, v(-1.0, 0.0)));
    }

    #[test]
    fn cone_from_single_disc_30_degrees() {
        // disc at distance 2, radius 1: tangents at +/-30 degrees off +x
        let cone = cone_from_obstacle_discs(
            Vec2::ZERO,
            &[Disc::new(v(2.0, 0.0), 1.0)],
            None,
        )
        .unwrap();
        let ang = 30f64.to_radians();
        assert!(cone.left_dir.dist(v(ang.cos(), ang.sin())) < 1e-9);
        assert!(cone.right_dir.dist(v(ang.cos(), -ang.sin())) < 1e-9);
        assert!(cross(cone.right_dir, cone.left_dir) >= 0.0);
    }

    #[test]
    fn truncated_cone_excludes_slow_velocities() {
        // disc 10 m ahead, radius 1, horizon 2 s: only speeds >= ~4.5 m/s
        // toward it can reach within the horizon.
        let cone = cone_from_obstacle_discs(
            Vec2::ZERO,
            &[Disc::new(v(10.0, 0.0), 1.0)],
            Some(2.0),
        )
        .unwrap();
        assert!(!cone_contains(&cone, v(1.0, 0.0)));
        assert!(cone_contains(&cone, v(5.0, 0.0)));
        // boundary: first hit at distance 9, horizon 2 -> 4.5 m/s
        assert!(cone_contains(&cone, v(4.5 + 1e-6, 0.0)));
        assert!(!cone_contains(&cone, v(4.5 - 1e-6, 0.0)));
    }

    #[test]
    fn disc_hull_bridge_region() {
        // two unit discs 4 apart: the stadium contains the midpoint band
        let discs = [Disc::new(v(0.0, 0.0), 1.0), Disc::new(v(4.0, 0.0), 1.0)];
        assert!(point_in_disc_hull(&discs, v(2.0, 0.9)));
        assert!(point_in_disc_hull(&discs, v(2.0, -0.9)));
        assert!(!point_in_disc_hull(&discs, v(2.0, 1.1)));
        assert!(!point_in_disc_hull(&discs, v(-1.5, 0.0)));
    }

    #[test]
    fn contained_disc_is_pruned() {
        let discs = [Disc::new(v(0.0, 0.0), 2.0), Disc::new(v(0.5, 0.0), 0.5)];
        assert!(disc_hull_bridges(&discs).is_empty());
        assert!(point_in_disc_hull(&discs, v(1.9, 0.0)));
    }
}
