//! Brute-force reference implementations used by the test suites.
//!
//! Everything here is deliberately independent of the production code paths
//! it checks: hulls are verified by triangle containment, partitions by a
//! union-find over all pairs, velocity solves by dense sampling with local
//! refinement, and velocity-obstacle membership by direct simulation of the
//! collision condition.
//!
//! Compiled only with the `oracles` feature; not part of the simulation.

use crate::geom::Vec2;

/// O(n^3) convex-hull vertex set: a point is a hull vertex iff it is not
/// strictly inside any triangle of other points and is not strictly inside
/// any segment of two other points. Returns the vertex set (unsorted).
pub fn brute_force_hull_vertices(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup_by(|a, b| a.dist(*b) <= 1e-9);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let cross3 = |a: Vec2, b: Vec2, c: Vec2| (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let mut verts = Vec::new();
    'candidate: for (i, &p) in pts.iter().enumerate() {
        // inside some triangle (including its boundary, excluding p itself
        // being a triangle corner) means not a hull vertex
        for a in 0..n {
            if a == i {
                continue;
            }
            for b in (a + 1)..n {
                if b == i {
                    continue;
                }
                // collinear containment: p strictly between a and b
                let ab = cross3(pts[a], pts[b], p);
                if ab.abs() <= 1e-12 {
                    let t = (p - pts[a]).dot(pts[b] - pts[a]) / pts[b].dist_sq(pts[a]);
                    if t > 1e-12 && t < 1.0 - 1e-12 {
                        continue 'candidate;
                    }
                }
                for c in (b + 1)..n {
                    if c == i {
                        continue;
                    }
                    let orient = cross3(pts[a], pts[b], pts[c]);
                    if orient.abs() <= 1e-12 {
                        continue;
                    }
                    let d1 = cross3(pts[a], pts[b], p);
                    let d2 = cross3(pts[b], pts[c], p);
                    let d3 = cross3(pts[c], pts[a], p);
                    let all_nonneg = d1 >= -1e-12 && d2 >= -1e-12 && d3 >= -1e-12;
                    let all_nonpos = d1 <= 1e-12 && d2 <= 1e-12 && d3 <= 1e-12;
                    if all_nonneg || all_nonpos {
                        continue 'candidate;
                    }
                }
            }
        }
        verts.push(p);
    }
    verts
}

/// Union-find over all O(n^2) pairs: the reference partition for the
/// similarity clustering. `related` is the pairwise relation.
pub fn union_find_partition(
    n: usize,
    related: impl Fn(usize, usize) -> bool,
) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if related(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    comps.into_values().collect()
}

/// Best feasible point found by dense grid sampling plus local refinement.
#[derive(Clone, Copy, Debug)]
pub struct SampledOptimum {
    pub point: Vec2,
    pub distance: f64,
}

/// Sample the disc of radius `max_speed` on a `resolution^2` grid, keep the
/// feasible point nearest `target`, then refine locally for `rounds` rounds,
/// shrinking the window each time. Returns `None` when no feasible sample is
/// found anywhere.
pub fn sampled_nearest_feasible(
    target: Vec2,
    max_speed: f64,
    resolution: usize,
    rounds: usize,
    feasible: impl Fn(Vec2) -> bool,
) -> Option<SampledOptimum> {
    let mut best: Option<Vec2> = None;
    let mut best_d = f64::INFINITY;
    let step = 2.0 * max_speed / resolution as f64;
    for i in 0..=resolution {
        for j in 0..=resolution {
            let p = Vec2::new(
                -max_speed + step * i as f64,
                -max_speed + step * j as f64,
            );
            if p.norm() > max_speed {
                continue;
            }
            let d = p.dist(target);
            if d < best_d && feasible(p) {
                best_d = d;
                best = Some(p);
            }
        }
    }
    let mut center = best?;
    // refinement windows must overlap the coarse-grid error (up to one cell
    // diagonal), so start at twice the grid step and shrink by 4 per round
    let mut window = 2.0 * step;
    for _ in 0..rounds {
        let local = 16;
        let lstep = 2.0 * window / local as f64;
        for i in 0..=local {
            for j in 0..=local {
                let p = center + Vec2::new(-window + lstep * i as f64, -window + lstep * j as f64);
                if p.norm() > max_speed {
                    continue;
                }
                let d = p.dist(target);
                if d < best_d && feasible(p) {
                    best_d = d;
                    center = p;
                }
            }
        }
        window *= 0.25;
    }
    Some(SampledOptimum { point: center, distance: best_d })
}

/// A disc obstacle for the time-sweep oracle.
#[derive(Clone, Copy, Debug)]
pub struct OracleDisc {
    pub center: Vec2,
    pub radius: f64,
}

/// Distance from `p` to the convex hull of `discs`, computed through the
/// support function: `dist = max over unit directions u of (p.u - h(u))`
/// with `h(u) = max_b (c_b.u + r_b)`, clamped at 0 inside.
///
/// Writing `u = (cos t, sin t)` the objective is a lower envelope of shifted
/// cosines `min_b (|p - c_b| cos(t - phi_b) - r_b)`; its maximum lies either
/// at the peak of one term or at a crossing of two terms, so the candidate
/// set is exact.
pub fn support_distance_to_disc_hull(discs: &[OracleDisc], p: Vec2) -> f64 {
    let terms: Vec<(f64, f64, f64)> = discs
        .iter()
        .map(|d| {
            let delta = p - d.center;
            (delta.norm(), delta.y.atan2(delta.x), d.radius)
        })
        .collect();
    let eval = |theta: f64| {
        terms
            .iter()
            .map(|&(a, phi, r)| a * (theta - phi).cos() - r)
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = f64::NEG_INFINITY;
    for &(_, phi, _) in &terms {
        best = best.max(eval(phi));
    }
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            // crossing of terms i and j:
            // a_i cos(t - phi_i) - a_j cos(t - phi_j) = r_i - r_j
            let (ai, pi_, ri) = terms[i];
            let (aj, pj, rj) = terms[j];
            let a = ai * pi_.cos() - aj * pj.cos();
            let b = ai * pi_.sin() - aj * pj.sin();
            let c = ri - rj;
            let m = (a * a + b * b).sqrt();
            if m < 1e-15 || (c / m).abs() > 1.0 {
                continue;
            }
            let base = b.atan2(a);
            let off = (c / m).acos();
            for theta in [base + off, base - off] {
                best = best.max(eval(theta));
            }
        }
    }
    best.max(0.0)
}

/// Verdict of the time-sweep collision oracle with a numerical safety band.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVerdict {
    Collides,
    Misses,
    /// Within the tolerance band of the boundary; not usable for
    /// equivalence checks.
    Marginal,
}

/// Direct simulation of the collision condition behind the velocity
/// obstacle: march `t` over `[0, tau]` and test whether the observer disc
/// (radius `observer_radius`, start `observer_pos`, relative velocity
/// `velocity - group_velocity`) overlaps the hull of the member discs.
/// The minimum clearance over time decides the verdict; `band` guards
/// against discretization error near the boundary.
pub fn time_sweep_verdict(
    observer_pos: Vec2,
    observer_radius: f64,
    velocity: Vec2,
    group_velocity: Vec2,
    members: &[OracleDisc],
    tau: f64,
    steps: usize,
    band: f64,
) -> SweepVerdict {
    let rel = velocity - group_velocity;
    let clearance = |t: f64| {
        let p = observer_pos + rel * t;
        support_distance_to_disc_hull(members, p) - observer_radius
    };
    // clearance along an affine path to a convex set is convex in t:
    // bracket the minimum on a coarse grid, then golden-section it.
    let mut best_t = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..=steps {
        let t = tau * k as f64 / steps as f64;
        let c = clearance(t);
        if c < best {
            best = c;
            best_t = t;
        }
    }
    let dt = tau / steps as f64;
    let (mut lo, mut hi) = ((best_t - dt).max(0.0), (best_t + dt).min(tau));
    for _ in 0..60 {
        let m1 = lo + (hi - lo) * 0.382;
        let m2 = lo + (hi - lo) * 0.618;
        if clearance(m1) < clearance(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let min_clearance = best.min(clearance(0.5 * (lo + hi)));
    if min_clearance.abs() <= band {
        SweepVerdict::Marginal
    } else if min_clearance < 0.0 {
        SweepVerdict::Collides
    } else {
        SweepVerdict::Misses
    }
}

/// Kahan-compensated mean of a sequence of points, as an independent check
/// of cached group statistics.
pub fn compensated_mean(points: &[Vec2]) -> Vec2 {
    let mut sum = Vec2::ZERO;
    let mut comp = Vec2::ZERO;
    for &p in points {
        let y = p - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum / points.len() as f64
}

/// Check that `edges` (follower -> target) form a forest rooted at `leader`:
/// no cycles and every node's chain reaches the leader.
pub fn is_rooted_forest(
    leader: usize,
    edges: &std::collections::BTreeMap<usize, usize>,
) -> bool {
    for (&start, _) in edges {
        let mut node = start;
        let mut hops = 0;
        while node != leader {
            match edges.get(&node) {
                Some(&next) => node = next,
                None => return false,
            }
            hops += 1;
            if hops > edges.len() + 1 {
                return false;
            }
        }
    }
    true
}
