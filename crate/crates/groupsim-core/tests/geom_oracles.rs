//! Geometry checked against independent brute-force references.

use groupsim_core::geom::{
    cone_contains, cone_from_obstacle_discs, convex_hull, cross, tangent_rays, Disc, Vec2,
};
use groupsim_core::oracles::{
    brute_force_hull_vertices, time_sweep_verdict, OracleDisc, SweepVerdict,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted_key(points: &[Vec2]) -> Vec<(i64, i64)> {
    let mut keys: Vec<(i64, i64)> = points
        .iter()
        .map(|p| ((p.x * 1e9).round() as i64, ((p.y) * 1e9).round() as i64))
        .collect();
    keys.sort_unstable();
    keys
}

#[test]
fn hull_matches_brute_force_oracle_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..40 {
        let n = if case == 0 { 200 } else { rng.gen_range(3..60) };
        let points: Vec<Vec2> = (0..n)
            .map(|_| Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)))
            .collect();
        let hull = convex_hull(&points).unwrap();
        let oracle = brute_force_hull_vertices(&points);
        assert_eq!(
            sorted_key(hull.vertices()),
            sorted_key(&oracle),
            "hull vertex set differs from oracle (case {case})"
        );
    }
}

#[test]
fn hull_on_grid_points_drops_collinear_boundary() {
    // grid points put many collinear triples on the boundary
    let mut points = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            points.push(Vec2::new(i as f64, j as f64));
        }
    }
    let hull = convex_hull(&points).unwrap();
    assert_eq!(hull.len(), 4, "only the corners survive");
}

#[test]
fn tangent_directions_orthogonal_to_radius_at_tangency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let observer = Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let center = Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let dist = observer.dist(center);
        if dist < 0.2 {
            continue;
        }
        let radius = rng.gen_range(0.01..dist * 0.95);
        let (left, right) = tangent_rays(observer, center, radius).unwrap();
        for dir in [left, right] {
            assert!((dir.norm() - 1.0).abs() < 1e-9);
            // tangency point: observer + dir * sqrt(d^2 - r^2)
            let t = (dist * dist - radius * radius).sqrt();
            let touch = observer + dir * t;
            assert!(
                ((touch - center).norm() - radius).abs() < 1e-7,
                "tangency point on the circle"
            );
            assert!(
                (touch - center).dot(dir).abs() < 1e-7,
                "tangent orthogonal to radius"
            );
        }
        // left is counterclockwise of right
        assert!(cross(right, left) >= -1e-12);
    }
}

#[test]
fn tangent_reflection_swaps_left_and_right() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let observer = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let center = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let dist = observer.dist(center);
        if dist < 0.3 {
            continue;
        }
        let radius = rng.gen_range(0.01..dist * 0.9);
        let (left, right) = tangent_rays(observer, center, radius).unwrap();

        // the configuration is symmetric about the observer-center line, so
        // reflecting across it must swap the two tangents
        let axis = (center - observer).normalized().unwrap();
        let reflect = |v: Vec2| {
            let along = axis * v.dot(axis);
            along * 2.0 - v
        };
        assert!(reflect(left).dist(right) < 1e-9);
        assert!(reflect(right).dist(left) < 1e-9);
    }
}

#[test]
fn cone_membership_matches_time_sweep_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    let mut cases = 0usize;
    while cases < 400 {
        let k = rng.gen_range(1..=6);
        let equal_radii = rng.gen_bool(0.7);
        let base_r = rng.gen_range(0.2..0.8);
        let center = Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(2.5..8.0));
        let discs: Vec<Disc> = (0..k)
            .map(|_| {
                let r = if equal_radii { base_r } else { rng.gen_range(0.2..0.8) };
                Disc::new(
                    center + Vec2::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                    r,
                )
            })
            .collect();
        let tau = rng.gen_range(1.0..6.0);
        let apex = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let Ok(cone) = cone_from_obstacle_discs(apex, &discs, Some(tau)) else {
            continue;
        };
        cases += 1;
        let members: Vec<OracleDisc> = discs
            .iter()
            .map(|d| OracleDisc { center: d.center, radius: d.radius })
            .collect();
        for _ in 0..40 {
            let v = Vec2::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let verdict = time_sweep_verdict(Vec2::ZERO, 0.0, v, apex, &members, tau, 64, 1e-5);
            match verdict {
                SweepVerdict::Marginal => continue,
                SweepVerdict::Collides => {
                    assert!(
                        cone_contains(&cone, v),
                        "oracle collides but membership says outside: v={v:?} tau={tau} discs={discs:?} apex={apex:?}"
                    );
                }
                SweepVerdict::Misses => {
                    assert!(
                        !cone_contains(&cone, v),
                        "oracle misses but membership says inside: v={v:?} tau={tau} discs={discs:?} apex={apex:?}"
                    );
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 8000, "enough decisive samples ({checked})");
}

proptest! {
    #[test]
    fn cross_antisymmetry(ax in -1e3..1e3f64, ay in -1e3..1e3f64, bx in -1e3..1e3f64, by in -1e3..1e3f64) {
        let a = Vec2::new(ax, ay);
        let b = Vec2::new(bx, by);
        prop_assert_eq!(cross(a, b), -cross(b, a));
    }

    #[test]
    fn hull_idempotent_and_contains_inputs(
        pts in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 1..40)
    ) {
        let points: Vec<Vec2> = pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let hull = convex_hull(&points).unwrap();
        for p in &points {
            prop_assert!(hull.contains(*p), "input {:?} inside hull", p);
        }
        let again = convex_hull(hull.vertices()).unwrap();
        prop_assert_eq!(sorted_key(hull.vertices()), sorted_key(again.vertices()));
        prop_assert!(hull.double_signed_area() >= -1e-9);
    }
}
