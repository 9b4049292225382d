//! Avoidance machinery checked against sampling and time-sweep oracles.

use groupsim_core::avoidance::{
    agent_group_vo, closest_outside_union, extreme_agents, orca_halfplane, solve_velocity,
    HalfPlane,
};
use groupsim_core::geom::{cone_contains, cone_contains_with_margin, tangent_rays, Vec2, VelocityCone};
use groupsim_core::model::{Agent, Group};
use groupsim_core::oracles::{
    sampled_nearest_feasible, time_sweep_verdict, OracleDisc, SweepVerdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_halfplanes(rng: &mut ChaCha8Rng, n: usize) -> Vec<HalfPlane> {
    (0..n)
        .map(|_| {
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let normal = Vec2::new(angle.cos(), angle.sin());
            let offset = rng.gen_range(-1.2..1.2);
            HalfPlane { point: normal * offset, normal }
        })
        .collect()
}

#[test]
fn solve_velocity_matches_sampling_oracle() {
    let max_speed = 2.0;
    let mut agreements = 0usize;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(0..=8);
        let constraints = random_halfplanes(&mut rng, n);
        let v_pref = Vec2::new(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
        let result = solve_velocity(&constraints, v_pref, max_speed);

        let feasible = |v: Vec2| constraints.iter().all(|c| c.violation(v) <= 1e-9);
        let oracle = sampled_nearest_feasible(v_pref, max_speed, 128, 3, feasible);

        if result.feasible {
            assert!(
                result.velocity.norm() <= max_speed + 1e-9,
                "speed cap violated at seed {seed}"
            );
            assert!(
                constraints.iter().all(|c| c.violation(result.velocity) <= 1e-6),
                "claimed-feasible point violates a constraint at seed {seed}"
            );
            // the point is verified feasible above, so the solver only has
            // to be at least as good as anything the sampler can find; the
            // sampler may itself fall short in (or miss) narrow wedges
            if let Some(opt) = &oracle {
                let ours = result.velocity.dist(v_pref);
                assert!(
                    ours <= opt.distance + 1e-3,
                    "suboptimal: {} vs oracle {} at seed {seed}",
                    ours,
                    opt.distance
                );
            }
        } else {
            // infeasible verdicts must agree unless the region is a sliver
            // below the sampling resolution
            if let Some(opt) = &oracle {
                let margin = constraints
                    .iter()
                    .map(|c| -c.violation(opt.point))
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    margin <= 1e-3,
                    "solver says infeasible but oracle found a point with margin {margin} at seed {seed}"
                );
                continue;
            }
        }
        agreements += 1;
    }
    assert!(agreements >= 990, "agreements: {agreements}");
}

fn random_group_scene(
    rng: &mut ChaCha8Rng,
    n_groups: usize,
    members_per_group: std::ops::Range<usize>,
) -> (Agent, Vec<Agent>, Vec<Group>) {
    let mut agents = Vec::new();
    let mut observer = Agent::new(0, Vec2::ZERO, Vec2::new(50.0, 0.0));
    observer.radius = rng.gen_range(0.15..0.45);
    observer.velocity = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    agents.push(observer.clone());

    let mut groups = Vec::new();
    for g in 0..n_groups {
        let k = rng.gen_range(members_per_group.clone());
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let dist = rng.gen_range(2.5..7.0);
        let center = Vec2::new(angle.cos(), angle.sin()) * dist;
        let vel = Vec2::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
        let mut members = Vec::new();
        for _ in 0..k {
            let id = agents.len();
            let mut m = Agent::new(
                id,
                center + Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Vec2::new(-50.0, 0.0),
            );
            m.radius = rng.gen_range(0.2..0.4);
            m.velocity = vel + Vec2::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            members.push(id);
            agents.push(m);
        }
        groups.push(Group::new(g as u64, members, &agents));
    }
    (agents[0].clone(), agents, groups)
}

#[test]
fn group_vo_membership_matches_time_sweep_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut cases = 0usize;
    let mut checked = 0usize;
    while cases < 2500 {
        let (observer, agents, groups) = random_group_scene(&mut rng, 1, 1..7);
        let tau = rng.gen_range(1.5..6.0);
        let Ok(cone) = agent_group_vo(&observer, &groups[0], &agents, tau) else {
            continue;
        };
        cases += 1;
        let members: Vec<OracleDisc> = groups[0]
            .members
            .iter()
            .map(|&id| OracleDisc { center: agents[id].position, radius: agents[id].radius })
            .collect();
        for _ in 0..40 {
            let v = Vec2::new(rng.gen_range(-3.5..3.5), rng.gen_range(-3.5..3.5));
            match time_sweep_verdict(
                observer.position,
                observer.radius,
                v,
                groups[0].mean_velocity,
                &members,
                tau,
                64,
                1e-5,
            ) {
                SweepVerdict::Marginal => {}
                SweepVerdict::Collides => {
                    checked += 1;
                    assert!(cone_contains(&cone, v), "missed collision, case {cases}");
                }
                SweepVerdict::Misses => {
                    checked += 1;
                    assert!(!cone_contains(&cone, v), "false positive, case {cases}");
                }
            }
        }
    }
    assert!(checked > 50_000, "decisive samples: {checked}");
}

#[test]
fn velocities_outside_vo_never_collide() {
    // the conservativeness direction of the guarantee, on many more samples
    let mut rng = ChaCha8Rng::seed_from_u64(7151);
    let mut trials = 0usize;
    while trials < 100_000 {
        let (observer, agents, groups) = random_group_scene(&mut rng, 1, 1..7);
        let tau = rng.gen_range(1.5..6.0);
        let Ok(cone) = agent_group_vo(&observer, &groups[0], &agents, tau) else {
            continue;
        };
        let members: Vec<OracleDisc> = groups[0]
            .members
            .iter()
            .map(|&id| OracleDisc { center: agents[id].position, radius: agents[id].radius })
            .collect();
        for _ in 0..25 {
            let v = Vec2::new(rng.gen_range(-3.5..3.5), rng.gen_range(-3.5..3.5));
            if cone_contains(&cone, v) {
                continue;
            }
            trials += 1;
            assert_ne!(
                time_sweep_verdict(
                    observer.position,
                    observer.radius,
                    v,
                    groups[0].mean_velocity,
                    &members,
                    tau,
                    64,
                    1e-6,
                ),
                SweepVerdict::Collides,
                "velocity outside the VO collided"
            );
        }
    }
}

#[test]
fn extreme_pair_reproduces_full_cone_rays() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut cases = 0usize;
    while cases < 800 {
        let (observer, agents, groups) = random_group_scene(&mut rng, 1, 1..13);
        let group = &groups[0];
        let Ok(pair) = extreme_agents(observer.position, observer.radius, group, &agents) else {
            continue;
        };
        let Ok(cone) = agent_group_vo(&observer, group, &agents, f64::INFINITY) else {
            continue;
        };
        cases += 1;
        let left_member = &agents[pair.left];
        let right_member = &agents[pair.right];
        let (left_ray, _) = tangent_rays(
            observer.position,
            left_member.position,
            left_member.radius + observer.radius,
        )
        .unwrap();
        let (_, right_ray) = tangent_rays(
            observer.position,
            right_member.position,
            right_member.radius + observer.radius,
        )
        .unwrap();
        assert!(left_ray.dist(cone.left_dir) < 1e-9, "left ray mismatch");
        assert!(right_ray.dist(cone.right_dir) < 1e-9, "right ray mismatch");
    }
}

fn random_cones(rng: &mut ChaCha8Rng, max_cones: usize) -> Vec<VelocityCone> {
    let n = rng.gen_range(1..=max_cones);
    let mut cones = Vec::new();
    for _ in 0..n {
        let (observer, agents, groups) = random_group_scene(rng, 1, 1..6);
        let tau = if rng.gen_bool(0.5) { rng.gen_range(1.5..5.0) } else { f64::INFINITY };
        if let Ok(cone) = agent_group_vo(&observer, &groups[0], &agents, tau) {
            cones.push(cone);
        }
    }
    cones
}

#[test]
fn closest_outside_union_matches_sampling_oracle() {
    let max_speed = 2.0;
    let mut decisive = 0usize;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(31_000 + seed);
        let cones = random_cones(&mut rng, 5);
        let v_pref = Vec2::new(rng.gen_range(-2.2..2.2), rng.gen_range(-2.2..2.2));
        let ours = closest_outside_union(&cones, v_pref, max_speed);

        let feasible =
            |v: Vec2| cones.iter().all(|c| !cone_contains_with_margin(c, v, 1e-9));
        let oracle = sampled_nearest_feasible(v_pref, max_speed, 96, 4, feasible);

        match (ours, oracle) {
            (Some(v), Some(opt)) => {
                assert!(v.norm() <= max_speed + 1e-9, "speed cap at seed {seed}");
                assert!(
                    cones.iter().all(|c| !cone_contains_with_margin(c, v, 1e-6)),
                    "returned point strictly inside a cone at seed {seed}"
                );
                let ours_d = v.dist(v_pref);
                assert!(
                    ours_d <= opt.distance + 1e-3,
                    "suboptimal by {} at seed {seed}",
                    ours_d - opt.distance
                );
                decisive += 1;
            }
            (Some(v), None) => {
                // the sampler missed a sliver; our point must verify
                assert!(
                    cones.iter().all(|c| !cone_contains_with_margin(c, v, 1e-6)),
                    "unverifiable feasible claim at seed {seed}"
                );
            }
            (None, Some(opt)) => {
                panic!(
                    "solver infeasible but oracle found {:?} at distance {} (seed {seed})",
                    opt.point, opt.distance
                );
            }
            (None, None) => {
                decisive += 1;
            }
        }
    }
    assert!(decisive >= 950, "decisive cases: {decisive}");
}

#[test]
fn reciprocal_pair_escapes_collision_cone() {
    // for symmetric two-agent configurations, both agents solving their own
    // constraint yields a relative velocity outside the collision cone
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let tau = 4.0;
    let dt = 0.1;
    for case in 0..500 {
        let d = rng.gen_range(1.2..8.0);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let dir = Vec2::new(angle.cos(), angle.sin());
        let speed = rng.gen_range(0.5..2.0);
        let mut a = Agent::new(0, Vec2::ZERO, dir * 50.0);
        a.velocity = dir * speed;
        let mut b = Agent::new(1, dir * d, dir * -50.0);
        b.velocity = dir * -speed;

        let ra = solve_velocity(&[orca_halfplane(&a, &b, tau, dt)], a.velocity, 2.0);
        let rb = solve_velocity(&[orca_halfplane(&b, &a, tau, dt)], b.velocity, 2.0);
        assert!(ra.feasible && rb.feasible, "case {case}");

        let members = [OracleDisc { center: b.position, radius: b.radius }];
        assert_ne!(
            time_sweep_verdict(
                a.position,
                a.radius,
                ra.velocity,
                rb.velocity,
                &members,
                tau,
                64,
                1e-6,
            ),
            SweepVerdict::Collides,
            "reciprocal velocities still collide in case {case}"
        );
    }
}
