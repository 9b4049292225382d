//! Built-in benchmark scenario generators.
//!
//! Each generator is deterministic in its seed and emits a document that
//! passes validation. Agent counts default to the benchmark sizes and can be
//! overridden.

use groupsim_core::geom::Vec2;
use groupsim_core::model::defaults;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{AgentFile, ModeFile, ParamsFile, ScenarioFile};

pub const BENCHMARKS: [&str; 5] = ["crosswalk", "hallway", "cluttered", "random", "random_obstacles"];

/// Default agent count of each benchmark.
pub fn default_agents(name: &str) -> Option<usize> {
    match name {
        "crosswalk" => Some(49),
        "hallway" => Some(97),
        "cluttered" => Some(185),
        "random" => Some(184),
        "random_obstacles" => Some(151),
        _ => None,
    }
}

/// Generate benchmark `name` with `agents` agents (default when `None`).
pub fn generate(name: &str, agents: Option<usize>, seed: u64) -> Option<ScenarioFile> {
    let n = agents.or_else(|| default_agents(name))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let file = match name {
        "crosswalk" => crosswalk(n, seed, &mut rng),
        "hallway" => hallway(n, seed, &mut rng),
        "cluttered" => cluttered(n, seed, &mut rng),
        "random" => random(n, seed, &mut rng, false),
        "random_obstacles" => random(n, seed, &mut rng, true),
        _ => return None,
    };
    Some(file)
}

fn agent_file(id: usize, pos: Vec2, goal: Vec2) -> AgentFile {
    AgentFile {
        id,
        position: [pos.x, pos.y],
        velocity: [0.0, 0.0],
        radius: defaults::RADIUS,
        goal: [goal.x, goal.y],
        pref_speed: defaults::PREF_SPEED,
        max_speed: defaults::MAX_SPEED,
    }
}

fn base_params(seed: u64) -> ParamsFile {
    ParamsFile { seed, ..ParamsFile::default() }
}

/// Pack `n` agents into a block of tight rows around `center`, walking
/// toward mirrored goals. `axis` is the walking direction.
fn packed_block(
    rng: &mut ChaCha8Rng,
    first_id: usize,
    n: usize,
    center: Vec2,
    axis: Vec2,
    width: usize,
    spacing: f64,
    goal_distance: f64,
) -> Vec<AgentFile> {
    let lateral = axis.perp_ccw();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let row = (i / width) as f64;
        let col = i % width;
        let offset = col as f64 - (width as f64 - 1.0) / 2.0;
        let jitter = Vec2::new(rng.gen_range(-0.08..0.08), rng.gen_range(-0.08..0.08));
        let pos = center - axis * (row * spacing) + lateral * (offset * spacing) + jitter;
        let goal = pos + axis * goal_distance;
        out.push(agent_file(first_id + i, pos, goal));
    }
    out
}

/// Scatter `n` agents as small walking parties (2-4 agents each) inside a
/// block of cluster slots. Parties are far enough apart not to cluster
/// together initially; members are packed tight enough to cluster.
fn social_clusters(
    rng: &mut ChaCha8Rng,
    first_id: usize,
    n: usize,
    block_center: Vec2,
    axis: Vec2,
    slots_wide: usize,
    slot_pitch: f64,
    goal_distance: f64,
) -> Vec<AgentFile> {
    let lateral = axis.perp_ccw();
    let member_offsets = [
        Vec2::new(0.0, 0.0),
        Vec2::new(0.7, 0.0),
        Vec2::new(0.0, 0.7),
        Vec2::new(0.7, 0.7),
    ];
    let mut out = Vec::with_capacity(n);
    let mut slot = 0usize;
    while out.len() < n {
        let row = (slot / slots_wide) as f64;
        let col = slot % slots_wide;
        slot += 1;
        let offset = col as f64 - (slots_wide as f64 - 1.0) / 2.0;
        let jitter = Vec2::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        let anchor = block_center - axis * (row * slot_pitch) + lateral * (offset * slot_pitch) + jitter;
        let party = rng.gen_range(2..=4).min(n - out.len());
        for m in 0..party {
            let pos = anchor + member_offsets[m];
            let goal = pos + axis * goal_distance;
            out.push(agent_file(first_id + out.len(), pos, goal));
        }
    }
    out
}

/// Two opposing streams of small walking parties crossing a street. The
/// parties start inside each other's avoidance horizon so the initial groups
/// persist into the encounter.
fn crosswalk(n: usize, seed: u64, rng: &mut ChaCha8Rng) -> ScenarioFile {
    let south = n / 2 + n % 2;
    let north = n / 2;
    let mut agents = social_clusters(
        rng,
        0,
        south,
        Vec2::new(0.0, -4.5),
        Vec2::new(0.0, 1.0),
        3,
        3.2,
        16.0,
    );
    agents.extend(social_clusters(
        rng,
        south,
        north,
        Vec2::new(1.1, 4.5),
        Vec2::new(0.0, -1.0),
        3,
        3.2,
        16.0,
    ));
    ScenarioFile {
        name: "crosswalk".into(),
        params: base_params(seed),
        agents,
        obstacles: vec![],
    }
}

fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<[f64; 2]> {
    vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
}

/// Bidirectional flow along a walled corridor.
fn hallway(n: usize, seed: u64, rng: &mut ChaCha8Rng) -> ScenarioFile {
    let east = n / 2 + n % 2;
    let west = n / 2;
    let width = 6;
    let spacing = 0.85;
    let mut agents = packed_block(
        rng,
        0,
        east,
        Vec2::new(-12.0, 0.0),
        Vec2::new(1.0, 0.0),
        width,
        spacing,
        28.0,
    );
    agents.extend(packed_block(
        rng,
        east,
        west,
        Vec2::new(12.0, 0.4),
        Vec2::new(-1.0, 0.0),
        width,
        spacing,
        28.0,
    ));
    let obstacles = vec![
        rectangle(-25.0, 3.0, 25.0, 4.0),
        rectangle(-25.0, -4.0, 25.0, -3.0),
    ];
    ScenarioFile {
        name: "hallway".into(),
        params: base_params(seed),
        agents,
        obstacles,
    }
}

/// Opposing streams of walking parties squeezing through a narrow walled
/// passage in both directions.
fn cluttered(n: usize, seed: u64, rng: &mut ChaCha8Rng) -> ScenarioFile {
    let hall_half = 3.0;
    let obstacles = vec![
        rectangle(-42.0, hall_half, 42.0, hall_half + 3.0),
        rectangle(-42.0, -hall_half - 3.0, 42.0, -hall_half),
    ];
    let east = n / 2 + n % 2;
    let west = n / 2;
    let mut place = |first: usize, count: usize, sign: f64, lane: f64| -> Vec<AgentFile> {
        let mut out = Vec::with_capacity(count);
        let mut slot = 0usize;
        let cols = 2usize;
        let col_pitch = 2.2;
        let wave_pitch = 4.0;
        let spacing = 0.7;
        let offsets = [
            Vec2::new(0.0, 0.0),
            Vec2::new(spacing, 0.0),
            Vec2::new(0.0, spacing),
            Vec2::new(spacing, spacing),
        ];
        while out.len() < count {
            let (row, col) = (slot / cols, slot % cols);
            slot += 1;
            let cx = sign * (8.0 + row as f64 * wave_pitch);
            let mut cy = (col as f64 - (cols as f64 - 1.0) / 2.0) * col_pitch + lane;
            cy = cy.clamp(-hall_half + 0.6, hall_half - 0.6 - spacing);
            let jitter = Vec2::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            let party = rng.gen_range(2..=4).min(count - out.len());
            for m in 0..party {
                let pos = Vec2::new(cx, cy) + jitter + offsets[m];
                let goal = Vec2::new(-sign * 34.0, pos.y.clamp(-2.2, 2.2));
                out.push(agent_file(first + out.len(), pos, goal));
            }
        }
        out
    };
    let mut agents = place(0, east, -1.0, 0.35);
    agents.extend(place(east, west, 1.0, -0.35));
    ScenarioFile {
        name: "cluttered".into(),
        params: ParamsFile { seed, ..ParamsFile::default() },
        agents,
        obstacles,
    }
}

/// Uniformly placed agents with random goals, optionally among random
/// convex obstacles.
fn random(n: usize, seed: u64, rng: &mut ChaCha8Rng, with_obstacles: bool) -> ScenarioFile {
    let half = 20.0;
    let mut obstacles: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut obstacle_discs: Vec<(Vec2, f64)> = Vec::new();
    if with_obstacles {
        while obstacles.len() < 8 {
            let center = Vec2::new(
                rng.gen_range(-half * 0.6..half * 0.6),
                rng.gen_range(-half * 0.6..half * 0.6),
            );
            let radius = rng.gen_range(1.2..2.6);
            if obstacle_discs
                .iter()
                .any(|&(c, r)| c.dist(center) < r + radius + 2.0)
            {
                continue;
            }
            let sides = rng.gen_range(5..8);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let verts: Vec<[f64; 2]> = (0..sides)
                .map(|k| {
                    let a = phase + k as f64 / sides as f64 * std::f64::consts::TAU;
                    [center.x + radius * a.cos(), center.y + radius * a.sin()]
                })
                .collect();
            obstacle_discs.push((center, radius));
            obstacles.push(verts);
        }
    }
    let clear = |p: Vec2, margin: f64| {
        obstacle_discs.iter().all(|&(c, r)| p.dist(c) > r + margin)
    };
    let mut agents: Vec<AgentFile> = Vec::with_capacity(n);
    let mut positions: Vec<Vec2> = Vec::new();
    while agents.len() < n {
        let p = Vec2::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
        if !clear(p, 0.8) || positions.iter().any(|q| q.dist(p) < 0.75) {
            continue;
        }
        let goal = loop {
            let g = Vec2::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
            if clear(g, 1.0) && g.dist(p) > 10.0 {
                break g;
            }
        };
        positions.push(p);
        agents.push(agent_file(agents.len(), p, goal));
    }
    ScenarioFile {
        name: if with_obstacles { "random_obstacles".into() } else { "random".into() },
        params: ParamsFile { seed, mode: ModeFile::DynamicGrouping, ..ParamsFile::default() },
        agents,
        obstacles,
    }
}
