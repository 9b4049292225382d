//! Deterministic SVG rendering of trajectories: one polyline per agent
//! colored by its modal group, obstacles as gray polygons, optional
//! single-frame snapshots with agent discs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use groupsim_core::engine::TrajectoryRow;
use groupsim_core::geom::Vec2;
use groupsim_core::model::Obstacle;

/// Fixed palette keyed by group id; isolated agents draw in gray.
const PALETTE: [&str; 12] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
    "#f032e6", "#bcf60c", "#008080", "#9a6324", "#800000", "#808000",
];
const ISOLATED_COLOR: &str = "#888888";
const OBSTACLE_COLOR: &str = "#cccccc";

pub fn group_color(group_id: u64) -> &'static str {
    PALETTE[(group_id % PALETTE.len() as u64) as usize]
}

fn fmt2(v: f64) -> String {
    format!("{v:.3}")
}

struct Frame {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Frame {
    fn grow(&mut self, p: Vec2) {
        self.min_x = self.min_x.min(p.x);
        self.min_y = self.min_y.min(p.y);
        self.max_x = self.max_x.max(p.x);
        self.max_y = self.max_y.max(p.y);
    }

    /// World y grows upward; SVG y grows downward.
    fn map(&self, p: Vec2) -> (f64, f64) {
        (p.x - self.min_x, self.max_y - p.y)
    }
}

fn bounds(rows: &[TrajectoryRow], obstacles: &[Obstacle]) -> Frame {
    let mut frame = Frame {
        min_x: f64::INFINITY,
        min_y: f64::INFINITY,
        max_x: f64::NEG_INFINITY,
        max_y: f64::NEG_INFINITY,
    };
    for r in rows {
        frame.grow(r.position);
    }
    for o in obstacles {
        for &v in o.polygon.vertices() {
            frame.grow(v);
        }
    }
    if !frame.min_x.is_finite() {
        frame = Frame { min_x: -1.0, min_y: -1.0, max_x: 1.0, max_y: 1.0 };
    }
    let pad = 1.0;
    frame.min_x -= pad;
    frame.min_y -= pad;
    frame.max_x += pad;
    frame.max_y += pad;
    frame
}

/// The group id an agent spent the most steps in (ties to the smaller id);
/// `None` when the agent was always isolated.
pub fn modal_group(rows: &[TrajectoryRow], agent_id: usize) -> Option<u64> {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.agent_id == agent_id) {
        if let Some(g) = r.group_id {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(g, _)| g)
}

fn svg_open(out: &mut String, frame: &Frame) {
    let w = frame.max_x - frame.min_x;
    let h = frame.max_y - frame.min_y;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {} {}" width="{}" height="{}">"#,
        fmt2(w),
        fmt2(h),
        fmt2(w * 20.0),
        fmt2(h * 20.0),
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
}

fn draw_obstacles(out: &mut String, frame: &Frame, obstacles: &[Obstacle]) {
    for o in obstacles {
        let pts: Vec<String> = o
            .polygon
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = frame.map(v);
                format!("{},{}", fmt2(x), fmt2(y))
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="{OBSTACLE_COLOR}" stroke="#999999" stroke-width="0.05"/>"##,
            pts.join(" ")
        );
    }
}

/// Full-run plot: one polyline per agent colored by its modal group.
pub fn render_trajectories(rows: &[TrajectoryRow], obstacles: &[Obstacle]) -> String {
    let frame = bounds(rows, obstacles);
    let mut out = String::new();
    svg_open(&mut out, &frame);
    draw_obstacles(&mut out, &frame, obstacles);

    let mut agent_ids: Vec<usize> = rows.iter().map(|r| r.agent_id).collect();
    agent_ids.sort_unstable();
    agent_ids.dedup();

    for &id in &agent_ids {
        let color = modal_group(rows, id).map_or(ISOLATED_COLOR, group_color);
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r.agent_id == id)
            .map(|r| {
                let (x, y) = frame.map(r.position);
                format!("{},{}", fmt2(x), fmt2(y))
            })
            .collect();
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="0.08" stroke-opacity="0.85"/>"#,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Snapshot of one step: agent discs colored by their group at that step.
pub fn render_frame(
    rows: &[TrajectoryRow],
    obstacles: &[Obstacle],
    step: usize,
    agent_radius: f64,
) -> String {
    let frame = bounds(rows, obstacles);
    let mut out = String::new();
    svg_open(&mut out, &frame);
    draw_obstacles(&mut out, &frame, obstacles);
    for r in rows.iter().filter(|r| r.step == step) {
        let color = r.group_id.map_or(ISOLATED_COLOR, group_color);
        let (x, y) = frame.map(r.position);
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{color}" stroke="{}" stroke-width="0.04"/>"#,
            fmt2(x),
            fmt2(y),
            fmt2(agent_radius),
            if r.leader { "#000000" } else { "#444444" },
        );
    }
    out.push_str("</svg>\n");
    out
}
