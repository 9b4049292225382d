//! Uniform spatial hash grid for near-linear neighbor queries.

use std::collections::HashMap;

use crate::geom::Vec2;
use crate::model::{Agent, AgentId};

pub struct SpatialGrid {
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<AgentId>>,
}

impl SpatialGrid {
    /// Index the active agents. Cell size should be at least the largest
    /// query radius so a 3x3 neighborhood covers every query.
    pub fn build(agents: &[Agent], cell_size: f64) -> SpatialGrid {
        debug_assert!(cell_size > 0.0);
        let mut cells: HashMap<(i64, i64), Vec<AgentId>> = HashMap::new();
        for a in agents.iter().filter(|a| a.is_active()) {
            cells.entry(Self::key(a.position, cell_size)).or_default().push(a.id);
        }
        SpatialGrid { cell_size, cells }
    }

    fn key(p: Vec2, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Ids of active agents within `radius` of `p`, ascending, excluding
    /// `exclude`.
    pub fn query(
        &self,
        agents: &[Agent],
        p: Vec2,
        radius: f64,
        exclude: Option<AgentId>,
    ) -> Vec<AgentId> {
        debug_assert!(radius <= self.cell_size + crate::geom::EPS);
        let (cx, cy) = Self::key(p, self.cell_size);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        if Some(id) != exclude && agents[id].position.dist(p) <= radius {
                            out.push(id);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
