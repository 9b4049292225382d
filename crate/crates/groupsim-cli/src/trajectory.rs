//! Trajectory CSV export and import.
//!
//! One row per active agent per step, sorted by (step, agent_id), floats
//! printed with 9 significant digits so files replay exactly.

use std::fmt::Write as _;
use std::path::Path;

use groupsim_core::engine::TrajectoryRow;
use groupsim_core::geom::Vec2;

pub const HEADER: &str = "step,agent_id,x,y,vx,vy,group_id,leader_flag";

fn fmt_float(v: f64) -> String {
    format!("{v:.8e}")
}

/// Render rows to CSV. Rows are assumed to be in engine order, which is
/// already sorted by (step, agent_id).
pub fn to_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64 + HEADER.len() + 1);
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        let group = r.group_id.map_or(-1, |g| g as i64);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.step,
            r.agent_id,
            fmt_float(r.position.x),
            fmt_float(r.position.y),
            fmt_float(r.velocity.x),
            fmt_float(r.velocity.y),
            group,
            u8::from(r.leader),
        );
    }
    out
}

pub fn write_csv(rows: &[TrajectoryRow], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_csv(rows))
}

#[derive(Debug)]
pub struct CsvError {
    pub row: usize,
    pub message: String,
}

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {}: {}", self.row, self.message)
    }
}

impl std::error::Error for CsvError {}

/// Parse a trajectory CSV produced by [`to_csv`]. Errors carry the
/// 1-based row number.
pub fn parse_csv(text: &str) -> Result<Vec<TrajectoryRow>, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == HEADER => {}
        Some((_, h)) => {
            return Err(CsvError { row: 1, message: format!("unexpected header {h:?}") })
        }
        None => return Err(CsvError { row: 1, message: "empty file".into() }),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let row_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CsvError {
                row: row_no,
                message: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let parse_f = |s: &str, name: &str| -> Result<f64, CsvError> {
            s.parse::<f64>().map_err(|e| CsvError {
                row: row_no,
                message: format!("bad {name} {s:?}: {e}"),
            })
        };
        let step = fields[0].parse::<usize>().map_err(|e| CsvError {
            row: row_no,
            message: format!("bad step {:?}: {e}", fields[0]),
        })?;
        let agent_id = fields[1].parse::<usize>().map_err(|e| CsvError {
            row: row_no,
            message: format!("bad agent_id {:?}: {e}", fields[1]),
        })?;
        let x = parse_f(fields[2], "x")?;
        let y = parse_f(fields[3], "y")?;
        let vx = parse_f(fields[4], "vx")?;
        let vy = parse_f(fields[5], "vy")?;
        let group = fields[6].parse::<i64>().map_err(|e| CsvError {
            row: row_no,
            message: format!("bad group_id {:?}: {e}", fields[6]),
        })?;
        let leader = match fields[7].trim_end() {
            "0" => false,
            "1" => true,
            other => {
                return Err(CsvError {
                    row: row_no,
                    message: format!("bad leader_flag {other:?}"),
                })
            }
        };
        rows.push(TrajectoryRow {
            step,
            agent_id,
            position: Vec2::new(x, y),
            velocity: Vec2::new(vx, vy),
            group_id: (group >= 0).then_some(group as u64),
            leader,
        });
    }
    Ok(rows)
}
