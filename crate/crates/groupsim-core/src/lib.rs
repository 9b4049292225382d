//! Deterministic 2D multi-agent crowd simulation with dynamic grouping.
//!
//! Agents are discs navigating toward individual goals. They are clustered
//! into groups by position/velocity similarity, groups pick a common bypass
//! side around other groups using a least-effort measure, members follow a
//! leader toward a temporary goal, and a final per-agent reciprocal
//! collision-avoidance pass (ORCA) keeps everyone separated. An `orca_only`
//! mode disables all group machinery for baseline comparisons.

pub mod avoidance;
pub mod clustering;
pub mod engine;
pub mod geom;
pub mod group_nav;
pub mod model;

#[cfg(feature = "oracles")]
pub mod oracles;
