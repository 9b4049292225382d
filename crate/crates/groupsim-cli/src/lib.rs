//! Scenario files, benchmark generators, trajectory/metrics export and SVG
//! plotting for the groupsim CLI.

pub mod commands;
pub mod generators;
pub mod plot;
pub mod scenario;
pub mod trajectory;
