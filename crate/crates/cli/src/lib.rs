//! Scenario-driven front end for `starframe`: parse a scenario, run one
//! subcommand, emit a report.

pub mod report;
pub mod runner;
pub mod scenario;
pub mod selftest;

pub use report::{Check, Report, Status};
pub use runner::{run, Command, Flags};
pub use scenario::{load_scenario, parse_scenario, save_scenario, Scenario, ScenarioError};
