//! File formats and the command line for `foliated-core`: JSON scenarios,
//! JSON verification reports and the `foliated` binary.

pub mod cli;
pub mod error;
pub mod literals;
pub mod report;
pub mod scenario_file;

pub use cli::run;
pub use error::LabError;
pub use report::ReportDoc;
pub use scenario_file::{parse_scenario, parse_scenario_str, serialize_scenario, LoadedScenario, ScenarioDoc};
