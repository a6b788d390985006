//! Configuration, scenario library, run persistence and the verification
//! suite for `nsk-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod manufactured;
pub mod run;
pub mod scenario;
pub mod verify;

pub use config::{load_config, parse_config, Config, ConfigError, RunConfig};
pub use run::{execute, run_scenario, HarnessError, RunReport, Verdict};
pub use scenario::{build_initial, Scenario, ScenarioId};
pub use verify::{verify_suite, Level, VerifyReport};
