//! Model language, built-in scenarios and the command dispatcher behind `tlift`.

mod commands;
mod dsl;
mod model;
mod scenario;

pub use commands::{execute, run_command, BracketKind, Command, Format, LiftKind, Output};
pub use dsl::{parse_expression, parse_model};
pub use model::{Model, Object};
pub use scenario::{scenario, SCENARIOS};
