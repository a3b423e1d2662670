//! Run configuration, execution, and reproducible run records for the
//! g-function solver. The `gfunc` binary is a thin wrapper over this
//! library so every command is equally drivable from tests.

pub mod config;
pub mod output;
pub mod run;

pub use config::{ProblemKind, RunConfig};
pub use run::{
    cmd_continue, cmd_derivs, cmd_signs, cmd_solve, cmd_validate, CommandOutcome, ExitCode,
};

/// Exit codes: 0 ok, 1 validation failure, 2 no convergence,
/// 3 continuation stall, 64 usage error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_STALL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
