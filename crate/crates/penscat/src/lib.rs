//! Configuration, orchestration and file formats for the `penscat` tool.
//!
//! A run is described by one TOML document. [`config::parse_config`]
//! validates it, [`run::run`] executes the command and writes CSV tables plus
//! a `manifest.txt` that records the resolved configuration, solver
//! diagnostics and every tolerance check.
//!
//! Exit codes: 2 configuration, 3 inadmissible medium, 4 solver failure,
//! 5 accuracy check, 6 I/O.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use run::run;

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "PENSCAT_THREADS";

/// Sizes the global rayon pool from [`THREADS_VAR`], when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Schema {
        path: THREADS_VAR.into(),
        message: format!("expected a positive thread count, got '{v}'"),
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Schema {
        path: THREADS_VAR.into(),
        message: e.to_string(),
    })
}
