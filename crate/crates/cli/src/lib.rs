//! Library side of the `nlwr` command: runs, sweeps and audits of the
//! nonlocal traffic simulations, with files as the interface.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod error;
pub mod runner;
pub mod sweep;
pub mod weights;

pub use check::{check, CheckItem, CheckReport};
pub use error::{CliError, CliResult, FailureKind};
pub use runner::{resolve, run, run_config, RunManifest, RunSummary};
pub use sweep::{sweep, SweepEntry, SweepGrid};
pub use weights::weights_table;
