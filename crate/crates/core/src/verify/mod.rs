//! Oracles and property suites.

pub mod checks;
pub mod encode;
pub mod generate;
pub mod properties;
pub mod oracle;
pub mod paths;
pub mod suites;

pub use checks::{check_approx, check_monotonicity};
pub use encode::{encode_path, EncodeFailure, Encoded};
pub use oracle::{brute_force_opt, brute_force_rounded, OracleResult};
pub use suites::{Check, Failure, TrialRecord};
