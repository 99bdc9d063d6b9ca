//! Batch front end: curve-spec files in, reports and plot-ready CSV out.

pub mod report;
pub mod run;
pub mod spec;
pub mod verify;

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// An invariant failed under `verify`.
    Violation = 1,
    /// A spec file or an argument could not be used.
    Usage = 2,
    /// The numerics contradicted themselves, e.g. a decomposition residual
    /// far below zero.
    Inconsistency = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}
