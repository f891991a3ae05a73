use std::fmt;

use thiserror::Error;

/// Modelling assumption a configuration can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Strictly decreasing speed law with `v' <= v'_max < 0`.
    SpeedLaw,
    /// Nonnegative, non-increasing kernel with unit mass on `[0, eta]`.
    Kernel,
    /// Positive initial data equal to the equilibrium density ahead of `b`.
    InitialData,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::SpeedLaw => "speed-law assumption",
            Assumption::Kernel => "kernel assumption",
            Assumption::InitialData => "initial-data assumption",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} outside admissible range [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error(
        "target speed {vbar} must lie below the free-flow speed v(0) = {v0}; \
         with rho_bar = 0 there is no exponential decay rate"
    )]
    ControlInfeasible { vbar: f64, v0: f64 },

    #[error("{assumption} violated: {detail}")]
    Assumption {
        assumption: Assumption,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("negative nonlocal speed {speed} at index {index}")]
    NegativeSpeed { index: usize, speed: f64 },

    #[error("time step {dt} exceeds the CFL bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("maximum principle violated at step {step}, cell {cell}: density {rho}")]
    MaxPrinciple { step: u64, cell: usize, rho: f64 },

    #[error("vehicle ordering lost at step {step}: gap behind vehicle {vehicle} is {gap}")]
    Ordering { step: u64, vehicle: usize, gap: f64 },

    #[error("window [{lo}, {hi}] is not covered by the grid [{x_left}, {x_right}]")]
    WindowCoverage {
        lo: f64,
        hi: f64,
        x_left: f64,
        x_right: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::ControlInfeasible { .. }
                | Error::Assumption { .. }
                | Error::Config(_)
                | Error::Parse { .. }
                | Error::Unsupported(_)
        )
    }

    pub(crate) fn assumption(assumption: Assumption, detail: impl Into<String>) -> Self {
        Error::Assumption {
            assumption,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
