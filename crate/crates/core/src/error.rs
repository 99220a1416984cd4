use thiserror::Error;

/// Rejection of a raw parameter tuple; one variant per violated constraint.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("dimension d = {0} is not supported (need d >= 2)")]
    Dimension(i32),
    #[error("weight a = {a} must lie strictly below a_c = {a_c}")]
    Weight { a: f64, a_c: f64 },
    #[error("exponent p = {0} outside [2, 2*]")]
    Exponent(f64),
    #[error("theta = {0} outside [theta_min, 1]")]
    Theta(f64),
    #[error("gamma = {0} outside the admissible range (gamma >= d/4, gamma > 1/2 if d = 2)")]
    Gamma(f64),
}

impl ParamError {
    /// Stable tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            ParamError::Dimension(_) => "dimension",
            ParamError::Weight { .. } => "weight-range",
            ParamError::Exponent(_) => "exponent-range",
            ParamError::Theta(_) => "theta-range",
            ParamError::Gamma(_) => "gamma-range",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("exponent p = {0} is at the boundary of the admissible range")]
    BoundaryExponent(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no ground state bracketed for p = {p}, d = {d}")]
    NoGroundState { p: f64, d: i32 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("moment identity {identity} violated (relative residual {residual:e})")]
    InconsistentProfile { identity: usize, residual: f64 },
    #[error("sufficient condition R0 < 0, R1 < 0 fails at a_c for p = {p}, d = {d}")]
    EmptyInterval { p: f64, d: i32 },
    #[error("energy undefined for the zero field")]
    ZeroField,
    #[error("support [-{support}, {support}] exceeds the truncated cylinder [-{l}, {l}]")]
    GridOverflow { support: f64, l: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
