use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical kernel and the physics layers above it.
///
/// Numeric payloads are stored as `f64` whatever the scalar type used.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge after {panels} panels (error estimate {estimate:e}, requested {requested:e})")]
    NonConvergent {
        panels: usize,
        estimate: f64,
        requested: f64,
    },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("not a density matrix: {check} check failed by {deviation:e}")]
    NotDensityMatrix {
        check: &'static str,
        deviation: f64,
    },

    #[error("parameter {name} = {value} out of range {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("unsupported number of measurement settings: {0} (expected 2 or 3)")]
    BadSetting(usize),

    #[error("invalid measurement settings: {0}")]
    InvalidSettings(String),

    #[error("parse error: {0}")]
    Parse(String),
}
