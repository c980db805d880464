//! Average correlation and linear steering for two-qubit states.
//!
//! Σ is the mean of `|aᵀTb|` over uniformly random measurement directions.
//! The library evaluates it alongside the n-setting linear steering degrees
//! `sₙ` and follows both under local noise.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! and `*32` aliases below name the common instantiations.
//!
//! ```
//! use corrsteer::{average_correlation, CanonicalCorrelation64};
//!
//! let werner = CanonicalCorrelation64::new(0.6, 0.6, 0.6).unwrap();
//! let sigma = average_correlation(&werner).unwrap().sigma;
//! assert!((sigma - 0.3).abs() < 1e-12);
//! ```

pub mod avgcorr;
pub mod channels;
pub mod error;
pub mod families;
pub mod numerics;
pub mod qstate;
pub mod sampling;
pub mod scalar;
pub mod steering;
pub mod verify;

pub use avgcorr::{
    average_correlation, average_correlation_double, monte_carlo_sigma, sigma_isotropic, sigma_pure, SigmaMethod,
    SigmaResult,
};
pub use channels::{
    damping_probability, death_times_analytic, evolve_bloch, evolve_coeffs, kraus_apply, kraus_operators,
    state_at, threshold_crossing, trajectory, ChannelKind, ChannelSpec, DeathTimes, Direction, Quantity,
    TrajectoryRow, TRAJECTORY_CSV_HEADER,
};
pub use error::{Error, Result};
pub use families::{FamilyExpectation, FamilySpec, SchmidtVariant, WernerSign};
pub use numerics::{Interval, QuadratureResult};
pub use qstate::{
    bloch_compose, bloch_decompose, canonical_correlation, parse_state_json, BlochForm, CanonicalCorrelation,
    DensityMatrix,
};
pub use sampling::{sample, stream, SamplerKind, SamplerSpec};
pub use scalar::Real;
pub use steering::{
    classify, degree_of_steerability, sigma_bounds, steering_functional, steering_violation, Classification,
    MeasurementSettings, Nonclassicality, SteeringReport,
};
pub use verify::{run_suite, CheckOutcome, VerifyConfig};

pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type BlochForm64 = BlochForm<f64>;
pub type BlochForm32 = BlochForm<f32>;
pub type CanonicalCorrelation64 = CanonicalCorrelation<f64>;
pub type CanonicalCorrelation32 = CanonicalCorrelation<f32>;
pub type SigmaResult64 = SigmaResult<f64>;
pub type SigmaResult32 = SigmaResult<f32>;
pub type SteeringReport64 = SteeringReport<f64>;
pub type FamilySpec64 = FamilySpec<f64>;
pub type ChannelSpec64 = ChannelSpec<f64>;
pub type TrajectoryRow64 = TrajectoryRow<f64>;
pub type DeathTimes64 = DeathTimes<f64>;
pub type QuadratureResult64 = QuadratureResult<f64>;
