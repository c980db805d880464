//! Numerical building blocks used by the physics modules.
//!
//! Everything here is a pure function of its arguments.

mod kernel;
mod linalg;
mod quadrature;
mod roots;

pub use kernel::{e_integral, sigma_kernel, sigma_kernel_clamped};
pub use linalg::{hermitian_eigen4, svd3, CMat4, Mat3, Vec3};
pub use quadrature::{integrate, AdaptiveQuadrature, Interval, QuadratureResult};
pub use roots::bisect;
