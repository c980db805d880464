//! Average correlation Σ: the mean of `|aᵀ T b|` over independent uniformly
//! random unit vectors `a`, `b`.
//!
//! With canonical singular values `α ≥ β ≥ γ` and the azimuthal profile
//! `f(φ) = (β/α)² sin²φ + (γ/α)² cos²φ`,
//!
//! ```text
//! Σ = (α/8π) ∫₀^{2π} dφ ∫₀^π dθ sinθ sqrt(f(φ) sin²θ + cos²θ)      (double)
//!   = (α/4) [1 + (1/2π) ∫₀^{2π} g(f(φ)) dφ]                          (single)
//! ```
//!
//! where `g` is [`sigma_kernel`]. Several independent routes are provided so
//! they can check one another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{sigma_kernel, sigma_kernel_clamped, AdaptiveQuadrature, Interval};
use crate::qstate::{BlochForm, CanonicalCorrelation};
use crate::scalar::Real;

/// Error estimate attached to closed-form results.
const CLOSED_FORM_ERROR: f64 = 1e-15;

/// Directions drawn per independently seeded Monte Carlo block.
const MC_BLOCK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    SingleIntegral,
    DoubleIntegral,
    ClosedForm,
    MonteCarlo,
}

impl SigmaMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SigmaMethod::SingleIntegral => "single",
            SigmaMethod::DoubleIntegral => "double",
            SigmaMethod::ClosedForm => "closed",
            SigmaMethod::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaResult<T> {
    pub sigma: T,
    pub method: SigmaMethod,
    /// Quadrature error bound, or the standard error for Monte Carlo.
    pub error_estimate: T,
}

impl<T: Real> SigmaResult<T> {
    fn closed(sigma: T) -> Self {
        Self {
            sigma,
            method: SigmaMethod::ClosedForm,
            error_estimate: T::lit(CLOSED_FORM_ERROR),
        }
    }
}

fn check_canonical<T: Real>(cc: &CanonicalCorrelation<T>) -> Result<()> {
    let slack = T::tol(1e-12);
    let ok = cc.alpha.is_finite()
        && cc.gamma >= T::zero()
        && cc.beta <= cc.alpha + slack
        && cc.gamma <= cc.beta + slack;
    if ok {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name: "canonical correlation",
            value: cc.alpha.as_f64(),
            range: "0 <= gamma <= beta <= alpha",
        })
    }
}

/// Σ = (α/4)[1 + (2/π) ∫₀^{π/2} g(f(φ)) dφ] for an arbitrary azimuthal
/// profile `f` with values in `[0, 1]`.
///
/// The quarter-period integral uses the symmetry of `sin²` and `cos²`.
pub fn sigma_from_profile<T, F>(alpha: T, profile: F) -> Result<SigmaResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let iv = Interval::new(T::zero(), T::FRAC_PI_2())?;
    let quad = AdaptiveQuadrature::<T>::default().integrate(|phi| sigma_kernel_clamped(profile(phi)), iv)?;
    let quarter = alpha / T::lit(4.0);
    let scale = T::lit(2.0) / T::PI();
    Ok(SigmaResult {
        sigma: quarter * (T::one() + scale * quad.value),
        method: SigmaMethod::SingleIntegral,
        error_estimate: quarter * scale * quad.abs_error_estimate,
    })
}

/// Production evaluator.
///
/// `α = 0` gives Σ = 0 directly (the integrand is 0/0 there but the
/// correlation function vanishes identically); `β = γ` uses the constant
/// profile closed form; everything else goes through one adaptive quadrature.
pub fn average_correlation<T: Real>(cc: &CanonicalCorrelation<T>) -> Result<SigmaResult<T>> {
    check_canonical(cc)?;
    let CanonicalCorrelation { alpha, beta, gamma } = *cc;
    if alpha == T::zero() {
        return Ok(SigmaResult::closed(T::zero()));
    }
    if (beta - gamma).abs() <= T::tol(1e-12) * alpha {
        let s3 = (alpha * alpha + beta * beta + gamma * gamma).sqrt();
        let f = (beta * beta + gamma * gamma) / (T::lit(2.0) * alpha * alpha);
        return Ok(SigmaResult::closed(sigma_isotropic(s3, f)?));
    }
    let b2 = (beta / alpha).powi(2);
    let g2 = (gamma / alpha).powi(2);
    sigma_from_profile(alpha, |phi: T| {
        let (s, c) = phi.sin_cos();
        b2 * s * s + g2 * c * c
    })
}

/// Reference evaluator: nested adaptive quadrature of the polar/azimuthal
/// double integral. Requires `α > 0`.
pub fn average_correlation_double<T: Real>(cc: &CanonicalCorrelation<T>) -> Result<SigmaResult<T>> {
    check_canonical(cc)?;
    let CanonicalCorrelation { alpha, beta, gamma } = *cc;
    if !(alpha > T::zero()) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha.as_f64(),
            domain: "(0, 1]",
        });
    }
    let b2 = (beta / alpha).powi(2);
    let g2 = (gamma / alpha).powi(2);
    let quarter = Interval::new(T::zero(), T::FRAC_PI_2())?;
    let inner_quad = AdaptiveQuadrature {
        rel_tol: T::tol(1e-12),
        abs_tol: T::tol(1e-14),
        ..AdaptiveQuadrature::default()
    };
    let outer_quad = AdaptiveQuadrature {
        rel_tol: T::tol(1e-11),
        abs_tol: T::tol(1e-13),
        ..AdaptiveQuadrature::default()
    };

    let mut inner_error = T::zero();
    let mut inner_failure = None;
    let outer = outer_quad.integrate(
        |phi: T| {
            let (s, c) = phi.sin_cos();
            let f = b2 * s * s + g2 * c * c;
            let inner = inner_quad.integrate(
                |theta: T| {
                    let (st, ct) = theta.sin_cos();
                    st * (f * st * st + ct * ct).sqrt()
                },
                quarter,
            );
            match inner {
                Ok(r) => {
                    inner_error = inner_error.max(r.abs_error_estimate);
                    r.value
                }
                Err(e) => {
                    inner_failure.get_or_insert(e);
                    T::zero()
                }
            }
        },
        quarter,
    )?;
    if let Some(e) = inner_failure {
        return Err(e);
    }
    let pre = alpha / T::PI();
    Ok(SigmaResult {
        sigma: pre * outer.value,
        method: SigmaMethod::DoubleIntegral,
        error_estimate: pre * (outer.abs_error_estimate + T::FRAC_PI_2() * inner_error),
    })
}

/// Σ for states with `β = γ`, where the profile is the constant
/// `f = (s₃² − α²)/(2α²)`:
///
/// `Σ = s₃ / (4 sqrt(2f + 1)) · [1 + g(f)]`, reducing to `s₃/(2√3)` at `f = 1`.
pub fn sigma_isotropic<T: Real>(s3: T, f: T) -> Result<T> {
    let root3 = T::lit(3.0).sqrt();
    let slack = T::tol(1e-12);
    if !(s3 >= T::zero() && s3 <= root3 + slack) {
        return Err(Error::Domain {
            what: "s3",
            value: s3.as_f64(),
            domain: "[0, sqrt(3)]",
        });
    }
    let g = sigma_kernel(f)?;
    if f >= T::one() {
        return Ok(s3 / (T::lit(2.0) * root3));
    }
    let f = f.max(T::zero());
    Ok(s3 / (T::lit(4.0) * (T::lit(2.0) * f + T::one()).sqrt()) * (T::one() + g))
}

/// Closed form for the pure Schmidt family `c|01⟩ ± sqrt(1 − c²)|10⟩` in
/// terms of `s₃² = 1 + 8c²(1 − c²)`:
///
/// `Σ = ¼ [1 + √2 (s₃² − 1) / (2 sqrt(3 − s₃²)) · asinh(sqrt((3 − s₃²)/(s₃² − 1)))]`.
pub fn sigma_pure<T: Real>(c: T) -> Result<T> {
    if !(c >= T::zero() && c <= T::one()) {
        return Err(Error::ParamOutOfRange {
            name: "Schmidt coefficient",
            value: c.as_f64(),
            range: "[0, 1]",
        });
    }
    let quarter = T::lit(0.25);
    let s3_sq = T::one() + T::lit(8.0) * c * c * (T::one() - c * c);
    let above = s3_sq - T::one();
    let below = T::lit(3.0) - s3_sq;
    if above <= T::zero() {
        return Ok(quarter);
    }
    if below <= T::zero() {
        return Ok(T::lit(0.5));
    }
    let pre = T::SQRT_2() * above / (T::lit(2.0) * below.sqrt());
    Ok(quarter * (T::one() + pre * (below / above).sqrt().asinh()))
}

/// Monte Carlo estimate of the defining average of `|aᵀ T b|`.
///
/// Directions are area-uniform on the sphere (`cos θ` uniform on [−1, 1],
/// azimuth uniform). Samples are drawn in fixed-size blocks, block `k` from
/// the ChaCha stream `k` under `seed`, so the result does not depend on the
/// number of worker threads. `error_estimate` is the standard error.
pub fn monte_carlo_sigma<T: Real>(b: &BlochForm<T>, n: usize, seed: u64) -> Result<SigmaResult<T>> {
    if n < 1000 {
        return Err(Error::ParamOutOfRange {
            name: "Monte Carlo sample count",
            value: n as f64,
            range: ">= 1000",
        });
    }
    let t = b.t.map(|row| row.map(|x| x.as_f64()));
    let blocks = n.div_ceil(MC_BLOCK);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = MC_BLOCK.min(n - k * MC_BLOCK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let a = unit_vector(&mut rng);
                let bv = unit_vector(&mut rng);
                let mut e = 0.0;
                for i in 0..3 {
                    e += a[i] * (t[i][0] * bv[0] + t[i][1] * bv[1] + t[i][2] * bv[2]);
                }
                let e = e.abs();
                sum += e;
                sum_sq += e * e;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, q), (ps, pq)| (s + ps, q + pq));
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(SigmaResult {
        sigma: T::lit(mean),
        method: SigmaMethod::MonteCarlo,
        error_estimate: T::lit((var / nf).sqrt()),
    })
}

/// Area-uniform point on the unit sphere.
pub(crate) fn unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    [rho * c, rho * s, z]
}
