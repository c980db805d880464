use crate::error::{Error, Result};
use crate::scalar::Real;

use super::quadrature::{AdaptiveQuadrature, Interval};

/// `g(f) = f / sqrt(1 - f) * asinh(sqrt((1 - f) / f))` on `[0, 1]`, with the
/// continuous limits `g(0) = 0` and `g(1) = 1`.
///
/// `g` is the azimuthal integrand of the average correlation: the polar
/// integral of `sqrt(f sin²θ + cos²θ)` equals `1 + g(f)`.
pub fn sigma_kernel<T: Real>(fval: T) -> Result<T> {
    let slack = T::tol(1e-12);
    if !(fval >= -slack && fval <= T::one() + slack) {
        return Err(Error::Domain {
            what: "sigma kernel argument",
            value: fval.as_f64(),
            domain: "[0, 1]",
        });
    }
    Ok(sigma_kernel_clamped(fval))
}

/// [`sigma_kernel`] without the domain check; the argument is clamped to `[0, 1]`.
pub fn sigma_kernel_clamped<T: Real>(fval: T) -> T {
    if fval.is_nan() {
        return fval;
    }
    if fval <= T::zero() {
        return T::zero();
    }
    if fval >= T::one() {
        return T::one();
    }
    // g = sqrt(f) * asinh(sqrt(x)) / sqrt(x) with x = (1 - f) / f.
    let x = (T::one() - fval) / fval;
    fval.sqrt() * asinh_sqrt_ratio(x)
}

/// `asinh(sqrt(x)) / sqrt(x)`, continuous at `x = 0`.
fn asinh_sqrt_ratio<T: Real>(x: T) -> T {
    if x < T::lit(1e-3) {
        // 1 - x/6 + 3x²/40 - 5x³/112 + 35x⁴/1152
        let c = [1.0, -1.0 / 6.0, 3.0 / 40.0, -5.0 / 112.0, 35.0 / 1152.0];
        c.iter().rev().fold(T::zero(), |acc, &ci| acc * x + T::lit(ci))
    } else {
        let y = x.sqrt();
        y.asinh() / y
    }
}

/// `E(s) = ∫₀^{π/2} sqrt(1 - (2 - s²) sin²φ) dφ` for `1 <= s <= sqrt(3)`.
///
/// `E(s)/4` is the lower bound on the average correlation once the steering
/// degree `s` reaches 1.
pub fn e_integral<T: Real>(s: T) -> Result<T> {
    let slack = T::tol(1e-12);
    let root3 = T::lit(3.0).sqrt();
    if !(s >= T::one() - slack && s <= root3 + slack) {
        return Err(Error::Domain {
            what: "steering degree for E",
            value: s.as_f64(),
            domain: "[1, sqrt(3)]",
        });
    }
    let k = T::lit(2.0) - s * s;
    let integrand = |phi: T| {
        let sin = phi.sin();
        (T::one() - k * sin * sin).max(T::zero()).sqrt()
    };
    let iv = Interval::new(T::zero(), T::FRAC_PI_2())?;
    let quad = AdaptiveQuadrature {
        rel_tol: T::tol(1e-12),
        abs_tol: T::tol(1e-13),
        ..AdaptiveQuadrature::default()
    };
    Ok(quad.integrate(integrand, iv)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    #[test]
    fn kernel_limits() {
        assert_eq!(sigma_kernel(0.0).unwrap(), 0.0);
        assert_eq!(sigma_kernel(1.0).unwrap(), 1.0);
        assert!((sigma_kernel(1.0f64 - 1e-15).unwrap() - 1.0).abs() < 1e-14);
        assert!(sigma_kernel(1e-300).unwrap() < 1e-290);
    }

    #[test]
    fn kernel_at_half() {
        // Raw formula with asinh written out as a logarithm.
        let f = 0.5f64;
        let y = ((1.0 - f) / f).sqrt();
        let oracle = f / (1.0 - f).sqrt() * (y + (y * y + 1.0).sqrt()).ln();
        let g = sigma_kernel(0.5).unwrap();
        assert!((g - oracle).abs() < 1e-15);
        assert!((g - 0.623_225_240_140_230_5).abs() < 1e-14);
    }

    #[test]
    fn kernel_series_branch_is_continuous() {
        // x = (1-f)/f crosses 1e-3 at f = 1/1.001.
        let f0 = 1.0f64 / 1.001;
        let below = sigma_kernel(f0 * (1.0 - 1e-12)).unwrap();
        let above = sigma_kernel(f0 * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn kernel_domain() {
        assert!(sigma_kernel(-1e-6).is_err());
        assert!(sigma_kernel(1.0 + 1e-6).is_err());
        assert_eq!(sigma_kernel(-1e-13).unwrap(), 0.0);
    }

    #[test]
    fn kernel_monotone_on_grid() {
        let n = 10_000;
        let mut prev = sigma_kernel(0.0).unwrap();
        for i in 1..=n {
            let g = sigma_kernel(i as f64 / n as f64).unwrap();
            assert!(g >= prev, "not monotone at {i}");
            prev = g;
        }
    }

    #[test]
    fn e_integral_anchor_values() {
        assert!((e_integral(1.0f64).unwrap() - 1.0).abs() < 1e-10);
        assert!((e_integral(SQRT_2).unwrap() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn e_integral_at_root3_matches_riemann_sum() {
        let n = 1_000_000;
        let h = FRAC_PI_2 / n as f64;
        let riemann: f64 = (0..n)
            .map(|i| {
                let s = ((i as f64 + 0.5) * h).sin();
                (1.0 + s * s).sqrt()
            })
            .sum::<f64>()
            * h;
        let e = e_integral(3f64.sqrt()).unwrap();
        assert!((e - riemann).abs() < 1e-10);
        assert!((e / 4.0 - 0.477_524_723_628_463_9).abs() < 1e-12);
    }

    #[test]
    fn e_integral_strictly_increasing() {
        let root3 = 3f64.sqrt();
        let mut prev = e_integral(1.0).unwrap();
        for i in 1..=1000 {
            let s = 1.0 + (root3 - 1.0) * i as f64 / 1000.0;
            let e = e_integral(s).unwrap();
            assert!(e > prev, "E not increasing at s = {s}");
            prev = e;
        }
    }

    #[test]
    fn e_integral_domain() {
        assert!(e_integral(0.9).is_err());
        assert!(e_integral(1.8).is_err());
    }
}
