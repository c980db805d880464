//! Linear steering quantities and their relation to the average correlation.
//!
//! The degree of steerability `sₙ` is the root of the sum of the `n` largest
//! squared singular values of `T`; the `n`-setting linear steering
//! inequality is violated iff `sₙ > 1`. For a fixed `sₙ` the average
//! correlation is confined to
//! `min(sₙ/4, E(sₙ)/4) ≤ Σ ≤ sₙ/(2√n)`.

use crate::error::{Error, Result};
use crate::numerics::{e_integral, Vec3};
use crate::qstate::{BlochForm, CanonicalCorrelation};
use crate::scalar::Real;

fn check_settings(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::BadSetting(n))
    }
}

/// `s₂ = sqrt(α² + β²)`, `s₃ = sqrt(α² + β² + γ²)`.
pub fn degree_of_steerability<T: Real>(cc: &CanonicalCorrelation<T>, n: usize) -> Result<T> {
    check_settings(n)?;
    let mut sq = cc.alpha * cc.alpha + cc.beta * cc.beta;
    if n == 3 {
        sq = sq + cc.gamma * cc.gamma;
    }
    Ok(sq.sqrt())
}

/// Normalised violation `max(0, (sₙ − 1)/(√n − 1))`.
pub fn steering_violation<T: Real>(cc: &CanonicalCorrelation<T>, n: usize) -> Result<T> {
    let s = degree_of_steerability(cc, n)?;
    Ok(normalized_violation(s, n))
}

/// Clipped to `[0, 1]`; the upper clip only absorbs round-off at `sₙ = √n`.
fn normalized_violation<T: Real>(s: T, n: usize) -> T {
    let denom = T::lit(n as f64).sqrt() - T::one();
    ((s - T::one()) / denom).max(T::zero()).min(T::one())
}

/// Measurement directions `{aᵢ, bᵢ}` for the `n`-setting inequality.
///
/// Bob's directions must be mutually orthogonal: the bound
/// `Fₙ ≤ 1` for unsteerable states assumes orthogonal qubit observables.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSettings<T> {
    a: Vec<Vec3<T>>,
    b: Vec<Vec3<T>>,
}

impl<T: Real> MeasurementSettings<T> {
    pub fn new(a: Vec<Vec3<T>>, b: Vec<Vec3<T>>) -> Result<Self> {
        check_settings(a.len())?;
        if a.len() != b.len() {
            return Err(Error::InvalidSettings(format!(
                "{} directions for A but {} for B",
                a.len(),
                b.len()
            )));
        }
        let tol = T::tol(1e-10);
        for v in a.iter().chain(b.iter()) {
            if (dot(v, v).sqrt() - T::one()).abs() > tol {
                return Err(Error::InvalidSettings("directions must be unit vectors".into()));
            }
        }
        for i in 0..b.len() {
            for j in (i + 1)..b.len() {
                if dot(&b[i], &b[j]).abs() > tol {
                    return Err(Error::InvalidSettings(
                        "B directions must be mutually orthogonal".into(),
                    ));
                }
            }
        }
        Ok(Self { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec3<T>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec3<T>] {
        &self.b
    }
}

fn dot<T: Real>(x: &Vec3<T>, y: &Vec3<T>) -> T {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// `Fₙ = (1/√n) |Σᵢ aᵢᵀ T bᵢ|`; never exceeds `sₙ`.
pub fn steering_functional<T: Real>(b: &BlochForm<T>, m: &MeasurementSettings<T>) -> T {
    let total = m
        .a
        .iter()
        .zip(m.b.iter())
        .map(|(ai, bi)| {
            let tb = [dot(&b.t[0], bi), dot(&b.t[1], bi), dot(&b.t[2], bi)];
            dot(ai, &tb)
        })
        .fold(T::zero(), |acc, x| acc + x);
    total.abs() / T::lit(m.n() as f64).sqrt()
}

/// `(lower, upper)` envelope for Σ at steering degree `sn`:
/// lower is `sn/4` below 1 and `E(sn)/4` from 1 on; upper is `sn/(2√n)`.
pub fn sigma_bounds<T: Real>(sn: T, n: usize) -> Result<(T, T)> {
    check_settings(n)?;
    let root_n = T::lit(n as f64).sqrt();
    let slack = T::tol(1e-12);
    if !(sn >= T::zero() && sn <= root_n + slack) {
        return Err(Error::Domain {
            what: "steering degree",
            value: sn.as_f64(),
            domain: "[0, sqrt(n)]",
        });
    }
    let four = T::lit(4.0);
    let lower = if sn < T::one() {
        sn / four
    } else {
        e_integral(sn)? / four
    };
    Ok((lower, sn / (T::lit(2.0) * root_n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonclassicality {
    Yes,
    No,
    Indeterminate,
}

impl Nonclassicality {
    pub fn name(&self) -> &'static str {
        match self {
            Nonclassicality::Yes => "yes",
            Nonclassicality::No => "no",
            Nonclassicality::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub bell_nonlocal: bool,
    pub steerable3: bool,
    pub nonclassical: Nonclassicality,
}

/// Hierarchy verdicts. Boundary values (`sₙ = 1`) count as non-violating.
/// Nonclassicality is certain from `Σ ≥ 1/(2√2)`, excluded below `Σ < 1/4`,
/// and undecided in between.
pub fn classify<T: Real>(sigma: T, s2: T, s3: T) -> Classification {
    let nonclassical = if sigma >= T::one() / (T::lit(2.0) * T::SQRT_2()) {
        Nonclassicality::Yes
    } else if sigma < T::lit(0.25) {
        Nonclassicality::No
    } else {
        Nonclassicality::Indeterminate
    };
    Classification {
        bell_nonlocal: s2 > T::one(),
        steerable3: s3 > T::one(),
        nonclassical,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringReport<T> {
    pub s2: T,
    pub s3: T,
    pub steer2: T,
    pub steer3: T,
    /// Maximal CHSH value, `2 s₂`.
    pub chsh_max: T,
    /// Σ bounds at the observed `s₃`.
    pub sigma_lower: T,
    pub sigma_upper: T,
}

impl<T: Real> SteeringReport<T> {
    /// Bounds are evaluated at `s₃`, clipped to `√3` against round-off from
    /// unphysical inputs.
    pub fn from_canonical(cc: &CanonicalCorrelation<T>) -> Result<Self> {
        let s2 = degree_of_steerability(cc, 2)?;
        let s3 = degree_of_steerability(cc, 3)?;
        let (sigma_lower, sigma_upper) = sigma_bounds(s3.min(T::lit(3.0).sqrt()), 3)?;
        Ok(Self {
            s2,
            s3,
            steer2: normalized_violation(s2, 2),
            steer3: normalized_violation(s3, 3),
            chsh_max: T::lit(2.0) * s2,
            sigma_lower,
            sigma_upper,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn werner(lambda: f64) -> CanonicalCorrelation<f64> {
        CanonicalCorrelation::new(lambda, lambda, lambda).unwrap()
    }

    #[test]
    fn degrees() {
        let s3 = degree_of_steerability(&werner(0.6), 3).unwrap();
        assert!((s3 - 3f64.sqrt() * 0.6).abs() < 1e-15);
        let c: f64 = 0.4;
        let b = 2.0 * c * (1.0 - c * c).sqrt();
        let pure = CanonicalCorrelation::new(1.0, b, b).unwrap();
        let s3 = degree_of_steerability(&pure, 3).unwrap();
        assert!((s3 - (1.0 + 8.0 * c * c * (1.0 - c * c)).sqrt()).abs() < 1e-15);
        let zero = CanonicalCorrelation::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(degree_of_steerability(&zero, 2).unwrap(), 0.0);
        assert_eq!(degree_of_steerability(&zero, 3).unwrap(), 0.0);
        assert_eq!(degree_of_steerability(&zero, 4), Err(Error::BadSetting(4)));
    }

    #[test]
    fn violations() {
        assert!((steering_violation(&werner(1.0), 3).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(steering_violation(&werner(0.5), 3).unwrap(), 0.0);
        let product = CanonicalCorrelation::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(steering_violation(&product, 2).unwrap(), 0.0);
        assert_eq!(steering_violation(&product, 3).unwrap(), 0.0);
        assert!(steering_violation(&product, 1).is_err());
    }

    fn axes() -> Vec<[f64; 3]> {
        vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    }

    #[test]
    fn functional_for_singlet_on_axes() {
        let singlet = BlochForm::bell_diagonal([-1.0, -1.0, -1.0]);
        let m = MeasurementSettings::new(axes(), axes()).unwrap();
        assert!((steering_functional(&singlet, &m) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn functional_vanishes_for_orthogonal_response() {
        let b = BlochForm::bell_diagonal([0.9, 0.5, 0.2]);
        // T bᵢ lies along bᵢ for diagonal T; pick aᵢ orthogonal to it.
        let a = vec![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let m = MeasurementSettings::new(a, axes()).unwrap();
        assert_eq!(steering_functional(&b, &m), 0.0);
    }

    #[test]
    fn settings_validation() {
        assert!(MeasurementSettings::new(vec![[1.0, 0.0, 0.0]], vec![[1.0, 0.0, 0.0]]).is_err());
        assert!(MeasurementSettings::new(vec![[2.0, 0.0, 0.0]; 2], vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).is_err());
        assert!(MeasurementSettings::new(vec![[1.0, 0.0, 0.0]; 2], vec![[1.0, 0.0, 0.0]; 2]).is_err());
        assert!(MeasurementSettings::new(vec![[1.0, 0.0, 0.0]; 2], vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).is_ok());
    }

    fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
        crate::avgcorr::unit_vector(rng)
    }

    fn random_orthonormal(rng: &mut impl Rng) -> Vec<[f64; 3]> {
        let u = random_unit(rng);
        let mut v = random_unit(rng);
        let d = dot(&u, &v);
        for k in 0..3 {
            v[k] -= d * u[k];
        }
        let nv = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        let w = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        vec![u, v, w]
    }

    #[test]
    fn functional_never_beats_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let mut t = [[0.0; 3]; 3];
            for row in t.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.random_range(-0.6..0.6);
                }
            }
            let form = BlochForm { r: [0.0; 3], s: [0.0; 3], t };
            let cc = form.canonical();
            for n in [2usize, 3] {
                let s = degree_of_steerability(&cc, n).unwrap();
                let mut best: f64 = 0.0;
                for _ in 0..1000 {
                    let b: Vec<_> = random_orthonormal(&mut rng).into_iter().take(n).collect();
                    let a: Vec<_> = (0..n).map(|_| random_unit(&mut rng)).collect();
                    let m = MeasurementSettings::new(a, b).unwrap();
                    best = best.max(steering_functional(&form, &m));
                }
                assert!(best <= s + 1e-9, "F{n} = {best} > s{n} = {s}");

                // Aligning each aᵢ with T bᵢ is optimal for the given bᵢ.
                let mut aligned: f64 = 0.0;
                for _ in 0..2000 {
                    let b: Vec<_> = random_orthonormal(&mut rng).into_iter().take(n).collect();
                    let a: Vec<_> = b
                        .iter()
                        .map(|bi| {
                            let tb = [dot(&t[0], bi), dot(&t[1], bi), dot(&t[2], bi)];
                            let nt = dot(&tb, &tb).sqrt();
                            tb.map(|x| x / nt)
                        })
                        .collect();
                    let m = MeasurementSettings::new(a, b).unwrap();
                    aligned = aligned.max(steering_functional(&form, &m));
                }
                assert!(aligned <= s + 1e-9);
                assert!(aligned >= 0.95 * s, "optimiser reached only {aligned} of {s}");
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let (lo, hi) = sigma_bounds(1.0f64, 3).unwrap();
        assert!((lo - 0.25).abs() < 1e-12);
        assert!((hi - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        let (lo, hi) = sigma_bounds(3f64.sqrt(), 3).unwrap();
        assert!((lo - 0.477_524_723_628_463_9).abs() < 1e-12);
        assert!((hi - 0.5).abs() < 1e-15);
        assert_eq!(sigma_bounds(0.0, 3).unwrap(), (0.0, 0.0));
        assert!(sigma_bounds(1.5, 2).is_err());
        assert!(sigma_bounds(0.5, 5).is_err());
    }

    #[test]
    fn lower_bound_continuous_at_one() {
        let below = sigma_bounds(1.0f64 - 1e-12, 3).unwrap().0;
        let at = sigma_bounds(1.0, 3).unwrap().0;
        assert!((below - at).abs() < 1e-10);
        for n in [2, 3] {
            let grid = 500;
            let max = (n as f64).sqrt();
            for i in 0..=grid {
                let s = max * i as f64 / grid as f64;
                let (lo, hi) = sigma_bounds(s, n).unwrap();
                assert!(lo <= hi + 1e-15);
            }
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify(0.5, 2f64.sqrt(), 3f64.sqrt());
        assert_eq!(c, Classification { bell_nonlocal: true, steerable3: true, nonclassical: Nonclassicality::Yes });
        let c = classify(0.3, 0.6 * 2f64.sqrt(), 0.6 * 3f64.sqrt());
        assert_eq!(c, Classification { bell_nonlocal: false, steerable3: true, nonclassical: Nonclassicality::Indeterminate });
        let c = classify(0.0, 0.0, 0.0);
        assert_eq!(c, Classification { bell_nonlocal: false, steerable3: false, nonclassical: Nonclassicality::No });
        assert!(!classify(0.25, 1.0, 1.0).steerable3);
    }

    #[test]
    fn report_fields() {
        let r = SteeringReport::from_canonical(&werner(1.0)).unwrap();
        assert!((r.chsh_max - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((r.steer2 - 1.0).abs() < 1e-15 && (r.steer3 - 1.0).abs() < 1e-15);
        assert!(r.s2 <= r.s3 && r.sigma_lower <= r.sigma_upper);
    }
}
