//! Named two-qubit families with known correlation structure: pure Schmidt
//! states, Werner states, maximally entangled mixed states (MEMS) and
//! Bell-diagonal states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::avgcorr::{sigma_from_profile, sigma_pure};
use crate::error::{Error, Result};
use crate::numerics::{sigma_kernel, CMat4};
use crate::qstate::{BlochForm, CanonicalCorrelation, DensityMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchmidtVariant {
    /// `c|01⟩ + sqrt(1−c²)|10⟩`
    PsiPlus,
    /// `c|01⟩ − sqrt(1−c²)|10⟩`
    PsiMinus,
    /// `c|00⟩ + sqrt(1−c²)|11⟩`
    PhiPlus,
    /// `c|00⟩ − sqrt(1−c²)|11⟩`
    PhiMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WernerSign {
    /// Mixed with `(|01⟩ + |10⟩)/√2`.
    Plus,
    /// Mixed with the singlet `(|01⟩ − |10⟩)/√2`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec<T> {
    PureSchmidt { c: T, variant: SchmidtVariant },
    Werner { lambda: T, sign: WernerSign },
    Mems { s: T },
    BellDiagonal { c: [T; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyExpectation<T> {
    pub canonical: CanonicalCorrelation<T>,
    pub s3: T,
    /// Analytic Σ; `None` for Bell-diagonal states, which have no family formula.
    pub sigma_closed: Option<T>,
}

fn unit_range<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value: x.as_f64(),
            range: "[0, 1]",
        })
    }
}

impl<T: Real> FamilySpec<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::PureSchmidt { c, .. } => unit_range("Schmidt coefficient c", c),
            FamilySpec::Werner { lambda, .. } => unit_range("Werner weight lambda", lambda),
            FamilySpec::Mems { s } => unit_range("MEMS parameter s", s),
            FamilySpec::BellDiagonal { c } => {
                for x in c {
                    if !x.is_finite() {
                        return Err(Error::ParamOutOfRange {
                            name: "Bell-diagonal coefficient",
                            value: x.as_f64(),
                            range: "finite",
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Density matrix of the family member. Bell-diagonal coefficients
    /// outside the tetrahedron yield a matrix flagged non-physical.
    pub fn build(&self) -> Result<DensityMatrix<T>> {
        self.validate()?;
        let zero = Complex::new(T::zero(), T::zero());
        match *self {
            FamilySpec::PureSchmidt { c, variant } => {
                let d = (T::one() - c * c).max(T::zero()).sqrt();
                let mut psi = [zero; 4];
                let (i, j, sign) = match variant {
                    SchmidtVariant::PsiPlus => (1, 2, T::one()),
                    SchmidtVariant::PsiMinus => (1, 2, -T::one()),
                    SchmidtVariant::PhiPlus => (0, 3, T::one()),
                    SchmidtVariant::PhiMinus => (0, 3, -T::one()),
                };
                psi[i] = Complex::new(c, T::zero());
                psi[j] = Complex::new(sign * d, T::zero());
                DensityMatrix::from_matrix(projector(&psi), true)
            }
            FamilySpec::Werner { lambda, sign } => {
                let h = T::FRAC_1_SQRT_2();
                let s = match sign {
                    WernerSign::Plus => h,
                    WernerSign::Minus => -h,
                };
                let mut psi = [zero; 4];
                psi[1] = Complex::new(h, T::zero());
                psi[2] = Complex::new(s, T::zero());
                let mut m = projector(&psi);
                let mixed = (T::one() - lambda) / T::lit(4.0);
                for (i, row) in m.iter_mut().enumerate() {
                    for z in row.iter_mut() {
                        *z = *z * lambda;
                    }
                    row[i] = row[i] + Complex::new(mixed, T::zero());
                }
                DensityMatrix::from_matrix(m, true)
            }
            FamilySpec::Mems { s } => {
                let mut m = [[zero; 4]; 4];
                let re = |x: T| Complex::new(x, T::zero());
                let half_s = s / T::lit(2.0);
                if s <= T::lit(2.0 / 3.0) {
                    let third = T::one() / T::lit(3.0);
                    m[0][0] = re(third);
                    m[1][1] = re(third);
                    m[3][3] = re(third);
                } else {
                    m[0][0] = re(half_s);
                    m[1][1] = re(T::one() - s);
                    m[3][3] = re(half_s);
                }
                m[0][3] = re(half_s);
                m[3][0] = re(half_s);
                DensityMatrix::from_matrix(m, true)
            }
            FamilySpec::BellDiagonal { c } => Ok(BlochForm::bell_diagonal(c).compose()),
        }
    }

    /// Analytic canonical values, `s₃` and Σ for the family member.
    pub fn expected(&self) -> Result<FamilyExpectation<T>> {
        self.validate()?;
        let two = T::lit(2.0);
        let third = T::one() / T::lit(3.0);
        Ok(match *self {
            FamilySpec::PureSchmidt { c, .. } => {
                let b = two * c * (T::one() - c * c).max(T::zero()).sqrt();
                FamilyExpectation {
                    canonical: CanonicalCorrelation::new(T::one(), b, b)?,
                    s3: (T::one() + T::lit(8.0) * c * c * (T::one() - c * c)).sqrt(),
                    sigma_closed: Some(sigma_pure(c)?),
                }
            }
            FamilySpec::Werner { lambda, .. } => {
                let s3 = T::lit(3.0).sqrt() * lambda;
                FamilyExpectation {
                    canonical: CanonicalCorrelation::new(lambda, lambda, lambda)?,
                    s3,
                    sigma_closed: Some(s3 / (two * T::lit(3.0).sqrt())),
                }
            }
            FamilySpec::Mems { s } => {
                if s <= T::lit(2.0 / 3.0) {
                    let s3 = (two * s * s + T::one() / T::lit(9.0)).sqrt();
                    if s < third {
                        FamilyExpectation {
                            canonical: CanonicalCorrelation::new(third, s, s)?,
                            s3,
                            sigma_closed: Some(mems_low(s)?),
                        }
                    } else {
                        FamilyExpectation {
                            canonical: CanonicalCorrelation::new(s, s, third)?,
                            s3,
                            sigma_closed: Some(mems_profile(s, third)?),
                        }
                    }
                } else {
                    let gamma = two * s - T::one();
                    FamilyExpectation {
                        canonical: CanonicalCorrelation::new(s, s, gamma)?,
                        s3: (T::lit(6.0) * s * s - T::lit(4.0) * s + T::one()).sqrt(),
                        sigma_closed: Some(mems_profile(s, gamma)?),
                    }
                }
            }
            FamilySpec::BellDiagonal { c } => {
                let canonical = CanonicalCorrelation::from_coefficients(c);
                FamilyExpectation {
                    canonical,
                    s3: (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt(),
                    sigma_closed: None,
                }
            }
        })
    }
}

fn projector<T: Real>(psi: &[Complex<T>; 4]) -> CMat4<T> {
    let mut m = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = psi[i] * psi[j].conj();
        }
    }
    m
}

/// MEMS with `s < 1/3`:
/// `Σ = (1/12)[1 + 9s²/sqrt(1 − 9s²) · arccsch(3s/sqrt(1 − 9s²))]`.
///
/// `arccsch(x) = asinh(1/x)` turns the bracket into `1 + g(9s²)`.
fn mems_low<T: Real>(s: T) -> Result<T> {
    let f = T::lit(9.0) * s * s;
    Ok((T::one() + sigma_kernel(f.min(T::one()))?) / T::lit(12.0))
}

/// MEMS with `α = β = s` and third singular value `γ`, via the azimuthal
/// profile `f(φ) = sin²φ + (γ/s)² cos²φ`.
fn mems_profile<T: Real>(s: T, gamma: T) -> Result<T> {
    let ratio = (gamma / s).powi(2);
    let r = sigma_from_profile(s, |phi: T| {
        let (sn, cs) = phi.sin_cos();
        sn * sn + ratio * cs * cs
    })?;
    Ok(r.sigma)
}

impl<T: Real> FromStr for FamilySpec<T> {
    type Err = Error;

    /// `werner:0.6[:+|-]`, `pure:0.9[:psi+|psi-|phi+|phi-]`, `mems:0.5`,
    /// `belldiag:0.8,1,1`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("family spec {text:?}: {msg}"));
        let num = |s: &str| -> Result<T> {
            s.trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| bad(&format!("{s:?} is not a number")))
        };
        let parts: Vec<&str> = text.split(':').collect();
        let spec = match parts.as_slice() {
            ["werner", x] => FamilySpec::Werner { lambda: num(x)?, sign: WernerSign::Minus },
            ["werner", x, sign] => FamilySpec::Werner {
                lambda: num(x)?,
                sign: match *sign {
                    "+" => WernerSign::Plus,
                    "-" => WernerSign::Minus,
                    _ => return Err(bad("Werner sign must be + or -")),
                },
            },
            ["pure", x] => FamilySpec::PureSchmidt { c: num(x)?, variant: SchmidtVariant::PsiPlus },
            ["pure", x, v] => FamilySpec::PureSchmidt {
                c: num(x)?,
                variant: match *v {
                    "psi+" => SchmidtVariant::PsiPlus,
                    "psi-" => SchmidtVariant::PsiMinus,
                    "phi+" => SchmidtVariant::PhiPlus,
                    "phi-" => SchmidtVariant::PhiMinus,
                    _ => return Err(bad("variant must be psi+, psi-, phi+ or phi-")),
                },
            },
            ["mems", x] => FamilySpec::Mems { s: num(x)? },
            ["belldiag", xs] => {
                let v: Vec<T> = xs.split(',').map(num).collect::<Result<_>>()?;
                match v.as_slice() {
                    [a, b, c] => FamilySpec::BellDiagonal { c: [*a, *b, *c] },
                    _ => return Err(bad("belldiag needs three coefficients")),
                }
            }
            _ => return Err(bad("expected werner:, pure:, mems: or belldiag:")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl<T: Real> fmt::Display for FamilySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::PureSchmidt { c, variant } => {
                let v = match variant {
                    SchmidtVariant::PsiPlus => "psi+",
                    SchmidtVariant::PsiMinus => "psi-",
                    SchmidtVariant::PhiPlus => "phi+",
                    SchmidtVariant::PhiMinus => "phi-",
                };
                write!(f, "pure:{c}:{v}")
            }
            FamilySpec::Werner { lambda, sign } => {
                let s = if *sign == WernerSign::Plus { "+" } else { "-" };
                write!(f, "werner:{lambda}:{s}")
            }
            FamilySpec::Mems { s } => write!(f, "mems:{s}"),
            FamilySpec::BellDiagonal { c } => write!(f, "belldiag:{},{},{}", c[0], c[1], c[2]),
        }
    }
}
