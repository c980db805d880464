//! Identical local noise on both qubits: the three Pauli-flip channels and
//! amplitude damping with an oscillating damping probability.
//!
//! Every channel is available both as a Kraus map on density matrices and
//! as a closed-form update of Bell-diagonal correlation coefficients; the two
//! are checked against each other in tests.

use num_complex::Complex;
use rayon::prelude::*;

use crate::avgcorr::average_correlation;
use crate::error::{Error, Result};
use crate::numerics::{bisect, CMat4, Interval, Vec3};
use crate::qstate::{dagger4, kron, matmul4, pauli, BlochForm, CMat2, CanonicalCorrelation, DensityMatrix};
use crate::scalar::Real;
use crate::steering::SteeringReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    BitFlip,
    BitPhaseFlip,
    PhaseFlip,
    GeneralizedAmplitudeDamping,
}

impl ChannelKind {
    pub fn is_unital(&self) -> bool {
        !matches!(self, ChannelKind::GeneralizedAmplitudeDamping)
    }

    /// Pauli axis (0-based) left untouched by a unital flip channel.
    fn flip_axis(&self) -> Option<usize> {
        match self {
            ChannelKind::BitFlip => Some(0),
            ChannelKind::BitPhaseFlip => Some(1),
            ChannelKind::PhaseFlip => Some(2),
            ChannelKind::GeneralizedAmplitudeDamping => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bitflip",
            ChannelKind::BitPhaseFlip => "bitphaseflip",
            ChannelKind::PhaseFlip => "phaseflip",
            ChannelKind::GeneralizedAmplitudeDamping => "gad",
        }
    }

    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::BitFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::GeneralizedAmplitudeDamping,
    ];
}

/// Channel kind with decay rate `Γ` and, for amplitude damping, coupling `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec<T> {
    pub kind: ChannelKind,
    pub gamma_rate: T,
    pub kappa: Option<T>,
}

impl<T: Real> ChannelSpec<T> {
    pub fn unital(kind: ChannelKind, gamma_rate: T) -> Result<Self> {
        if !kind.is_unital() {
            return Err(Error::ParamOutOfRange {
                name: "channel kind",
                value: f64::NAN,
                range: "bit-flip, bit-phase-flip or phase-flip",
            });
        }
        positive("gamma", gamma_rate)?;
        Ok(Self {
            kind,
            gamma_rate,
            kappa: None,
        })
    }

    /// Amplitude damping in the strong-coupling regime, `2κΓ − Γ² > 0`.
    pub fn gad(gamma_rate: T, kappa: T) -> Result<Self> {
        positive("gamma", gamma_rate)?;
        positive("kappa", kappa)?;
        if !(T::lit(2.0) * kappa * gamma_rate - gamma_rate * gamma_rate > T::zero()) {
            return Err(Error::ParamOutOfRange {
                name: "kappa / gamma",
                value: (kappa / gamma_rate).as_f64(),
                range: "> 1/2 (strong coupling)",
            });
        }
        Ok(Self {
            kind: ChannelKind::GeneralizedAmplitudeDamping,
            gamma_rate,
            kappa: Some(kappa),
        })
    }
}

fn positive<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value: x.as_f64(),
            range: "(0, inf)",
        })
    }
}

fn probability<T: Real>(p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "damping probability",
            value: p.as_f64(),
            domain: "[0, 1]",
        })
    }
}

/// `p(t) = 1 − e^{−Γt}` for the flip channels and
/// `p(t) = 1 − e^{−Γt} [cos(Dt/2) + (Γ/D) sin(Dt/2)]²`, `D = sqrt(2κΓ − Γ²)`,
/// for amplitude damping.
pub fn damping_probability<T: Real>(spec: &ChannelSpec<T>, t: T) -> Result<T> {
    if !(t >= T::zero() && t.is_finite()) {
        return Err(Error::Domain {
            what: "time",
            value: t.as_f64(),
            domain: "[0, inf)",
        });
    }
    let g = spec.gamma_rate;
    let decay = (-g * t).exp();
    match spec.kappa {
        None => Ok(T::one() - decay),
        Some(kappa) => {
            let d = (T::lit(2.0) * kappa * g - g * g).sqrt();
            let half = d * t / T::lit(2.0);
            let bracket = half.cos() + g / d * half.sin();
            let p = T::one() - decay * bracket * bracket;
            let slack = T::tol(1e-12);
            if p < -slack || p > T::one() + slack {
                return Err(Error::Domain {
                    what: "damping probability",
                    value: p.as_f64(),
                    domain: "[0, 1]",
                });
            }
            Ok(p.max(T::zero()).min(T::one()))
        }
    }
}

/// Single-qubit Kraus operators at damping probability `p`.
pub fn kraus_operators<T: Real>(kind: ChannelKind, p: T) -> Vec<CMat2<T>> {
    let scale = |m: CMat2<T>, k: T| m.map(|row| row.map(|z| z * k));
    let zero = Complex::new(T::zero(), T::zero());
    let re = |x: T| Complex::new(x, T::zero());
    match kind.flip_axis() {
        Some(axis) => {
            let half = p / T::lit(2.0);
            vec![
                scale(pauli(0), (T::one() - half).sqrt()),
                scale(pauli(axis + 1), half.sqrt()),
            ]
        }
        None => vec![
            [[re(T::one()), zero], [zero, re((T::one() - p).sqrt())]],
            [[zero, re(p.sqrt())], [zero, zero]],
        ],
    }
}

/// `max |Σ E_k† E_k − 𝟙|` over entries.
pub fn completeness_residual<T: Real>(kind: ChannelKind, p: T) -> T {
    let mut sum = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for e in kraus_operators(kind, p) {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    sum[i][j] = sum[i][j] + e[k][i].conj() * e[k][j];
                }
            }
        }
    }
    let id = pauli::<T>(0);
    let mut worst = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((sum[i][j] - id[i][j]).norm());
        }
    }
    worst
}

/// `ε[ρ] = Σ_ij (E_i⊗E_j) ρ (E_i⊗E_j)†`.
pub fn kraus_apply<T: Real>(rho: &DensityMatrix<T>, kind: ChannelKind, p: T) -> Result<DensityMatrix<T>> {
    probability(p)?;
    let ops = kraus_operators(kind, p);
    let mut out: CMat4<T> = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for ei in &ops {
        for ej in &ops {
            let k = kron(ei, ej);
            let term = matmul4(&matmul4(&k, rho.entries()), &dagger4(&k));
            for a in 0..4 {
                for b in 0..4 {
                    out[a][b] = out[a][b] + term[a][b];
                }
            }
        }
    }
    DensityMatrix::from_matrix(out, false)
}

/// Closed-form update of Bell-diagonal coefficients.
///
/// Flip about axis `i`: `c_i' = c_i`, `c_j' = c_j (1 − p)²` otherwise.
/// Amplitude damping: `c_{1,2}' = c_{1,2} (1 − p)`, `c_3' = c_3 (1 − p)² + p²`.
pub fn evolve_coeffs<T: Real>(c: Vec3<T>, kind: ChannelKind, p: T) -> Vec3<T> {
    let q = T::one() - p;
    match kind.flip_axis() {
        Some(axis) => {
            let mut out = c.map(|x| x * q * q);
            out[axis] = c[axis];
            out
        }
        None => [c[0] * q, c[1] * q, c[2] * q * q + p * p],
    }
}

/// Full Pauli form of an evolved Bell-diagonal state. Amplitude damping also
/// builds local Bloch vectors `r = s = (0, 0, p)`.
pub fn evolve_bloch<T: Real>(c: Vec3<T>, kind: ChannelKind, p: T) -> BlochForm<T> {
    let mut b = BlochForm::bell_diagonal(evolve_coeffs(c, kind, p));
    if !kind.is_unital() {
        b.r[2] = p;
        b.s[2] = p;
    }
    b
}

/// Quantities at one instant of a trajectory. `t` is in the same time units
/// as `1/Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow<T> {
    pub t: T,
    pub p: T,
    pub c: Vec3<T>,
    pub canonical: CanonicalCorrelation<T>,
    pub sigma: T,
    pub two_sigma: T,
    pub s2: T,
    pub s3: T,
    pub steer2: T,
    pub steer3: T,
    pub physical: bool,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,p,c1,c2,c3,alpha,beta,gamma,sigma,two_sigma,s2,s3,S2,S3,physical";

/// 17 significant digits, round-trip exact for `f64`.
pub fn format_float<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

impl<T: Real> TrajectoryRow<T> {
    pub fn csv_record(&self) -> String {
        let nums = [
            self.t,
            self.p,
            self.c[0],
            self.c[1],
            self.c[2],
            self.canonical.alpha,
            self.canonical.beta,
            self.canonical.gamma,
            self.sigma,
            self.two_sigma,
            self.s2,
            self.s3,
            self.steer2,
            self.steer3,
        ];
        let mut fields: Vec<String> = nums.iter().map(|&x| format_float(x)).collect();
        fields.push(self.physical.to_string());
        fields.join(",")
    }
}

/// Analyses the state reached from Bell-diagonal `c0` at time `t`.
pub fn state_at<T: Real>(c0: Vec3<T>, spec: &ChannelSpec<T>, t: T) -> Result<TrajectoryRow<T>> {
    let p = damping_probability(spec, t)?;
    let c = evolve_coeffs(c0, spec.kind, p);
    let canonical = CanonicalCorrelation::from_coefficients(c);
    let sigma = average_correlation(&canonical)?.sigma;
    let report = SteeringReport::from_canonical(&canonical)?;
    let physical = evolve_bloch(c0, spec.kind, p).compose().is_physical();
    Ok(TrajectoryRow {
        t,
        p,
        c,
        canonical,
        sigma,
        two_sigma: T::lit(2.0) * sigma,
        s2: report.s2,
        s3: report.s3,
        steer2: report.steer2,
        steer3: report.steer3,
        physical,
    })
}

/// Rows on the uniform grid `t_k = k · t_max / (steps − 1)`, in time order.
pub fn trajectory<T: Real>(c0: Vec3<T>, spec: &ChannelSpec<T>, t_max: T, steps: usize) -> Result<Vec<TrajectoryRow<T>>> {
    if steps < 2 {
        return Err(Error::ParamOutOfRange {
            name: "steps",
            value: steps as f64,
            range: ">= 2",
        });
    }
    positive("t_max", t_max)?;
    let last = T::lit((steps - 1) as f64);
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let t = if k == steps - 1 {
                t_max
            } else {
                t_max * T::lit(k as f64) / last
            };
            state_at(c0, spec, t)
        })
        .collect()
}

/// Sudden-death times of symmetric initial coefficients `c₁ = c₂ = c₃ = |c|`
/// under a flip channel; `inf` where the quantity never crosses its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeathTimes<T> {
    pub t_s2: T,
    pub t_s3: T,
    pub t_sigma: T,
    /// Root of the Σ = 1/4 equation, `A = e^{−4Γ t_Σ}`.
    pub a: Option<T>,
}

/// `t_{s₂} = −ln[(1 − c²)/c²]/(4Γ)`, `t_{s₃} = −ln[(1 − c²)/(2c²)]/(4Γ)`,
/// `t_Σ = −ln A/(4Γ)` with `asinh(sqrt((1 − A)/A)) = ((1 − c)/c) sqrt(1 − A)/A`.
pub fn death_times_analytic<T: Real>(c_abs: T, spec: &ChannelSpec<T>) -> Result<DeathTimes<T>> {
    if !spec.kind.is_unital() {
        return Err(Error::ParamOutOfRange {
            name: "channel kind",
            value: f64::NAN,
            range: "unital flip channel",
        });
    }
    if !(c_abs > T::zero() && c_abs <= T::one()) {
        return Err(Error::Domain {
            what: "|c|",
            value: c_abs.as_f64(),
            domain: "(0, 1]",
        });
    }
    let inf = T::infinity();
    let four_gamma = T::lit(4.0) * spec.gamma_rate;
    let c2 = c_abs * c_abs;
    let time = |x: T| -x.ln() / four_gamma;

    let t_s2 = if T::lit(2.0) * c2 > T::one() {
        time((T::one() - c2) / c2)
    } else {
        inf
    };
    let t_s3 = if T::lit(3.0) * c2 > T::one() {
        time((T::one() - c2) / (T::lit(2.0) * c2))
    } else {
        inf
    };

    let half = T::lit(0.5);
    let (t_sigma, a) = if c_abs > half && c_abs < T::one() {
        let k = (T::one() - c_abs) / c_abs;
        let eps = T::tol(1e-12);
        let a = bisect(
            |a: T| ((T::one() - a) / a).sqrt().asinh() - k * (T::one() - a).sqrt() / a,
            Interval::new(eps, T::one() - eps)?,
            eps,
        )?;
        (time(a), Some(a))
    } else {
        (inf, None)
    };
    Ok(DeathTimes { t_s2, t_s3, t_sigma, a })
}

/// Resource whose threshold crossing is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `s₂ > 1` (Bell nonlocality).
    S2,
    /// `s₃ > 1` (three-setting steering).
    S3,
    /// `Σ > 1/4` (nonclassicality).
    Sigma,
}

impl Quantity {
    pub fn threshold<T: Real>(&self) -> T {
        match self {
            Quantity::S2 | Quantity::S3 => T::one(),
            Quantity::Sigma => T::lit(0.25),
        }
    }

    pub fn of<T: Real>(&self, row: &TrajectoryRow<T>) -> T {
        match self {
            Quantity::S2 => row.s2,
            Quantity::S3 => row.s3,
            Quantity::Sigma => row.sigma,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::S2 => "s2",
            Quantity::S3 => "s3",
            Quantity::Sigma => "sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Value drops from above to at-or-below the threshold.
    Decay,
    /// Value rises from at-or-below to above the threshold.
    Revival,
}

const CROSSING_SCAN: usize = 4096;

/// First crossing of `quantity` through its threshold in `direction` on `iv`.
///
/// The interval is scanned on a uniform grid for the first bracketing cell,
/// which is then bisected to `1e−13`.
pub fn threshold_crossing<T: Real>(
    c0: Vec3<T>,
    spec: &ChannelSpec<T>,
    quantity: Quantity,
    direction: Direction,
    iv: Interval<T>,
) -> Result<T> {
    let thr: T = quantity.threshold();
    let excess = |t: T| -> Result<T> { Ok(quantity.of(&state_at(c0, spec, t)?) - thr) };
    let n = CROSSING_SCAN;
    let step = iv.width() / T::lit(n as f64);
    let mut prev_t = iv.lo;
    let mut prev = excess(prev_t)?;
    for k in 1..=n {
        let t = if k == n { iv.hi } else { iv.lo + step * T::lit(k as f64) };
        let cur = excess(t)?;
        let found = match direction {
            Direction::Decay => prev > T::zero() && cur <= T::zero(),
            Direction::Revival => prev <= T::zero() && cur > T::zero(),
        };
        if found {
            let mut failure = None;
            let root = bisect(
                |x: T| match excess(x) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::zero()
                    }
                },
                Interval::new(prev_t, t)?,
                T::tol(1e-13),
            )?;
            return match failure {
                Some(e) => Err(e),
                None => Ok(root),
            };
        }
        prev_t = t;
        prev = cur;
    }
    let lo = excess(iv.lo)?;
    let hi = excess(iv.hi)?;
    Err(Error::NoSignChange {
        lo: iv.lo.as_f64(),
        hi: iv.hi.as_f64(),
        f_lo: lo.as_f64(),
        f_hi: hi.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unital(kind: ChannelKind) -> ChannelSpec<f64> {
        ChannelSpec::unital(kind, 1.0).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ChannelSpec::unital(ChannelKind::GeneralizedAmplitudeDamping, 1.0).is_err());
        assert!(ChannelSpec::unital(ChannelKind::BitFlip, 0.0).is_err());
        assert!(ChannelSpec::gad(1.0, 0.4).is_err());
        assert!(ChannelSpec::gad(1.0, 200.0).is_ok());
    }

    #[test]
    fn damping_probabilities() {
        let s = unital(ChannelKind::PhaseFlip);
        assert_eq!(damping_probability(&s, 0.0).unwrap(), 0.0);
        assert!((damping_probability(&s, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(damping_probability(&s, -1.0).is_err());
        let g = ChannelSpec::gad(0.005, 1.0).unwrap();
        assert_eq!(damping_probability(&g, 0.0).unwrap(), 0.0);
        let g = ChannelSpec::gad(1.0, 200.0).unwrap();
        for i in 0..=5000 {
            let p = damping_probability(&g, i as f64 * 1e-3).unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn coefficient_updates() {
        let c = evolve_coeffs([0.8, 1.0, 1.0], ChannelKind::BitFlip, 0.5);
        assert_eq!(c, [0.8, 0.25, 0.25]);
        let c = evolve_coeffs([1.0, 1.0, 0.8], ChannelKind::GeneralizedAmplitudeDamping, 0.5);
        assert_eq!(c, [0.5, 0.5, 0.45]);
        for kind in ChannelKind::ALL {
            assert_eq!(evolve_coeffs([0.3, -0.2, 0.7], kind, 0.0), [0.3, -0.2, 0.7]);
        }
        assert_eq!(evolve_coeffs([0.3, -0.2, 0.7], ChannelKind::PhaseFlip, 1.0), [0.0, -0.0, 0.7]);
    }

    #[test]
    fn kraus_completeness_and_trace() {
        let rho = BlochForm::bell_diagonal([0.5, -0.3, 0.2]).compose();
        for kind in ChannelKind::ALL {
            for i in 0..=20 {
                let p = i as f64 / 20.0;
                assert!(completeness_residual(kind, p) < 1e-12);
                let out = kraus_apply(&rho, kind, p).unwrap();
                let tr: f64 = (0..4).map(|k| out.entries()[k][k].re).sum();
                assert!((tr - 1.0).abs() < 1e-12);
            }
            assert!(kraus_apply(&rho, kind, 1.5).is_err());
        }
    }

    #[test]
    fn kraus_identity_at_zero_and_full_damping() {
        let rho = BlochForm::bell_diagonal([0.5, -0.3, 0.2]).compose();
        for kind in ChannelKind::ALL {
            let out = kraus_apply(&rho, kind, 0.0).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((out.entries()[i][j] - rho.entries()[i][j]).norm() < 1e-15);
                }
            }
        }
        let ground = kraus_apply(&rho, ChannelKind::GeneralizedAmplitudeDamping, 1.0f64).unwrap();
        assert!((ground.entries()[0][0].re - 1.0).abs() < 1e-15);
        assert!((ground.purity() - 1.0).abs() < 1e-14);
        let dephased = kraus_apply(&rho, ChannelKind::PhaseFlip, 1.0f64).unwrap().bloch();
        assert!(dephased.t[0][0].abs() < 1e-15 && dephased.t[1][1].abs() < 1e-15);
        assert!((dephased.t[2][2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn kraus_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let c: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let rho = BlochForm::bell_diagonal(c).compose();
            for kind in ChannelKind::ALL {
                let p = rng.random_range(0.0..1.0);
                let got = kraus_apply(&rho, kind, p).unwrap().bloch();
                let want = evolve_bloch(c, kind, p);
                for i in 0..3 {
                    assert!((got.r[i] - want.r[i]).abs() < 1e-12);
                    assert!((got.s[i] - want.s[i]).abs() < 1e-12);
                    for j in 0..3 {
                        assert!((got.t[i][j] - want.t[i][j]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn werner_dephasing_is_strictly_decreasing() {
        let rows = trajectory([-0.9, -0.9, -0.9], &unital(ChannelKind::PhaseFlip), 3.0, 200).unwrap();
        assert_eq!(rows.len(), 200);
        assert_eq!(rows[0].t, 0.0);
        assert_eq!(rows[199].t, 3.0);
        for w in rows.windows(2) {
            assert!(w[1].sigma < w[0].sigma);
            assert!(w[1].t > w[0].t);
            assert_eq!(w[1].two_sigma, 2.0 * w[1].sigma);
        }
    }

    #[test]
    fn first_row_is_initial_state() {
        let rows = trajectory([0.8, 1.0, 1.0], &unital(ChannelKind::BitFlip), 1e-9, 2).unwrap();
        let r = rows[0];
        assert_eq!(r.p, 0.0);
        assert_eq!(r.c, [0.8, 1.0, 1.0]);
        assert!(!r.physical);
        assert_eq!(r.canonical.as_array(), [1.0, 1.0, 0.8]);
    }

    #[test]
    fn trajectory_arguments() {
        let s = unital(ChannelKind::BitFlip);
        assert!(trajectory([0.5; 3], &s, 1.0, 1).is_err());
        assert!(trajectory([0.5; 3], &s, 0.0, 5).is_err());
    }

    #[test]
    fn analytic_death_times() {
        let s = unital(ChannelKind::PhaseFlip);
        let d = death_times_analytic(0.8, &s).unwrap();
        assert!((d.t_s2 - 0.143_841_036_225_890_1).abs() < 1e-12);
        assert!((d.t_s3 - 0.317_127_831_365_877).abs() < 1e-12);
        assert!((d.a.unwrap() - 0.141_910_122_338_455).abs() < 1e-11);
        assert!((d.t_sigma - 0.488_140_340_762_814).abs() < 1e-10);

        let d = death_times_analytic(0.5, &s).unwrap();
        assert!(d.t_s2.is_infinite() && d.t_s3.is_infinite() && d.t_sigma.is_infinite());
        let d = death_times_analytic(1.0, &s).unwrap();
        assert!(d.t_s2.is_infinite() && d.t_sigma.is_infinite() && d.a.is_none());

        assert!(death_times_analytic(0.0, &s).is_err());
        assert!(death_times_analytic(1.2, &s).is_err());
        assert!(death_times_analytic(0.8, &ChannelSpec::gad(1.0, 200.0).unwrap()).is_err());
    }

    #[test]
    fn a_equation_has_a_single_root() {
        for &c in &[0.55, 0.75, 0.8, 0.95] {
            let k = (1.0 - c) / c;
            let h = |a: f64| ((1.0 - a) / a).sqrt().asinh() - k * (1.0 - a).sqrt() / a;
            let n = 100_000;
            let changes = (1..n - 1)
                .filter(|&i| h(i as f64 / n as f64).signum() != h((i + 1) as f64 / n as f64).signum())
                .count();
            assert_eq!(changes, 1, "c = {c}");
        }
    }

    #[test]
    fn numeric_crossings_match_analytic() {
        for kind in [ChannelKind::BitFlip, ChannelKind::BitPhaseFlip, ChannelKind::PhaseFlip] {
            let s = ChannelSpec::<f64>::unital(kind, 2.0).unwrap();
            let d = death_times_analytic(0.8, &s).unwrap();
            let iv = Interval::new(0.0, 2.0).unwrap();
            let c0 = [0.8, 0.8, 0.8];
            for (q, want) in [(Quantity::S2, d.t_s2), (Quantity::S3, d.t_s3), (Quantity::Sigma, d.t_sigma)] {
                let got = threshold_crossing(c0, &s, q, Direction::Decay, iv).unwrap();
                assert!(((got - want) / want).abs() < 1e-6, "{kind:?} {q:?}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn crossing_requires_sign_change() {
        let s = unital(ChannelKind::PhaseFlip);
        let iv = Interval::new(0.0, 1.0).unwrap();
        let err = threshold_crossing([0.3, 0.3, 0.3], &s, Quantity::S3, Direction::Decay, iv).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn csv_record_shape() {
        let rows = trajectory([0.8, 1.0, 1.0], &unital(ChannelKind::PhaseFlip), 1.0, 3).unwrap();
        for r in &rows {
            let rec = r.csv_record();
            let fields: Vec<&str> = rec.split(',').collect();
            assert_eq!(fields.len(), TRAJECTORY_CSV_HEADER.split(',').count());
            assert_eq!(fields[0].parse::<f64>().unwrap(), r.t);
            assert_eq!(fields[8].parse::<f64>().unwrap(), r.sigma);
        }
    }
}
