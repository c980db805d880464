//! Self-check suite behind `corrsteer verify`: the library's invariants
//! evaluated on fresh samples, each reported as a named pass/fail outcome.

use rayon::prelude::*;

use crate::avgcorr::{average_correlation, average_correlation_double, monte_carlo_sigma, sigma_pure};
use crate::channels::{
    death_times_analytic, evolve_bloch, kraus_apply, threshold_crossing, trajectory, ChannelKind, ChannelSpec,
    Direction, Quantity,
};
use crate::error::Result;
use crate::families::{FamilySpec, SchmidtVariant, WernerSign};
use crate::numerics::Interval;
use crate::qstate::{BlochForm, CanonicalCorrelation, DensityMatrix};
use crate::sampling::{sample, SamplerKind, SamplerSpec};
use crate::steering::{degree_of_steerability, sigma_bounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { samples: 1000, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn states(cfg: &VerifyConfig, kind: SamplerKind, count: usize) -> Vec<DensityMatrix<f64>> {
    let spec = SamplerSpec::new(kind, cfg.seed).expect("valid sampler");
    (0..count as u64).into_par_iter().map(|i| sample(&spec, i)).collect()
}

/// Runs every check. Sample counts scale with `cfg.samples`.
pub fn run_suite(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    let n = cfg.samples.max(1);
    let ginibre = states(cfg, SamplerKind::GinibreMixed(4), n);
    let pure = states(cfg, SamplerKind::HaarPure, n.min(1000));
    vec![
        outcome("round_trip", round_trip(&ginibre)),
        outcome("canonical_limits", canonical_limits(&ginibre, &pure)),
        outcome("bound_containment", bound_containment(&ginibre)),
        outcome("hierarchy", hierarchy(&ginibre)),
        outcome("single_vs_double_integral", integral_forms(&ginibre[..n.min(100)])),
        outcome("monte_carlo_agreement", monte_carlo(&ginibre[..n.min(5)], cfg.seed)),
        outcome("extremal_anchors", extremal_anchors()),
        outcome("werner_saturation", werner_saturation()),
        outcome("pure_closed_form", pure_closed_form()),
        outcome("mems_continuity", mems_continuity()),
        outcome("kraus_vs_closed_form", kraus_cross_check(&ginibre[..n.min(50)])),
        outcome("death_times", death_times()),
        outcome("unital_monotonicity", unital_monotonicity(cfg.seed)),
        outcome("gad_revival_order", gad_revival()),
    ]
}

fn round_trip(states: &[DensityMatrix<f64>]) -> Result<(bool, String)> {
    let worst = states
        .par_iter()
        .map(|rho| {
            let back = rho.bloch().compose();
            let mut d = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    d = d.max((back.entries()[i][j] - rho.entries()[i][j]).norm());
                }
            }
            d
        })
        .reduce(|| 0.0, f64::max);
    Ok((worst <= 1e-12, format!("max entry deviation {worst:.3e}")))
}

fn canonical_limits(mixed: &[DensityMatrix<f64>], pure: &[DensityMatrix<f64>]) -> Result<(bool, String)> {
    let mut bad = 0;
    for rho in mixed.iter().chain(pure) {
        let [a, b, c] = rho.bloch().canonical().as_array();
        if a > 1.0 + 1e-9 || a * a + b * b + c * c > 3.0 + 1e-9 {
            bad += 1;
        }
    }
    let pure_dev = pure
        .iter()
        .map(|r| (r.bloch().canonical().alpha - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((
        bad == 0 && pure_dev <= 1e-9,
        format!("{bad} states outside limits, pure-state |alpha-1| <= {pure_dev:.3e}"),
    ))
}

fn bound_containment(states: &[DensityMatrix<f64>]) -> Result<(bool, String)> {
    let results: Vec<Result<f64>> = states
        .par_iter()
        .map(|rho| {
            let cc = rho.bloch().canonical();
            let sigma = average_correlation(&cc)?.sigma;
            let mut worst = f64::NEG_INFINITY;
            for n in [2, 3] {
                let sn = degree_of_steerability(&cc, n)?.min((n as f64).sqrt());
                let (lo, hi) = sigma_bounds(sn, n)?;
                worst = worst.max(lo - sigma).max(sigma - hi);
            }
            Ok(worst)
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for r in results {
        let w = r?;
        worst = worst.max(w);
        if w > 1e-7 {
            violations += 1;
        }
    }
    Ok((violations == 0, format!("{violations} violations, max excess {worst:.3e}")))
}

fn hierarchy(states: &[DensityMatrix<f64>]) -> Result<(bool, String)> {
    let mut bad = 0;
    for rho in states {
        let cc = rho.bloch().canonical();
        let s2 = degree_of_steerability(&cc, 2)?;
        let s3 = degree_of_steerability(&cc, 3)?;
        if s2 > 1.0 && s3 <= 1.0 {
            bad += 1;
        }
        if s3 >= 1.0 && average_correlation(&cc)?.sigma < 0.25 - 1e-9 {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} hierarchy breaches")))
}

fn integral_forms(states: &[DensityMatrix<f64>]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for rho in states {
        let cc = rho.bloch().canonical();
        if cc.alpha <= 0.05 {
            continue;
        }
        let d = (average_correlation(&cc)?.sigma - average_correlation_double(&cc)?.sigma).abs();
        worst = worst.max(d);
    }
    Ok((worst <= 1e-7, format!("max difference {worst:.3e}")))
}

fn monte_carlo(states: &[DensityMatrix<f64>], seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (k, rho) in states.iter().enumerate() {
        let b = rho.bloch();
        let mc = monte_carlo_sigma(&b, 200_000, seed.wrapping_add(k as u64))?;
        let exact = average_correlation(&b.canonical())?.sigma;
        worst = worst.max((mc.sigma - exact).abs() / mc.error_estimate);
    }
    Ok((worst <= 4.0, format!("max deviation {worst:.2} standard errors")))
}

fn extremal_anchors() -> Result<(bool, String)> {
    let max: f64 = average_correlation(&CanonicalCorrelation::new(1.0, 1.0, 1.0)?)?.sigma;
    let min: f64 = average_correlation(&CanonicalCorrelation::new(1.0, 0.0, 0.0)?)?.sigma;
    let ok = (max - 0.5).abs() <= 1e-10 && (min - 0.25).abs() <= 1e-10;
    Ok((ok, format!("sigma(1,1,1) = {max:.15}, sigma(1,0,0) = {min:.15}")))
}

fn werner_saturation() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let lambda = k as f64 / 10.0;
        let fam = FamilySpec::Werner {
            lambda,
            sign: WernerSign::Minus,
        };
        let cc = fam.build()?.bloch().canonical();
        let sigma = average_correlation(&cc)?.sigma;
        let s3 = degree_of_steerability(&cc, 3)?;
        worst = worst
            .max((sigma - lambda / 2.0).abs() / 1e-9)
            .max((s3 - 3f64.sqrt() * lambda).abs() / 1e-12);
    }
    Ok((worst <= 1.0, format!("worst error/tolerance {worst:.3}")))
}

fn pure_closed_form() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for k in 0..50 {
        let c = k as f64 / 49.0;
        let fam = FamilySpec::PureSchmidt {
            c,
            variant: SchmidtVariant::PsiPlus,
        };
        let cc = fam.build()?.bloch().canonical();
        worst = worst.max((sigma_pure(c)? - average_correlation(&cc)?.sigma).abs());
    }
    Ok((worst <= 1e-8, format!("max difference {worst:.3e}")))
}

fn mems_sigma(s: f64) -> Result<f64> {
    let cc = FamilySpec::Mems { s }.build()?.bloch().canonical();
    Ok(average_correlation(&cc)?.sigma)
}

fn mems_continuity() -> Result<(bool, String)> {
    let h = 1e-9;
    let mut worst = 0.0f64;
    for edge in [1.0 / 3.0, 2.0 / 3.0] {
        worst = worst.max((mems_sigma(edge + h)? - mems_sigma(edge - h)?).abs());
    }
    let mut closed = 0.0f64;
    for k in 0..50 {
        let s = k as f64 / 49.0;
        let fam = FamilySpec::Mems { s };
        let want = fam.expected()?.sigma_closed.expect("MEMS has a closed form");
        closed = closed.max((want - mems_sigma(s)?).abs());
    }
    Ok((
        worst <= 1e-8 && closed <= 1e-8,
        format!("jump {worst:.3e}, closed-form gap {closed:.3e}"),
    ))
}

fn kraus_cross_check(states: &[DensityMatrix<f64>]) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (k, rho) in states.iter().enumerate() {
        let t = rho.bloch().t;
        let c = [t[0][0], t[1][1], t[2][2]];
        let bd = BlochForm::bell_diagonal(c).compose();
        for kind in ChannelKind::ALL {
            for j in 0..20 {
                let p = ((k * 20 + j) % 41) as f64 / 40.0;
                let got = kraus_apply(&bd, kind, p)?.bloch();
                let want = evolve_bloch(c, kind, p);
                for i in 0..3 {
                    worst = worst.max((got.r[i] - want.r[i]).abs()).max((got.s[i] - want.s[i]).abs());
                    for l in 0..3 {
                        worst = worst.max((got.t[i][l] - want.t[i][l]).abs());
                    }
                }
            }
        }
    }
    Ok((worst <= 1e-12, format!("max coefficient gap {worst:.3e}")))
}

fn death_times() -> Result<(bool, String)> {
    let spec = ChannelSpec::<f64>::unital(ChannelKind::PhaseFlip, 1.0)?;
    let d = death_times_analytic(0.8, &spec)?;
    let iv = Interval::new(0.0, 2.0)?;
    let c0 = [0.8; 3];
    let mut worst = 0.0f64;
    for (q, want) in [(Quantity::S2, d.t_s2), (Quantity::S3, d.t_s3), (Quantity::Sigma, d.t_sigma)] {
        let got = threshold_crossing(c0, &spec, q, Direction::Decay, iv)?;
        worst = worst.max(((got - want) / want).abs());
    }
    let mut ordered = true;
    for c in [0.75, 0.8, 0.9, 1.0] {
        let d = death_times_analytic(c, &spec)?;
        ordered &= d.t_s2 <= d.t_s3 && d.t_s3 <= d.t_sigma;
    }
    Ok((
        worst <= 1e-6 && ordered,
        format!("max relative gap {worst:.3e}, ordering {}", if ordered { "holds" } else { "broken" }),
    ))
}

fn unital_monotonicity(seed: u64) -> Result<(bool, String)> {
    let spec = SamplerSpec::new(SamplerKind::BellDiagonalUniform, seed)?;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..6u64 {
        let (c, _) = crate::sampling::bell_diagonal_coefficients(&spec, k);
        let kind = [ChannelKind::BitFlip, ChannelKind::BitPhaseFlip, ChannelKind::PhaseFlip][k as usize % 3];
        let rows = trajectory(c, &ChannelSpec::unital(kind, 1.0)?, 3.0, 200)?;
        for w in rows.windows(2) {
            worst = worst
                .max(w[1].sigma - w[0].sigma)
                .max(w[1].s2 - w[0].s2)
                .max(w[1].s3 - w[0].s3);
        }
    }
    Ok((worst <= 1e-10, format!("largest step increase {worst:.3e}")))
}

fn gad_revival() -> Result<(bool, String)> {
    let spec = ChannelSpec::gad(1.0, 200.0)?;
    let c0 = [1.0, 1.0, 0.8];
    let horizon = 1.0;
    let mut decay = [0.0; 3];
    let mut revival = [0.0; 3];
    for (k, q) in [Quantity::S2, Quantity::S3, Quantity::Sigma].into_iter().enumerate() {
        decay[k] = threshold_crossing(c0, &spec, q, Direction::Decay, Interval::new(0.0, horizon)?)?;
        revival[k] = threshold_crossing(c0, &spec, q, Direction::Revival, Interval::new(decay[k], horizon)?)?;
    }
    let ok = decay[0] <= decay[1] && decay[1] <= decay[2] && revival[0] >= revival[1] && revival[1] >= revival[2];
    Ok((
        ok,
        format!(
            "decay s2/s3/sigma at {:.4}/{:.4}/{:.4}, revival at {:.4}/{:.4}/{:.4}",
            decay[0], decay[1], decay[2], revival[0], revival[1], revival[2]
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_run() {
        let out = run_suite(&VerifyConfig { samples: 200, seed: 3 });
        assert_eq!(out.len(), 14);
        for o in &out {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }

    #[test]
    fn failures_carry_the_error() {
        let o = outcome("x", Err(crate::error::Error::BadSetting(5)));
        assert!(!o.passed);
        assert!(o.detail.starts_with("error:"));
    }
}
