//! `corrsteer`: average correlation and steering analysis from the command line.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad usage or input.

mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use corrsteer::avgcorr::sigma_from_profile;
use corrsteer::numerics::Interval;
use corrsteer::{
    average_correlation, average_correlation_double, classify, death_times_analytic, monte_carlo_sigma,
    parse_state_json, sigma_bounds, stream, threshold_crossing, trajectory, ChannelKind, ChannelSpec64,
    DensityMatrix64, Direction, FamilySpec64, Quantity, SamplerKind, SamplerSpec, SigmaResult64, SteeringReport64,
    VerifyConfig, TRAJECTORY_CSV_HEADER,
};
use rayon::prelude::*;
use serde_json::json;

use output::{fmt_float, json_float, Diagnostics, Sink};

#[derive(Parser)]
#[command(name = "corrsteer", version, about = "Average correlation and linear steering for two-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one state (a JSON state file or a family spec such as werner:0.6).
    Analyze {
        state: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep a family parameter and tabulate Σ, sₙ and the Σ bounds.
    Scan {
        /// werner[:+|-], pure[:psi+|psi-|phi+|phi-] or mems.
        family: String,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check random states against the Σ envelope.
    Bounds {
        #[arg(long, value_enum, default_value_t = Sampler::Ginibre4)]
        sampler: Sampler,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Per-state CSV (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Boundary curves CSV.
        #[arg(long)]
        curves: Option<PathBuf>,
        /// Summary JSON (default stderr).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Evolve a Bell-diagonal state under identical local noise.
    Evolve {
        /// Initial coefficients c1,c2,c3.
        #[arg(long, value_parser = parse_coeffs, allow_hyphen_values = true)]
        c: [f64; 3],
        #[arg(long, value_enum)]
        channel: Channel,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Coupling κ in units of Γ (amplitude damping only).
        #[arg(long, default_value_t = 200.0)]
        kappa_over_gamma: f64,
        #[arg(long, default_value_t = 5.0)]
        tmax: f64,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sudden-death times of c1 = c2 = c3 = c under a flip channel, analytic and numeric.
    Deathtimes {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Channel::Phaseflip)]
        channel: Channel,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Single,
    Double,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    Ginibre4,
    Ginibre2,
    Ginibre1,
    Pure,
    Belldiag,
}

impl Sampler {
    fn kind(self) -> SamplerKind {
        match self {
            Sampler::Ginibre4 => SamplerKind::GinibreMixed(4),
            Sampler::Ginibre2 => SamplerKind::GinibreMixed(2),
            Sampler::Ginibre1 => SamplerKind::GinibreMixed(1),
            Sampler::Pure => SamplerKind::HaarPure,
            Sampler::Belldiag => SamplerKind::BellDiagonalUniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Channel {
    Bitflip,
    Bitphaseflip,
    Phaseflip,
    Gad,
}

impl Channel {
    fn kind(self) -> ChannelKind {
        match self {
            Channel::Bitflip => ChannelKind::BitFlip,
            Channel::Bitphaseflip => ChannelKind::BitPhaseFlip,
            Channel::Phaseflip => ChannelKind::PhaseFlip,
            Channel::Gad => ChannelKind::GeneralizedAmplitudeDamping,
        }
    }
}

fn parse_coeffs(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected three comma-separated numbers, got {}", v.len()))
}

/// Why a command did not succeed.
enum Failure {
    /// Input or usage problem: exit 2.
    Usage(anyhow::Error),
    /// A checked scientific property failed: exit 1.
    Violation(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<corrsteer::Error> for Failure {
    fn from(e: corrsteer::Error) -> Self {
        Failure::Usage(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let diag = Diagnostics::from_env();
    let result = match cli.command {
        Command::Analyze {
            state,
            method,
            mc_samples,
            seed,
        } => analyze(&diag, &state, method, mc_samples, seed),
        Command::Scan {
            family,
            from,
            to,
            points,
            out,
        } => scan(&family, from, to, points, out.as_deref()),
        Command::Bounds {
            sampler,
            seed,
            samples,
            out,
            curves,
            summary,
        } => bounds(sampler, seed, samples, out.as_deref(), curves.as_deref(), summary.as_deref()),
        Command::Evolve {
            c,
            channel,
            gamma,
            kappa_over_gamma,
            tmax,
            steps,
            out,
        } => evolve(&diag, c, channel, gamma, kappa_over_gamma, tmax, steps, out.as_deref()),
        Command::Deathtimes { c, gamma, channel } => deathtimes(c, gamma, channel),
        Command::Verify { samples, seed } => verify(&diag, samples, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            diag.error(&msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            diag.error(&format!("{e:#}"));
            ExitCode::from(2)
        }
    }
}

fn load_state(spec: &str) -> anyhow::Result<DensityMatrix64> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_state_json(&text, false).with_context(|| format!("parsing {}", path.display()));
    }
    if !spec.contains(':') {
        bail!("{spec:?} is neither a readable state file nor a family spec like werner:0.6");
    }
    let family: FamilySpec64 = spec.parse()?;
    Ok(family.build()?)
}

fn sigma_by(method: Method, rho: &DensityMatrix64, mc_samples: usize, seed: u64) -> corrsteer::Result<SigmaResult64> {
    let b = rho.bloch();
    let cc = b.canonical();
    match method {
        Method::Auto => average_correlation(&cc),
        Method::Single => {
            if cc.alpha <= 0.0 {
                return average_correlation(&cc);
            }
            let (rb, rg) = ((cc.beta / cc.alpha).powi(2), (cc.gamma / cc.alpha).powi(2));
            sigma_from_profile(cc.alpha, |phi: f64| {
                let (s, c) = phi.sin_cos();
                rb * s * s + rg * c * c
            })
        }
        Method::Double => {
            if cc.alpha <= 0.0 {
                return average_correlation(&cc);
            }
            average_correlation_double(&cc)
        }
        Method::Mc => monte_carlo_sigma(&b, mc_samples, seed),
    }
}

fn analyze(diag: &Diagnostics, state: &str, method: Method, mc_samples: usize, seed: u64) -> CmdResult {
    let rho = load_state(state)?;
    if !rho.is_physical() {
        diag.warn(&format!(
            "state is not physical (minimum eigenvalue {:.6}); values describe the formal correlation matrix",
            rho.min_eigenvalue()
        ));
    }
    let b = rho.bloch();
    let cc = b.canonical();
    let sigma = sigma_by(method, &rho, mc_samples, seed)?;
    let rep = SteeringReport64::from_canonical(&cc)?;
    let class = classify(sigma.sigma, rep.s2, rep.s3);
    let report = json!({
        "state": state,
        "physical": rho.is_physical(),
        "min_eigenvalue": json_float(rho.min_eigenvalue()),
        "r": b.r.map(json_float),
        "s": b.s.map(json_float),
        "T": b.t.map(|row| row.map(json_float)),
        "canonical": {
            "alpha": json_float(cc.alpha),
            "beta": json_float(cc.beta),
            "gamma": json_float(cc.gamma),
        },
        "sigma": {
            "value": json_float(sigma.sigma),
            "method": sigma.method.name(),
            "error": json_float(sigma.error_estimate),
        },
        "s2": json_float(rep.s2),
        "s3": json_float(rep.s3),
        "S2": json_float(rep.steer2),
        "S3": json_float(rep.steer3),
        "chsh_max": json_float(rep.chsh_max),
        "sigma_lower": json_float(rep.sigma_lower),
        "sigma_upper": json_float(rep.sigma_upper),
        "classification": {
            "bell_nonlocal": class.bell_nonlocal,
            "steerable3": class.steerable3,
            "nonclassical": class.nonclassical.name(),
        },
    });
    let mut sink = Sink::open(None)?;
    sink.line(&serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?)?;
    sink.finish()?;
    Ok(())
}

fn scan(family: &str, from: f64, to: f64, points: usize, out: Option<&Path>) -> CmdResult {
    if points < 2 {
        return Err(Failure::Usage(anyhow!("--points must be at least 2")));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Failure::Usage(anyhow!("--from must be below --to")));
    }
    let (name, variant) = match family.split_once(':') {
        Some((n, v)) => (n, format!(":{v}")),
        None => (family, String::new()),
    };
    if !matches!(name, "werner" | "pure" | "mems") {
        return Err(Failure::Usage(anyhow!(
            "cannot scan {family:?}: expected werner, pure or mems with an optional variant"
        )));
    }
    let mut sink = Sink::open(out)?;
    sink.line("param,alpha,beta,gamma,sigma,s2,s3,S2,S3,lower,upper,physical")?;
    for k in 0..points {
        let x = if k == points - 1 {
            to
        } else {
            from + (to - from) * k as f64 / (points - 1) as f64
        };
        let spec: FamilySpec64 = format!("{name}:{x}{variant}").parse()?;
        let rho = spec.build()?;
        let cc = rho.bloch().canonical();
        let sigma = average_correlation(&cc)?.sigma;
        let rep = SteeringReport64::from_canonical(&cc)?;
        let nums = [
            x,
            cc.alpha,
            cc.beta,
            cc.gamma,
            sigma,
            rep.s2,
            rep.s3,
            rep.steer2,
            rep.steer3,
            rep.sigma_lower,
            rep.sigma_upper,
        ];
        let mut row: Vec<String> = nums.iter().map(|&v| fmt_float(v)).collect();
        row.push(rho.is_physical().to_string());
        sink.line(&row.join(","))?;
    }
    sink.finish()?;
    Ok(())
}

/// Bound violations above this fail the command.
const VIOLATION_LIMIT: f64 = 1e-6;
/// Slack allowed for round-off when counting violations.
const BOUND_SLACK: f64 = 1e-7;

fn bounds(
    sampler: Sampler,
    seed: u64,
    samples: usize,
    out: Option<&Path>,
    curves: Option<&Path>,
    summary: Option<&Path>,
) -> CmdResult {
    if samples == 0 {
        return Err(Failure::Usage(anyhow!("--samples must be at least 1")));
    }
    let spec = SamplerSpec::new(sampler.kind(), seed)?;
    let states: Vec<DensityMatrix64> = stream(&spec, samples);
    let rows: Vec<corrsteer::Result<BoundRow>> = states.par_iter().map(bound_row).collect();
    let mut sink = Sink::open(out)?;
    sink.line("s3,sigma,lower,upper,physical")?;
    let (mut v3, mut v2, mut worst3, mut worst2, mut unphysical) = (0usize, 0usize, f64::NEG_INFINITY, f64::NEG_INFINITY, 0usize);
    for row in rows {
        let row = row?;
        sink.line(&format!(
            "{},{},{},{},{}",
            fmt_float(row.s3),
            fmt_float(row.sigma),
            fmt_float(row.lower3),
            fmt_float(row.upper3),
            row.physical
        ))?;
        let e3 = (row.lower3 - row.sigma).max(row.sigma - row.upper3);
        let e2 = (row.lower2 - row.sigma).max(row.sigma - row.upper2);
        worst3 = worst3.max(e3);
        worst2 = worst2.max(e2);
        v3 += (e3 > BOUND_SLACK) as usize;
        v2 += (e2 > BOUND_SLACK) as usize;
        unphysical += (!row.physical) as usize;
    }
    sink.finish()?;

    if let Some(path) = curves {
        let mut c = Sink::open(Some(path))?;
        c.line("s,lower3,upper3,lower2,upper2")?;
        let n = 301;
        for k in 0..n {
            let s = 3f64.sqrt() * k as f64 / (n - 1) as f64;
            let (l3, u3) = sigma_bounds(s, 3)?;
            let (l2, u2) = if s <= 2f64.sqrt() {
                let (l, u) = sigma_bounds(s, 2)?;
                (fmt_float(l), fmt_float(u))
            } else {
                (String::new(), String::new())
            };
            c.line(&format!("{},{},{},{},{}", fmt_float(s), fmt_float(l3), fmt_float(u3), l2, u2))?;
        }
        c.finish()?;
    }

    let report = json!({
        "sampler": spec.kind().name(),
        "seed": seed,
        "samples": samples,
        "unphysical": unphysical,
        "n3": {"violations": v3, "max_excess": json_float(worst3)},
        "n2": {"violations": v2, "max_excess": json_float(worst2)},
        "tolerance": BOUND_SLACK,
    });
    let text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
    match summary {
        Some(path) => {
            let mut s = Sink::open(Some(path))?;
            s.line(&text)?;
            s.finish()?;
        }
        None => eprintln!("{text}"),
    }
    let worst = worst3.max(worst2);
    if worst > VIOLATION_LIMIT {
        return Err(Failure::Violation(format!(
            "bound violated by {worst:.3e} ({v3} states for n = 3, {v2} for n = 2)"
        )));
    }
    Ok(())
}

struct BoundRow {
    s3: f64,
    sigma: f64,
    lower3: f64,
    upper3: f64,
    lower2: f64,
    upper2: f64,
    physical: bool,
}

fn bound_row(rho: &DensityMatrix64) -> corrsteer::Result<BoundRow> {
    let cc = rho.bloch().canonical();
    let sigma = average_correlation(&cc)?.sigma;
    let rep = SteeringReport64::from_canonical(&cc)?;
    let (lower3, upper3) = sigma_bounds(rep.s3.min(3f64.sqrt()), 3)?;
    let (lower2, upper2) = sigma_bounds(rep.s2.min(2f64.sqrt()), 2)?;
    Ok(BoundRow {
        s3: rep.s3,
        sigma,
        lower3,
        upper3,
        lower2,
        upper2,
        physical: rho.is_physical(),
    })
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    diag: &Diagnostics,
    c: [f64; 3],
    channel: Channel,
    gamma: f64,
    kappa_over_gamma: f64,
    tmax: f64,
    steps: usize,
    out: Option<&Path>,
) -> CmdResult {
    let spec = match channel {
        Channel::Gad => ChannelSpec64::gad(gamma, kappa_over_gamma * gamma)?,
        other => ChannelSpec64::unital(other.kind(), gamma)?,
    };
    if c.iter().any(|x| !(x.abs() <= 1.0)) {
        return Err(Failure::Usage(anyhow!("coefficients must lie in [-1, 1]")));
    }
    let rows = trajectory(c, &spec, tmax, steps)?;
    let bad = rows.iter().filter(|r| !r.physical).count();
    if bad > 0 {
        diag.warn(&format!(
            "{bad} of {} rows describe unphysical states (the initial coefficients lie outside the physical tetrahedron)",
            rows.len()
        ));
    }
    let mut sink = Sink::open(out)?;
    sink.line(TRAJECTORY_CSV_HEADER)?;
    for r in &rows {
        sink.line(&r.csv_record())?;
    }
    sink.finish()?;
    Ok(())
}

/// Search window for numeric crossings, in units of `1/Γ`.
const DEATH_SEARCH_WINDOW: f64 = 20.0;
/// Largest accepted gap between analytic and numeric death times.
const DEATH_REL_LIMIT: f64 = 1e-5;

fn deathtimes(c: f64, gamma: f64, channel: Channel) -> CmdResult {
    if matches!(channel, Channel::Gad) {
        return Err(Failure::Usage(anyhow!("closed-form death times exist only for the flip channels")));
    }
    let spec = ChannelSpec64::unital(channel.kind(), gamma)?;
    let c_abs = c.abs();
    let analytic = death_times_analytic(c_abs, &spec)?;
    let iv = Interval::new(0.0, DEATH_SEARCH_WINDOW / gamma)?;
    let mut fields = serde_json::Map::new();
    let mut worst = 0.0f64;
    for (q, want) in [
        (Quantity::S2, analytic.t_s2),
        (Quantity::S3, analytic.t_s3),
        (Quantity::Sigma, analytic.t_sigma),
    ] {
        let got = match threshold_crossing([c; 3], &spec, q, Direction::Decay, iv) {
            Ok(t) => t,
            Err(corrsteer::Error::NoSignChange { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        let rel = if want.is_infinite() && got.is_infinite() {
            0.0
        } else {
            ((got - want) / want).abs()
        };
        if !(rel <= DEATH_REL_LIMIT) {
            worst = f64::INFINITY;
        } else {
            worst = worst.max(rel);
        }
        fields.insert(
            format!("t_{}", q.name()),
            json!({
                "analytic": json_float(want),
                "numeric": json_float(got),
                "rel_diff": json_float(rel),
            }),
        );
    }
    let report = json!({
        "c": json_float(c_abs),
        "gamma": json_float(gamma),
        "channel": spec.kind.name(),
        "A": analytic.a.map(json_float),
        "times": fields,
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
    if worst > DEATH_REL_LIMIT {
        return Err(Failure::Violation("analytic and numeric death times disagree".into()));
    }
    Ok(())
}

fn verify(diag: &Diagnostics, samples: usize, seed: u64) -> CmdResult {
    if samples == 0 {
        return Err(Failure::Usage(anyhow!("--samples must be at least 1")));
    }
    let outcomes = corrsteer::run_suite(&VerifyConfig { samples, seed });
    let mut first_failure = None;
    let mut stdout = std::io::stdout().lock();
    for o in &outcomes {
        let tag = if o.passed { diag.pass() } else { diag.fail() };
        writeln!(stdout, "{tag} {}: {}", o.name, o.detail).map_err(anyhow::Error::from)?;
        if !o.passed && first_failure.is_none() {
            first_failure = Some(o.name);
        }
    }
    match first_failure {
        Some(name) => Err(Failure::Violation(format!("property failed: {name}"))),
        None => Ok(()),
    }
}
