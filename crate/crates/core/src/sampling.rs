//! Reproducible random two-qubit states.
//!
//! Each state is drawn from its own ChaCha stream selected by `(seed, index)`,
//! so any subset can be regenerated in any order and on any number of threads.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::CMat4;
use crate::qstate::{BlochForm, DensityMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    /// `ρ = GG†/Tr(GG†)`, `G` a 4×k matrix of standard complex Gaussians.
    /// Rank 4 gives the Hilbert–Schmidt measure.
    GinibreMixed(usize),
    /// Projector onto a Haar-random pure state.
    HaarPure,
    /// Bell-diagonal states uniform in the physical tetrahedron.
    BellDiagonalUniform,
}

impl SamplerKind {
    pub fn name(&self) -> String {
        match self {
            SamplerKind::GinibreMixed(k) => format!("ginibre{k}"),
            SamplerKind::HaarPure => "pure".into(),
            SamplerKind::BellDiagonalUniform => "belldiag".into(),
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ginibre1" => Ok(SamplerKind::GinibreMixed(1)),
            "ginibre2" => Ok(SamplerKind::GinibreMixed(2)),
            "ginibre3" => Ok(SamplerKind::GinibreMixed(3)),
            "ginibre4" => Ok(SamplerKind::GinibreMixed(4)),
            "pure" => Ok(SamplerKind::HaarPure),
            "belldiag" => Ok(SamplerKind::BellDiagonalUniform),
            other => Err(Error::Parse(format!(
                "unknown sampler '{other}' (expected ginibre1..ginibre4, pure or belldiag)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerSpec {
    kind: SamplerKind,
    seed: u64,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, seed: u64) -> Result<Self> {
        if let SamplerKind::GinibreMixed(k) = kind {
            if !(1..=4).contains(&k) {
                return Err(Error::ParamOutOfRange {
                    name: "Ginibre rank",
                    value: k as f64,
                    range: "1..=4",
                });
            }
        }
        Ok(Self { kind, seed })
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(rng: &mut ChaCha8Rng, k: usize) -> CMat4<f64> {
    let g: Vec<[Complex<f64>; 4]> = (0..k).map(|_| std::array::from_fn(|_| gaussian(rng))).collect();
    let mut m = [[Complex::new(0.0, 0.0); 4]; 4];
    for col in &g {
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += col[i] * col[j].conj();
            }
        }
    }
    let tr: f64 = (0..4).map(|i| m[i][i].re).sum();
    m.map(|row| row.map(|z| z / tr))
}

/// Physical iff every `(1 ± c₁ ± c₂ ± c₃)/4` eigenvalue pattern is nonnegative.
fn bell_diagonal_physical(c: [f64; 3]) -> bool {
    let [a, b, d] = c;
    [1.0 - a - b - d, 1.0 - a + b + d, 1.0 + a - b + d, 1.0 + a + b - d]
        .iter()
        .all(|&x| x >= 0.0)
}

/// Draws coefficients uniformly from the cube until one lands in the
/// tetrahedron. Returns the coefficients and the number of draws used.
pub fn bell_diagonal_coefficients(spec: &SamplerSpec, index: u64) -> ([f64; 3], u64) {
    let mut rng = spec.rng(index);
    let mut attempts = 0;
    loop {
        attempts += 1;
        let c = [
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        ];
        if bell_diagonal_physical(c) {
            return (c, attempts);
        }
    }
}

/// State number `index` of the sampler. Always physical.
pub fn sample<T: Real>(spec: &SamplerSpec, index: u64) -> DensityMatrix<T> {
    let m: CMat4<f64> = match spec.kind {
        SamplerKind::GinibreMixed(k) => ginibre(&mut spec.rng(index), k),
        SamplerKind::HaarPure => ginibre(&mut spec.rng(index), 1),
        SamplerKind::BellDiagonalUniform => {
            let (c, _) = bell_diagonal_coefficients(spec, index);
            *BlochForm::bell_diagonal(c).compose().entries()
        }
    };
    let m = m.map(|row| row.map(|z| Complex::new(T::lit(z.re), T::lit(z.im))));
    DensityMatrix::from_matrix(m, true).expect("sampled states are valid density matrices")
}

/// `[sample(spec, 0), …, sample(spec, count − 1)]`, computed in parallel.
pub fn stream<T: Real>(spec: &SamplerSpec, count: usize) -> Vec<DensityMatrix<T>> {
    (0..count as u64).into_par_iter().map(|i| sample(spec, i)).collect()
}
