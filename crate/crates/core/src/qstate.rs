//! Two-qubit states: validated density matrices, the Pauli (Bloch)
//! decomposition `ρ = ¼(𝟙⊗𝟙 + r·σ⊗𝟙 + 𝟙⊗s·σ + Σ T_ij σ_i⊗σ_j)`, and the
//! canonical singular values of the correlation matrix.
//!
//! Basis ordering is |00⟩, |01⟩, |10⟩, |11⟩ with qubit A the most significant
//! bit; σ₁, σ₂, σ₃ are X, Y, Z.

use num_complex::Complex;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen4, svd3, CMat4, Mat3, Vec3};
use crate::scalar::Real;

pub type CMat2<T> = [[Complex<T>; 2]; 2];

/// Pauli matrix σ_k for k = 0 (identity), 1 (X), 2 (Y), 3 (Z).
pub fn pauli<T: Real>(k: usize) -> CMat2<T> {
    let o = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    match k {
        0 => [[one, o], [o, one]],
        1 => [[o, one], [one, o]],
        2 => [[o, -i], [i, o]],
        3 => [[one, o], [o, -one]],
        _ => panic!("Pauli index {k} out of range"),
    }
}

pub fn kron<T: Real>(a: &CMat2<T>, b: &CMat2<T>) -> CMat4<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub(crate) fn matmul4<T: Real>(a: &CMat4<T>, b: &CMat4<T>) -> CMat4<T> {
    let mut c = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..4 {
                acc = acc + a[i][k] * b[k][j];
            }
            c[i][j] = acc;
        }
    }
    c
}

pub(crate) fn dagger4<T: Real>(a: &CMat4<T>) -> CMat4<T> {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

/// `Tr[ρ O]`.
fn expectation<T: Real>(rho: &CMat4<T>, op: &CMat4<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for a in 0..4 {
        for b in 0..4 {
            acc = acc + rho[a][b] * op[b][a];
        }
    }
    acc
}

/// A 4×4 unit-trace Hermitian matrix, flagged physical when positive
/// semidefinite (smallest eigenvalue at least −1e−9).
///
/// Non-physical matrices are representable on purpose: some formal
/// coefficient vectors of interest fail positivity but are still analysed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T> {
    entries: CMat4<T>,
    eigenvalues: [T; 4],
    physical: bool,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates trace and Hermiticity; positivity is enforced only when
    /// `require_physical` is set, but always recorded in the flag.
    pub fn from_matrix(raw: CMat4<T>, require_physical: bool) -> Result<Self> {
        if raw.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NotDensityMatrix {
                check: "finite entries",
                deviation: f64::INFINITY,
            });
        }
        let trace = (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + raw[i][i]);
        let trace_dev = (trace - Complex::new(T::one(), T::zero())).norm();
        if trace_dev > T::tol(1e-10) {
            return Err(Error::NotDensityMatrix {
                check: "unit trace",
                deviation: trace_dev.as_f64(),
            });
        }
        let eigenvalues = hermitian_eigen4(&raw).map_err(|e| match e {
            Error::NotHermitian { deviation } => Error::NotDensityMatrix {
                check: "Hermiticity",
                deviation,
            },
            other => other,
        })?;
        let physical = eigenvalues[0] >= -T::tol(1e-9);
        if require_physical && !physical {
            return Err(Error::NotDensityMatrix {
                check: "positive semidefinite",
                deviation: -eigenvalues[0].as_f64(),
            });
        }
        Ok(Self {
            entries: raw,
            eigenvalues,
            physical,
        })
    }

    pub fn entries(&self) -> &CMat4<T> {
        &self.entries
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 4] {
        self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn bloch(&self) -> BlochForm<T> {
        bloch_decompose(self)
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†` for single-qubit unitaries `U`, `V`.
    pub fn local_unitary(&self, u: &CMat2<T>, v: &CMat2<T>) -> Result<Self> {
        let w = kron(u, v);
        let out = matmul4(&matmul4(&w, &self.entries), &dagger4(&w));
        Self::from_matrix(out, false)
    }
}

/// Local Bloch vectors and correlation matrix of a two-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm<T> {
    pub r: Vec3<T>,
    pub s: Vec3<T>,
    pub t: Mat3<T>,
}

impl<T: Real> BlochForm<T> {
    pub fn bell_diagonal(c: Vec3<T>) -> Self {
        let z = T::zero();
        Self {
            r: [z; 3],
            s: [z; 3],
            t: [[c[0], z, z], [z, c[1], z], [z, z, c[2]]],
        }
    }

    pub fn compose(&self) -> DensityMatrix<T> {
        bloch_compose(self)
    }

    pub fn canonical(&self) -> CanonicalCorrelation<T> {
        canonical_correlation(self)
    }
}

/// `r_i = Tr[ρ σ_i⊗𝟙]`, `s_j = Tr[ρ 𝟙⊗σ_j]`, `T_ij = Tr[ρ σ_i⊗σ_j]`.
pub fn bloch_decompose<T: Real>(rho: &DensityMatrix<T>) -> BlochForm<T> {
    let m = rho.entries();
    let id = pauli::<T>(0);
    let mut out = BlochForm {
        r: [T::zero(); 3],
        s: [T::zero(); 3],
        t: [[T::zero(); 3]; 3],
    };
    for i in 0..3 {
        let si = pauli::<T>(i + 1);
        out.r[i] = expectation(m, &kron(&si, &id)).re;
        out.s[i] = expectation(m, &kron(&id, &si)).re;
        for j in 0..3 {
            out.t[i][j] = expectation(m, &kron(&si, &pauli(j + 1))).re;
        }
    }
    out
}

/// Inverse of [`bloch_decompose`]. Never fails; positivity lands in the
/// physical flag.
pub fn bloch_compose<T: Real>(b: &BlochForm<T>) -> DensityMatrix<T> {
    let id = pauli::<T>(0);
    let mut acc = kron(&id, &id);
    let mut add = |coef: T, op: CMat4<T>| {
        for i in 0..4 {
            for j in 0..4 {
                acc[i][j] = acc[i][j] + op[i][j] * coef;
            }
        }
    };
    for i in 0..3 {
        add(b.r[i], kron(&pauli(i + 1), &id));
        add(b.s[i], kron(&id, &pauli(i + 1)));
        for j in 0..3 {
            add(b.t[i][j], kron(&pauli(i + 1), &pauli(j + 1)));
        }
    }
    let quarter = T::lit(0.25);
    for row in acc.iter_mut() {
        for z in row.iter_mut() {
            *z = *z * quarter;
        }
    }
    DensityMatrix::from_matrix(acc, false)
        .expect("composed Pauli expansion is Hermitian with unit trace")
}

/// Singular values `α ≥ β ≥ γ ≥ 0` of the correlation matrix.
///
/// They equal the absolute diagonal coefficients `|c_i|` reached by a local
/// unitary change of frame, so they are local-unitary invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalCorrelation<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> CanonicalCorrelation<T> {
    /// Checked constructor: requires `0 <= gamma <= beta <= alpha`.
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && beta >= gamma && alpha >= beta && alpha.is_finite()) {
            return Err(Error::ParamOutOfRange {
                name: "canonical correlation",
                value: alpha.as_f64(),
                range: "0 <= gamma <= beta <= alpha",
            });
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Sorts the absolute values of arbitrary diagonal coefficients.
    pub fn from_coefficients(c: Vec3<T>) -> Self {
        let mut v = [c[0].abs(), c[1].abs(), c[2].abs()];
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self {
            alpha: v[0],
            beta: v[1],
            gamma: v[2],
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

pub fn canonical_correlation<T: Real>(b: &BlochForm<T>) -> CanonicalCorrelation<T> {
    let [alpha, beta, gamma] = svd3(&b.t);
    CanonicalCorrelation { alpha, beta, gamma }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    matrix: Option<Vec<Vec<[f64; 2]>>>,
    bloch: Option<BlochFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlochFile {
    r: [f64; 3],
    s: [f64; 3],
    #[serde(rename = "T")]
    t: [[f64; 3]; 3],
}

/// Parses a state file: either `{"matrix": [[[re, im] ×4] ×4]}` or
/// `{"bloch": {"r": [..], "s": [..], "T": [[..] ×3]}}`, exactly one key.
///
/// Matrix input is validated for trace and Hermiticity (and positivity when
/// `require_physical`); Bloch input is composed and flagged.
pub fn parse_state_json<T: Real>(text: &str, require_physical: bool) -> Result<DensityMatrix<T>> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match (file.matrix, file.bloch) {
        (Some(rows), None) => {
            if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                return Err(Error::Parse("\"matrix\" must be 4×4 of [re, im] pairs".into()));
            }
            let mut m = [[Complex::new(T::zero(), T::zero()); 4]; 4];
            for (i, row) in rows.iter().enumerate() {
                for (j, [re, im]) in row.iter().enumerate() {
                    m[i][j] = Complex::new(T::lit(*re), T::lit(*im));
                }
            }
            DensityMatrix::from_matrix(m, require_physical)
        }
        (None, Some(b)) => {
            let conv3 = |v: [f64; 3]| v.map(T::lit);
            let form = BlochForm {
                r: conv3(b.r),
                s: conv3(b.s),
                t: b.t.map(conv3),
            };
            let rho = bloch_compose(&form);
            if require_physical && !rho.is_physical() {
                return Err(Error::NotDensityMatrix {
                    check: "positive semidefinite",
                    deviation: -rho.min_eigenvalue().as_f64(),
                });
            }
            Ok(rho)
        }
        _ => Err(Error::Parse(
            "state file needs exactly one of \"matrix\" or \"bloch\"".into(),
        )),
    }
}
