use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];
pub type CMat4<T> = [[Complex<T>; 4]; 4];

const MAX_SWEEPS: usize = 64;

/// Singular values of a 3×3 real matrix, sorted descending.
///
/// One-sided (Hestenes) Jacobi: plane rotations orthogonalise the columns,
/// whose norms are then the singular values. Small singular values come
/// out to full relative accuracy, unlike a square root of the eigenvalues
/// of `MᵀM`.
pub fn svd3<T: Real>(m: &Mat3<T>) -> [T; 3] {
    let mut a = *m;
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..2 {
            for q in (p + 1)..3 {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for row in &a {
                    alpha = alpha + row[p] * row[p];
                    beta = beta + row[q] * row[q];
                    gamma = gamma + row[p] * row[q];
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = [T::zero(); 3];
    for (j, out) in sv.iter_mut().enumerate() {
        *out = a.iter().map(|row| row[j] * row[j]).sum::<T>().sqrt();
    }
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Eigenvalues of a 4×4 complex Hermitian matrix, ascending.
///
/// `H = A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`, whose
/// spectrum is that of `H` with every eigenvalue doubled.
pub fn hermitian_eigen4<T: Real>(h: &CMat4<T>) -> Result<[T; 4]> {
    let mut deviation = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            let d = (h[i][j] - h[j][i].conj()).norm();
            if !d.is_finite() {
                return Err(Error::NotHermitian {
                    deviation: f64::INFINITY,
                });
            }
            deviation = deviation.max(d);
        }
    }
    if deviation > T::tol(1e-10) {
        return Err(Error::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }

    let half = T::lit(0.5);
    let mut s = [[T::zero(); 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            // Symmetrise to absorb the tolerated deviation.
            let z = (h[i][j] + h[j][i].conj()) * half;
            s[i][j] = z.re;
            s[i + 4][j + 4] = z.re;
            s[i][j + 4] = -z.im;
            s[i + 4][j] = z.im;
        }
    }
    let mut ev = symmetric_eigenvalues(s);
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok([
        (ev[0] + ev[1]) * half,
        (ev[2] + ev[3]) * half,
        (ev[4] + ev[5]) * half,
        (ev[6] + ev[7]) * half,
    ])
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
fn symmetric_eigenvalues<T: Real, const N: usize>(mut a: [[T; N]; N]) -> [T; N] {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, x| m.max(x.abs()));
    if scale == T::zero() {
        return [T::zero(); N];
    }
    let threshold = T::epsilon() * T::epsilon() * scale * scale;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..N {
            for q in (p + 1)..N {
                off = off + a[p][q] * a[p][q];
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut out = [T::zero(); N];
    for (i, o) in out.iter_mut().enumerate() {
        *o = a[i][i];
    }
    out
}
