use crate::error::{Error, Result};
use crate::scalar::Real;

use super::quadrature::Interval;

/// Bisection on a sign-changing bracket; stops once the bracket is no wider than `tol`.
pub fn bisect<T, F>(mut f: F, iv: Interval<T>, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut lo, mut hi) = (iv.lo, iv.hi);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if !(f_lo.signum() * f_hi.signum() < T::zero()) {
        return Err(Error::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }

    let two = T::lit(2.0);
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}
