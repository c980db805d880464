use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Closed integration interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::Domain {
                what: "interval",
                value: lo.as_f64(),
                domain: "finite bounds with lo < hi",
            })
        }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_estimate: T,
    pub evaluations: usize,
}

/// Globally adaptive Gauss–Kronrod (7/15) integrator.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveQuadrature<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for AdaptiveQuadrature<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::tol(1e-10),
            abs_tol: T::tol(1e-12),
            max_panels: 1 << 15,
        }
    }
}

struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

impl<T: Real> AdaptiveQuadrature<T> {
    pub fn new(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F>(&self, mut f: F, iv: Interval<T>) -> Result<QuadratureResult<T>>
    where
        F: FnMut(T) -> T,
    {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return Err(Error::Domain {
                what: "quadrature tolerance",
                value: self.rel_tol.min(self.abs_tol).as_f64(),
                domain: "(0, inf)",
            });
        }

        let first = gauss_kronrod(&mut f, iv.lo, iv.hi)?;
        let mut evaluations = 15;
        let mut value = first.value;
        let mut error = first.error;
        let mut heap = BinaryHeap::new();
        heap.push(first);

        let two = T::lit(2.0);
        let min_width = T::epsilon() * T::lit(64.0);
        loop {
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                break;
            }
            if heap.len() >= self.max_panels {
                return Err(Error::NonConvergent {
                    panels: heap.len(),
                    estimate: error.as_f64(),
                    requested: target.as_f64(),
                });
            }
            let worst = heap.pop().expect("at least one panel");
            let mid = (worst.lo + worst.hi) / two;
            let scale = worst.lo.abs().max(worst.hi.abs()).max(T::one());
            if worst.hi - worst.lo <= min_width * scale {
                // Panel cannot be split further in this precision.
                return Err(Error::NonConvergent {
                    panels: heap.len() + 1,
                    estimate: error.as_f64(),
                    requested: target.as_f64(),
                });
            }
            let left = gauss_kronrod(&mut f, worst.lo, mid)?;
            let right = gauss_kronrod(&mut f, mid, worst.hi)?;
            evaluations += 30;
            value = value - worst.value + left.value + right.value;
            error = error - worst.error + left.error + right.error;
            heap.push(left);
            heap.push(right);
        }

        // Re-sum to shed the drift of the running updates.
        let (value, error) = heap.iter().fold((T::zero(), T::zero()), |(v, e), p| {
            (v + p.value, e + p.error)
        });
        Ok(QuadratureResult {
            value,
            abs_error_estimate: error,
            evaluations,
        })
    }
}

/// Integrates `f` over `iv` to `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<T, F>(f: F, iv: Interval<T>, rel_tol: T, abs_tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    AdaptiveQuadrature::new(rel_tol, abs_tol).integrate(f, iv)
}

fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, lo: T, hi: T) -> Result<Panel<T>> {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);

    let f_center = f(center);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    let mut res_gauss = f_center * T::lit(WG[3]);
    let mut res_kronrod = f_center * T::lit(WGK[7]);
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod = res_kronrod + T::lit(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss = res_gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    if !res_kronrod.is_finite() {
        return Err(Error::Domain {
            what: "integrand",
            value: res_kronrod.as_f64(),
            domain: "finite values on the interval",
        });
    }

    let mean = res_kronrod * half;
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half_len.abs();
    let err = ((res_kronrod - res_gauss) * half_len).abs();
    let value = res_kronrod * half_len;
    Ok(Panel {
        lo,
        hi,
        value,
        error: rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    })
}

fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err;
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > scaled {
        scaled = floor;
    }
    scaled
}
