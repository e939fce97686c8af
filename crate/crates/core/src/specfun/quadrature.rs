#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Tolerances for [`adaptive_quad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return domain("quadrature tolerances must be strictly positive");
        }
        if self.max_subdivisions < 1 {
            return domain("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15), kept at full
// published precision.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
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

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = abs_sum * half.abs();
    let resasc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { lo, hi, value, error }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[lo, hi]`.
///
/// `hi = +∞` is accepted; the range is mapped onto `[0, 1)` with
/// `x = lo + t/(1−t)`. Nodes never touch the endpoints, so integrable
/// endpoint singularities such as `(x−lo)^{-1/2}` are handled by repeated
/// bisection.
///
/// On failure to meet `max(abs_tol, rel_tol·|I|)` within
/// `max_subdivisions` panels an [`Error::Accuracy`] carrying the best
/// estimate is returned.
pub fn adaptive_quad<F>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if lo.is_nan() || hi.is_nan() || !lo.is_finite() {
        return domain(format!("adaptive_quad: invalid range [{lo}, {hi}]"));
    }
    if hi == f64::INFINITY {
        let mapped = |t: f64| {
            let s = 1.0 - t;
            let x = lo + t / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else if x.is_infinite() {
                0.0
            } else {
                v
            }
        };
        return integrate_finite(&mapped, 0.0, 1.0, cfg);
    }
    if !hi.is_finite() {
        return domain(format!("adaptive_quad: invalid upper limit {hi}"));
    }
    if hi < lo {
        return integrate_finite(&f, hi, lo, cfg).map(|v| -v);
    }
    if hi == lo {
        return Ok(0.0);
    }
    integrate_finite(&f, lo, hi, cfg)
}

fn integrate_finite<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let first = gk15(f, lo, hi);
    let mut total_value = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut finished: Vec<Panel> = Vec::new();

    loop {
        if !total_value.is_finite() {
            return Err(Error::Accuracy {
                estimate: total_value,
                error: f64::INFINITY,
                context: "non-finite integrand".into(),
            });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= target {
            break;
        }
        if heap.len() + finished.len() >= cfg.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total_value,
                error: total_error,
                context: format!("{} subdivisions exhausted", cfg.max_subdivisions),
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Accuracy {
                estimate: total_value,
                error: total_error,
                context: "roundoff limit reached".into(),
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // cannot split further; keep its contribution as is
            finished.push(worst);
            continue;
        }
        let left = gk15(f, worst.lo, mid);
        let right = gk15(f, mid, worst.hi);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to avoid drift from the incremental updates
    let value: f64 = heap.iter().chain(finished.iter()).map(|p| p.value).sum();
    Ok(value)
}
