use super::gamma::{gamma, rgamma};
use crate::error::{domain, Error, Result};

/// Above this z the series is replaced by the z → 1−z connection formula.
const SWITCH_Z: f64 = 0.5;
/// Connection formula is singular when c−a−b is an integer; closer than this
/// the direct series is summed instead.
const NEAR_INTEGER: f64 = 1e-4;
const MAX_TERMS: usize = 2_000_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Direct Gauss series, `Σ (a)_n (b)_n / (c)_n zⁿ/n!`.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // once the ratio has settled below one the tail is bounded by a
        // geometric series
        if ratio.abs() < 1.0 && nf > (a.abs() + b.abs() + c.abs()) {
            let tail = term.abs() * ratio.abs() / (1.0 - ratio.abs());
            if tail <= f64::EPSILON * 0.5 * sum.abs() {
                return Ok(sum);
            }
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::Divergence(format!(
        "2F1({a}, {b}; {c}; {z}) series did not converge"
    )))
}

/// `₂F₁(a, b; c; z)` for `0 ≤ z < 1`.
///
/// Uses the power series for `z ≤ 0.5` and the linear transformation to
/// `1 − z` above that. Symmetric in `(a, b)` bit-for-bit: the pair is
/// sorted before evaluation.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return domain(format!("hyp2f1 requires 0 <= z < 1, got {z}"));
    }
    hyp2f1_split(a, b, c, z, 1.0 - z)
}

/// As [`hyp2f1`] but with `w = 1 − z` supplied by the caller, which keeps
/// full relative precision in `1 − z` when z is within rounding of 1.
pub(crate) fn hyp2f1_split(a: f64, b: f64, c: f64, z: f64, w: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return domain("hyp2f1 parameters must be finite");
    }
    if is_nonpositive_integer(c) {
        return domain(format!("hyp2f1 undefined for c = {c}"));
    }
    if !(w > 0.0) {
        return Err(Error::Divergence(format!("hyp2f1 at z = 1 (c−a−b = {})", c - a - b)));
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) || z <= SWITCH_Z {
        return series(a, b, c, z);
    }
    let s = c - a - b;
    if (s - s.round()).abs() < NEAR_INTEGER {
        return series(a, b, c, z);
    }

    // F(a,b;c;z) = A·F(a,b;1−s;w) + w^s·B·F(c−a,c−b;1+s;w)
    let gc = gamma(c)?;
    let first = if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        0.0
    } else {
        gc * gamma(s)? * rgamma(c - a) * rgamma(c - b) * series(a, b, 1.0 - s, w)?
    };
    let second = if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        0.0
    } else {
        let (ca, cb) = {
            let (x, y) = (c - a, c - b);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        };
        w.powf(s) * gc * gamma(-s)? * rgamma(a) * rgamma(b) * series(ca, cb, 1.0 + s, w)?
    };
    let value = first + second;
    if !value.is_finite() {
        return Err(Error::Divergence(format!("2F1({a}, {b}; {c}; {z}) overflowed")));
    }
    Ok(value)
}

/// Unnormalized incomplete Beta function `B(z; p, q)`, `0 ≤ z < 1`, `p > 0`.
///
/// Evaluated as `(z^p / p) · ₂F₁(p, 1−q; p+1; z)`, which stays valid for
/// `q ≤ 0` where the complete integral diverges.
pub fn incomplete_beta(z: f64, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("incomplete_beta requires 0 <= z < 1, got {z}"));
    }
    if z == 1.0 {
        if q <= 0.0 {
            return Err(Error::Divergence(format!("B(1; {p}, {q}) is infinite for q <= 0")));
        }
        return domain("incomplete_beta requires z < 1; use beta() for the complete integral");
    }
    incomplete_beta_split(z, 1.0 - z, p, q)
}

pub(crate) fn incomplete_beta_split(z: f64, w: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() || !q.is_finite() {
        return domain(format!("incomplete_beta requires p > 0 and finite q, got ({p}, {q})"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(z.powf(p) / p * hyp2f1_split(p, 1.0 - q, p + 1.0, z, w)?)
}
