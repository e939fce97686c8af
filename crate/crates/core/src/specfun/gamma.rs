use std::f64::consts::PI;

use crate::error::{domain, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `sin(πx)` with argument reduction so that integers give exact zeros.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn ln_gamma_lanczos(z: f64) -> f64 {
    // valid for z >= 0.5
    let zm = z - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    HALF_LN_2PI + (zm + 0.5) * t.ln() - t + acc.ln()
}

fn ln_gamma_pos(z: f64) -> f64 {
    if z < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz), both factors positive for 0 < z < 1
        (PI / sin_pi(z)).ln() - ln_gamma_lanczos(1.0 - z)
    } else {
        ln_gamma_lanczos(z)
    }
}

/// Natural logarithm of Γ(z) for z > 0.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("ln_gamma requires a finite z > 0, got {z}"));
    }
    Ok(ln_gamma_pos(z))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x) for real x that is not a pole. Negative non-integers use the
/// reflection formula.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("gamma requires a finite argument, got {x}"));
    }
    if is_nonpositive_integer(x) {
        return domain(format!("gamma has a pole at {x}"));
    }
    if x >= 0.5 {
        Ok(ln_gamma_lanczos(x).exp())
    } else {
        Ok(PI / (sin_pi(x) * ln_gamma_lanczos(1.0 - x).exp()))
    }
}

/// 1/Γ(x), which is entire: poles of Γ map to exact zeros.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        (-ln_gamma_lanczos(x)).exp()
    } else {
        sin_pi(x) * ln_gamma_lanczos(1.0 - x).exp() / PI
    }
}

/// Complete Beta function `Γ(p)Γ(q)/Γ(p+q)` for p, q > 0.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
        return domain(format!("beta requires p, q > 0, got ({p}, {q})"));
    }
    Ok((ln_gamma_pos(p) + ln_gamma_pos(q) - ln_gamma_pos(p + q)).exp())
}
