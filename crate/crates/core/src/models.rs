//! Closed-form approximate screening functions.
//!
//! * Müller-1: `χ = (1 + (a x/α)(1 + 4√x/(3βa))^{−β})^{−α}`
//! * Sommerfeld: `χ = (1 + (k x)^{1/β})^{−α}`
//! * Müller-2: slope as a function of χ, `ψ = a(1 − (1−χ)^{1/β})^α`, with
//!   the radius recovered from the inverse screening function
//!   `x = (β/a) B((1−χ)^{1/β}; β, 1−α)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{hyp2f1, incomplete_beta_split};

/// A screening function χ(x) with its derivative.
pub trait ScreeningModel {
    fn name(&self) -> &'static str;
    fn chi(&self, x: f64) -> Result<f64>;
    fn dchi(&self, x: f64) -> Result<f64>;
}

fn check_radius(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return domain(format!("radius must be non-negative, got {x}"));
    }
    Ok(())
}

// ---------------------------------------------------------------- Müller-1

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mueller1Params {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Exponents that reproduce the Baker series through `x^{3/2}`, kill the `x²`
/// coefficient and force an `x^{−3}` tail.
pub fn mueller1_exponents(a: f64) -> Result<(f64, f64)> {
    let a3 = a * a * a;
    let den = 3.0 * a3 - 8.0;
    let num = 12.0 * a3 - 8.0;
    if !(den > 0.0) || !(num / den > 0.0) {
        return domain(format!("Müller-1 exponents need 3a³ > 8, got a = {a}"));
    }
    let alpha = 1.0 + (num / den).sqrt();
    let beta = 2.0 * (1.0 - 3.0 / alpha);
    Ok((alpha, beta))
}

impl Mueller1Params {
    pub fn new(a: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { a, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    /// Parameter set determined by the slope alone.
    pub fn from_slope(a: f64) -> Result<Self> {
        let (alpha, beta) = mueller1_exponents(a)?;
        Self::new(a, alpha, beta)
    }

    /// The canonical set, fixed by unit normalization of `(χ/x)^{3/2}`.
    pub fn normalized() -> Self {
        Self {
            a: 1.58968,
            alpha: 4.1501,
            beta: 0.55426,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, alpha, beta } = *self;
        if !(a.is_finite() && 3.0 * a * a * a > 8.0) {
            return domain(format!("Müller-1 needs 3a³ > 8, got a = {a}"));
        }
        if !(alpha > 3.0 && alpha.is_finite()) {
            return domain(format!("Müller-1 needs α > 3, got {alpha}"));
        }
        if !(beta > 0.0 && beta < 2.0) {
            return domain(format!("Müller-1 needs 0 < β < 2, got {beta}"));
        }
        Ok(())
    }

    /// Coefficient `C` of the large-x limit `χ → C/x³`.
    pub fn tail_prefactor(&self) -> f64 {
        let Self { a, alpha, beta } = *self;
        (alpha / a).powf(alpha) * (4.0 / (3.0 * beta * a)).powf(alpha * beta)
    }

    /// Taylor coefficients of χ in powers of `√x`: entry `k` multiplies `x^{k/2}`.
    pub fn taylor_coefficients(&self) -> [f64; 7] {
        const N: usize = 7;
        let Self { a, alpha, beta } = *self;
        let c = 4.0 / (3.0 * beta * a);
        // g^{−β} = (1 + c s)^{−β}
        let mut g = [0.0; N];
        let mut binom = 1.0;
        for (k, gk) in g.iter_mut().enumerate() {
            *gk = binom * c.powi(k as i32);
            binom *= (-beta - k as f64) / (k as f64 + 1.0);
        }
        // w = (a/α) s² g^{−β}
        let mut w = [0.0; N];
        for k in 2..N {
            w[k] = a / alpha * g[k - 2];
        }
        // χ = Σ_j C(−α, j) w^j
        let mut chi = [0.0; N];
        let mut wj = [0.0; N];
        wj[0] = 1.0;
        let mut binom = 1.0;
        for j in 0..N {
            for k in 0..N {
                chi[k] += binom * wj[k];
            }
            binom *= (-alpha - j as f64) / (j as f64 + 1.0);
            let mut next = [0.0; N];
            for (p, &lhs) in wj.iter().enumerate() {
                for (q, &rhs) in w.iter().enumerate() {
                    if p + q < N {
                        next[p + q] += lhs * rhs;
                    }
                }
            }
            wj = next;
        }
        chi
    }
}

/// Müller-1 screening function.
pub fn mueller1_chi(x: f64, p: &Mueller1Params) -> Result<f64> {
    check_radius(x)?;
    let g = 1.0 + 4.0 * x.sqrt() / (3.0 * p.beta * p.a);
    let w = p.a * x / p.alpha * g.powf(-p.beta);
    Ok((1.0 + w).powf(-p.alpha))
}

fn mueller1_dchi(x: f64, p: &Mueller1Params) -> Result<f64> {
    check_radius(x)?;
    let s = x.sqrt();
    let g = 1.0 + 4.0 * s / (3.0 * p.beta * p.a);
    let gb = g.powf(-p.beta);
    let w = p.a * x / p.alpha * gb;
    let dw = p.a / p.alpha * gb - 2.0 * s / (3.0 * p.alpha) * gb / g;
    Ok(-p.alpha * (1.0 + w).powf(-p.alpha - 1.0) * dw)
}

/// Coefficient of `x²` in the small-x expansion of the Müller-1 function;
/// zero when the exponents come from [`mueller1_exponents`].
pub fn mueller1_baker_defect(p: &Mueller1Params) -> f64 {
    p.taylor_coefficients()[4]
}

impl ScreeningModel for Mueller1Params {
    fn name(&self) -> &'static str {
        "mueller1"
    }
    fn chi(&self, x: f64) -> Result<f64> {
        mueller1_chi(x, self)
    }
    fn dchi(&self, x: f64) -> Result<f64> {
        mueller1_dchi(x, self)
    }
}

// -------------------------------------------------------------- Sommerfeld

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SommerfeldParams {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SommerfeldParams {
    pub fn new(k: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { k, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    /// Values chosen by Sommerfeld: `k = 12^{−2/3}`, `α = 3.886`, `β = α/3`.
    pub fn historical() -> Self {
        Self {
            k: 0.1908,
            alpha: 3.886,
            beta: 1.295,
        }
    }

    /// Minimizer of the action as published (three significant figures).
    pub fn variational() -> Self {
        Self {
            k: 0.482,
            alpha: 2.10,
            beta: 1.083,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { k, alpha, beta } = *self;
        if !(k > 0.0 && k.is_finite()) {
            return domain(format!("Sommerfeld needs k > 0, got {k}"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("Sommerfeld needs α > 0, got {alpha}"));
        }
        if !(beta > 0.0 && beta < 2.0) {
            return domain(format!("Sommerfeld needs 0 < β < 2, got {beta}"));
        }
        Ok(())
    }
}

pub fn sommerfeld_chi(x: f64, p: &SommerfeldParams) -> Result<f64> {
    check_radius(x)?;
    Ok((1.0 + (p.k * x).powf(1.0 / p.beta)).powf(-p.alpha))
}

fn sommerfeld_dchi(x: f64, p: &SommerfeldParams) -> Result<f64> {
    check_radius(x)?;
    let e = 1.0 / p.beta;
    let y = (p.k * x).powf(e);
    // dy/dx = e k^e x^{e−1}
    let dy = e * p.k.powf(e) * x.powf(e - 1.0);
    Ok(-p.alpha * (1.0 + y).powf(-p.alpha - 1.0) * dy)
}

impl ScreeningModel for SommerfeldParams {
    fn name(&self) -> &'static str {
        "sommerfeld"
    }
    fn chi(&self, x: f64) -> Result<f64> {
        sommerfeld_chi(x, self)
    }
    fn dchi(&self, x: f64) -> Result<f64> {
        sommerfeld_dchi(x, self)
    }
}

// ---------------------------------------------------------------- Müller-2

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mueller2Params {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Below this `1 − χ` the inverse function is replaced by its leading term.
const CHIBAR_LINEAR: f64 = 1e-15;
/// Default relative tolerance on x for [`mueller2_chi_of_x`].
pub const MUELLER2_INVERSION_TOL: f64 = 1e-14;

impl Mueller2Params {
    pub fn new(a: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { a, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    /// Minimizer of the χ-space action as published.
    pub fn variational() -> Self {
        Self {
            a: 1.550,
            alpha: 1.382,
            beta: 1.644,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, alpha, beta } = *self;
        if !(a > 0.0 && a.is_finite()) {
            return domain(format!("Müller-2 needs a > 0, got {a}"));
        }
        if !(alpha > 1.0 && alpha.is_finite()) {
            return domain(format!("Müller-2 needs α > 1, got {alpha}"));
        }
        if !(beta > 1.0 && beta.is_finite()) {
            return domain(format!("Müller-2 needs β > 1, got {beta}"));
        }
        Ok(())
    }
}

fn check_chi(chi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&chi) {
        return domain(format!("χ must lie in [0, 1], got {chi}"));
    }
    Ok(())
}

/// `ψ(χ) = a (1 − (1−χ)^{1/β})^α`.
pub fn mueller2_psi(chi: f64, p: &Mueller2Params) -> Result<f64> {
    check_chi(chi)?;
    let chibar = 1.0 - chi;
    Ok(p.a * (1.0 - chibar.powf(1.0 / p.beta)).powf(p.alpha))
}

/// `1 − (1−χ)^{1/β}` evaluated without cancellation for small χ.
fn one_minus_root(chi: f64, beta: f64) -> f64 {
    -((-chi).ln_1p() / beta).exp_m1()
}

/// Inverse screening function `x(χ)` via the incomplete Beta function.
pub fn mueller2_x_of_chi(chi: f64, p: &Mueller2Params) -> Result<f64> {
    check_chi(chi)?;
    if chi == 0.0 {
        return Err(Error::Divergence("Müller-2 radius is infinite at χ = 0".into()));
    }
    let chibar = 1.0 - chi;
    if chibar < CHIBAR_LINEAR {
        return Ok(chibar / p.a);
    }
    let z = chibar.powf(1.0 / p.beta);
    let w = one_minus_root(chi, p.beta);
    Ok(p.beta / p.a * incomplete_beta_split(z, w, p.beta, 1.0 - p.alpha)?)
}

/// Same quantity as [`mueller2_x_of_chi`] written as
/// `(χ̄/a) ₂F₁(β, α; β+1; χ̄^{1/β})`.
pub fn mueller2_x_of_chi_hypergeometric(chi: f64, p: &Mueller2Params) -> Result<f64> {
    check_chi(chi)?;
    if chi == 0.0 {
        return Err(Error::Divergence("Müller-2 radius is infinite at χ = 0".into()));
    }
    let chibar = 1.0 - chi;
    let z = chibar.powf(1.0 / p.beta);
    Ok(chibar / p.a * hyp2f1(p.beta, p.alpha, p.beta + 1.0, z)?)
}

/// χ(x) for the Müller-2 model by bisection on the monotone map `x(χ)`.
///
/// Terminates once `|x(χ) − x| < tol·max(1, x)` or the bracket has shrunk
/// to rounding level.
pub fn mueller2_chi_of_x(x: f64, p: &Mueller2Params, tol: f64) -> Result<f64> {
    check_radius(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let target = tol * x.max(1.0);
    // seed: χ ≈ 1 − a x near the origin, then walk down geometrically
    let mut hi = 1.0;
    let mut lo = (1.0 - 2.0 * p.a * x).clamp(0.25, 1.0 - f64::EPSILON);
    loop {
        let xl = mueller2_x_of_chi(lo, p)?;
        if xl >= x {
            break;
        }
        hi = lo;
        lo *= if xl < 0.5 * x { 0.25 } else { 0.5 };
        if lo < 1e-300 {
            return Err(Error::Divergence(format!("no Müller-2 χ found for x = {x}")));
        }
    }
    for _ in 0..400 {
        let mid = if hi > 2.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let xm = mueller2_x_of_chi(mid, p)?;
        if (xm - x).abs() < target {
            return Ok(mid);
        }
        if xm > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl ScreeningModel for Mueller2Params {
    fn name(&self) -> &'static str {
        "mueller2"
    }
    fn chi(&self, x: f64) -> Result<f64> {
        mueller2_chi_of_x(x, self, MUELLER2_INVERSION_TOL)
    }
    fn dchi(&self, x: f64) -> Result<f64> {
        let chi = self.chi(x)?;
        Ok(-mueller2_psi(chi, self)?)
    }
}

// ------------------------------------------------------------- JSON record

/// Tagged parameter record, e.g. `{"model": "sommerfeld", "k": 0.482, ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Mueller1(Mueller1Params),
    Sommerfeld(SommerfeldParams),
    Mueller2(Mueller2Params),
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Mueller1(p) => p.validate(),
            Self::Sommerfeld(p) => p.validate(),
            Self::Mueller2(p) => p.validate(),
        }
    }

    /// Parses and validates a JSON parameter record.
    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid parameter JSON: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameter records serialize")
    }

    pub fn name(&self) -> &'static str {
        self.as_model().name()
    }

    pub fn as_model(&self) -> &dyn ScreeningModel {
        match self {
            Self::Mueller1(p) => p,
            Self::Sommerfeld(p) => p,
            Self::Mueller2(p) => p,
        }
    }
}
