//! Action functionals, their closed forms, and the simplex fits.
//!
//! Two Lagrangians are used. In x-space `L = χ'²/2 + (2/5)χ^{5/2}/√x`,
//! whose Euler-Lagrange equation is the Thomas-Fermi equation. In χ-space,
//! with `η = ψ²`, `L = √η + 2χ³/η'`. Both actions are stationary at the
//! exact solution with value `3a/7`.

mod simplex;

use serde::{Deserialize, Serialize};

pub use simplex::{minimize, Minimum, SimplexOptions};

use crate::error::{domain, Error, Result};
use crate::models::{ModelParams, Mueller2Params, SommerfeldParams};
use crate::specfun::{adaptive_quad, beta, gamma, QuadratureConfig};

/// Two-term split of an action value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionBreakdown {
    pub s1: f64,
    pub s2: f64,
    pub total: f64,
}

impl ActionBreakdown {
    pub fn new(s1: f64, s2: f64) -> Self {
        Self { s1, s2, total: s1 + s2 }
    }
}

/// Final state of the simplex for a converged or abandoned fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexDiagnostics {
    pub iterations: usize,
    pub diameter: f64,
    pub value_spread: f64,
    pub vertices: Vec<Vec<f64>>,
}

/// Outcome of fitting one approximant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub s_min: f64,
    pub evaluations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub simplex: Option<SimplexDiagnostics>,
}

impl FitResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("fit results serialize")
    }
}

/// Quadrature of the x-space Lagrangian over `(0, ∞)`.
///
/// `chi_fn` returns `(χ, dχ/dx)`. The result splits into the kinetic part
/// `∫χ'²/2` (`s1`) and the potential part `(2/5)∫χ^{5/2}/√x` (`s2`).
pub fn lagrangian_action_numeric<F>(chi_fn: F, cfg: &QuadratureConfig) -> Result<ActionBreakdown>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let kinetic = |x: f64| match chi_fn(x) {
        Ok((_, d)) => 0.5 * d * d,
        Err(_) => f64::NAN,
    };
    let potential = |x: f64| match chi_fn(x) {
        Ok((c, _)) => {
            let c = c.max(0.0);
            0.4 * c * c * c.sqrt() / x.sqrt()
        }
        Err(_) => f64::NAN,
    };
    let s1 = adaptive_quad(kinetic, 0.0, 1.0, cfg)? + adaptive_quad(kinetic, 1.0, f64::INFINITY, cfg)?;
    let s2 = adaptive_quad(potential, 0.0, 1.0, cfg)? + adaptive_quad(potential, 1.0, f64::INFINITY, cfg)?;
    Ok(ActionBreakdown::new(s1, s2))
}

fn check_sommerfeld_action_domain(alpha: f64, beta_: f64) -> Result<()> {
    if !(beta_ > 0.0 && beta_ < 2.0) {
        return domain(format!("Sommerfeld action needs 0 < β < 2, got {beta_}"));
    }
    if !(2.0 * alpha + beta_ > 0.0 && 5.0 * alpha > beta_) {
        return domain(format!(
            "Sommerfeld action needs 2α+β > 0 and 5α > β, got α = {alpha}, β = {beta_}"
        ));
    }
    Ok(())
}

/// Coefficients `(A, C)` with `S = A k + C k^{−1/2}`.
fn sommerfeld_coefficients(alpha: f64, beta_: f64) -> Result<(f64, f64)> {
    check_sommerfeld_action_domain(alpha, beta_)?;
    let kin = alpha * alpha / (2.0 * beta_) * beta(2.0 - beta_, 2.0 * alpha + beta_)?;
    let pot = 0.4 * beta_ * beta(0.5 * beta_, 0.5 * (5.0 * alpha - beta_))?;
    Ok((kin, pot))
}

/// Closed-form action of the Sommerfeld trial function, split into
/// kinetic and potential parts.
pub fn sommerfeld_action_parts(p: &SommerfeldParams) -> Result<ActionBreakdown> {
    if !(p.k > 0.0) {
        return domain(format!("Sommerfeld action needs k > 0, got {}", p.k));
    }
    let (kin, pot) = sommerfeld_coefficients(p.alpha, p.beta)?;
    Ok(ActionBreakdown::new(p.k * kin, pot / p.k.sqrt()))
}

/// `S(k, α, β) = k α²/(2β) B(2−β, 2α+β) + k^{−1/2} (2β/5) B(β/2, (5α−β)/2)`.
pub fn sommerfeld_action(p: &SommerfeldParams) -> Result<f64> {
    Ok(sommerfeld_action_parts(p)?.total)
}

/// Minimum of the Sommerfeld action over k at fixed exponents:
/// `k* = (C/2A)^{2/3}`. Returns `(k*, S(k*))`.
pub fn sommerfeld_optimal_k(alpha: f64, beta_: f64) -> Result<(f64, f64)> {
    let (kin, pot) = sommerfeld_coefficients(alpha, beta_)?;
    let k = (pot / (2.0 * kin)).powf(2.0 / 3.0);
    Ok((k, kin * k + pot / k.sqrt()))
}

/// `I1(α, β) = β B(β, α+1) = ∫₀¹ ψ/a dχ`.
pub fn i1(alpha: f64, beta_: f64) -> Result<f64> {
    if !(beta_ > 0.0 && alpha > -1.0) {
        return domain(format!("I1 needs β > 0 and α > −1, got α = {alpha}, β = {beta_}"));
    }
    Ok(beta_ * beta(beta_, alpha + 1.0)?)
}

/// Closed form of `I2(α, β) = ∫₀¹ 2a²χ³/η' dχ` obtained by parts.
///
/// Restricted to `1 < α < 1.5` and `β > 0.5`, where every Γ argument is
/// positive.
pub fn i2(alpha: f64, beta_: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 1.5) {
        return domain(format!("I2 closed form needs 1 < α < 1.5, got {alpha}"));
    }
    if !(beta_ > 0.5 && beta_.is_finite()) {
        return domain(format!("I2 closed form needs β > 0.5, got {beta_}"));
    }
    let g = |x: f64| -> Result<f64> {
        if x <= 0.0 {
            return domain(format!("I2: Γ argument {x} is not positive"));
        }
        gamma(x)
    };
    let ratio = |k: f64| -> Result<f64> { Ok(g(k * beta_ - 1.0)? / g(k * beta_ + 1.0 - 2.0 * alpha)?) };
    let bracket = -ratio(2.0)? + 3.0 * ratio(3.0)? - 3.0 * ratio(4.0)? + ratio(5.0)?;
    let pref = beta_ * beta_ * g(3.0 - 2.0 * alpha)? / (2.0 * alpha * (alpha - 1.0));
    Ok(pref * bracket)
}

fn check_positive_integrals(i1v: f64, i2v: f64) -> Result<()> {
    if !(i1v > 0.0 && i2v > 0.0) {
        return domain(format!("a*/S* need I1, I2 > 0, got {i1v}, {i2v}"));
    }
    Ok(())
}

/// Slope minimizing `a I1 + a^{−2} I2`: `a* = (2 I2/I1)^{1/3}`.
pub fn a_star(alpha: f64, beta_: f64) -> Result<f64> {
    let (i1v, i2v) = (i1(alpha, beta_)?, i2(alpha, beta_)?);
    check_positive_integrals(i1v, i2v)?;
    Ok((2.0 * i2v / i1v).cbrt())
}

/// `S*(α, β) = (2^{1/3} + 2^{−2/3}) I1^{2/3} I2^{1/3}`.
pub fn s_star(alpha: f64, beta_: f64) -> Result<f64> {
    let (i1v, i2v) = (i1(alpha, beta_)?, i2(alpha, beta_)?);
    check_positive_integrals(i1v, i2v)?;
    Ok((2f64.cbrt() + 2f64.powf(-2.0 / 3.0)) * i1v.powf(2.0 / 3.0) * i2v.cbrt())
}

/// χ-space action `a I1 + a^{−2} I2` split into its two terms.
pub fn mueller2_action(p: &Mueller2Params) -> Result<ActionBreakdown> {
    Ok(ActionBreakdown::new(
        p.a * i1(p.alpha, p.beta)?,
        i2(p.alpha, p.beta)? / (p.a * p.a),
    ))
}

/// `1 − (1−χ)^{1/β}` without cancellation near χ = 0.
fn one_minus_root(chi: f64, beta_: f64) -> f64 {
    -((-chi).ln_1p() / beta_).exp_m1()
}

/// `dη/dχ` for the Müller-2 trial function, `η = ψ²`.
pub fn mueller2_deta(chi: f64, p: &Mueller2Params) -> f64 {
    let chibar = 1.0 - chi;
    let r = one_minus_root(chi, p.beta);
    2.0 * p.a * p.a * p.alpha / p.beta * r.powf(2.0 * p.alpha - 1.0) * chibar.powf(1.0 / p.beta - 1.0)
}

/// Boundary term `∂L/∂η' = −2χ³/η'²` of the χ-space variation.
pub fn mueller2_boundary_term(chi: f64, p: &Mueller2Params) -> f64 {
    let d = mueller2_deta(chi, p);
    -2.0 * chi.powi(3) / (d * d)
}

/// Direct quadrature of `∫₀¹ (√η + 2χ³/η') dχ` for the Müller-2 trial.
pub fn mueller2_action_numeric(p: &Mueller2Params, cfg: &QuadratureConfig) -> Result<ActionBreakdown> {
    p.validate()?;
    let s1 = adaptive_quad(|chi| p.a * one_minus_root(chi, p.beta).powf(p.alpha), 0.0, 1.0, cfg)?;
    let s2 = adaptive_quad(
        |chi| {
            if chi >= 1.0 {
                return 0.0;
            }
            2.0 * chi.powi(3) / mueller2_deta(chi, p)
        },
        0.0,
        1.0,
        cfg,
    )?;
    Ok(ActionBreakdown::new(s1, s2))
}

fn fit_result(params: ModelParams, m: &Minimum) -> FitResult {
    FitResult {
        params,
        s_min: m.value,
        evaluations: m.evaluations,
        converged: m.converged,
        simplex: Some(SimplexDiagnostics {
            iterations: m.iterations,
            diameter: m.diameter,
            value_spread: m.value_spread,
            vertices: m.vertices.clone(),
        }),
    }
}

/// Minimizes the Sommerfeld action over `(k, α, β)` with the simplex method.
pub fn fit_sommerfeld(start: [f64; 3], opts: &SimplexOptions) -> Result<FitResult> {
    let objective = |v: &[f64]| {
        SommerfeldParams::new(v[0], v[1], v[2])
            .and_then(|p| sommerfeld_action(&p))
            .unwrap_or(f64::INFINITY)
    };
    let m = minimize(objective, &start, &[0.05, 0.2, 0.1], opts)?;
    let params = SommerfeldParams::new(m.x[0], m.x[1], m.x[2])?;
    Ok(fit_result(ModelParams::Sommerfeld(params), &m))
}

/// Minimizes `S*(α, β)` and recovers `a = a*(α, β)`.
pub fn fit_mueller2(start: [f64; 2], opts: &SimplexOptions) -> Result<FitResult> {
    let objective = |v: &[f64]| s_star(v[0], v[1]).unwrap_or(f64::INFINITY);
    let m = minimize(objective, &start, &[0.05, 0.1], opts)?;
    let (alpha, beta_) = (m.x[0], m.x[1]);
    let a = a_star(alpha, beta_)?;
    let params = Mueller2Params::new(a, alpha, beta_).map_err(|e| match e {
        Error::Domain(msg) => Error::Domain(format!("fitted Müller-2 parameters invalid: {msg}")),
        other => other,
    })?;
    Ok(fit_result(ModelParams::Mueller2(params), &m))
}

/// Default starting points used by the command-line fits.
pub const SOMMERFELD_START: [f64; 3] = [0.4, 2.0, 1.1];
pub const MUELLER2_START: [f64; 2] = [1.4, 1.6];
