//! High-accuracy numerical solution of `χ'' = χ^{3/2}/√x` for the neutral atom.
//!
//! The initial slope is found by bisection on the two ways a trial
//! trajectory fails (crossing zero or turning up). The outward trajectory
//! is only trustworthy up to moderate radii because the growing mode of the
//! linearized equation amplifies any slope error like `x^{7.8}`; the far
//! region is therefore integrated inward from the Coulson-March tail, whose
//! amplitude `F` is tuned so that both branches meet continuously at
//! `x_match`.
//!
//! Integration runs in `u = √x`, where the system
//! `dχ/du = 2u χ'`, `dχ'/du = 2χ^{3/2}` is smooth at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::expansions::{baker_chi, baker_dchi, coulson_march_chi, CoulsonMarchParams};
use crate::format::fmt_g15;
use crate::ode::{Dopri5, State};
use crate::roots::brent;
use crate::specfun::{adaptive_quad, QuadratureConfig};
use crate::variational::ActionBreakdown;

/// Series launch radius.
pub const X_START: f64 = 1e-6;
/// Radius beyond which tables use the Coulson-March series.
pub const X_SWITCH: f64 = 200.0;
/// Seam between the outward and inward branches.
pub const X_MATCH: f64 = 8.0;
/// Start of the inward branch.
pub const X_FAR: f64 = 1e4;
/// Default local error tolerance of the stepper.
pub const DEFAULT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SlopeClass {
    /// Slope too steep: χ reaches zero at finite x.
    CrossesZero,
    /// Slope too shallow: χ' changes sign and χ grows again.
    TurnsUp,
}

/// How a trial trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShootingOutcome {
    CrossesZero {
        x: f64,
    },
    TurnsUp {
        x: f64,
    },
    /// Neither event happened before `x_max`.
    ReachedEnd {
        x: f64,
    },
}

impl ShootingOutcome {
    pub fn classification(&self) -> Option<SlopeClass> {
        match self {
            Self::CrossesZero { .. } => Some(SlopeClass::CrossesZero),
            Self::TurnsUp { .. } => Some(SlopeClass::TurnsUp),
            Self::ReachedEnd { .. } => None,
        }
    }

    pub fn event_x(&self) -> f64 {
        match *self {
            Self::CrossesZero { x } | Self::TurnsUp { x } | Self::ReachedEnd { x } => x,
        }
    }
}

/// Accepted steps of one trial integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub chi: Vec<f64>,
    pub dchi: Vec<f64>,
    pub outcome: ShootingOutcome,
}

fn rhs(u: f64, y: &State) -> State {
    let chi = y[0].max(0.0);
    [2.0 * u * y[1], 2.0 * chi * chi.sqrt()]
}

fn stepper(tol: f64) -> Dopri5 {
    Dopri5::new(tol, tol * 1e-6)
}

/// Integrates outward from `x0` with initial data from the Baker series.
///
/// Stops at the first zero of χ, the first non-negative χ', or `x_max`.
pub fn integrate_tf(a: f64, x0: f64, x_max: f64, tol: f64) -> Result<Trajectory> {
    if !(x0 > 0.0 && x0 <= 0.01) {
        return domain(format!("start radius must lie in (0, 0.01], got {x0}"));
    }
    if !(x_max > x0) {
        return domain(format!("x_max must exceed x0, got {x_max}"));
    }
    if !(tol > 0.0) || !a.is_finite() {
        return domain("tolerance must be positive and slope finite");
    }
    let y0 = [baker_chi(x0, a)?, baker_dchi(x0, a)?];
    let u0 = x0.sqrt();
    let mut traj = Trajectory {
        x: vec![x0],
        chi: vec![y0[0]],
        dchi: vec![y0[1]],
        outcome: ShootingOutcome::ReachedEnd { x: x_max },
    };
    let mut prev = (u0, y0);
    let mut event = None;
    stepper(tol).integrate(&rhs, u0, y0, x_max.sqrt(), 1e-3 * u0, |u, y| {
        let (up, yp) = prev;
        if y[0] <= 0.0 {
            let s = yp[0] / (yp[0] - y[0]);
            let ue = up + s * (u - up);
            event = Some(ShootingOutcome::CrossesZero { x: ue * ue });
        } else if y[1] >= 0.0 {
            let s = yp[1] / (yp[1] - y[1]);
            let ue = up + s * (u - up);
            event = Some(ShootingOutcome::TurnsUp { x: ue * ue });
        }
        traj.x.push(u * u);
        traj.chi.push(y[0]);
        traj.dchi.push(y[1]);
        prev = (u, *y);
        event.is_none()
    })?;
    if let Some(e) = event {
        traj.outcome = e;
    }
    Ok(traj)
}

/// Classifies a trial slope, pushing the end radius out until an event occurs.
pub fn classify_slope(a: f64, tol: f64) -> Result<SlopeClass> {
    let mut x_max = 1e3;
    while x_max <= 1e9 {
        let traj = integrate_tf(a, X_START, x_max, tol)?;
        if let Some(c) = traj.outcome.classification() {
            return Ok(c);
        }
        x_max *= 100.0;
    }
    Err(Error::Integration(format!(
        "slope {a} produced neither a zero crossing nor an upturn"
    )))
}

/// Final bisection bracket `(turns_up, crosses_zero)` for the critical slope.
pub fn shoot_bracket(lo: f64, hi: f64, slope_tol: f64, tol: f64) -> Result<(f64, f64)> {
    if !(slope_tol > 0.0) || !(lo < hi) {
        return domain(format!("invalid shooting bracket [{lo}, {hi}] / tolerance {slope_tol}"));
    }
    let c_lo = classify_slope(lo, tol)?;
    let c_hi = classify_slope(hi, tol)?;
    if c_lo == c_hi {
        return Err(Error::Bracket(format!(
            "slopes {lo} and {hi} both classify as {c_lo:?}"
        )));
    }
    let (mut up, mut down) = if c_lo == SlopeClass::TurnsUp {
        (lo, hi)
    } else {
        (hi, lo)
    };
    while (down - up).abs() >= slope_tol {
        let mid = 0.5 * (up + down);
        if mid == up || mid == down {
            break;
        }
        match classify_slope(mid, tol)? {
            SlopeClass::TurnsUp => up = mid,
            SlopeClass::CrossesZero => down = mid,
        }
    }
    Ok((up, down))
}

/// Critical initial slope by bisection; `bracket_lo` and `bracket_hi` must
/// classify differently.
pub fn shoot(bracket_lo: f64, bracket_hi: f64, slope_tol: f64) -> Result<f64> {
    let (up, down) = shoot_bracket(bracket_lo, bracket_hi, slope_tol, DEFAULT_TOL)?;
    Ok(0.5 * (up + down))
}

#[derive(Debug, Clone)]
struct Branch {
    /// ascending in u
    u: Vec<f64>,
    y: Vec<State>,
}

impl Branch {
    fn eval(&self, stepper: &Dopri5, u: f64) -> State {
        let k = match self.u.partition_point(|&v| v <= u) {
            0 => 0,
            n => n - 1,
        };
        let h = u - self.u[k];
        if h == 0.0 {
            return self.y[k];
        }
        stepper.try_step(&rhs, self.u[k], &self.y[k], h).0
    }
}

/// Dense, high-accuracy evaluator of the neutral-atom screening function.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    a: f64,
    tail_f: f64,
    seam_dchi_mismatch: f64,
    stepper: Dopri5,
    inner: Branch,
    outer: Branch,
    tail: CoulsonMarchParams,
}

impl ReferenceSolution {
    /// Solves with the default tolerances.
    pub fn compute() -> Result<Self> {
        Self::with_tolerance(DEFAULT_TOL)
    }

    pub fn with_tolerance(tol: f64) -> Result<Self> {
        let (up, down) = shoot_bracket(1.0, 2.0, 1e-15, tol)?;
        let a = 0.5 * (up + down);
        let stepper = stepper(tol);

        let u0 = X_START.sqrt();
        let u_match = X_MATCH.sqrt();
        let y0 = [baker_chi(X_START, a)?, baker_dchi(X_START, a)?];
        let mut inner = Branch {
            u: vec![u0],
            y: vec![y0],
        };
        stepper.integrate(&rhs, u0, y0, u_match, 1e-3 * u0, |u, y| {
            inner.u.push(u);
            inner.y.push(*y);
            true
        })?;
        let y_match = *inner.y.last().expect("non-empty branch");
        if !(y_match[0] > 0.0 && y_match[1] < 0.0) {
            return Err(Error::Integration(format!(
                "outward branch left the physical region before x = {X_MATCH}"
            )));
        }

        let u_far = X_FAR.sqrt();
        let inward = |f: f64, record: Option<&mut Branch>| -> Result<State> {
            let cm = CoulsonMarchParams::new(f, CoulsonMarchParams::default().lambda)?;
            let y_far = [coulson_march_chi(X_FAR, &cm, 4)?, cm.dchi(X_FAR, 4)?];
            match record {
                Some(branch) => {
                    branch.u.push(u_far);
                    branch.y.push(y_far);
                    let (_, y, _) = stepper.integrate(&rhs, u_far, y_far, u_match, 1e-3 * u_far, |u, y| {
                        branch.u.push(u);
                        branch.y.push(*y);
                        true
                    })?;
                    Ok(y)
                }
                None => Ok(stepper
                    .integrate(&rhs, u_far, y_far, u_match, 1e-3 * u_far, |_, _| true)?
                    .1),
            }
        };
        let f0 = CoulsonMarchParams::default().f;
        let tail_f = brent(|f| Ok(inward(f, None)?[0] - y_match[0]), 0.9 * f0, 1.1 * f0, 1e-13, 200)?;
        let mut outer = Branch {
            u: Vec::new(),
            y: Vec::new(),
        };
        let y_seam = inward(tail_f, Some(&mut outer))?;
        outer.u.reverse();
        outer.y.reverse();

        Ok(Self {
            a,
            tail_f,
            seam_dchi_mismatch: ((y_seam[1] - y_match[1]) / y_match[1]).abs(),
            stepper,
            inner,
            outer,
            tail: CoulsonMarchParams::new(tail_f, CoulsonMarchParams::default().lambda)?,
        })
    }

    /// Critical initial slope `a = −χ'(0)`.
    pub fn slope(&self) -> f64 {
        self.a
    }

    /// Coulson-March amplitude selected by matching the two branches.
    pub fn tail_amplitude(&self) -> f64 {
        self.tail_f
    }

    /// Relative jump of χ' across the branch seam.
    pub fn seam_mismatch(&self) -> f64 {
        self.seam_dchi_mismatch
    }

    /// `(χ, dχ/dx)` from the integrated branches (no series tail below
    /// `X_FAR`).
    pub fn state(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return domain(format!("reference evaluated at negative radius {x}"));
        }
        if x < X_START {
            return Ok((baker_chi(x, self.a)?, baker_dchi(x, self.a)?));
        }
        if x > X_FAR {
            return Ok((coulson_march_chi(x, &self.tail, 4)?, self.tail.dchi(x, 4)?));
        }
        let u = x.sqrt();
        let y = if x <= X_MATCH {
            self.inner.eval(&self.stepper, u)
        } else {
            self.outer.eval(&self.stepper, u)
        };
        Ok((y[0], y[1]))
    }

    /// χ(x) as tabulated: integrated solution up to `x_switch`, Coulson-March
    /// series (published constants) beyond.
    pub fn tabulated_state(&self, x: f64, x_switch: f64) -> Result<(f64, f64)> {
        if x > x_switch {
            let cm = CoulsonMarchParams::default();
            return Ok((coulson_march_chi(x, &cm, 4)?, cm.dchi(x, 4)?));
        }
        self.state(x)
    }

    /// Samples the solution on `n_points` log-spaced radii in `[1e-6, x_max]`.
    pub fn table(&self, n_points: usize, x_max: f64) -> Result<SolutionTable> {
        self.table_with_switch(n_points, x_max, X_SWITCH)
    }

    pub fn table_with_switch(&self, n_points: usize, x_max: f64, x_switch: f64) -> Result<SolutionTable> {
        if n_points < 100 {
            return domain(format!("reference table needs at least 100 points, got {n_points}"));
        }
        if !(x_max > X_START) || !x_max.is_finite() {
            return domain(format!("x_max must exceed {X_START}, got {x_max}"));
        }
        let grid = log_grid(X_START, x_max, n_points);
        let mut table = SolutionTable {
            a: self.a,
            x_switch,
            x: Vec::with_capacity(n_points),
            chi: Vec::with_capacity(n_points),
            psi: Vec::with_capacity(n_points),
            n: Vec::with_capacity(n_points),
        };
        for x in grid {
            let (chi, dchi) = self.tabulated_state(x, x_switch)?;
            table.x.push(x);
            table.chi.push(chi);
            table.psi.push(-dchi);
            table.n.push(1.0 - chi + x * dchi);
        }
        Ok(table)
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Tabulated reference solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionTable {
    pub a: f64,
    pub x_switch: f64,
    pub x: Vec<f64>,
    pub chi: Vec<f64>,
    pub psi: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<f64>,
}

/// Reference table on `n_points` log-spaced radii up to `x_max`.
pub fn solve_reference(n_points: usize, x_max: f64) -> Result<SolutionTable> {
    if n_points < 100 {
        return domain(format!("reference table needs at least 100 points, got {n_points}"));
    }
    ReferenceSolution::compute()?.table(n_points, x_max)
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().expect("non-empty table")
    }

    /// `(χ, ψ)` at an arbitrary radius by cubic Hermite interpolation.
    ///
    /// Both derivatives are known exactly at the nodes (`χ' = −ψ`,
    /// `ψ' = −χ^{3/2}/√x`). Below the first node the Baker series is used,
    /// above the last one the Coulson-March series.
    pub fn interpolate(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return domain(format!("table evaluated at negative radius {x}"));
        }
        if x <= self.x_min() {
            return Ok((baker_chi(x, self.a)?, -baker_dchi(x, self.a)?));
        }
        if x >= self.x_max() {
            if x == self.x_max() {
                let i = self.len() - 1;
                return Ok((self.chi[i], self.psi[i]));
            }
            let cm = CoulsonMarchParams::default();
            return Ok((coulson_march_chi(x, &cm, 4)?, -cm.dchi(x, 4)?));
        }
        let i = self.x.partition_point(|&v| v <= x) - 1;
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let dpsi = |j: usize| {
            let c = self.chi[j].max(0.0);
            -c * c.sqrt() / self.x[j].sqrt()
        };
        let chi = hermite(t, h, self.chi[i], -self.psi[i], self.chi[i + 1], -self.psi[i + 1]);
        let psi = hermite(t, h, self.psi[i], dpsi(i), self.psi[i + 1], dpsi(i + 1));
        Ok((chi, psi))
    }

    /// χ only; convenience wrapper over [`interpolate`](Self::interpolate).
    pub fn chi_at(&self, x: f64) -> Result<f64> {
        Ok(self.interpolate(x)?.0)
    }

    /// CSV with header `x,chi,psi,N`, 15 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,chi,psi,N\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_g15(self.x[i]),
                fmt_g15(self.chi[i]),
                fmt_g15(self.psi[i]),
                fmt_g15(self.n[i])
            ));
        }
        out
    }

    /// JSON document `{a, x_switch, grid: {x, chi, psi, N}, metadata}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a,
            "x_switch": self.x_switch,
            "grid": {
                "x": self.x,
                "chi": self.chi,
                "psi": self.psi,
                "N": self.n,
            },
            "metadata": {
                "n_points": self.len(),
                "x_min": self.x_min(),
                "x_max": self.x_max(),
                "binding_energy": binding_energy_from_slope(self.a),
                "tail": "coulson-march, 4 terms",
            }
        })
    }
}

fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Integrates `g(x, χ, ψ)` over `[0, ∞)` using the table: Baker series on
/// `[0, x_min]`, one adaptive panel per table interval, Coulson-March beyond.
fn table_quad<G>(table: &SolutionTable, g: G) -> Result<f64>
where
    G: Fn(f64, f64, f64) -> f64,
{
    let cm = CoulsonMarchParams::default();
    if table.x_max() <= cm.convergence_radius() {
        return domain(format!(
            "table must extend beyond {:.1} for the tail contribution",
            cm.convergence_radius()
        ));
    }
    let cfg = QuadratureConfig::default();
    let f = |x: f64| match table.interpolate(x) {
        Ok((chi, psi)) => g(x, chi.max(0.0), psi),
        Err(_) => f64::NAN,
    };
    let mut total = adaptive_quad(f, 0.0, table.x_min(), &cfg)?;
    for w in table.x.windows(2) {
        total += adaptive_quad(f, w[0], w[1], &cfg)?;
    }
    total += adaptive_quad(f, table.x_max(), f64::INFINITY, &cfg)?;
    Ok(total)
}

/// Action split `S1 = ∫ψ² dx`, `S2 = (1/5)∫χ^{5/2} x^{−1/2} dx` evaluated by
/// quadrature over the table.
pub fn action_of_reference(table: &SolutionTable) -> Result<ActionBreakdown> {
    let s1 = table_quad(table, |_, _, psi| psi * psi)?;
    let s2 = table_quad(table, |x, chi, _| chi * chi * chi.sqrt() / x.sqrt())? / 5.0;
    Ok(ActionBreakdown::new(s1, s2))
}

/// Binding energy of the neutral atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BindingEnergy {
    /// `B = (3/7) a`.
    pub value: f64,
    /// `∫ x² n (φ − (3/5) n^{2/3}) dx` with `n = (χ/x)^{3/2}` and `φ = −χ/x`.
    /// With this sign convention the integrand reduces to
    /// `−(8/5) χ^{5/2}/√x`, so the value is negative (`−8a/7` exactly).
    pub direct_integral: f64,
}

/// `B = (3/7) a`.
pub fn binding_energy_from_slope(a: f64) -> f64 {
    3.0 / 7.0 * a
}

pub fn binding_energy(table: &SolutionTable) -> Result<BindingEnergy> {
    let direct_integral = table_quad(table, |x, chi, _| {
        let n = (chi / x).powf(1.5);
        let phi = -chi / x;
        x * x * n * (phi - 0.6 * n.powf(2.0 / 3.0))
    })?;
    Ok(BindingEnergy {
        value: binding_energy_from_slope(table.a),
        direct_integral,
    })
}
