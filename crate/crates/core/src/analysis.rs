//! Parameter fixing for Müller-1, error scans against the reference solution,
//! comparison datasets and unit conversion.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::format::fmt_g15;
use crate::models::{mueller1_chi, Mueller1Params, ScreeningModel};
use crate::reference::{self, log_grid, SolutionTable};
use crate::roots::brent;
use crate::specfun::{adaptive_quad, QuadratureConfig};

/// Bracket searched by the Müller-1 root solves.
const SLOPE_BRACKET: (f64, f64) = (1.55, 1.65);
/// Log-log growth rate of the relative error, over the last probed decade,
/// above which the error is reported as growing without bound.
const GROWTH_SLOPE: f64 = 0.1;
/// Decades beyond the end of the grid probed against the asymptotic series.
const TAIL_PROBE_DECADES: i32 = 3;
/// Probe points per decade.
const TAIL_PROBE_DENSITY: i32 = 8;

/// `∫₀^∞ √x χ^{3/2} dx` for the Müller-1 function whose exponents follow
/// from the slope `a`.
pub fn mueller1_normalization(a: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let p = Mueller1Params::from_slope(a)?;
    let f = |x: f64| match mueller1_chi(x, &p) {
        Ok(c) => x.sqrt() * c * c.sqrt(),
        Err(_) => f64::NAN,
    };
    Ok(adaptive_quad(f, 0.0, 1.0, cfg)? + adaptive_quad(f, 1.0, f64::INFINITY, cfg)?)
}

/// How the Müller-1 slope is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mueller1Mode {
    /// Unit electron count, `∫√x χ^{3/2} dx = 1`.
    Normalized,
    /// The numerically determined slope of the exact solution.
    NumericSlope,
    /// Large-x limit `χ → 144/x³`.
    Asymptotic,
}

pub fn fit_mueller1(mode: Mueller1Mode) -> Result<Mueller1Params> {
    let (lo, hi) = SLOPE_BRACKET;
    let a = match mode {
        Mueller1Mode::Normalized => {
            let cfg = QuadratureConfig::default();
            brent(|a| Ok(mueller1_normalization(a, &cfg)? - 1.0), lo, hi, 1e-12, 200)?
        }
        Mueller1Mode::NumericSlope => reference::shoot(1.0, 2.0, 1e-10)?,
        Mueller1Mode::Asymptotic => brent(
            |a| Ok(Mueller1Params::from_slope(a)?.tail_prefactor() - 144.0),
            lo,
            hi,
            1e-14,
            200,
        )?,
    };
    Mueller1Params::from_slope(a)
}

/// Largest relative error, or a marker that it grows without bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelErrorBound {
    Finite(f64),
    InfiniteGrowth,
}

impl RelErrorBound {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::InfiniteGrowth)
    }
}

impl Serialize for RelErrorBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::InfiniteGrowth => s.serialize_str("INFINITE-GROWTH"),
        }
    }
}

/// Pointwise comparison of one model with the reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub model: String,
    pub grid: Vec<f64>,
    /// Signed difference model − reference.
    pub delta: Vec<f64>,
    pub abs_err: Vec<f64>,
    pub rel_err: Vec<f64>,
    pub sup_abs: f64,
    pub sup_rel: RelErrorBound,
    /// Largest relative error on the grid, regardless of growth.
    pub max_rel_on_grid: f64,
    /// Largest relative error on the probe points past the end of the grid.
    pub max_rel_in_tail: f64,
    /// Least-squares slope of `ln rel_err` against `ln x` over the last
    /// probed decade.
    pub tail_growth_rate: f64,
}

/// Least-squares slope of `ln rel` against `ln x` over the last decade of `grid`.
fn tail_growth_rate(grid: &[f64], rel: &[f64]) -> f64 {
    let last = *grid.last().expect("non-empty grid");
    let mut idx: Vec<usize> = (0..grid.len())
        .filter(|&i| grid[i] >= last / 10.0 && grid[i] > 0.0 && rel[i] > 0.0)
        .collect();
    if idx.len() < 3 {
        idx = (grid.len().saturating_sub(3)..grid.len())
            .filter(|&i| grid[i] > 0.0 && rel[i] > 0.0)
            .collect();
    }
    if idx.len() < 2 {
        return 0.0;
    }
    let n = idx.len() as f64;
    let xs: Vec<f64> = idx.iter().map(|&i| grid[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| rel[i].ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Compares `model` against the reference table on `grid`.
///
/// The relative error is also followed for a few decades past the grid, where
/// the table falls back on its asymptotic series; growth over the last of
/// those decades decides between a finite bound and unbounded growth.
pub fn error_scan<M>(model_name: &str, model: M, reference: &SolutionTable, grid: &[f64]) -> Result<ErrorReport>
where
    M: Fn(f64) -> Result<f64>,
{
    if grid.is_empty() {
        return domain("error scan grid is empty");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("error scan grid must be strictly ascending");
    }
    let mut delta = Vec::with_capacity(grid.len());
    let mut rel = Vec::with_capacity(grid.len());
    for &x in grid {
        let r = reference.chi_at(x)?;
        let d = model(x)? - r;
        delta.push(d);
        rel.push((d / r).abs());
    }
    let abs_err: Vec<f64> = delta.iter().map(|d| d.abs()).collect();
    let sup_abs = abs_err.iter().cloned().fold(0.0, f64::max);
    let max_rel = rel.iter().cloned().fold(0.0, f64::max);
    let last = *grid.last().expect("non-empty grid");
    let (probe_x, probe_rel) = if last > 0.0 {
        let n = TAIL_PROBE_DECADES * TAIL_PROBE_DENSITY;
        let mut px = Vec::with_capacity(n as usize);
        let mut pr = Vec::with_capacity(n as usize);
        for k in 1..=n {
            let x = last * 10f64.powf(k as f64 / TAIL_PROBE_DENSITY as f64);
            let r = reference.chi_at(x)?;
            px.push(x);
            pr.push(((model(x)? - r) / r).abs());
        }
        (px, pr)
    } else {
        (grid.to_vec(), rel.clone())
    };
    let max_tail = probe_rel.iter().cloned().fold(0.0, f64::max);
    let growth = tail_growth_rate(&probe_x, &probe_rel);
    let sup_rel = if growth > GROWTH_SLOPE {
        RelErrorBound::InfiniteGrowth
    } else {
        RelErrorBound::Finite(max_rel.max(max_tail))
    };
    Ok(ErrorReport {
        model: model_name.to_string(),
        grid: grid.to_vec(),
        delta,
        abs_err,
        rel_err: rel,
        sup_abs,
        sup_rel,
        max_rel_on_grid: max_rel,
        max_rel_in_tail: max_tail,
        tail_growth_rate: growth,
    })
}

/// Rounds a positive bound up to one significant digit, e.g. `6.2e-3 → "<7e-3"`.
pub fn abs_error_class(v: f64) -> String {
    if !(v > 0.0) {
        return "<1e-16".into();
    }
    let e = v.log10().floor() as i32;
    let mut m = (v / 10f64.powi(e) - 1e-12).ceil() as i32;
    let mut e = e;
    if m >= 10 {
        m = 1;
        e += 1;
    }
    format!("<{m}e{e}")
}

/// Relative error class in percent, or `<inf` for unbounded growth.
pub fn rel_error_class(b: &RelErrorBound) -> String {
    match b {
        RelErrorBound::InfiniteGrowth => "<inf".into(),
        RelErrorBound::Finite(v) => format!("<{}%", ((v * 100.0) - 1e-12).ceil().max(1.0) as i64),
    }
}

impl ErrorReport {
    pub fn abs_class(&self) -> String {
        abs_error_class(self.sup_abs)
    }

    pub fn rel_class(&self) -> String {
        rel_error_class(&self.sup_rel)
    }

    /// Per-point CSV: `x,delta,abs_err,rel_err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,delta,abs_err,rel_err\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_g15(self.grid[i]),
                fmt_g15(self.delta[i]),
                fmt_g15(self.abs_err[i]),
                fmt_g15(self.rel_err[i])
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("error reports serialize")
    }
}

/// Default comparison grid: 400 log-spaced radii on `[1e-3, 1e3]`.
pub fn default_scan_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 400)
}

/// Plot-ready table: radius, reference χ and one column per model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_g15(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("datasets serialize")
    }
}

pub fn fig1_dataset(models: &[&dyn ScreeningModel], reference: &SolutionTable, grid: &[f64]) -> Result<Dataset> {
    let mut columns = vec!["x".to_string(), "chi_reference".to_string()];
    columns.extend(models.iter().map(|m| format!("chi_{}", m.name())));
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let mut row = vec![x, reference.chi_at(x)?];
        for m in models {
            row.push(m.chi(x)?);
        }
        rows.push(row);
    }
    Ok(Dataset { columns, rows })
}

/// Conversion factors from Thomas-Fermi units for nuclear charge `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScales {
    pub z: u32,
    /// Length unit in Bohr radii, `0.8853 Z^{−1/3}`.
    pub length_unit: f64,
    /// Energy unit in Rydberg, `2.2590 Z^{4/3}`.
    pub energy_unit: f64,
}

pub fn physical_scales(z: i64) -> Result<PhysicalScales> {
    if z < 1 || z > u32::MAX as i64 {
        return domain(format!("atomic number must be a positive integer, got {z}"));
    }
    let zf = z as f64;
    let cbrt = zf.cbrt();
    Ok(PhysicalScales {
        z: z as u32,
        length_unit: 0.8853 / cbrt,
        energy_unit: 2.2590 * zf * cbrt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Mueller2Params, SommerfeldParams};
    use crate::reference::solve_reference;
    use approx::assert_relative_eq;

    #[test]
    fn normalization_of_canonical_set() {
        let cfg = QuadratureConfig::default();
        assert!((mueller1_normalization(1.58968, &cfg).unwrap() - 1.0).abs() < 1e-3);
        let n = mueller1_normalization(1.70, &cfg).unwrap();
        assert!(n > 0.0 && (n - 1.0).abs() > 1e-3);
    }

    #[test]
    fn mueller1_modes() {
        let expect = [
            (Mueller1Mode::Normalized, 1.58968, 4.1501, 0.55426),
            (Mueller1Mode::NumericSlope, 1.58807, 4.1587, 0.55723),
            (Mueller1Mode::Asymptotic, 1.58662, 4.1665, 0.55994),
        ];
        for (mode, a, alpha, beta) in expect {
            let p = fit_mueller1(mode).unwrap();
            assert!((p.a - a).abs() < 2e-4, "{mode:?}: a = {}", p.a);
            assert!((p.alpha - alpha).abs() < 2e-4, "{mode:?}: α = {}", p.alpha);
            assert!((p.beta - beta).abs() < 2e-4, "{mode:?}: β = {}", p.beta);
        }
    }

    #[test]
    fn error_classes() {
        assert_eq!(abs_error_class(6.36e-3), "<7e-3");
        assert_eq!(abs_error_class(2.92e-4), "<3e-4");
        assert_eq!(abs_error_class(5.66e-4), "<6e-4");
        assert_eq!(abs_error_class(3e-4), "<3e-4");
        assert_eq!(abs_error_class(9.5e-3), "<1e-2");
        assert_eq!(rel_error_class(&RelErrorBound::InfiniteGrowth), "<inf");
        assert_eq!(rel_error_class(&RelErrorBound::Finite(0.0325)), "<4%");
        assert_eq!(rel_error_class(&RelErrorBound::Finite(0.0001)), "<1%");
    }

    #[test]
    fn rel_bound_serializes_marker() {
        assert_eq!(
            serde_json::to_string(&RelErrorBound::InfiniteGrowth).unwrap(),
            "\"INFINITE-GROWTH\""
        );
        assert_eq!(serde_json::to_string(&RelErrorBound::Finite(0.5)).unwrap(), "0.5");
    }

    #[test]
    fn scan_of_reference_is_zero() {
        let table = solve_reference(400, 1000.0).unwrap();
        let grid = log_grid(1e-3, 1e3, 50);
        let r = error_scan("self", |x| table.chi_at(x), &table, &grid).unwrap();
        assert_eq!(r.sup_abs, 0.0);
        assert_eq!(r.sup_rel, RelErrorBound::Finite(0.0));
        assert_eq!(r.abs_err.len(), 50);
        assert!(r.to_csv().starts_with("x,delta,abs_err,rel_err\n"));
        assert_eq!(r.to_json()["sup_rel"], 0.0);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        let table = solve_reference(200, 1000.0).unwrap();
        assert!(matches!(
            error_scan("m", |x| table.chi_at(x), &table, &[]),
            Err(crate::Error::Domain(_))
        ));
        assert!(error_scan("m", |x| table.chi_at(x), &table, &[1.0, 1.0]).is_err());
        assert!(error_scan("m", |x| table.chi_at(x), &table, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn scan_classification_matches_published_table() {
        let table = solve_reference(2000, 1000.0).unwrap();
        let grid = default_scan_grid();
        let cases: [(Box<dyn ScreeningModel>, &str, &str); 3] = [
            (Box::new(SommerfeldParams::variational()), "<7e-3", "<inf"),
            (Box::new(Mueller1Params::normalized()), "<3e-4", "<4%"),
            (Box::new(Mueller2Params::variational()), "<6e-4", "<inf"),
        ];
        for (m, abs, rel) in cases {
            let r = error_scan(m.name(), |x| m.chi(x), &table, &grid).unwrap();
            assert_eq!(r.abs_class(), abs, "{}", m.name());
            assert_eq!(r.rel_class(), rel, "{}", m.name());
        }
    }

    #[test]
    fn growth_marker_on_power_law_error() {
        let table = solve_reference(400, 1000.0).unwrap();
        let grid = log_grid(1e-2, 1e2, 40);
        // χ_ref · (1 + 1e-3 x) has a relative error growing like x
        let r = error_scan("lin", |x| Ok(table.chi_at(x)? * (1.0 + 1e-3 * x)), &table, &grid).unwrap();
        assert!(r.sup_rel.is_infinite());
        assert_relative_eq!(r.tail_growth_rate, 1.0, max_relative = 1e-6);
        let r = error_scan("const", |x| Ok(table.chi_at(x)? * 1.02), &table, &grid).unwrap();
        assert_eq!(r.rel_class(), "<2%");
    }

    #[test]
    fn refinement_does_not_lower_sup() {
        let table = solve_reference(2000, 1000.0).unwrap();
        let m = Mueller2Params::variational();
        let coarse = error_scan("m", |x| m.chi(x), &table, &log_grid(1e-3, 1e3, 400)).unwrap();
        let fine = error_scan("m", |x| m.chi(x), &table, &log_grid(1e-3, 1e3, 799)).unwrap();
        assert!(fine.sup_abs >= coarse.sup_abs - 1e-6);
    }

    #[test]
    fn fig1_rows() {
        let table = solve_reference(400, 1000.0).unwrap();
        let m1 = Mueller1Params::normalized();
        let s = SommerfeldParams::variational();
        let m2 = Mueller2Params::variational();
        let grid = [0.0, 0.1, 1.0, 10.0, 100.0];
        let d = fig1_dataset(&[&s, &m1, &m2], &table, &grid).unwrap();
        assert_eq!(
            d.columns,
            ["x", "chi_reference", "chi_sommerfeld", "chi_mueller1", "chi_mueller2"]
        );
        assert!(d.rows[0][1..].iter().all(|&v| v == 1.0));
        for c in 1..5 {
            assert!(d.rows.windows(2).all(|w| w[1][c] < w[0][c]));
        }
        for row in &d.rows {
            assert!((row[3] - row[1]).abs() < 1e-3);
            assert!((row[4] - row[1]).abs() < 1e-3);
        }
        let csv = d.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn unit_scales() {
        let s = physical_scales(1).unwrap();
        assert_eq!((s.length_unit, s.energy_unit), (0.8853, 2.2590));
        let s = physical_scales(8).unwrap();
        assert_relative_eq!(s.length_unit, 0.8853 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(s.energy_unit, 2.2590 * 16.0, max_relative = 1e-15);
        let s = physical_scales(1000).unwrap();
        assert_relative_eq!(s.length_unit, 0.08853, max_relative = 1e-15);
        assert_relative_eq!(s.energy_unit, 2.2590e4, max_relative = 1e-15);
        assert!(physical_scales(0).is_err());
        assert!(physical_scales(-3).is_err());
    }
}
