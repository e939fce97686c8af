use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Stop once the largest vertex distance falls below this.
    pub x_tol: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 100_000,
            x_tol: 1e-8,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    pub diameter: f64,
    /// Spread of function values over the final simplex.
    pub value_spread: f64,
    pub vertices: Vec<Vec<f64>>,
}

fn diameter(vertices: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let s: f64 = vertices[i]
                .iter()
                .zip(&vertices[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d = d.max(s.sqrt());
        }
    }
    d
}

/// Nelder-Mead minimization from `start` with initial edge lengths `scale`.
///
/// Deterministic: the initial simplex is `start + scale_i e_i` and ties are
/// broken by vertex index. Non-finite objective values count as `+∞`.
pub fn minimize<F>(mut f: F, start: &[f64], scale: &[f64], opts: &SimplexOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 || scale.len() != n {
        return domain("simplex start and scale must be non-empty and of equal length");
    }
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += scale[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    if !vals[0].is_finite() {
        return domain(format!("objective is not finite at the start point {start:?}"));
    }

    let mut iterations = 0usize;
    let converged = loop {
        // order vertices by value (stable, so ties keep index order)
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if diameter(&pts) < opts.x_tol {
            break true;
        }
        if evals >= opts.max_evaluations {
            break false;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (pts[n][k] - centroid[k])).collect() };

        let xr = along(-opts.reflection);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-opts.reflection * opts.expansion);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(-opts.reflection * opts.contraction);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(opts.contraction);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = (0..n)
                .map(|k| pts[0][k] + opts.shrink * (pts[i][k] - pts[0][k]))
                .collect();
            vals[i] = eval(&p, &mut evals);
            pts[i] = p;
        }
    };

    let spread = vals[n] - vals[0];
    Ok(Minimum {
        x: pts[0].clone(),
        value: vals[0],
        evaluations: evals,
        iterations,
        converged,
        diameter: diameter(&pts),
        value_spread: spread,
        vertices: pts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let target = [0.3, -1.2, 2.5];
        let f = |x: &[f64]| {
            x.iter()
                .zip(target.iter())
                .map(|(a, b)| (a - b) * (a - b) * 3.0)
                .sum::<f64>()
        };
        for start in [[0.0, 0.0, 0.0], [5.0, -4.0, 1.0], [-2.0, 3.0, 9.0]] {
            let m = minimize(f, &start, &[0.5, 0.5, 0.5], &SimplexOptions::default()).unwrap();
            assert!(m.converged);
            assert!(m.diameter < 1e-8);
            for (got, want) in m.x.iter().zip(target) {
                assert!((got - want).abs() < 1e-6, "{:?}", m.x);
            }
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &[0.1, 0.1], &SimplexOptions::default()).unwrap();
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(4) + (x[1] + 0.5).powi(2);
        let opts = SimplexOptions::default();
        let a = minimize(f, &[0.0, 0.0], &[0.3, 0.3], &opts).unwrap();
        let b = minimize(f, &[0.0, 0.0], &[0.3, 0.3], &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infinite_region_is_avoided() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.1).powi(2)
            }
        };
        let m = minimize(f, &[1.0], &[0.5], &SimplexOptions::default()).unwrap();
        assert!((m.x[0] - 0.1).abs() < 1e-7);
    }

    #[test]
    fn evaluation_budget_flags_nonconvergence() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2);
        let opts = SimplexOptions {
            max_evaluations: 10,
            ..SimplexOptions::default()
        };
        let m = minimize(f, &[0.0, 0.0], &[0.1, 0.1], &opts).unwrap();
        assert!(!m.converged);
    }

    #[test]
    fn bad_start_is_rejected() {
        let f = |_: &[f64]| f64::INFINITY;
        assert!(minimize(f, &[0.0], &[1.0], &SimplexOptions::default()).is_err());
        assert!(minimize(|_| 0.0, &[0.0, 1.0], &[1.0], &SimplexOptions::default()).is_err());
    }
}
