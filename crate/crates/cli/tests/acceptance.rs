//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tfscreen::analysis::{default_scan_grid, error_scan, fit_mueller1};
use tfscreen::expansions::{baker_chi, coulson_march_chi};
use tfscreen::models::{mueller2_chi_of_x, mueller2_x_of_chi, mueller2_x_of_chi_hypergeometric};
use tfscreen::reference::{action_of_reference, log_grid, shoot, solve_reference, ReferenceSolution};
use tfscreen::specfun::adaptive_quad;
use tfscreen::variational::{
    fit_mueller2, fit_sommerfeld, i1, i2, lagrangian_action_numeric, s_star, sommerfeld_action, SimplexOptions,
    MUELLER2_START, SOMMERFELD_START,
};
use tfscreen::{
    CoulsonMarchParams, ModelParams, Mueller1Mode, Mueller1Params, Mueller2Params, QuadratureConfig, RelErrorBound,
    ScreeningModel, SommerfeldParams, NEUTRAL_SLOPE,
};

const B_PUBLISHED: f64 = 0.68060;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    check(
        (got - want).abs() <= tol,
        format!("{name} = {got:.8} outside {want} ± {tol:e}"),
    )
}

fn fine_cfg() -> QuadratureConfig {
    QuadratureConfig::new(1e-13, 1e-11, 4000).expect("valid config")
}

fn c1_shooting() -> Outcome {
    let t = Instant::now();
    let a = shoot(1.0, 2.0, 1e-10).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    within("a", a, NEUTRAL_SLOPE, 5e-6)?;
    check(dt < Duration::from_secs(5), format!("took {dt:?}"))?;
    Ok(format!("a = {a:.10} in {:.3} s", dt.as_secs_f64()))
}

fn c2_action() -> Outcome {
    let r = ReferenceSolution::compute().map_err(|e| e.to_string())?;
    let a = r.slope();
    let s = lagrangian_action_numeric(|x| r.state(x), &QuadratureConfig::default()).map_err(|e| e.to_string())?;
    within("S", s.total, B_PUBLISHED, 2e-4)?;
    within("S", s.total, 3.0 * a / 7.0, 2e-4)?;
    let table = r.table(2000, 1000.0).map_err(|e| e.to_string())?;
    let split = action_of_reference(&table).map_err(|e| e.to_string())?;
    within("S1", split.s1, 2.0 * a / 7.0, 2e-4)?;
    within("S2", split.s2, a / 7.0, 2e-4)?;
    Ok(format!(
        "S = {:.6}, 3a/7 = {:.6}, S1 = {:.6}, S2 = {:.6}",
        s.total,
        3.0 * a / 7.0,
        split.s1,
        split.s2
    ))
}

fn c3_mueller1_fit() -> Outcome {
    let expect = [
        (Mueller1Mode::Normalized, [1.58968, 4.1501, 0.55426]),
        (Mueller1Mode::NumericSlope, [1.58807, 4.1587, 0.55723]),
        (Mueller1Mode::Asymptotic, [1.58662, 4.1665, 0.55994]),
    ];
    let mut parts = Vec::new();
    for (mode, [a, alpha, beta]) in expect {
        let p = fit_mueller1(mode).map_err(|e| e.to_string())?;
        within("a", p.a, a, 2e-4)?;
        within("alpha", p.alpha, alpha, 2e-4)?;
        within("beta", p.beta, beta, 2e-4)?;
        parts.push(format!("{:?} ({:.5}, {:.4}, {:.5})", mode, p.a, p.alpha, p.beta));
    }
    Ok(parts.join("; "))
}

fn c4_mueller1_accuracy() -> Outcome {
    let table = solve_reference(2000, 1000.0).map_err(|e| e.to_string())?;
    let p = Mueller1Params::normalized();
    let rep = error_scan("mueller1", |x| p.chi(x), &table, &default_scan_grid()).map_err(|e| e.to_string())?;
    check(rep.sup_abs < 3e-4, format!("sup |Δχ| = {:e}", rep.sup_abs))?;
    let RelErrorBound::Finite(sup_rel) = rep.sup_rel else {
        return Err("relative error classified as unbounded".into());
    };
    check(sup_rel <= 0.045, format!("sup rel = {sup_rel}"))?;
    // extended range against the series tail
    let r = ReferenceSolution::compute().map_err(|e| e.to_string())?;
    for x in log_grid(1e-3, 1e4, 400) {
        let c = r.state(x).map_err(|e| e.to_string())?.0;
        let rel = ((p.chi(x).map_err(|e| e.to_string())? - c) / c).abs();
        check(rel <= 0.045, format!("rel error {rel} at x = {x}"))?;
    }
    let limit = (p.tail_prefactor() / 144.0 - 1.0).abs();
    check(limit <= 0.045, format!("|C/144 − 1| = {limit}"))?;
    Ok(format!(
        "sup |Δχ| = {:.3e}, sup rel = {:.4}, |C/144 − 1| = {:.4}",
        rep.sup_abs, sup_rel, limit
    ))
}

fn c5_sommerfeld() -> Outcome {
    let fit = fit_sommerfeld(SOMMERFELD_START, &SimplexOptions::default()).map_err(|e| e.to_string())?;
    check(fit.converged, "simplex did not converge")?;
    let ModelParams::Sommerfeld(p) = fit.params else {
        return Err("wrong model".into());
    };
    within("k", p.k, 0.482, 0.01)?;
    within("alpha", p.alpha, 2.10, 0.02)?;
    within("beta", p.beta, 1.083, 0.01)?;
    within("S_min", fit.s_min, 0.68075, 1e-4)?;
    let cfg = fine_cfg();
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let alpha = 1.5 + 0.5 * i as f64;
            let beta = 0.7 + 0.2 * j as f64;
            let q = SommerfeldParams::new(0.5, alpha, beta).map_err(|e| e.to_string())?;
            let closed = sommerfeld_action(&q).map_err(|e| e.to_string())?;
            let numeric = lagrangian_action_numeric(|x| Ok((q.chi(x)?, q.dchi(x)?)), &cfg)
                .map_err(|e| e.to_string())?
                .total;
            worst = worst.max(((closed - numeric) / numeric).abs());
        }
    }
    check(worst < 1e-6, format!("closed form vs quadrature: {worst:e}"))?;
    let table = solve_reference(2000, 1000.0).map_err(|e| e.to_string())?;
    let s = SommerfeldParams::variational();
    let rep = error_scan("sommerfeld", |x| s.chi(x), &table, &default_scan_grid()).map_err(|e| e.to_string())?;
    check(rep.sup_abs < 7e-3, format!("sup |Δχ| = {:e}", rep.sup_abs))?;
    Ok(format!(
        "(k, α, β) = ({:.4}, {:.4}, {:.4}), S_min = {:.6}, 5×5 worst {:.1e}, sup |Δχ| = {:.3e}",
        p.k, p.alpha, p.beta, fit.s_min, worst, rep.sup_abs
    ))
}

fn i2_oracle(a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64, String> {
    let f = |t: f64| t.powf(2.0 * b - 2.0) * (1.0 - t.powf(b)).powi(3) * (1.0 - t).powf(1.0 - 2.0 * a);
    let v = adaptive_quad(f, 0.0, 0.5, cfg).map_err(|e| e.to_string())?
        + adaptive_quad(f, 0.5, 1.0, cfg).map_err(|e| e.to_string())?;
    Ok(b * b / a * v)
}

fn c6_mueller2() -> Outcome {
    let fit = fit_mueller2(MUELLER2_START, &SimplexOptions::default()).map_err(|e| e.to_string())?;
    check(fit.converged, "simplex did not converge")?;
    let ModelParams::Mueller2(p) = fit.params else {
        return Err("wrong model".into());
    };
    let near = (p.alpha - 1.382).abs() <= 0.01 && (p.beta - 1.644).abs() <= 0.01;
    check(
        near || fit.s_min <= 0.68063 + 1e-5,
        format!("(α, β) = ({}, {}), S* = {}", p.alpha, p.beta, fit.s_min),
    )?;
    within("a*", p.a, 1.550, 5e-3)?;
    within("S_min", fit.s_min, 0.68063, 1e-4)?;
    let cfg = fine_cfg();
    let mut worst: f64 = 0.0;
    for &(a, b) in &[(p.alpha, p.beta), (1.382, 1.644), (1.1, 1.2), (1.25, 2.0), (1.45, 3.0)] {
        let q1 =
            adaptive_quad(|c| (1.0 - (1.0 - c).powf(1.0 / b)).powf(a), 0.0, 1.0, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max(((i1(a, b).map_err(|e| e.to_string())? - q1) / q1).abs());
        let q2 = i2_oracle(a, b, &cfg)?;
        worst = worst.max(((i2(a, b).map_err(|e| e.to_string())? - q2) / q2).abs());
    }
    check(worst < 1e-6, format!("I1/I2 vs quadrature: {worst:e}"))?;
    let table = solve_reference(2000, 1000.0).map_err(|e| e.to_string())?;
    let m = Mueller2Params::variational();
    let rep = error_scan("mueller2", |x| m.chi(x), &table, &default_scan_grid()).map_err(|e| e.to_string())?;
    check(rep.sup_abs < 6e-4, format!("sup |Δχ| = {:e}", rep.sup_abs))?;
    Ok(format!(
        "(α, β) = ({:.4}, {:.4}), a* = {:.4}, S_min = {:.6}, I worst {:.1e}, sup |Δχ| = {:.3e}",
        p.alpha, p.beta, p.a, fit.s_min, worst, rep.sup_abs
    ))
}

fn c7_upper_bound() -> Outcome {
    let floor = B_PUBLISHED - 2e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lowest = f64::INFINITY;
    let mut sampled = 0;
    while sampled < 20 {
        let p = SommerfeldParams {
            k: rng.gen_range(0.1..1.5),
            alpha: rng.gen_range(1.0..5.0),
            beta: rng.gen_range(0.5..1.9),
        };
        if let Ok(s) = sommerfeld_action(&p) {
            check(s >= floor, format!("Sommerfeld action {s} at {p:?}"))?;
            lowest = lowest.min(s);
            sampled += 1;
        }
    }
    sampled = 0;
    while sampled < 20 {
        let (a, b) = (rng.gen_range(1.01..1.49), rng.gen_range(1.01..4.0));
        if let Ok(s) = s_star(a, b) {
            check(s >= floor, format!("S* = {s} at ({a}, {b})"))?;
            lowest = lowest.min(s);
            sampled += 1;
        }
    }
    let a = NEUTRAL_SLOPE;
    for s_min in [0.68075, 0.68063] {
        let bound = 7.0 / 3.0 * s_min;
        check(bound > a, format!("(7/3)·{s_min} = {bound} does not exceed a"))?;
    }
    let s1 = fit_sommerfeld(SOMMERFELD_START, &SimplexOptions::default())
        .map_err(|e| e.to_string())?
        .s_min;
    let s2 = fit_mueller2(MUELLER2_START, &SimplexOptions::default())
        .map_err(|e| e.to_string())?
        .s_min;
    check(7.0 / 3.0 * s1 > a && 7.0 / 3.0 * s2 > a, "fitted bounds below a")?;
    Ok(format!(
        "40 samples, lowest {lowest:.6}; bounds {:.5}, {:.5} > {a}",
        7.0 / 3.0 * s1,
        7.0 / 3.0 * s2
    ))
}

fn c8_round_trip() -> Outcome {
    let p = Mueller2Params::variational();
    let mut worst_trip: f64 = 0.0;
    let mut worst_route: f64 = 0.0;
    for i in 1..=50 {
        let chi = i as f64 / 50.0;
        let x = mueller2_x_of_chi(chi, &p).map_err(|e| e.to_string())?;
        let back = mueller2_chi_of_x(x, &p, 1e-14).map_err(|e| e.to_string())?;
        worst_trip = worst_trip.max((back - chi).abs());
        if chi < 1.0 {
            let h = mueller2_x_of_chi_hypergeometric(chi, &p).map_err(|e| e.to_string())?;
            worst_route = worst_route.max(((x - h) / h).abs());
        }
    }
    check(worst_trip < 1e-10, format!("round trip error {worst_trip:e}"))?;
    check(worst_route < 1e-8, format!("route disagreement {worst_route:e}"))?;
    Ok(format!("round trip {worst_trip:.1e}, routes {worst_route:.1e}"))
}

fn c9_series() -> Outcome {
    let r = ReferenceSolution::compute().map_err(|e| e.to_string())?;
    let mut baker: f64 = 0.0;
    for x in log_grid(1e-6, 0.01, 100) {
        let d = r.state(x).map_err(|e| e.to_string())?.0 - baker_chi(x, r.slope()).map_err(|e| e.to_string())?;
        baker = baker.max(d.abs());
    }
    check(baker < 1e-8, format!("Baker deviation {baker:e}"))?;
    let cm = CoulsonMarchParams::default();
    let mut tail: f64 = 0.0;
    for x in log_grid(200.0, 1e4, 100) {
        let c = r.state(x).map_err(|e| e.to_string())?.0;
        let s = coulson_march_chi(x, &cm, 4).map_err(|e| e.to_string())?;
        tail = tail.max(((s - c) / c).abs());
    }
    check(tail < 1e-3, format!("Coulson-March deviation {tail:e}"))?;
    Ok(format!(
        "Baker {baker:.2e} (x ≤ 0.01), Coulson-March {tail:.2e} relative (x ≥ 200)"
    ))
}

fn cli(cache: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tfscreen"))
        .args(args)
        .env("TF_SCREEN_CACHE_DIR", cache)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        format!("tfscreen {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)),
    )?;
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn c10_cli() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let table = cli(dir.path(), &["compare", "--all"])?;
    let golden = "sommerfeld,<7e-3,<inf\nmueller1,<3e-4,<4%\nmueller2,<6e-4,<inf\n";
    let got: String = table
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            format!("{},{},{}\n", c[0], c[2], c[4])
        })
        .collect();
    check(got == golden, format!("classification\n{got}"))?;
    let p1 = dir.path().join("1.csv");
    let p2 = dir.path().join("2.csv");
    cli(dir.path(), &["solve", "-o", p1.to_str().unwrap()])?;
    cli(dir.path(), &["solve", "-o", p2.to_str().unwrap()])?;
    let (b1, b2) = (
        std::fs::read(&p1).map_err(|e| e.to_string())?,
        std::fs::read(&p2).map_err(|e| e.to_string())?,
    );
    check(b1 == b2, "solve output differs between runs")?;
    Ok(format!(
        "classification matches, solve CSV identical ({} bytes)",
        b1.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("shooting slope", c1_shooting),
        ("action identity", c2_action),
        ("Müller-1 parameter sets", c3_mueller1_fit),
        ("Müller-1 accuracy", c4_mueller1_accuracy),
        ("Sommerfeld variational fit", c5_sommerfeld),
        ("Müller-2 variational fit", c6_mueller2),
        ("upper-bound property", c7_upper_bound),
        ("inverse-function round trip", c8_round_trip),
        ("series consistency", c9_series),
        ("CLI golden files", c10_cli),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{dt:.2} s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} [{dt:.2} s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed in {:.1} s",
        criteria.len() - failures,
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
