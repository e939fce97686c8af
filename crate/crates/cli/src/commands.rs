use std::io::Write;
use std::path::Path;

use serde_json::json;
use tfscreen::analysis::{error_scan, fig1_dataset, fit_mueller1, physical_scales, ErrorReport};
use tfscreen::format::fmt_g15;
use tfscreen::reference::{binding_energy_from_slope, log_grid, ReferenceSolution, SolutionTable, DEFAULT_TOL};
use tfscreen::specfun::QuadratureConfig;
use tfscreen::variational::{
    fit_mueller2, fit_sommerfeld, lagrangian_action_numeric, SimplexOptions, MUELLER2_START, SOMMERFELD_START,
};
use tfscreen::{
    FitResult, ModelParams, Mueller1Mode, Mueller1Params, Mueller2Params, RelErrorBound, ScreeningModel,
    SommerfeldParams,
};

use crate::{cache, Cli, CliError, Command, FitMode, Format, GlobalOpts, GridOpts, ModelName, Spacing};

/// Points in the reference table used by `compare`.
const COMPARE_TABLE_POINTS: usize = 2000;
const COMPARE_TABLE_XMAX: f64 = 1000.0;

type CmdResult = Result<(), CliError>;

pub fn run(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    if let Some(tol) = g.tol {
        if !(tol > 0.0 && tol < 1e-2) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1e-2), got {tol}")));
        }
    }
    match &cli.command {
        Command::Solve { points, xmax } => solve(g, *points, *xmax),
        Command::Fit { model, mode } => fit(g, *model, *mode),
        Command::Eval { model, x, params } => eval(g, *model, x, params.as_deref()),
        Command::Compare {
            models,
            all,
            grid,
            emit_fig1,
        } => compare(g, models, *all, grid, emit_fig1.as_deref()),
        Command::Units { z } => units(g, *z),
    }
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Primary output goes to `--output` when given, stdout otherwise.
fn emit(g: &GlobalOpts, text: &str) -> CmdResult {
    match &g.output {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn reference(g: &GlobalOpts) -> Result<ReferenceSolution, CliError> {
    Ok(ReferenceSolution::with_tolerance(g.tol.unwrap_or(DEFAULT_TOL))?)
}

fn solve(g: &GlobalOpts, points: usize, xmax: f64) -> CmdResult {
    if points < 100 {
        return Err(CliError::Usage(format!("--points must be at least 100, got {points}")));
    }
    if !(xmax > 1e-6 && xmax.is_finite()) {
        return Err(CliError::Usage(format!("--xmax must exceed 1e-6, got {xmax}")));
    }
    let table = reference(g)?.table(points, xmax)?;
    let text = match g.format {
        Format::Csv => table.to_csv(),
        Format::Json => pretty(&table.to_json()),
    };
    emit(g, &text)?;
    let summary = format!(
        "a = {}\nB = {}\n",
        fmt_g15(table.a),
        fmt_g15(binding_energy_from_slope(table.a))
    );
    // keep stdout clean when it carries the table
    if g.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn simplex_options(g: &GlobalOpts) -> SimplexOptions {
    let mut opts = SimplexOptions::default();
    if let Some(tol) = g.tol {
        opts.x_tol = tol;
    }
    opts
}

fn run_fit(g: &GlobalOpts, model: ModelName, mode: FitMode) -> Result<FitResult, CliError> {
    Ok(match model {
        ModelName::Sommerfeld => fit_sommerfeld(SOMMERFELD_START, &simplex_options(g))?,
        ModelName::Mueller2 => fit_mueller2(MUELLER2_START, &simplex_options(g))?,
        ModelName::Mueller1 => {
            let mode = match mode {
                FitMode::Normalized => Mueller1Mode::Normalized,
                FitMode::Slope => Mueller1Mode::NumericSlope,
                FitMode::Asymptotic => Mueller1Mode::Asymptotic,
            };
            let p = fit_mueller1(mode)?;
            let action = lagrangian_action_numeric(|x| Ok((p.chi(x)?, p.dchi(x)?)), &QuadratureConfig::default())?;
            FitResult {
                params: ModelParams::Mueller1(p),
                s_min: action.total,
                evaluations: 0,
                converged: true,
                simplex: None,
            }
        }
    })
}

fn fit(g: &GlobalOpts, model: ModelName, mode: FitMode) -> CmdResult {
    let result = run_fit(g, model, mode)?;
    emit(g, &pretty(&result.to_json()))?;
    if !result.converged {
        return Err(CliError::Numerical(format!(
            "{} fit did not converge after {} evaluations",
            model.as_str(),
            result.evaluations
        )));
    }
    if !g.no_cache {
        cache::store(&result.params)?;
    }
    Ok(())
}

fn published(model: ModelName) -> ModelParams {
    match model {
        ModelName::Sommerfeld => ModelParams::Sommerfeld(SommerfeldParams::variational()),
        ModelName::Mueller1 => ModelParams::Mueller1(Mueller1Params::normalized()),
        ModelName::Mueller2 => ModelParams::Mueller2(Mueller2Params::variational()),
    }
}

/// Parameters from `--params`, else the cache, else the published sets.
fn resolve_params(g: &GlobalOpts, model: ModelName, file: Option<&Path>) -> Result<ModelParams, CliError> {
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let p = ModelParams::from_json(&text)?;
        if p.name() != model.as_str() {
            return Err(CliError::Usage(format!(
                "{} holds {} parameters, expected {}",
                path.display(),
                p.name(),
                model.as_str()
            )));
        }
        return Ok(p);
    }
    if !g.no_cache {
        if let Some(p) = cache::load(model.as_str()) {
            return Ok(p);
        }
    }
    Ok(published(model))
}

fn eval(g: &GlobalOpts, model: ModelName, xs: &[f64], file: Option<&Path>) -> CmdResult {
    if let Some(x) = xs.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(CliError::Usage(format!(
            "radii must be finite and non-negative, got {x}"
        )));
    }
    let params = resolve_params(g, model, file)?;
    let m = params.as_model();
    let chi: Vec<f64> = xs.iter().map(|&x| m.chi(x)).collect::<Result<_, _>>()?;
    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("x,chi\n");
            for (x, c) in xs.iter().zip(&chi) {
                s.push_str(&format!("{},{}\n", fmt_g15(*x), fmt_g15(*c)));
            }
            s
        }
        Format::Json => pretty(&json!({
            "model": model.as_str(),
            "params": params,
            "x": xs,
            "chi": chi,
        })),
    };
    emit(g, &text)
}

fn build_grid(opts: &GridOpts) -> Result<Vec<f64>, CliError> {
    let GridOpts {
        xmin,
        xmax,
        count,
        spacing,
    } = *opts;
    if !(xmin >= 0.0 && xmin < xmax && xmax.is_finite()) {
        return Err(CliError::Usage(format!(
            "grid needs 0 <= xmin < xmax, got [{xmin}, {xmax}]"
        )));
    }
    if count < 2 {
        return Err(CliError::Usage(format!("grid needs at least 2 points, got {count}")));
    }
    Ok(match spacing {
        Spacing::Log => {
            if xmin <= 0.0 {
                return Err(CliError::Usage("log spacing needs xmin > 0".into()));
            }
            log_grid(xmin, xmax, count)
        }
        Spacing::Linear => (0..count)
            .map(|i| xmin + (xmax - xmin) * i as f64 / (count - 1) as f64)
            .collect(),
    })
}

fn sup_rel_cell(b: &RelErrorBound) -> String {
    match b {
        RelErrorBound::Finite(v) => fmt_g15(*v),
        RelErrorBound::InfiniteGrowth => "INFINITE-GROWTH".into(),
    }
}

fn compare(g: &GlobalOpts, requested: &[ModelName], all: bool, grid_opts: &GridOpts, fig1: Option<&Path>) -> CmdResult {
    let mut models: Vec<ModelName> = Vec::new();
    let source: &[ModelName] = if all || requested.is_empty() {
        &ModelName::ALL
    } else {
        requested
    };
    for m in source {
        if !models.contains(m) {
            models.push(*m);
        }
    }
    let grid = build_grid(grid_opts)?;
    let table: SolutionTable = reference(g)?.table(COMPARE_TABLE_POINTS, COMPARE_TABLE_XMAX)?;
    let params: Vec<ModelParams> = models
        .iter()
        .map(|&m| resolve_params(g, m, None))
        .collect::<Result<_, _>>()?;
    let reports: Vec<ErrorReport> = params
        .iter()
        .map(|p| {
            let m = p.as_model();
            error_scan(m.name(), |x| m.chi(x), &table, &grid)
        })
        .collect::<Result<_, _>>()?;

    let text = match g.format {
        Format::Csv => {
            let mut s = String::from("model,sup_abs,abs_class,sup_rel,rel_class\n");
            for r in &reports {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.model,
                    fmt_g15(r.sup_abs),
                    r.abs_class(),
                    sup_rel_cell(&r.sup_rel),
                    r.rel_class()
                ));
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = reports
                .iter()
                .zip(&params)
                .map(|(r, p)| {
                    json!({
                        "model": r.model,
                        "params": p,
                        "sup_abs": r.sup_abs,
                        "abs_class": r.abs_class(),
                        "sup_rel": r.sup_rel,
                        "rel_class": r.rel_class(),
                    })
                })
                .collect();
            pretty(&json!({ "a": table.a, "grid_points": grid.len(), "rows": rows }))
        }
    };
    emit(g, &text)?;

    if let Some(path) = fig1 {
        let dyn_models: Vec<&dyn ScreeningModel> = params.iter().map(|p| p.as_model()).collect();
        let data = fig1_dataset(&dyn_models, &table, &grid)?;
        let text = match g.format {
            Format::Csv => data.to_csv(),
            Format::Json => pretty(&data.to_json()),
        };
        write_file(path, &text)?;
    }
    Ok(())
}

fn units(g: &GlobalOpts, z: i64) -> CmdResult {
    let s = physical_scales(z)?;
    let text = match g.format {
        Format::Csv => format!(
            "Z,length_unit_bohr,energy_unit_rydberg\n{},{},{}\n",
            s.z,
            fmt_g15(s.length_unit),
            fmt_g15(s.energy_unit)
        ),
        Format::Json => pretty(&serde_json::to_value(s).expect("scales serialize")),
    };
    emit(g, &text)
}
