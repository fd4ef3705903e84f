use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use itolab::brownian::sample_paths;
use itolab::calibrate::{calibrate, log_returns, Calibration, CalibrationMode, PriceSeries};
use itolab::formats;
use itolab::ito::{self, BuiltinIntegrand, IsometryReport};
use itolab::montecarlo::{correlation_trace, CorrelationBasis, CorrelationTrace};
use itolab::sde::{simulate_ensemble, GbmParams};
use itolab::TimeGrid;

use crate::args::{self, BasisArg, Cli, Command, IntegrandArg, ModeArg};
use crate::error::CliError;
use crate::output::{commit, to_json, Artifact, Manifest};

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match cli.threads {
        Some(0) => Err(CliError::flag("threads", "must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| execute(&cli.command)),
        None => execute(&cli.command),
    }
}

fn execute(command: &Command) -> Result<(), CliError> {
    let name = command.name();
    match command {
        Command::SimulateBm(a) => simulate_bm(name, a),
        Command::ItoDemo(a) => ito_demo(name, a),
        Command::Calibrate(a) => calibrate_cmd(name, a),
        Command::Project(a) => project(name, a),
        Command::Correlate(a) => correlate(name, a),
        Command::Experiment(a) => experiment(name, a),
    }
}

fn ensure_finite(what: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("non-finite value in {what}")))
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> itolab::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn horizon(t_end: f64, steps: usize) -> Result<TimeGrid, CliError> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(CliError::flag(
            "t-end",
            format!("must be positive, got {t_end}"),
        ));
    }
    if steps == 0 {
        return Err(CliError::flag("steps", "must be at least 1"));
    }
    Ok(TimeGrid::uniform(0.0, t_end, steps)?)
}

fn simulate_bm(cmd: &str, a: &args::SimulateBm) -> Result<(), CliError> {
    let grid = horizon(a.t_end, a.steps)?;
    if a.paths == 0 {
        return Err(CliError::flag("paths", "must be at least 1"));
    }
    let paths = sample_paths(&grid, a.seed, a.paths);
    let bytes = csv_bytes(|w| formats::write_wide(w, &grid, paths.iter().map(|p| p.values())))?;
    let manifest = Manifest::new(cmd, a, Some(a.seed), &[])?;
    commit(&[Artifact::new(a.out.clone(), bytes, &manifest)?])
}

#[derive(Serialize)]
struct ItoReport {
    integrand: BuiltinIntegrand,
    t_end: f64,
    steps: usize,
    levels: usize,
    n_paths: usize,
    mesh: Vec<f64>,
    l2_distance: Vec<f64>,
    isometry: IsometryReport,
}

fn ito_demo(cmd: &str, a: &args::ItoDemo) -> Result<(), CliError> {
    let base = horizon(a.t_end, a.steps)?;
    if a.levels < 2 {
        return Err(CliError::flag("levels", "must be at least 2"));
    }
    if a.paths < 2 {
        return Err(CliError::flag("paths", "must be at least 2"));
    }
    let integrand = match a.integrand {
        IntegrandArg::One => BuiltinIntegrand::One,
        IntegrandArg::Bm => BuiltinIntegrand::Brownian,
        IntegrandArg::SinBm => BuiltinIntegrand::SinBrownian,
    };
    let diagnostic = ito::convergence_diagnostic(&integrand, &base, a.levels, a.paths, a.seed)?;
    let isometry = ito::isometry_check(&integrand, &base, a.paths, a.seed)?;
    let report = ItoReport {
        integrand,
        t_end: a.t_end,
        steps: a.steps,
        levels: a.levels,
        n_paths: a.paths,
        mesh: diagnostic.iter().map(|p| p.mesh).collect(),
        l2_distance: diagnostic.iter().map(|p| p.l2_distance).collect(),
        isometry,
    };
    ensure_finite("l2_distance", &report.l2_distance)?;
    ensure_finite("isometry", &[isometry.lhs, isometry.rhs, isometry.rel_err])?;
    let manifest = Manifest::new(cmd, a, Some(a.seed), &[])?;
    commit(&[Artifact::new(a.out.clone(), to_json(&report)?, &manifest)?])
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    gamma: f64,
    sigma: f64,
    mode: CalibrationMode,
    n_returns: usize,
    start_date: String,
    end_date: String,
}

fn mode_of(m: ModeArg) -> CalibrationMode {
    match m {
        ModeArg::Standard => CalibrationMode::Standard,
        ModeArg::Paper => CalibrationMode::Paper,
    }
}

fn basis_of(b: BasisArg) -> CorrelationBasis {
    match b {
        BasisArg::Levels => CorrelationBasis::Levels,
        BasisArg::Log => CorrelationBasis::LogPrices,
    }
}

fn read_prices(path: &Path) -> Result<PriceSeries, CliError> {
    formats::read_prices_file(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn calibration_file(
    series: &PriceSeries,
    mode: CalibrationMode,
) -> Result<(Calibration, ParamsFile), CliError> {
    let cal = calibrate(&log_returns(series)?, mode)?;
    ensure_finite(
        "calibrated parameters",
        &[cal.params.gamma, cal.params.sigma],
    )?;
    let date = |d: NaiveDate| d.format("%Y-%m-%d").to_string();
    let file = ParamsFile {
        gamma: cal.params.gamma,
        sigma: cal.params.sigma,
        mode: cal.mode,
        n_returns: cal.n_returns,
        start_date: date(series.first_date()),
        end_date: date(series.last_date()),
    };
    Ok((cal, file))
}

fn calibrate_cmd(cmd: &str, a: &args::Calibrate) -> Result<(), CliError> {
    let series = read_prices(&a.input)?.window(a.start, a.end)?;
    let (_, file) = calibration_file(&series, mode_of(a.mode))?;
    let manifest = Manifest::new(cmd, a, None, &[&a.input])?;
    commit(&[Artifact::new(a.out.clone(), to_json(&file)?, &manifest)?])
}

fn gbm_params(gamma: f64, sigma: f64) -> Result<GbmParams, CliError> {
    GbmParams::new(gamma, sigma).map_err(|e| match e {
        itolab::Error::InvalidArgument { name, reason } => CliError::flag(name, reason),
        other => other.into(),
    })
}

fn project(cmd: &str, a: &args::Project) -> Result<(), CliError> {
    let (params, inputs): (GbmParams, Vec<&Path>) = match (&a.params, a.gamma, a.sigma) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            let file: ParamsFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            (gbm_params(file.gamma, file.sigma)?, vec![path.as_path()])
        }
        (None, Some(g), Some(s)) => (gbm_params(g, s)?, vec![]),
        _ => {
            return Err(CliError::Usage(
                "need --gamma and --sigma, or --params".into(),
            ))
        }
    };
    if !(a.initial.is_finite() && a.initial > 0.0) {
        return Err(CliError::flag(
            "initial",
            format!("must be positive, got {}", a.initial),
        ));
    }
    if a.days == 0 {
        return Err(CliError::flag("days", "must be at least 1"));
    }
    if a.paths == 0 {
        return Err(CliError::flag("paths", "must be at least 1"));
    }
    let grid = TimeGrid::uniform(0.0, a.days as f64, a.days)?;
    let ensemble = simulate_ensemble(params, &grid, a.initial, a.paths, a.seed)?;
    let bytes = csv_bytes(|w| formats::write_ensemble(w, &ensemble))?;
    let manifest = Manifest::new(cmd, a, Some(a.seed), &inputs)?;
    commit(&[Artifact::new(a.out.clone(), bytes, &manifest)?])
}

fn trace_bytes(trace: &CorrelationTrace) -> Result<Vec<u8>, CliError> {
    if !trace.excluded.is_empty() {
        eprintln!(
            "ito-lab: warning: {} constant path(s) excluded from the correlation trace",
            trace.excluded.len()
        );
    }
    if trace.is_empty() {
        return Err(CliError::Numerical(
            "correlation undefined for every path (constant series)".into(),
        ));
    }
    csv_bytes(|w| formats::write_trace(w, trace))
}

fn correlate(cmd: &str, a: &args::Correlate) -> Result<(), CliError> {
    let ensemble = formats::read_ensemble_file(&a.ensemble)
        .map_err(|e| CliError::Validation(format!("{}: {e}", a.ensemble.display())))?;
    let historical = read_prices(&a.historical)?;
    let trace = correlation_trace(&ensemble, &historical, basis_of(a.on))?;
    let bytes = trace_bytes(&trace)?;
    let manifest = Manifest::new(cmd, a, None, &[&a.ensemble, &a.historical])?;
    commit(&[Artifact::new(a.out.clone(), bytes, &manifest)?])
}

fn experiment(cmd: &str, a: &args::Experiment) -> Result<(), CliError> {
    let series = read_prices(&a.input)?;
    let test = series
        .window(Some(a.test_start), a.test_end)
        .map_err(|e| CliError::flag("test-start", e))?;
    if test.len() < 2 {
        return Err(CliError::flag(
            "test-start",
            "projection window needs at least 2 observations",
        ));
    }
    let calib_end = match a.calib_end {
        Some(d) => d,
        None => a
            .test_start
            .pred_opt()
            .ok_or_else(|| CliError::flag("test-start", "no date precedes it"))?,
    };
    let calib = series
        .window(a.calib_start, Some(calib_end))
        .map_err(|e| CliError::flag("calib-end", e))?;
    let (cal, params_file) = calibration_file(&calib, mode_of(a.mode))?;
    if a.paths == 0 {
        return Err(CliError::flag("paths", "must be at least 1"));
    }

    let days = test.len() - 1;
    let grid = TimeGrid::uniform(0.0, days as f64, days)?;
    let initial = test.observations()[0].1;
    let ensemble = simulate_ensemble(cal.params, &grid, initial, a.paths, a.seed)?;
    let trace = correlation_trace(&ensemble, &test, basis_of(a.on))?;

    let dir: &PathBuf = &a.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let manifest = Manifest::new(cmd, a, Some(a.seed), &[&a.input])?;
    let artifacts = [
        Artifact::new(dir.join("params.json"), to_json(&params_file)?, &manifest)?,
        Artifact::new(
            dir.join("historical.csv"),
            csv_bytes(|w| formats::write_prices(w, &test))?,
            &manifest,
        )?,
        Artifact::new(
            dir.join("ensemble.csv"),
            csv_bytes(|w| formats::write_ensemble(w, &ensemble))?,
            &manifest,
        )?,
        Artifact::new(dir.join("trace.csv"), trace_bytes(&trace)?, &manifest)?,
    ];
    commit(&artifacts)?;
    if let Some(m) = trace.final_mean() {
        println!(
            "gamma={:.10} sigma={:.10} mode={} paths={} cor^N={:.6}",
            cal.params.gamma,
            cal.params.sigma,
            cal.mode,
            trace.len(),
            m
        );
    }
    Ok(())
}
