//! Executing a configured scenario and persisting its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use nsk_core::diagnostics::{
    concentration_scan, gain_norm, integrability_gain, large_kappa_check, orlicz_energy_check, DiagnosticsSeries,
};
use nsk_core::constitutive::CapillarityLaw;
use nsk_core::solver::{run, Termination};
use nsk_core::Spectral;
use serde::{Deserialize, Serialize};

use crate::config::{Config, RunConfig};
use crate::scenario::{build_initial, InitialNorms, ScenarioId};

pub const SERIES_FILE: &str = "series.csv";
pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("io error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] nsk_core::Error),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_owned(), source }
}

/// Non-finite numbers are written as strings so the report stays valid JSON.
mod lossless {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One check with the measured number and its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    #[serde(with = "lossless")]
    pub measured: f64,
    #[serde(with = "lossless")]
    pub tolerance: f64,
    /// `"<="` or `">="`.
    pub comparison: String,
    pub passed: bool,
}

impl Verdict {
    pub fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, comparison: "<=".into(), passed: measured <= tolerance }
    }

    pub fn at_least(name: &str, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, comparison: ">=".into(), passed: measured >= tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum TerminationRecord {
    NotRun,
    Completed { time: f64 },
    VacuumApproached { time: f64, rho_min: f64, floor: f64 },
    NonFinite { time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilitySummary {
    pub norm_gamma_alpha: f64,
    pub weighted_gradient: f64,
}

/// Last recorded row plus the trajectory functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalDiagnostics {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub energy: f64,
    pub gamma_energy: f64,
    pub diss_cum_a29: f64,
    pub diss_cum_ineq1: f64,
    pub budget_residual: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub cap_energy: f64,
    pub concentration_max: f64,
    pub concentration_center: [f64; 2],
    pub gain_norm: f64,
    pub sup_orlicz: f64,
    pub sup_h1: f64,
    pub large_kappa_constant: f64,
    pub sup_grad_a: f64,
    pub integrability: Option<IntegrabilitySummary>,
    pub manufactured_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub dry_run: bool,
    pub termination: TerminationRecord,
    pub steps: usize,
    pub initial: InitialNorms,
    pub final_diagnostics: Option<FinalDiagnostics>,
    pub checks: Vec<Verdict>,
    pub passed: bool,
}

/// A finished run kept in memory.
#[derive(Debug, Clone)]
pub struct Execution {
    pub report: RunReport,
    pub series: Option<DiagnosticsSeries>,
}

/// Integrates the scenario and evaluates every per-run check.
pub fn execute(config: &Config, dry_run: bool) -> Result<Execution, HarnessError> {
    let sim = &config.simulation;
    let initial = build_initial(&config.scenario, &sim.grid, &sim.laws, sim.rho_floor)?;
    let mut report = RunReport {
        config: config.echo.clone(),
        dry_run,
        termination: TerminationRecord::NotRun,
        steps: 0,
        initial: initial.norms,
        final_diagnostics: None,
        checks: Vec::new(),
        passed: true,
    };
    if dry_run {
        return Ok(Execution { report, series: None });
    }

    let manufactured = config.scenario.manufactured(&sim.grid, &sim.laws);
    let forcing = manufactured.as_ref().map(|m| move |t: f64| m.forcing(t));
    let outcome = match &forcing {
        Some(f) => run(sim, initial.state, Some(f))?,
        None => run(sim, initial.state, None)?,
    };
    report.steps = outcome.steps;
    report.termination = match outcome.termination {
        Termination::Completed => TerminationRecord::Completed { time: outcome.state.time() },
        Termination::VacuumApproached { time, rho_min, floor } => {
            TerminationRecord::VacuumApproached { time, rho_min, floor }
        }
        Termination::NonFinite { time } => TerminationRecord::NonFinite { time },
    };

    let series = outcome.series;
    let samples = series.samples();
    let first = &samples[0];
    let scenario = config.scenario.id;
    let mut checks = Vec::new();

    let mass_drift = samples.iter().map(|s| (s.mass - first.mass).abs()).fold(0.0, f64::max) / first.mass;
    checks.push(Verdict::at_most("mass_conservation", mass_drift, 1e-12));
    if manufactured.is_none() {
        let mom_drift = samples
            .iter()
            .flat_map(|s| s.momentum.iter().zip(&first.momentum).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        checks.push(Verdict::at_most("momentum_conservation", mom_drift, 1e-10));
    }
    let e_scale = samples.iter().map(|s| s.energy.abs()).fold(1.0, f64::max);
    let gamma_gap = samples.iter().map(|s| (s.energy - s.gamma_energy).abs()).fold(0.0, f64::max);
    checks.push(Verdict::at_most("gamma_energy_identity", gamma_gap, 1e-10 * e_scale));

    let floor = sim.rho_floor;
    let rho_min = samples.iter().map(|s| s.rho_min).fold(f64::INFINITY, f64::min);
    checks.push(Verdict::at_least("density_floor", rho_min, floor));

    let completed = matches!(report.termination, TerminationRecord::Completed { .. });
    if scenario != ScenarioId::VacuumApproach {
        let reached = series.last().map_or(0.0, |s| s.t).max(outcome.state.time());
        checks.push(Verdict {
            passed: completed,
            ..Verdict::at_least("completed", reached, sim.t_end)
        });
    }
    if manufactured.is_none() && completed && scenario != ScenarioId::VacuumApproach {
        let r = samples.iter().map(|s| s.budget_residual.abs()).fold(0.0, f64::max);
        checks.push(Verdict::at_most("energy_budget", r, 1e-6 * first.energy + 1e-14));
    }

    let mut manufactured_error = None;
    if let Some(m) = &manufactured {
        let exact = m.exact(outcome.state.time())?;
        let err_rho = (outcome.state.rho() - exact.rho()).max_abs() / exact.rho().max_abs();
        let err_m = (0..sim.grid.dim())
            .map(|i| (outcome.state.momentum().component(i) - exact.momentum().component(i)).max_abs())
            .fold(0.0, f64::max)
            / exact.rho().max_abs();
        let err = err_rho.max(err_m);
        manufactured_error = Some(err);
        checks.push(Verdict::at_most("manufactured_error", err, 1e-6));
    }

    let sp = Spectral::new(sim.grid);
    let last = series.last().expect("initial sample is always recorded").clone();
    let spec = series.spec();
    let conc = concentration_scan(&sp, outcome.state.rho(), spec.ball_radius, &sim.laws.capillarity)?;
    let gain = if series.len() >= 2 { gain_norm(&series, &spec.phi, spec.s)? } else { 0.0 };
    let orlicz = orlicz_energy_check(&series)?;
    let large_kappa = large_kappa_check(&series)?;
    let integrability = if matches!(sim.laws.capillarity.law(), CapillarityLaw::Critical { .. }) && series.len() >= 2 {
        let g = integrability_gain(&series, &spec.phi, spec.alpha_gain)?;
        Some(IntegrabilitySummary { norm_gamma_alpha: g.norm_gamma_alpha, weighted_gradient: g.weighted_gradient })
    } else {
        None
    };
    report.final_diagnostics = Some(FinalDiagnostics {
        t: last.t,
        mass: last.mass,
        momentum: last.momentum,
        energy: last.energy,
        gamma_energy: last.gamma_energy,
        diss_cum_a29: last.diss_cum_a29,
        diss_cum_ineq1: last.diss_cum_ineq1,
        budget_residual: last.budget_residual,
        rho_min: last.rho_min,
        rho_max: last.rho_max,
        cap_energy: last.cap_energy,
        concentration_max: conc.max_value,
        concentration_center: conc.center,
        gain_norm: gain,
        sup_orlicz: orlicz.sup_orlicz,
        sup_h1: orlicz.sup_h1,
        large_kappa_constant: large_kappa.constant,
        sup_grad_a: large_kappa.sup_grad_a,
        integrability,
        manufactured_error,
    });
    report.passed = checks.iter().all(|c| c.passed);
    report.checks = checks;
    Ok(Execution { report, series: Some(series) })
}

/// CSV header for a grid of the given dimension.
pub fn series_header(dim: usize) -> Vec<&'static str> {
    let mut h = vec!["t", "mass", "mom_x"];
    if dim == 2 {
        h.push("mom_y");
    }
    h.extend([
        "E",
        "E_gamma",
        "diss_cum_a29",
        "diss_cum_ineq1",
        "budget_residual",
        "rho_min",
        "rho_max",
        "cap_energy",
        "concentration_max",
    ]);
    h
}

pub fn write_series(path: &Path, series: &DiagnosticsSeries) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(series_header(series.grid().dim()))?;
    for s in series.samples() {
        let mut row = vec![s.t, s.mass];
        row.extend(&s.momentum);
        row.extend([
            s.energy,
            s.gamma_energy,
            s.diss_cum_a29,
            s.diss_cum_ineq1,
            s.budget_residual,
            s.rho_min,
            s.rho_max,
            s.cap_energy,
            s.concentration_max,
        ]);
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Runs the scenario and writes `report.json` (and `series.csv` unless
/// `dry_run`) into `out_dir`.
pub fn run_scenario(config: &Config, out_dir: &Path, dry_run: bool) -> Result<RunReport, HarnessError> {
    let exec = execute(config, dry_run)?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    if let Some(series) = &exec.series {
        write_series(&out_dir.join(SERIES_FILE), series)?;
    }
    let path = out_dir.join(REPORT_FILE);
    let text = serde_json::to_string_pretty(&exec.report)?;
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(exec.report)
}

/// Runs independent scenarios concurrently, one thread and one output
/// directory each.
pub fn run_batch(jobs: &[(Config, PathBuf)], dry_run: bool) -> Vec<Result<RunReport, HarnessError>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(config, dir)| scope.spawn(move || run_scenario(config, dir, dry_run)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    })
}

pub fn read_report(run_dir: &Path) -> Result<RunReport, HarnessError> {
    let path = run_dir.join(REPORT_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Header and rows of `series.csv`.
pub fn read_series(run_dir: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), HarnessError> {
    let mut r = csv::Reader::from_path(run_dir.join(SERIES_FILE))?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| {
            HarnessError::Io { path: run_dir.join(SERIES_FILE), source: std::io::Error::other(e) }
        })?);
    }
    Ok((header, rows))
}
