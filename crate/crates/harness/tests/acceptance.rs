//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use nsk_core::besov::refined_sobolev_ratio;
use nsk_core::constitutive::{CapillarityModel, Laws, PressureLaw, ViscosityModel};
use nsk_core::diagnostics::{gain_norm, integrability_gain, DiagnosticsSpec};
use nsk_core::solver::{run, SimulationConfig, Solver, Termination};
use nsk_core::{Grid, Spectral};
use nsk_harness::scenario::{build_initial, random_smooth_field, Scenario, ScenarioId};
use nsk_harness::verify::{
    budget_refinement, capillary_power_check, conservation_check, measure_dispersion, operator_algebra,
    partition_check, pi_j_gamma_identity, renormalized_check, tensor_equivalence, verify_suite, BudgetSetup,
    DispersionSetup, Level, PARTITION_C1, PARTITION_C2, PARTITION_LAMBDAS, TENSOR_ALPHAS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Line {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn criterion(id: u32, title: &'static str, f: impl FnOnce() -> Outcome) -> Line {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let line = Line { id, title, passed, detail: format!("{} [{:.1} s]", detail, t.elapsed().as_secs_f64()) };
    println!("[{}] criterion {:>2}: {}: {}", if line.passed { "PASS" } else { "FAIL" }, line.id, line.title, line.detail);
    line
}

fn tensor() -> Outcome {
    let (mut worst, mut slowest) = (0.0f64, 0.0f64);
    for (dim, n) in [(1, 128), (2, 128)] {
        for &a in &TENSOR_ALPHAS {
            let t = Instant::now();
            worst = worst.max(tensor_equivalence(a, dim, n)?);
            slowest = slowest.max(t.elapsed().as_secs_f64());
        }
    }
    Ok((worst <= 1e-8 && slowest < 1.0, format!("max residual {worst:.3e} <= 1e-8, slowest case {slowest:.3} s < 1 s")))
}

fn capillary_power() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..5 {
        worst = worst.max(capillary_power_check(Grid::new(1, 128, TAU)?, seed)?);
        worst = worst.max(capillary_power_check(Grid::new(2, 64, TAU)?, 100 + seed)?);
    }
    Ok((worst <= 1e-8, format!("max relative residual {worst:.3e} <= 1e-8 over 7 models, 10 random (rho, u)")))
}

fn budget() -> Outcome {
    let base = BudgetSetup::default();
    let config = base.config()?;
    let solver = Solver::new(config.grid, config.laws.clone(), config.rho_floor);
    let dt0 = solver.stable_timestep(&base.initial()?, base.cfl);
    let mut r = [0.0; 3];
    for (i, f) in [1.0, 0.5, 0.25].into_iter().enumerate() {
        r[i] = BudgetSetup { max_dt: Some(dt0 * f), ..base }.relative_residual()?;
    }
    let floor = 1e-12;
    let halving_ok = (0..2).all(|i| r[i] / r[i + 1] >= 8.0 || r[i] <= floor);
    let coarse = budget_refinement()?;
    let coarse_ratio = (coarse[0] / coarse[1]).min(coarse[1] / coarse[2]);
    Ok((
        r[0] <= 1e-6 && halving_ok && coarse_ratio >= 8.0,
        format!(
            "n=512: max|r|/E0 = {:.2e}, {:.2e}, {:.2e} at dt, dt/2, dt/4 (<= 1e-6; halving >= 8x or <= {floor:.0e} floor); n=32 halving ratio {coarse_ratio:.1} >= 8",
            r[0], r[1], r[2]
        ),
    ))
}

fn dispersion() -> Outcome {
    let m = measure_dispersion(DispersionSetup::new(1))?;
    Ok((
        m.relative_error <= 5e-3,
        format!("omega {:.8} vs {:.8}, relative error {:.3e} <= 5e-3", m.omega, m.omega_theory, m.relative_error),
    ))
}

fn pi_j() -> Outcome {
    let r = [1.4, 2.0, 3.0].map(pi_j_gamma_identity);
    let worst = r.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
    Ok((worst <= 1e-12, format!("max gap {worst:.3e} <= 1e-12 over 1000 s for gamma in {{1.4, 2, 3}}")))
}

fn operators() -> Outcome {
    let mut worst = [0.0f64; 4];
    for seed in 0..4 {
        for (dim, n) in [(1, 128), (2, 64)] {
            let r = operator_algebra(Grid::new(dim, n, TAU)?, seed)?;
            for (w, v) in worst.iter_mut().zip(r) {
                *w = w.max(v);
            }
        }
    }
    let m = worst.iter().cloned().fold(0.0, f64::max);
    Ok((
        m <= 1e-12,
        format!(
            "composition {:.1e}, riesz {:.1e}, parseval {:.1e}, adjoint {:.1e} (all <= 1e-12)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

fn conservation() -> Outcome {
    let (dm, dp) = conservation_check(10_000)?;
    Ok((dm <= 1e-12 && dp <= 1e-10, format!("mass drift {dm:.2e} <= 1e-12, momentum drift {dp:.2e} <= 1e-10 over 1e4 steps")))
}

fn laws(kappa_model: CapillarityModel, mu: f64) -> Laws {
    Laws::new(PressureLaw::new(1.0, 2.0, 1.0).unwrap(), ViscosityModel::constant(mu, 0.0), kappa_model)
}

/// Runs the scenario on `grid` and returns its series.
fn scenario_series(
    id: ScenarioId,
    amplitude: f64,
    grid: Grid,
    laws: Laws,
    t_end: f64,
    s: f64,
) -> Result<nsk_core::diagnostics::DiagnosticsSeries, Box<dyn std::error::Error>> {
    let scenario = Scenario { amplitude, wavenumber: 3, seed: 42, ..Scenario::new(id) };
    let mut config = SimulationConfig::new(grid, laws, t_end);
    config.cfl_factor = 0.5;
    config.output_interval = t_end / 20.0;
    config.diagnostics = DiagnosticsSpec { s, ..DiagnosticsSpec::default_for(&grid) };
    let init = build_initial(&scenario, &grid, &config.laws, config.rho_floor)?;
    let out = run(&config, init.state, None)?;
    if out.termination != Termination::Completed {
        return Err(format!("run ended early: {:?}", out.termination).into());
    }
    Ok(out.series)
}

fn drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn gain() -> Outcome {
    let mut g2 = [0.0; 2];
    for (i, n) in [64, 128].into_iter().enumerate() {
        let grid = Grid::new(2, n, TAU)?;
        let cap = CapillarityModel::power_law(0.01, 0.0, 1.0)?;
        let series = scenario_series(ScenarioId::SmallData2d, 1e-3, grid, laws(cap, 0.01), 0.5, 1.0)?;
        g2[i] = gain_norm(&series, &series.spec().phi, 1.0)?;
    }
    let mut g1 = [0.0; 2];
    for (i, n) in [256, 512].into_iter().enumerate() {
        let grid = Grid::new(1, n, TAU)?;
        let cap = CapillarityModel::power_law(0.01, 0.0, 1.0)?;
        let series = scenario_series(ScenarioId::LargeData1d, 0.5, grid, laws(cap, 0.05), 0.5, 0.4)?;
        g1[i] = gain_norm(&series, &series.spec().phi, 0.4)?;
    }
    let (d2, d1) = (drift(g2[0], g2[1]), drift(g1[0], g1[1]));
    Ok((
        d2 < 0.05 && d1 < 0.05,
        format!(
            "2D s=1: {:.6e} -> {:.6e} (drift {d2:.2e}); 1D s=0.4: {:.6e} -> {:.6e} (drift {d1:.2e}); both < 5%",
            g2[0], g2[1], g1[0], g1[1]
        ),
    ))
}

fn critical() -> Outcome {
    let mut v = [[0.0; 2]; 2];
    for (i, n) in [64, 128].into_iter().enumerate() {
        let grid = Grid::new(2, n, TAU)?;
        let cap = CapillarityModel::critical(0.01, 1.0)?;
        let series = scenario_series(ScenarioId::CriticalCapillarity, 1e-3, grid, laws(cap, 0.01), 0.5, 1.0)?;
        let g = integrability_gain(&series, &series.spec().phi, series.spec().alpha_gain)?;
        v[i] = [g.norm_gamma_alpha, g.weighted_gradient];
    }
    let finite = v.iter().flatten().all(|x| x.is_finite());
    let (d0, d1) = (drift(v[0][0], v[1][0]), drift(v[0][1], v[1][1]));
    Ok((
        finite && d0 < 0.05 && d1 < 0.05,
        format!(
            "norm {:.6e} -> {:.6e} (drift {d0:.2e}), weighted gradient {:.6e} -> {:.6e} (drift {d1:.2e}); finite, < 5%",
            v[0][0], v[1][0], v[0][1], v[1][1]
        ),
    ))
}

fn partition() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for &l in &PARTITION_LAMBDAS {
        let m = partition_check(l)?;
        ok &= m.sum_error <= 1e-12 && m.outside_support == 0.0 && m.c1 <= PARTITION_C1 && m.c2 <= PARTITION_C2;
        parts.push(format!("lambda {l}: sum err {:.1e}, C1 {:.3}, C2 {:.2}", m.sum_error, m.c1, m.c2));
    }
    Ok((ok, format!("{} (C1 <= {PARTITION_C1}, C2 <= {PARTITION_C2})", parts.join("; "))))
}

fn renormalized() -> Outcome {
    let mut worst = 0.0f64;
    let mut collapse = 0.0f64;
    for (dim, alpha) in [(1, 0.0), (1, 1.0), (1, -3.0), (2, -1.0), (2, 2.0)] {
        let (r, c) = renormalized_check(dim, alpha)?;
        worst = worst.max(r);
        collapse = collapse.max(c);
    }
    Ok((
        worst <= 1e-6 && collapse <= 1e-15,
        format!("max relative residual {worst:.2e} <= 1e-6; alpha=0 collapse gap {collapse:.1e}"),
    ))
}

fn refined_sobolev() -> Outcome {
    let (p, q, alpha) = (4.0, 2.0, 1.0);
    let mut constants = Vec::new();
    for (dim, ns, kmax) in [(1, [128, 256], 12), (2, [32, 64], 6)] {
        for n in ns {
            let grid = Grid::new(dim, n, TAU)?;
            let sp = Spectral::new(grid);
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let mut c = 0.0f64;
            for _ in 0..100 {
                let f = random_smooth_field(&grid, &mut rng, kmax);
                let r = refined_sobolev_ratio(&sp, &f, p, q, alpha)?;
                if !r.is_finite() {
                    return Ok((false, format!("non-finite ratio at dim {dim}, n {n}")));
                }
                c = c.max(r);
            }
            constants.push((dim, n, c));
        }
    }
    let spread = |a: f64, b: f64| a.max(b) / a.min(b);
    let s1 = spread(constants[0].2, constants[1].2);
    let s2 = spread(constants[2].2, constants[3].2);
    Ok((
        s1 < 2.0 && s2 < 2.0,
        format!(
            "empirical C: 1D {:.4} (n=128) {:.4} (n=256), 2D {:.4} (n=32) {:.4} (n=64); spreads {s1:.3}, {s2:.3} < 2",
            constants[0].2, constants[1].2, constants[2].2, constants[3].2
        ),
    ))
}

fn timing() -> Outcome {
    let quick = verify_suite(Level::Quick);
    let full = verify_suite(Level::Full);
    Ok((
        quick.passed() && full.passed() && quick.seconds < 60.0 && full.seconds < 900.0,
        format!(
            "quick {:.1} s < 60 s ({} failures), full {:.1} s < 900 s ({} failures)",
            quick.seconds,
            quick.failures().len(),
            full.seconds,
            full.failures().len()
        ),
    ))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let lines = [
        criterion(1, "tensor-form equivalence", tensor),
        criterion(2, "capillary-power identity", capillary_power),
        criterion(3, "energy budget", budget),
        criterion(4, "dispersion relation", dispersion),
        criterion(5, "pressure potential identity", pi_j),
        criterion(6, "operator algebra", operators),
        criterion(7, "mass and momentum conservation", conservation),
        criterion(8, "gain-of-derivative refinement", gain),
        criterion(9, "critical-capillarity integrability refinement", critical),
        criterion(10, "partition of unity", partition),
        criterion(11, "renormalized-equation residual", renormalized),
        criterion(12, "refined Sobolev inequality", refined_sobolev),
        criterion(13, "verification suite runtime", timing),
    ];
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
