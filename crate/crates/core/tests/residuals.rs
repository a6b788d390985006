use std::f64::consts::TAU;

use nsk_core::constitutive::{CapillarityModel, Laws, PressureLaw, ViscosityModel};
use nsk_core::diagnostics::{
    energy_budget, localized_budget, localized_energy, renormalized_residual, weak_form_residual, DiagnosticsSeries,
    TestFunctionSpec,
};
use nsk_core::solver::{run, RunOutcome, SimulationConfig};
use nsk_core::{FlowState, Grid, ScalarField, Spectral, VectorField};

fn laws(gamma: f64) -> Laws {
    Laws::new(
        PressureLaw::new(1.0, gamma, 1.0).unwrap(),
        ViscosityModel::constant(0.01, 0.0),
        CapillarityModel::power_law(0.01, 1.0, 1.0).unwrap(),
    )
}

fn smooth_run() -> RunOutcome {
    let grid = Grid::new(1, 64, TAU).unwrap();
    let rho = ScalarField::from_fn(grid, |x| 1.0 + 0.1 * x[0].sin() + 0.05 * (2.0 * x[0]).cos());
    let u = VectorField::new(vec![ScalarField::from_fn(grid, |x| 0.1 * x[0].cos())]).unwrap();
    let mut config = SimulationConfig::new(grid, laws(2.0), 0.3);
    config.output_interval = 0.005;
    config.cfl_factor = 0.5;
    run(&config, FlowState::from_velocity(rho, &u, 0.0).unwrap(), None).unwrap()
}

fn bumps() -> Vec<TestFunctionSpec> {
    [1.0, 3.0, 5.0].iter().map(|&c| TestFunctionSpec::Bump { center: [c, 0.0], radius: 1.2, order: 6 }).collect()
}

#[test]
fn residuals_vanish_on_a_resolved_run() {
    let out = smooth_run();
    let series = &out.series;
    let phi = TestFunctionSpec::Bump { center: [3.0, 0.0], radius: 1.5, order: 8 };
    for offset in [0.0, 0.005, 1.0] {
        let r = renormalized_residual(series, &phi, offset).unwrap();
        assert!(r.iter().all(|&(_, v)| v < 1e-5), "offset {offset}: {r:?}");
    }
    let local = localized_budget(series, &phi).unwrap();
    let a0 = localized_energy(&Spectral::new(*series.grid()), &series.states()[0], &phi, series.laws()).unwrap();
    assert!(local.iter().all(|v| v.abs() < 1e-5 * a0));
    assert!(energy_budget(series).iter().all(|v| v.abs() < 1e-10));
    assert!(weak_form_residual(series, &bumps()).unwrap().max_relative() < 1e-5);
}

#[test]
fn weak_form_detects_the_wrong_pressure_law() {
    let out = smooth_run();
    let series = &out.series;
    let wrong = DiagnosticsSeries::from_states(
        *series.grid(),
        laws(1.4),
        series.spec().clone(),
        series.states().to_vec(),
    )
    .unwrap();
    let good = weak_form_residual(series, &bumps()).unwrap();
    let bad = weak_form_residual(&wrong, &bumps()).unwrap();
    assert!(bad.max_relative() > 1e3 * good.max_relative());
    assert!(bad.mass.iter().zip(&good.mass).all(|(a, b)| (a - b).abs() < 1e-12));
}
