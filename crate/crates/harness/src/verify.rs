//! The verification suite: identity checks with measured values, at a quick
//! or a full level.

use std::f64::consts::TAU;
use std::time::Instant;

use nsk_core::constitutive::{CapillarityLaw, CapillarityModel, Laws, PressureLaw, ViscosityModel};
use nsk_core::diagnostics::{
    localized_budget, localized_energy, partition_of_unity, renormalized_coefficient, renormalized_residual,
    weak_form_residual, DiagnosticsSpec, Region, TestFunctionSpec,
};
use nsk_core::korteweg::{capillary_power_residual, equivalence_residual};
use nsk_core::solver::{run_with, SimulationConfig, Solver, Termination};
use nsk_core::{FlowState, Grid, ScalarField, Spectral, VectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::manufactured::Manufactured;
use crate::run::Verdict;
use crate::scenario::random_smooth_field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

/// Verdicts of one check and its wall time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckGroup {
    pub name: String,
    pub verdicts: Vec<Verdict>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: Level,
    pub groups: Vec<CheckGroup>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().flat_map(|g| &g.verdicts).all(|v| v.passed)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.groups.iter().flat_map(|g| &g.verdicts).filter(|v| !v.passed).collect()
    }
}

fn failed(name: &str, e: impl std::fmt::Display) -> Verdict {
    eprintln!("{name}: {e}");
    Verdict::at_most(name, f64::NAN, 0.0)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn laws(gamma: f64, mu: f64, capillarity: CapillarityModel) -> Laws {
    let visc = if mu == 0.0 { ViscosityModel::inviscid() } else { ViscosityModel::constant(mu, 0.0) };
    Laws::new(PressureLaw::new(1.0, gamma, 1.0).expect("valid pressure law"), visc, capillarity)
}

fn power(kappa: f64, alpha: f64) -> CapillarityModel {
    if alpha == -2.0 {
        CapillarityModel::critical(kappa, 1.0)
    } else {
        CapillarityModel::power_law(kappa, alpha, 1.0)
    }
    .expect("valid capillarity law")
}

/// Smooth density in `[0.5, 1.5]` with modes along both axes.
pub fn smooth_density(grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, |x| 1.0 + 0.3 * x[0].sin() * (2.0 * x[1]).cos() + 0.2 * (3.0 * x[0] + x[1]).cos())
}

/// Relative L² gap between the primitive and the A/B forms of div K.
pub fn tensor_equivalence(alpha: f64, dim: usize, n: usize) -> nsk_core::Result<f64> {
    let grid = Grid::new(dim, n, TAU)?;
    let sp = Spectral::new(grid);
    equivalence_residual(&sp, &smooth_density(grid), &power(1.0, alpha))
}

pub const TENSOR_ALPHAS: [f64; 6] = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0];

fn tensor_group(level: Level) -> Vec<Verdict> {
    let n2 = if level == Level::Full { 128 } else { 64 };
    let mut out = Vec::new();
    for (dim, n) in [(1, 128), (2, n2)] {
        let r = TENSOR_ALPHAS.iter().map(|&a| tensor_equivalence(a, dim, n)).collect::<Result<Vec<_>, _>>();
        let name = format!("tensor_equivalence_{dim}d_n{n}");
        out.push(match r {
            Ok(r) => Verdict::at_most(&name, max_of(r), 1e-8),
            Err(e) => failed(&name, e),
        });
    }
    out
}

/// Maximum relative error of the Fourier-multiplier identities on random
/// mean-free band-limited fields: `[composition, riesz, parseval, adjoint]`.
pub fn operator_algebra(grid: Grid, seed: u64) -> nsk_core::Result<[f64; 4]> {
    let sp = Spectral::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_smooth_field(&grid, &mut rng, (grid.n() / 4) as u32).minus_mean();
    let g = random_smooth_field(&grid, &mut rng, (grid.n() / 4) as u32).minus_mean();
    let rel = |a: &ScalarField, b: &ScalarField| (a - b).l2_norm() / b.l2_norm();

    let l12 = sp.fractional_power(&f, 1.2)?;
    let comp = rel(&sp.fractional_power(&sp.fractional_power(&f, 0.5)?, 0.7)?, &l12)
        .max(rel(&sp.fractional_power(&sp.fractional_power(&f, -0.8)?, 0.8)?, &f));

    let mut rr = f.clone();
    for i in 0..grid.dim() {
        rr.axpy(1.0, &sp.riesz(&sp.riesz(&f, i), i));
    }
    let riesz = rr.l2_norm() / f.l2_norm();

    let e = f.inner(&f);
    let parseval = (sp.modal_energy(&f) - e).abs() / e;

    let lf = sp.fractional_power(&f, 0.6)?;
    let lg = sp.fractional_power(&g, 0.6)?;
    let adjoint = (lf.inner(&g) - f.inner(&lg)).abs() / (lf.l2_norm() * g.l2_norm());
    Ok([comp, riesz, parseval, adjoint])
}

fn operator_group() -> Vec<Verdict> {
    let mut worst = [0.0f64; 4];
    for (dim, n, seed) in [(1, 64, 1), (2, 32, 2), (2, 64, 3)] {
        match Grid::new(dim, n, TAU).and_then(|g| operator_algebra(g, seed)) {
            Ok(r) => {
                for (w, v) in worst.iter_mut().zip(r) {
                    *w = w.max(v);
                }
            }
            Err(e) => return vec![failed("operator_algebra", e)],
        }
    }
    ["lambda_composition", "riesz_square", "parseval", "lambda_adjoint"]
        .iter()
        .zip(worst)
        .map(|(name, v)| Verdict::at_most(name, v, 1e-12))
        .collect()
}

/// `max_s |(γ−1)(Π(s)−Π(ρ̄)) − a j_γ(s)| / max(1, a j_γ(s))` over 1000
/// log-spaced densities in `[1e-3 ρ̄, 1e3 ρ̄]`.
pub fn pi_j_gamma_identity(gamma: f64) -> nsk_core::Result<f64> {
    let (a, rho_bar) = (1.7, 1.3);
    let law = PressureLaw::new(a, gamma, rho_bar)?;
    let pi_bar = law.pi_potential(rho_bar)?;
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let s = rho_bar * 10f64.powf(-3.0 + 6.0 * i as f64 / 999.0);
        let lhs = (gamma - 1.0) * (law.pi_potential(s)? - pi_bar);
        let rhs = a * law.j_gamma(s);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(worst)
}

fn pi_group() -> Vec<Verdict> {
    [1.4, 2.0, 3.0]
        .iter()
        .map(|&g| {
            let name = format!("pi_j_gamma_identity_gamma{g}");
            match pi_j_gamma_identity(g) {
                Ok(v) => Verdict::at_most(&name, v, 1e-12),
                Err(e) => failed(&name, e),
            }
        })
        .collect()
}

/// Every capillarity variant exercised by the suite.
pub fn all_capillarity_models() -> Vec<CapillarityModel> {
    let mut v: Vec<_> = [-3.0, -1.0, 0.0, 1.5].iter().map(|&a| power(0.1, a)).collect();
    v.push(power(0.1, -2.0));
    for law in [
        CapillarityLaw::PiecewiseConstant { rho_threshold: 0.4, kappa: 0.1, epsilon: 0.5 },
        CapillarityLaw::OneD { rho_threshold: 0.4, kappa: 0.1, epsilon: 0.0 },
    ] {
        v.push(CapillarityModel::new(law, 1.0).expect("valid piecewise law"));
    }
    v
}

/// Density windows `(center, half-width)` exercised for a model: one wide
/// window for smooth laws, one per smooth branch (power, bridge, constant)
/// for the piecewise laws, whose branches meet with a jump in `κ″`.
fn density_windows(model: &CapillarityModel) -> Vec<(f64, f64)> {
    match *model.law() {
        CapillarityLaw::PiecewiseConstant { rho_threshold: t, .. } | CapillarityLaw::OneD { rho_threshold: t, .. } => {
            vec![(0.6 * t, 0.3 * t), (1.5 * t, 0.4 * t), (3.0 * t, 0.8 * t)]
        }
        _ => vec![(1.0, 0.35)],
    }
}

/// Largest relative residual of `∫div K·u = −d/dt ∫½κ|∇ρ|²` over all models
/// on random smooth `(ρ, u)`.
pub fn capillary_power_check(grid: Grid, seed: u64) -> nsk_core::Result<f64> {
    let sp = Spectral::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_smooth_field(&grid, &mut rng, 4);
    let u = VectorField::new((0..grid.dim()).map(|_| random_smooth_field(&grid, &mut rng, 4)).collect())?;
    let mut worst = 0.0f64;
    for m in all_capillarity_models() {
        for (c, w) in density_windows(&m) {
            let rho = g.map(|v| c + w * v);
            worst = worst.max(capillary_power_residual(&sp, &rho, &u, &m)?);
        }
    }
    Ok(worst)
}

fn capillary_power_group() -> Vec<Verdict> {
    let r = Grid::new(1, 128, TAU)
        .and_then(|g| capillary_power_check(g, 11))
        .and_then(|a| Ok(a.max(capillary_power_check(Grid::new(2, 64, TAU)?, 12)?)));
    vec![match r {
        Ok(v) => Verdict::at_most("capillary_power", v, 1e-8),
        Err(e) => failed("capillary_power", e),
    }]
}

/// Linear standing-wave experiment about `(ρ̄, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSetup {
    pub n: usize,
    pub mode: u32,
    pub kappa: f64,
    pub amplitude: f64,
    pub cfl: f64,
    pub flipped: bool,
}

impl DispersionSetup {
    pub fn new(mode: u32) -> Self {
        Self { n: 256, mode, kappa: 0.1, amplitude: 1e-4, cfl: 0.5, flipped: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionMeasurement {
    pub omega: f64,
    pub omega_theory: f64,
    pub relative_error: f64,
}

/// `√(P′(ρ̄)k² + ρ̄κ(ρ̄)k⁴)` for `a = 1`, `γ = 2`, `ρ̄ = 1`.
pub fn dispersion_theory(k: f64, kappa: f64) -> f64 {
    (2.0 * k * k + kappa * k.powi(4)).sqrt()
}

/// Integrates `ρ = 1 + ε cos(kx)`, `u = 0` (inviscid, 1D) and returns the
/// frequency read off two successive zero crossings of the mode amplitude.
pub fn measure_dispersion(setup: DispersionSetup) -> nsk_core::Result<DispersionMeasurement> {
    let grid = Grid::new(1, setup.n, TAU)?;
    let k = setup.mode as f64;
    let omega_theory = dispersion_theory(k, setup.kappa);
    let mut solver = Solver::new(grid, laws(2.0, 0.0, power(setup.kappa, 0.0)), 1e-6);
    if setup.flipped {
        solver = solver.with_flipped_capillarity();
    }
    let basis = ScalarField::from_fn(grid, |x| (k * x[0]).cos());
    let norm = basis.inner(&basis);
    let rho = basis.map(|c| 1.0 + setup.amplitude * c);
    let mut state = FlowState::new(rho, VectorField::zeros(grid), 0.0)?;
    let amp = |s: &FlowState| s.rho().inner(&basis) / norm;

    let dt = solver.stable_timestep(&state, setup.cfl);
    let t_stop = 1.6 * std::f64::consts::PI / omega_theory;
    let mut prev = (0.0, amp(&state));
    let mut crossings = Vec::new();
    while state.time() < t_stop && crossings.len() < 2 {
        state = solver.advance(&state, dt, None)?;
        let cur = (state.time(), amp(&state));
        if prev.1.signum() != cur.1.signum() && cur.1 != 0.0 {
            crossings.push(prev.0 + (cur.0 - prev.0) * prev.1 / (prev.1 - cur.1));
        }
        prev = cur;
    }
    if crossings.len() < 2 {
        return Err(nsk_core::Error::InvalidArgument("mode amplitude did not oscillate"));
    }
    let omega = std::f64::consts::PI / (crossings[1] - crossings[0]);
    Ok(DispersionMeasurement { omega, omega_theory, relative_error: (omega - omega_theory).abs() / omega_theory })
}

fn dispersion_verdict(name: &str, setup: DispersionSetup) -> Verdict {
    match measure_dispersion(setup) {
        Ok(m) => Verdict::at_most(name, m.relative_error, 5e-3),
        Err(e) => failed(name, e),
    }
}

fn dispersion_group(level: Level) -> Vec<Verdict> {
    let mut v = vec![dispersion_verdict("dispersion_k1", DispersionSetup::new(1))];
    if level == Level::Full {
        v.push(dispersion_verdict("dispersion_k2", DispersionSetup::new(2)));
        v.push(dispersion_verdict("dispersion_k3_kappa1", DispersionSetup { kappa: 1.0, ..DispersionSetup::new(3) }));
    }
    v
}

/// Smooth 1D energy-budget experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSetup {
    pub n: usize,
    pub t_end: f64,
    pub amplitude: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub mu: f64,
    pub cfl: f64,
    pub max_dt: Option<f64>,
    pub output_interval: f64,
    pub flipped: bool,
}

impl Default for BudgetSetup {
    fn default() -> Self {
        Self {
            n: 512,
            t_end: 1.0,
            amplitude: 0.05,
            kappa: 0.01,
            alpha: 0.0,
            mu: 0.01,
            cfl: 1.0,
            max_dt: None,
            output_interval: 0.1,
            flipped: false,
        }
    }
}

impl BudgetSetup {
    pub fn laws(&self) -> Laws {
        laws(2.0, self.mu, power(self.kappa, self.alpha))
    }

    pub fn config(&self) -> nsk_core::Result<SimulationConfig> {
        let grid = Grid::new(1, self.n, TAU)?;
        let mut c = SimulationConfig::new(grid, self.laws(), self.t_end);
        c.cfl_factor = self.cfl;
        c.max_dt = self.max_dt;
        c.output_interval = self.output_interval;
        c.diagnostics = DiagnosticsSpec::default_for(&grid);
        Ok(c)
    }

    /// `ρ = 1 + ε sin x`, `u = ε cos x`.
    pub fn initial(&self) -> nsk_core::Result<FlowState> {
        let grid = Grid::new(1, self.n, TAU)?;
        let a = self.amplitude;
        let rho = ScalarField::from_fn(grid, |x| 1.0 + a * x[0].sin());
        let u = VectorField::new(vec![ScalarField::from_fn(grid, |x| a * x[0].cos())])?;
        FlowState::from_velocity(rho, &u, 0.0)
    }

    pub fn run(&self) -> nsk_core::Result<nsk_core::solver::RunOutcome> {
        let config = self.config()?;
        let mut solver = Solver::new(config.grid, config.laws.clone(), config.rho_floor);
        if self.flipped {
            solver = solver.with_flipped_capillarity();
        }
        run_with(&solver, &config, self.initial()?, None)
    }

    /// `max_t |r(t)| / E(0)`; infinite if the run did not complete.
    pub fn relative_residual(&self) -> nsk_core::Result<f64> {
        let out = self.run()?;
        if out.termination != Termination::Completed {
            return Ok(f64::INFINITY);
        }
        let s = out.series.samples();
        Ok(max_of(s.iter().map(|x| x.budget_residual.abs())) / s[0].energy)
    }
}

/// `max|r|/E(0)` at `dt`, `dt/2`, `dt/4` on a coarse grid where the time
/// error dominates.
pub fn budget_refinement() -> nsk_core::Result<[f64; 3]> {
    let base = BudgetSetup { n: 32, amplitude: 0.1, ..BudgetSetup::default() };
    let mut r = [0.0; 3];
    for (i, h) in [0.04, 0.02, 0.01].into_iter().enumerate() {
        r[i] = BudgetSetup { max_dt: Some(h), ..base }.relative_residual()?;
    }
    Ok(r)
}

fn budget_group() -> Vec<Verdict> {
    let mut v = vec![match BudgetSetup::default().relative_residual() {
        Ok(r) => Verdict::at_most("energy_budget_n512", r, 1e-6),
        Err(e) => failed("energy_budget_n512", e),
    }];
    match budget_refinement() {
        Ok(r) => v.push(Verdict::at_least("energy_budget_order", (r[0] / r[1]).min(r[1] / r[2]), 8.0)),
        Err(e) => v.push(failed("energy_budget_order", e)),
    }
    v
}

/// Maximum relative renormalized residual along a smooth run, and the
/// α = 0 collapse gap `max |(ρB′ − B̃) − B̃|` with `B̃ = B + κρ̄²/2`.
pub fn renormalized_check(dim: usize, alpha: f64) -> nsk_core::Result<(f64, f64)> {
    let n = 64;
    let grid = Grid::new(dim, n, TAU)?;
    let kappa = 0.01;
    let model = power(kappa, alpha);
    let laws = laws(2.0, 0.01, model.clone());
    let mut config = SimulationConfig::new(grid, laws.clone(), 0.2);
    config.output_interval = 0.005;
    config.cfl_factor = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rho = random_smooth_field(&grid, &mut rng, 3).map(|v| 1.0 + 0.2 * v);
    let u = VectorField::new((0..dim).map(|_| random_smooth_field(&grid, &mut rng, 3).scale(0.2)).collect())?;
    let out = nsk_core::solver::run(&config, FlowState::from_velocity(rho, &u, 0.0)?, None)?;
    let offset = 0.5 * kappa;
    let res = renormalized_residual(&out.series, &config.diagnostics.phi, offset)?;
    let worst = max_of(res.iter().map(|r| r.1));
    let mut collapse = 0.0f64;
    if alpha == 0.0 {
        for st in out.series.states() {
            for &r in st.rho().values() {
                let b = model.b(r)? + offset;
                collapse = collapse.max((renormalized_coefficient(&model, r, offset)? - b).abs());
            }
        }
    }
    Ok((worst, collapse))
}

fn renormalized_group() -> Vec<Verdict> {
    let mut v = Vec::new();
    for (dim, alpha) in [(1, 0.0), (1, 1.0), (2, -1.0)] {
        let name = format!("renormalized_{dim}d_alpha{alpha}");
        match renormalized_check(dim, alpha) {
            Ok((r, c)) => {
                v.push(Verdict::at_most(&name, r, 1e-6));
                if alpha == 0.0 {
                    v.push(Verdict::at_most("renormalized_alpha0_collapse", c, 1e-15));
                }
            }
            Err(e) => v.push(failed(&name, e)),
        }
    }
    v
}

/// Partition-of-unity measurements for one λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionMeasurement {
    pub lambda: f64,
    pub pieces: usize,
    /// `max |Σφ_k − 1|` on the region.
    pub sum_error: f64,
    /// Largest `|φ_k|` found at distance ≥ λ from its center.
    pub outside_support: f64,
    /// `max_k ‖∇φ_k‖_∞ · λ`.
    pub c1: f64,
    /// `max_k ‖∇²φ_k‖_∞ · λ²` (finite differences of the exact gradient).
    pub c2: f64,
}

pub fn partition_check(lambda: f64) -> nsk_core::Result<PartitionMeasurement> {
    let grid = Grid::new(2, 16, TAU)?;
    let (lo, hi) = (0.25 * TAU, 0.75 * TAU);
    let family = partition_of_unity(&grid, Region { lo: [lo, lo], hi: [hi, hi] }, lambda)?;
    let m = 120;
    let pts: Vec<[f64; 2]> = (0..=m)
        .flat_map(|j| (0..=m).map(move |i| [lo + (hi - lo) * i as f64 / m as f64, lo + (hi - lo) * j as f64 / m as f64]))
        .collect();
    let mut sum_error = 0.0f64;
    for p in &pts {
        let s: f64 = family.iter().map(|f| f.eval(&grid, *p)).sum();
        sum_error = sum_error.max((s - 1.0).abs());
    }
    let (mut outside, mut c1, mut c2) = (0.0f64, 0.0f64, 0.0f64);
    let h = 1e-5 * lambda;
    let q = 40;
    for f in &family {
        let c = f.center().expect("partition cells have centers");
        for j in 0..=q {
            for i in 0..=q {
                let p = [c[0] + lambda * (2.0 * i as f64 / q as f64 - 1.0), c[1] + lambda * (2.0 * j as f64 / q as f64 - 1.0)];
                let dist = grid.periodic_distance(p, c);
                if dist >= lambda {
                    outside = outside.max(f.eval(&grid, p).abs());
                }
                let g = f.gradient(&grid, p);
                c1 = c1.max(g[0].hypot(g[1]) * lambda);
                for a in 0..2 {
                    let mut pp = p;
                    let mut pm = p;
                    pp[a] += h;
                    pm[a] -= h;
                    let (gp, gm) = (f.gradient(&grid, pp), f.gradient(&grid, pm));
                    for b in 0..2 {
                        c2 = c2.max(((gp[b] - gm[b]) / (2.0 * h)).abs() * lambda * lambda);
                    }
                }
            }
        }
    }
    Ok(PartitionMeasurement { lambda, pieces: family.len(), sum_error, outside_support: outside, c1, c2 })
}

/// Fixed constants bounding `‖∇φ_k‖_∞ λ` and `‖∇²φ_k‖_∞ λ²`.
pub const PARTITION_C1: f64 = 10.0;
pub const PARTITION_C2: f64 = 100.0;
pub const PARTITION_LAMBDAS: [f64; 3] = [0.5, 0.25, 0.125];

fn partition_group() -> Vec<Verdict> {
    let ms: Result<Vec<_>, _> = PARTITION_LAMBDAS.iter().map(|&l| partition_check(l)).collect();
    match ms {
        Ok(ms) => vec![
            Verdict::at_most("partition_sum", max_of(ms.iter().map(|m| m.sum_error)), 1e-12),
            Verdict::at_most("partition_support", max_of(ms.iter().map(|m| m.outside_support)), 0.0),
            Verdict::at_most("partition_c1", max_of(ms.iter().map(|m| m.c1)), PARTITION_C1),
            Verdict::at_most("partition_c2", max_of(ms.iter().map(|m| m.c2)), PARTITION_C2),
        ],
        Err(e) => vec![failed("partition", e)],
    }
}

/// Sign flip injected into div K must be caught by the dispersion and the
/// budget checks. Measured: the smaller of the two failure margins
/// (measured / tolerance), which must exceed 1.
fn mutation_group() -> Vec<Verdict> {
    let disp = match measure_dispersion(DispersionSetup { n: 16, flipped: true, ..DispersionSetup::new(1) }) {
        Ok(m) => m.relative_error / 5e-3,
        Err(_) => f64::INFINITY,
    };
    let budget = match (BudgetSetup { n: 128, t_end: 0.1, output_interval: 0.01, flipped: true, ..BudgetSetup::default() }).relative_residual() {
        Ok(r) => r / 1e-6,
        Err(_) => f64::INFINITY,
    };
    vec![
        Verdict::at_least("mutation_caught_by_dispersion", disp, 1.0),
        Verdict::at_least("mutation_caught_by_budget", budget, 1.0),
    ]
}

/// Localized budget with a bump, relative to `A(0, ψ)`.
pub fn localized_check() -> nsk_core::Result<f64> {
    let setup = BudgetSetup { n: 128, t_end: 0.5, output_interval: 0.01, ..BudgetSetup::default() };
    let out = setup.run()?;
    let psi = TestFunctionSpec::Bump { center: [2.0, 0.0], radius: 1.5, order: 8 };
    let r = localized_budget(&out.series, &psi)?;
    let sp = Spectral::new(*out.series.grid());
    let a0 = localized_energy(&sp, &out.series.states()[0], &psi, out.series.laws())?;
    Ok(max_of(r.iter().map(|v| v.abs())) / (a0 + 1e-10 / 1e-4))
}

/// Largest relative weak-form residual over a small battery of bumps.
pub fn weak_form_check() -> nsk_core::Result<f64> {
    let setup = BudgetSetup { n: 64, t_end: 0.5, output_interval: 0.01, amplitude: 0.1, ..BudgetSetup::default() };
    let out = setup.run()?;
    let battery: Vec<_> = [1.0, 3.0, 5.0]
        .iter()
        .map(|&c| TestFunctionSpec::Bump { center: [c, 0.0], radius: 1.2, order: 6 })
        .collect();
    Ok(weak_form_residual(&out.series, &battery)?.max_relative())
}

/// Errors of the manufactured solution at `T = 1` for `dt = h, h/2, h/4`.
pub fn manufactured_refinement(h: f64) -> nsk_core::Result<[f64; 3]> {
    let grid = Grid::new(1, 32, TAU)?;
    let laws = laws(2.0, 0.05, power(0.05, 1.0));
    let m = Manufactured::new(grid, laws.clone(), 0.1, 1);
    let forcing = |t: f64| m.forcing(t);
    let mut out = [0.0; 3];
    for (i, dt) in [h, h / 2.0, h / 4.0].into_iter().enumerate() {
        let mut config = SimulationConfig::new(grid, laws.clone(), 1.0);
        config.max_dt = Some(dt);
        config.cfl_factor = 1.0;
        config.output_interval = 1.0;
        let run = nsk_core::solver::run(&config, m.exact(0.0)?, Some(&forcing))?;
        let exact = m.exact(1.0)?;
        out[i] = (run.state.rho() - exact.rho()).max_abs().max((run.state.momentum().component(0) - exact.momentum().component(0)).max_abs());
    }
    Ok(out)
}

/// `(max relative mass drift, max absolute momentum drift)` over `steps`
/// steps of a smooth 2D run at the stable step.
pub fn conservation_check(steps: usize) -> nsk_core::Result<(f64, f64)> {
    let grid = Grid::new(2, 16, TAU)?;
    let solver = Solver::new(grid, laws(2.0, 0.02, power(0.05, 1.0)), 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_smooth_field(&grid, &mut rng, 3).map(|v| 1.0 + 0.2 * v);
    let u = VectorField::new((0..2).map(|_| random_smooth_field(&grid, &mut rng, 3).scale(0.3)).collect())?;
    let mut state = FlowState::from_velocity(rho, &u, 0.0)?;
    let (m0, p0) = (state.mass(), state.momentum_integrals());
    let (mut dm, mut dp) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        let dt = solver.stable_timestep(&state, 0.5);
        state = solver.advance(&state, dt, None)?;
        dm = dm.max((state.mass() - m0).abs() / m0);
        for (a, b) in state.momentum_integrals().iter().zip(&p0) {
            dp = dp.max((a - b).abs());
        }
    }
    Ok((dm, dp))
}

fn full_only_group() -> Vec<Verdict> {
    let mut v = Vec::new();
    match conservation_check(10_000) {
        Ok((dm, dp)) => {
            v.push(Verdict::at_most("mass_conservation_1e4_steps", dm, 1e-12));
            v.push(Verdict::at_most("momentum_conservation_1e4_steps", dp, 1e-10));
        }
        Err(e) => v.push(failed("conservation", e)),
    }
    v.push(match localized_check() {
        Ok(r) => Verdict::at_most("localized_budget", r, 1e-4),
        Err(e) => failed("localized_budget", e),
    });
    v.push(match weak_form_check() {
        Ok(r) => Verdict::at_most("weak_form", r, 1e-5),
        Err(e) => failed("weak_form", e),
    });
    v.push(match manufactured_refinement(0.008) {
        Ok(e) => Verdict::at_least("manufactured_order", (e[0] / e[1]).log2().min((e[1] / e[2]).log2()), 3.8),
        Err(e) => failed("manufactured_order", e),
    });
    v
}

type GroupFn = fn(Level) -> Vec<Verdict>;

fn groups(level: Level) -> Vec<(&'static str, GroupFn)> {
    let mut g: Vec<(&'static str, GroupFn)> = vec![
        ("tensor-equivalence", tensor_group),
        ("operator-algebra", |_| operator_group()),
        ("pi-j-gamma", |_| pi_group()),
        ("capillary-power", |_| capillary_power_group()),
        ("dispersion", dispersion_group),
        ("budget", |_| budget_group()),
        ("renormalized", |_| renormalized_group()),
        ("partition", |_| partition_group()),
        ("mutation-sanity", |_| mutation_group()),
    ];
    if level == Level::Full {
        g.push(("conservation-localized-weak-manufactured", |_| full_only_group()));
    }
    g
}

/// Runs every check of the level, groups in parallel.
pub fn verify_suite(level: Level) -> VerifyReport {
    let start = Instant::now();
    let groups = std::thread::scope(|scope| {
        let handles: Vec<_> = groups(level)
            .into_iter()
            .map(|(name, f)| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let verdicts = f(level);
                    CheckGroup { name: name.to_owned(), verdicts, seconds: t.elapsed().as_secs_f64() }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    VerifyReport { level, groups, seconds: start.elapsed().as_secs_f64() }
}

/// One line per verdict.
pub fn format_verdict(v: &Verdict) -> String {
    format!(
        "[{}] {:<40} measured {:>12.4e} {} {:.3e}",
        if v.passed { "PASS" } else { "FAIL" },
        v.name,
        v.measured,
        v.comparison,
        v.tolerance
    )
}
