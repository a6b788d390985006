//! Explicit RK4 integration of the Navier–Stokes–Korteweg system in
//! conservative variables `(ρ, m = ρu)` on the periodic grid.
//!
//! Every momentum term is written as the divergence of one flux tensor
//! `F = −m⊗u + 2μD(u) + λ div u I − P I + (ρκΔρ + ½(κ+ρκ′)|∇ρ|²) I − κ∇ρ⊗∇ρ`,
//! differentiated spectrally and projected onto the 2/3 band, so mass and
//! momentum integrals are conserved to rounding.

use alloc::vec::Vec;

use num_traits::Float;

use crate::constitutive::Laws;
use crate::diagnostics::{DiagnosticsSeries, DiagnosticsSpec};
use crate::{Error, FlowState, Grid, Result, ScalarField, Spectral, VectorField};

/// External source terms added to the mass and momentum equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub rho: ScalarField,
    pub momentum: VectorField,
}

/// Time-dependent forcing, `t ↦ (S_ρ, S_m)`.
pub type Forcing<'a> = &'a dyn Fn(f64) -> Source;

/// Right-hand side of the system plus the instantaneous dissipation rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub rho: ScalarField,
    pub momentum: VectorField,
    /// `[∫2μ|D(u)|² + λ(div u)², ∫μ|D(u)|² + (μ+λ)(div u)²]`.
    pub dissipation: [f64; 2],
}

/// Spectral operators and constitutive laws for one grid.
#[derive(Debug, Clone)]
pub struct Solver {
    sp: Spectral,
    laws: Laws,
    rho_floor: f64,
    capillary_sign: f64,
}

impl Solver {
    pub fn new(grid: Grid, laws: Laws, rho_floor: f64) -> Self {
        Self { sp: Spectral::new(grid), laws, rho_floor, capillary_sign: 1.0 }
    }

    /// Flips the sign of the capillary force. Only meant for mutation tests
    /// of the verification suite.
    #[doc(hidden)]
    pub fn with_flipped_capillarity(mut self) -> Self {
        self.capillary_sign = -self.capillary_sign;
        self
    }

    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }

    pub fn laws(&self) -> &Laws {
        &self.laws
    }

    pub fn rho_floor(&self) -> f64 {
        self.rho_floor
    }

    fn guard(&self, state: &FlowState) -> Result<()> {
        if !state.is_finite() {
            return Err(Error::NonFiniteState { time: state.time() });
        }
        let rho_min = state.min_density();
        if rho_min < self.rho_floor {
            return Err(Error::VacuumApproached { time: state.time(), rho_min, floor: self.rho_floor });
        }
        Ok(())
    }

    /// `(∂_tρ, ∂_tm)` with dissipation rates; fails if `min ρ < rho_floor`.
    pub fn compute_rhs(&self, state: &FlowState, forcing: Option<Forcing<'_>>) -> Result<Tendency> {
        self.guard(state)?;
        let sp = &self.sp;
        let grid = *state.grid();
        let d = grid.dim();
        let len = grid.len();
        let rho = state.rho();
        let m = state.momentum();
        let u = state.velocity();

        // flux[i * d + j] = F_ij
        let mut flux: Vec<ScalarField> = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                flux.push((m.component(i) * u.component(j)).scale(-1.0));
            }
        }

        let mut dissipation = [0.0; 2];
        if !self.laws.viscosity.is_inviscid() {
            let grads: Vec<VectorField> = u.components().iter().map(|c| sp.gradient(c)).collect();
            let mut div_u = ScalarField::zeros(grid);
            for (i, g) in grads.iter().enumerate() {
                div_u.axpy(1.0, g.component(i));
            }
            let (mut a29, mut ineq1) = (0.0, 0.0);
            for p in 0..len {
                let (mu, lambda) = self.laws.viscosity.eval_unchecked(rho[p]);
                let mut dd = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        let dij = 0.5 * (grads[i].component(j)[p] + grads[j].component(i)[p]);
                        dd += dij * dij;
                        let mut sigma = 2.0 * mu * dij;
                        if i == j {
                            sigma += lambda * div_u[p];
                        }
                        flux[i * d + j][p] += sigma;
                    }
                }
                let dv = div_u[p] * div_u[p];
                a29 += 2.0 * mu * dd + lambda * dv;
                ineq1 += mu * dd + (mu + lambda) * dv;
            }
            let dv = grid.cell_volume();
            dissipation = [a29 * dv, ineq1 * dv];
        }

        let (g, lap) = sp.gradient_and_laplacian(rho);
        let g2 = g.norm_sq();
        let cap = &self.laws.capillarity;
        let sign = self.capillary_sign;
        for p in 0..len {
            let r = rho[p];
            let (k, kp) = cap.kappa_pair(r);
            let iso = sign * (r * k * lap[p] + 0.5 * (k + r * kp) * g2[p]) - self.laws.pressure.pressure(r);
            for i in 0..d {
                for j in 0..d {
                    let mut v = -sign * k * g.component(i)[p] * g.component(j)[p];
                    if i == j {
                        v += iso;
                    }
                    flux[i * d + j][p] += v;
                }
            }
        }

        let dm: Vec<ScalarField> = (0..d)
            .map(|i| {
                let row: Vec<&ScalarField> = flux[i * d..(i + 1) * d].iter().collect();
                sp.divergence_dealiased(&row)
            })
            .collect();
        let comps: Vec<&ScalarField> = m.components().iter().collect();
        let mut drho = sp.divergence_dealiased(&comps).scale(-1.0);
        let mut dm = VectorField::new(dm)?;
        if let Some(f) = forcing {
            let s = f(state.time());
            drho.axpy(1.0, &s.rho);
            dm.axpy(1.0, &s.momentum);
        }
        Ok(Tendency { rho: drho, momentum: dm, dissipation })
    }

    /// `cfl · min(dx / max(|u| + √P′), ρ_min dx² / (4 max(2μ+|λ|)), dx² / (2π √max(ρκ)))`.
    pub fn stable_timestep(&self, state: &FlowState, cfl: f64) -> f64 {
        let grid = state.grid();
        let dx = grid.dx();
        let rho = state.rho();
        let u2 = state.velocity().norm_sq();
        let mut wave = 0.0f64;
        let mut visc = 0.0f64;
        let mut disp = 0.0f64;
        let inviscid = self.laws.viscosity.is_inviscid();
        for p in 0..rho.len() {
            let r = rho[p];
            wave = wave.max(u2[p].sqrt() + self.laws.pressure.pressure_prime(r).sqrt());
            if !inviscid {
                let (mu, lambda) = self.laws.viscosity.eval_unchecked(r);
                visc = visc.max(2.0 * mu + lambda.abs());
            }
            disp = disp.max(r * self.laws.capillarity.kappa_pair(r).0);
        }
        let limit = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };
        let dt = limit(dx, wave)
            .min(limit(rho.min() * dx * dx, 4.0 * visc))
            .min(limit(dx * dx, 2.0 * core::f64::consts::PI * disp.sqrt()));
        cfl * dt
    }

    /// One RK4 step.
    pub fn advance(&self, state: &FlowState, dt: f64, forcing: Option<Forcing<'_>>) -> Result<FlowState> {
        Ok(self.step(state, [0.0; 2], dt, forcing)?.0)
    }

    /// One RK4 step that also integrates the two cumulative dissipations.
    pub fn step(&self, state: &FlowState, diss: [f64; 2], dt: f64, forcing: Option<Forcing<'_>>) -> Result<(FlowState, [f64; 2])> {
        let k1 = self.compute_rhs(state, forcing)?;
        let k2 = self.compute_rhs(&stage(state, &[(&k1, 0.5 * dt)], 0.5 * dt), forcing)?;
        let k3 = self.compute_rhs(&stage(state, &[(&k2, 0.5 * dt)], 0.5 * dt), forcing)?;
        let k4 = self.compute_rhs(&stage(state, &[(&k3, dt)], dt), forcing)?;
        let w = dt / 6.0;
        let next = stage(state, &[(&k1, w), (&k2, 2.0 * w), (&k3, 2.0 * w), (&k4, w)], dt);
        let mut acc = diss;
        for (c, a) in acc.iter_mut().enumerate() {
            *a += w * (k1.dissipation[c] + 2.0 * k2.dissipation[c] + 2.0 * k3.dissipation[c] + k4.dissipation[c]);
        }
        self.guard(&next)?;
        Ok((next, acc))
    }
}

fn stage(base: &FlowState, terms: &[(&Tendency, f64)], dt: f64) -> FlowState {
    let mut rho = base.rho().clone();
    let mut m = base.momentum().clone();
    for (k, h) in terms {
        rho.axpy(*h, &k.rho);
        m.axpy(*h, &k.momentum);
    }
    FlowState::from_parts(rho, m, base.time() + dt)
}

/// Everything the integrator needs besides the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub grid: Grid,
    pub laws: Laws,
    pub t_end: f64,
    pub cfl_factor: f64,
    pub rho_floor: f64,
    pub output_interval: f64,
    /// Upper bound on the step, on top of the stability limit.
    pub max_dt: Option<f64>,
    pub diagnostics: DiagnosticsSpec,
}

impl SimulationConfig {
    /// Defaults: `cfl_factor = 0.25`, `rho_floor = 1e-6 ρ̄`, ten outputs.
    pub fn new(grid: Grid, laws: Laws, t_end: f64) -> Self {
        let rho_floor = 1e-6 * laws.rho_bar();
        Self {
            grid,
            laws,
            t_end,
            cfl_factor: 0.25,
            rho_floor,
            output_interval: t_end / 10.0,
            max_dt: None,
            diagnostics: DiagnosticsSpec::default_for(&grid),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument("t_end must be finite and non-negative"));
        }
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 1.0) {
            return Err(Error::InvalidArgument("cfl_factor must lie in (0, 1]"));
        }
        if !(self.rho_floor > 0.0) {
            return Err(Error::InvalidArgument("rho_floor must be positive"));
        }
        if self.t_end > 0.0 && !(self.output_interval > 0.0) {
            return Err(Error::InvalidArgument("output_interval must be positive"));
        }
        if let Some(dt) = self.max_dt {
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("max_dt must be positive"));
            }
        }
        self.diagnostics.validate(&self.grid)
    }

    pub fn output_count(&self) -> usize {
        if self.t_end == 0.0 {
            0
        } else {
            (self.t_end / self.output_interval * (1.0 + 1e-12)).floor() as usize
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    VacuumApproached { time: f64, rho_min: f64, floor: f64 },
    NonFinite { time: f64 },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: FlowState,
    pub series: DiagnosticsSeries,
    pub termination: Termination,
    pub steps: usize,
}

/// Integrates to `t_end`, recording diagnostics at every multiple of the
/// output interval. Vacuum approach and blow-up end the run early and are
/// reported in [`RunOutcome::termination`].
pub fn run(config: &SimulationConfig, initial: FlowState, forcing: Option<Forcing<'_>>) -> Result<RunOutcome> {
    run_with(&Solver::new(config.grid, config.laws.clone(), config.rho_floor), config, initial, forcing)
}

pub fn run_with(solver: &Solver, config: &SimulationConfig, initial: FlowState, forcing: Option<Forcing<'_>>) -> Result<RunOutcome> {
    config.validate()?;
    if initial.grid() != &config.grid {
        return Err(Error::GridMismatch);
    }
    let mut series = DiagnosticsSeries::new(config.grid, config.laws.clone(), config.diagnostics.clone());
    let mut state = initial;
    let mut diss = [0.0; 2];
    let mut steps = 0;
    series.record(solver.spectral(), &state, diss)?;

    let outputs = config.output_count();
    let mut targets: Vec<(f64, bool)> = (1..=outputs).map(|k| (k as f64 * config.output_interval, true)).collect();
    let last = targets.last().map_or(0.0, |t| t.0);
    if config.t_end > last * (1.0 + 1e-12) {
        targets.push((config.t_end, false));
    }

    let t0 = state.time();
    let mut termination = Termination::Completed;
    'outer: for (target, record) in targets {
        let target = t0 + target;
        while state.time() < target {
            let remaining = target - state.time();
            let mut dt_max = solver.stable_timestep(&state, config.cfl_factor);
            if let Some(cap) = config.max_dt {
                dt_max = dt_max.min(cap);
            }
            let n = (remaining / dt_max - 1e-9).ceil().max(1.0);
            let dt = remaining / n;
            match solver.step(&state, diss, dt, forcing) {
                Ok((next, acc)) => {
                    state = if n == 1.0 { next.with_time(target) } else { next };
                    diss = acc;
                    steps += 1;
                }
                Err(Error::VacuumApproached { time, rho_min, floor }) => {
                    termination = Termination::VacuumApproached { time, rho_min, floor };
                    break 'outer;
                }
                Err(Error::NonFiniteState { time }) => {
                    termination = Termination::NonFinite { time };
                    break 'outer;
                }
                Err(e) => return Err(e),
            }
        }
        if record {
            series.record(solver.spectral(), &state, diss)?;
        }
    }
    Ok(RunOutcome { state, series, termination, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{CapillarityModel, PressureLaw, ViscosityModel};
    use core::f64::consts::TAU;

    fn laws(mu: f64, kappa: f64) -> Laws {
        let visc = if mu == 0.0 { ViscosityModel::inviscid() } else { ViscosityModel::constant(mu, 0.0) };
        Laws::new(PressureLaw::new(1.0, 2.0, 1.0).unwrap(), visc, CapillarityModel::power_law(kappa, 0.0, 1.0).unwrap())
    }

    fn wavy(grid: Grid, amp: f64) -> FlowState {
        let rho = ScalarField::from_fn(grid, |x| 1.0 + amp * (x[0].sin() + 0.5 * (x[0] + 2.0 * x[1]).cos()));
        let u = VectorField::new(
            (0..grid.dim())
                .map(|i| ScalarField::from_fn(grid, |x| amp * (x[1 - i.min(1)] + i as f64).sin()))
                .collect(),
        )
        .unwrap();
        FlowState::from_velocity(rho, &u, 0.0).unwrap()
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let g = Grid::new(2, 16, TAU).unwrap();
        let s = Solver::new(g, laws(0.1, 0.5), 1e-6);
        let eq = FlowState::equilibrium(g, 1.0).unwrap();
        let k = s.compute_rhs(&eq, None).unwrap();
        assert!(k.rho.max_abs() < 1e-14 && k.momentum.l2_norm() < 1e-14);
        let next = s.advance(&eq, 0.01, None).unwrap();
        assert!((next.rho() - eq.rho()).max_abs() < 1e-14);
        assert!(next.momentum().l2_norm() < 1e-14);
        assert_eq!(next.time(), 0.01);
    }

    #[test]
    fn mass_and_momentum_conserved_per_step() {
        let g = Grid::new(2, 32, TAU).unwrap();
        let s = Solver::new(g, laws(0.05, 0.1), 1e-6);
        let mut st = wavy(g, 0.1);
        let m0 = st.mass();
        let p0 = st.momentum_integrals();
        for _ in 0..20 {
            let dt = s.stable_timestep(&st, 0.5);
            st = s.advance(&st, dt, None).unwrap();
        }
        assert!((st.mass() - m0).abs() < 1e-12 * m0);
        for (a, b) in st.momentum_integrals().iter().zip(&p0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn timestep_limits() {
        let g = Grid::new(1, 64, TAU).unwrap();
        let eq = FlowState::equilibrium(g, 1.0).unwrap();
        // Negligible capillarity: acoustic limit dx / √P′(1) = dx / √2.
        let s = Solver::new(g, laws(0.0, 1e-30), 1e-6);
        assert!((s.stable_timestep(&eq, 1.0) - g.dx() / 2f64.sqrt()).abs() < 1e-15);
        // Capillarity-limited: doubling n quarters dt.
        let cap = |n| {
            let g = Grid::new(1, n, TAU).unwrap();
            Solver::new(g, laws(0.0, 10.0), 1e-6).stable_timestep(&FlowState::equilibrium(g, 1.0).unwrap(), 1.0)
        };
        assert!((cap(64) / cap(128) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_guard_fires() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let s = Solver::new(g, laws(0.0, 0.01), 0.5);
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.6 * x[0].sin());
        let st = FlowState::new(rho, VectorField::zeros(g), 0.0).unwrap();
        assert!(matches!(s.compute_rhs(&st, None), Err(Error::VacuumApproached { floor, .. }) if floor == 0.5));
    }

    #[test]
    fn zero_duration_run_records_initial_state() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let cfg = SimulationConfig::new(g, laws(0.1, 0.1), 0.0);
        let st = wavy(g, 0.05);
        let out = run(&cfg, st.clone(), None).unwrap();
        assert_eq!(out.termination, Termination::Completed);
        assert_eq!(out.series.len(), 1);
        assert_eq!(out.state, st);
        assert_eq!(out.series.samples()[0].budget_residual, 0.0);
    }

    #[test]
    fn run_records_every_output_interval() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let mut cfg = SimulationConfig::new(g, laws(0.1, 0.1), 0.35);
        cfg.output_interval = 0.1;
        let out = run(&cfg, wavy(g, 0.05), None).unwrap();
        assert_eq!(out.series.len(), 4);
        assert!((out.state.time() - 0.35).abs() < 1e-12);
        let t = out.series.times();
        for (k, tk) in t.iter().enumerate() {
            assert!((tk - 0.1 * k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_approach_is_reported() {
        let g = Grid::new(1, 64, TAU).unwrap();
        let mut cfg = SimulationConfig::new(g, laws(0.05, 0.01), 2.0);
        cfg.rho_floor = 0.3;
        // Diverging flow empties the neighbourhood of x = 0.
        let rho = ScalarField::constant(g, 1.0);
        let u = VectorField::new(alloc::vec![ScalarField::from_fn(g, |x| 3.0 * x[0].sin())]).unwrap();
        let out = run(&cfg, FlowState::from_velocity(rho, &u, 0.0).unwrap(), None).unwrap();
        assert!(matches!(out.termination, Termination::VacuumApproached { floor, .. } if floor == 0.3), "{:?}", out.termination);
        assert!(out.state.min_density() >= 0.3);
    }

    #[test]
    fn config_validation() {
        let g = Grid::new(1, 32, TAU).unwrap();
        let mut cfg = SimulationConfig::new(g, laws(0.1, 0.1), 1.0);
        assert!(cfg.validate().is_ok());
        cfg.cfl_factor = 1.5;
        assert!(cfg.validate().is_err());
        cfg.cfl_factor = 0.5;
        cfg.diagnostics.s = 0.6;
        assert!(matches!(cfg.validate(), Err(Error::SRangeViolation { .. })));
    }
}
