//! Functionals evaluated along trajectories: energies and their budgets,
//! localized energies, regularity-gain norms, concentration scans,
//! partitions of unity and residuals of the weak and renormalized
//! equations.
//!
//! A [`DiagnosticsSeries`] keeps every recorded state, so any functional can
//! be evaluated after the run with its own quadrature.

use alloc::vec::Vec;

use crate::constitutive::Laws;
use crate::{Error, FlowState, Grid, Result, Spectral};

mod concentration;
mod energy;
mod localized;
mod regularity;
mod residuals;
mod test_function;
pub mod time;

pub use concentration::{concentration_scan, Concentration};
pub use energy::{capillary_energy_a, dissipation_rates, energy_budget, gamma_energy, total_energy};
pub use localized::{energy_flux, localized_budget, localized_energy};
pub use regularity::{
    gain_norm, integrability_gain, large_kappa_check, orlicz_energy_check, IntegrabilityGain, LargeKappaReport,
    OrliczReport,
};
pub use residuals::{renormalized_coefficient, renormalized_residual, weak_form_residual, WeakFormReport};
pub use test_function::{partition_of_unity, smooth_step, Region, TestFunctionSpec};

/// Parameters of the per-run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSpec {
    /// Regularity index of the gain norm `‖φB(ρ)‖_{L²(H^{1+s/2})}`.
    pub s: f64,
    /// Radius of the balls in the concentration scan.
    pub ball_radius: f64,
    /// Exponent shift in the integrability gain.
    pub alpha_gain: f64,
    /// Localizing test function.
    pub phi: TestFunctionSpec,
    /// Splice point of the Orlicz function.
    pub delta_orlicz: f64,
}

impl DiagnosticsSpec {
    /// `s = 1` in 2D and `1/4` in 1D, balls of radius `L/8`, a bump of
    /// radius `L/4` centered in the box.
    pub fn default_for(grid: &Grid) -> Self {
        let l = grid.length();
        Self {
            s: if grid.dim() == 2 { 1.0 } else { 0.25 },
            ball_radius: l / 8.0,
            alpha_gain: 1.0,
            phi: TestFunctionSpec::Bump { center: [0.5 * l, 0.5 * l], radius: 0.25 * l, order: 8 },
            delta_orlicz: 1.0,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        check_s_range(self.s, grid.dim())?;
        if !(self.ball_radius > 0.0) {
            return Err(Error::InvalidArgument("ball_radius must be positive"));
        }
        if !(self.alpha_gain > 0.0) {
            return Err(Error::InvalidArgument("alpha_gain must be positive"));
        }
        if !(self.delta_orlicz > 0.0) {
            return Err(Error::InvalidArgument("delta_orlicz must be positive"));
        }
        self.phi.validate(grid)
    }
}

/// `0 ≤ s < 2` in 2D, `0 ≤ s < ½` in 1D.
pub fn check_s_range(s: f64, dim: usize) -> Result<()> {
    let top = if dim == 2 { 2.0 } else { 0.5 };
    if s >= 0.0 && s < top {
        Ok(())
    } else {
        Err(Error::SRangeViolation { s, dim })
    }
}

/// One row of the time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub energy: f64,
    pub gamma_energy: f64,
    /// `∫₀ᵗ∫ 2μ|D(u)|² + λ(div u)²`.
    pub diss_cum_a29: f64,
    /// `∫₀ᵗ∫ μ|D(u)|² + (μ+λ)(div u)²`.
    pub diss_cum_ineq1: f64,
    /// `E(t) + diss_cum_a29 − E(0)`.
    pub budget_residual: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// `½‖∇A(ρ)‖²_{L²}`.
    pub cap_energy: f64,
    pub concentration_max: f64,
}

/// Recorded samples and the states they were computed from.
#[derive(Debug, Clone)]
pub struct DiagnosticsSeries {
    grid: Grid,
    laws: Laws,
    spec: DiagnosticsSpec,
    samples: Vec<Sample>,
    states: Vec<FlowState>,
}

impl DiagnosticsSeries {
    pub fn new(grid: Grid, laws: Laws, spec: DiagnosticsSpec) -> Self {
        Self { grid, laws, spec, samples: Vec::new(), states: Vec::new() }
    }

    /// Builds a series from given states; cumulative dissipation is the
    /// trapezoidal integral of the instantaneous rates.
    pub fn from_states(grid: Grid, laws: Laws, spec: DiagnosticsSpec, states: Vec<FlowState>) -> Result<Self> {
        let sp = Spectral::new(grid);
        let mut series = Self::new(grid, laws, spec);
        let mut acc = [0.0; 2];
        let mut prev: Option<(f64, [f64; 2])> = None;
        for s in states {
            let rates = dissipation_rates(&sp, &s, &series.laws.viscosity);
            if let Some((t0, r0)) = prev {
                let h = s.time() - t0;
                for c in 0..2 {
                    acc[c] += 0.5 * h * (r0[c] + rates[c]);
                }
            }
            prev = Some((s.time(), rates));
            series.record(&sp, &s, acc)?;
        }
        Ok(series)
    }

    /// Evaluates one row for `state` given the cumulative dissipations.
    pub fn record(&mut self, sp: &Spectral, state: &FlowState, dissipation: [f64; 2]) -> Result<()> {
        if state.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let laws = &self.laws;
        let energy = total_energy(sp, state, laws)?;
        let gamma = gamma_energy(sp, state, laws)?;
        let e0 = self.samples.first().map_or(energy, |s| s.energy);
        let conc = concentration_scan(sp, state.rho(), self.spec.ball_radius, &laws.capillarity)?;
        self.samples.push(Sample {
            t: state.time(),
            mass: state.mass(),
            momentum: state.momentum_integrals(),
            energy,
            gamma_energy: gamma,
            diss_cum_a29: dissipation[0],
            diss_cum_ineq1: dissipation[1],
            budget_residual: energy + dissipation[0] - e0,
            rho_min: state.min_density(),
            rho_max: state.max_density(),
            cap_energy: capillary_energy_a(sp, state.rho(), &laws.capillarity)?,
            concentration_max: conc.max_value,
        });
        self.states.push(state.clone());
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn laws(&self) -> &Laws {
        &self.laws
    }

    pub fn spec(&self) -> &DiagnosticsSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn states(&self) -> &[FlowState] {
        &self.states
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}
