//! Flow state in conservative variables.

use alloc::vec::Vec;

use crate::{Error, Grid, Result, ScalarField, VectorField};

/// Density and momentum `m = ρu` at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    rho: ScalarField,
    momentum: VectorField,
    time: f64,
}

impl FlowState {
    /// Checks grids, finiteness and positivity of the density.
    pub fn new(rho: ScalarField, momentum: VectorField, time: f64) -> Result<Self> {
        if rho.grid() != momentum.grid() {
            return Err(Error::GridMismatch);
        }
        if !rho.is_finite() || !momentum.is_finite() || !time.is_finite() {
            return Err(Error::InvalidArgument("state contains non-finite values"));
        }
        let min = rho.min();
        if !(min > 0.0) {
            return Err(Error::NonPositiveDensity { value: min });
        }
        Ok(Self { rho, momentum, time })
    }

    pub(crate) fn from_parts(rho: ScalarField, momentum: VectorField, time: f64) -> Self {
        Self { rho, momentum, time }
    }

    /// Builds the state from density and velocity.
    pub fn from_velocity(rho: ScalarField, velocity: &VectorField, time: f64) -> Result<Self> {
        if rho.grid() != velocity.grid() {
            return Err(Error::GridMismatch);
        }
        let m = velocity.scale_by(&rho);
        Self::new(rho, m, time)
    }

    /// `(ρ̄, 0)`.
    pub fn equilibrium(grid: Grid, rho_bar: f64) -> Result<Self> {
        Self::new(ScalarField::constant(grid, rho_bar), VectorField::zeros(grid), 0.0)
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn momentum(&self) -> &VectorField {
        &self.momentum
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn into_parts(self) -> (ScalarField, VectorField, f64) {
        (self.rho, self.momentum, self.time)
    }

    /// `u = m / ρ`.
    pub fn velocity(&self) -> VectorField {
        self.momentum.map_components(|m| m.zip_map(&self.rho, |m, r| m / r))
    }

    /// `∫ρ`.
    pub fn mass(&self) -> f64 {
        self.rho.integral()
    }

    /// `∫m`, one entry per component.
    pub fn momentum_integrals(&self) -> Vec<f64> {
        self.momentum.integrals()
    }

    pub fn min_density(&self) -> f64 {
        self.rho.min()
    }

    pub fn max_density(&self) -> f64 {
        self.rho.max()
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.momentum.is_finite() && self.time.is_finite()
    }
}
