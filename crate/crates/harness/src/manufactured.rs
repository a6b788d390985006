//! Manufactured solution `ρ* = 2 + ε sin(kx) cos t`, `u* = (ε sin(kx) sin t, 0)`
//! and the source terms that make it exact.

use nsk_core::constitutive::{CapillarityLaw, CapillarityModel, Laws, ViscosityModel};
use nsk_core::solver::Source;
use nsk_core::{FlowState, Grid, ScalarField, VectorField};

use crate::config::{invalid, ConfigError};

/// Pointwise values of the manufactured fields and their derivatives.
#[derive(Debug, Clone, Copy)]
struct Point {
    rho: f64,
    rho_t: f64,
    rho_x: f64,
    rho_xx: f64,
    rho_xxx: f64,
    u: f64,
    u_t: f64,
    u_x: f64,
    u_xx: f64,
}

#[derive(Debug, Clone)]
pub struct Manufactured {
    grid: Grid,
    laws: Laws,
    eps: f64,
    k: f64,
}

impl Manufactured {
    /// `eps` is the amplitude, `mode` the integer wavenumber along x.
    pub fn new(grid: Grid, laws: Laws, eps: f64, mode: u32) -> Self {
        Self { grid, laws, eps, k: mode as f64 * grid.k0() }
    }

    /// Constant viscosities and power-law (or critical) capillarity.
    pub fn check_models(capillarity: &CapillarityModel, viscosity: &ViscosityModel) -> Result<(), ConfigError> {
        if viscosity.mu.coeff != 0.0 || viscosity.lambda.coeff != 0.0 {
            return Err(invalid("viscosity.model", "manufactured needs constant viscosities"));
        }
        match capillarity.law() {
            CapillarityLaw::PowerLaw { .. } | CapillarityLaw::Critical { .. } => Ok(()),
            _ => Err(invalid("capillarity.model", "manufactured needs the power or critical law")),
        }
    }

    fn point(&self, x: f64, t: f64) -> Point {
        let (e, k) = (self.eps, self.k);
        let (s, c) = (k * x).sin_cos();
        let (st, ct) = t.sin_cos();
        Point {
            rho: 2.0 + e * s * ct,
            rho_t: -e * s * st,
            rho_x: e * k * c * ct,
            rho_xx: -e * k * k * s * ct,
            rho_xxx: -e * k * k * k * c * ct,
            u: e * s * st,
            u_t: e * s * ct,
            u_x: e * k * c * st,
            u_xx: -e * k * k * s * st,
        }
    }

    /// `(κ, κ′, κ″)`.
    fn kappa(&self, rho: f64) -> (f64, f64, f64) {
        match *self.laws.capillarity.law() {
            CapillarityLaw::PowerLaw { kappa, alpha } => {
                let v = kappa * rho.powf(alpha);
                (v, alpha * v / rho, alpha * (alpha - 1.0) * v / (rho * rho))
            }
            CapillarityLaw::Critical { kappa } => {
                let v = kappa / (rho * rho);
                (v, -2.0 * v / rho, 6.0 * v / (rho * rho))
            }
            _ => panic!("manufactured solution needs the power or critical law"),
        }
    }

    fn vector(&self, x_component: ScalarField) -> VectorField {
        let mut comps = vec![x_component];
        if self.grid.dim() == 2 {
            comps.push(ScalarField::zeros(self.grid));
        }
        VectorField::new(comps).expect("same grid")
    }

    pub fn exact(&self, t: f64) -> nsk_core::Result<FlowState> {
        let rho = ScalarField::from_fn(self.grid, |x| self.point(x[0], t).rho);
        let m = ScalarField::from_fn(self.grid, |x| {
            let p = self.point(x[0], t);
            p.rho * p.u
        });
        FlowState::new(rho, self.vector(m), t)
    }

    /// `(∂ₜρ*, ∂ₜm*)`.
    pub fn time_derivative(&self, t: f64) -> (ScalarField, VectorField) {
        let rho_t = ScalarField::from_fn(self.grid, |x| self.point(x[0], t).rho_t);
        let m_t = ScalarField::from_fn(self.grid, |x| {
            let p = self.point(x[0], t);
            p.rho_t * p.u + p.rho * p.u_t
        });
        (rho_t, self.vector(m_t))
    }

    /// Sources `S` such that `∂ₜU* = RHS(U*) + S`.
    pub fn forcing(&self, t: f64) -> Source {
        let (mu, lambda) = (self.laws.viscosity.mu.base, self.laws.viscosity.lambda.base);
        let pressure = &self.laws.pressure;
        let s_rho = ScalarField::from_fn(self.grid, |x| {
            let p = self.point(x[0], t);
            p.rho_t + p.rho_x * p.u + p.rho * p.u_x
        });
        let s_m = ScalarField::from_fn(self.grid, |x| {
            let p = self.point(x[0], t);
            let m = p.rho * p.u;
            let m_t = p.rho_t * p.u + p.rho * p.u_t;
            let m_x = p.rho_x * p.u + p.rho * p.u_x;
            let convection = m_x * p.u + m * p.u_x;
            let grad_p = pressure.pressure_prime(p.rho) * p.rho_x;
            let viscous = (2.0 * mu + lambda) * p.u_xx;
            let (k, k1, k2) = self.kappa(p.rho);
            let div_k = p.rho
                * (k * p.rho_xxx + 2.0 * k1 * p.rho_x * p.rho_xx + 0.5 * k2 * p.rho_x * p.rho_x * p.rho_x);
            m_t + convection + grad_p - viscous - div_k
        });
        Source { rho: s_rho, momentum: self.vector(s_m) }
    }
}
