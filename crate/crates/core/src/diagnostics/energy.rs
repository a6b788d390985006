use alloc::vec::Vec;

use crate::constitutive::{CapillarityModel, Laws, ViscosityModel};
use crate::{Error, FlowState, Result, ScalarField, Spectral};

use super::DiagnosticsSeries;

fn kinetic_and_capillary(sp: &Spectral, state: &FlowState, laws: &Laws) -> ScalarField {
    let rho = state.rho();
    let u2 = state.velocity().norm_sq();
    let g2 = sp.gradient(rho).norm_sq();
    let mut out = ScalarField::zeros(*rho.grid());
    for p in 0..rho.len() {
        let k = laws.capillarity.kappa_pair(rho[p]).0;
        out[p] = 0.5 * rho[p] * u2[p] + 0.5 * k * g2[p];
    }
    out
}

fn check(state: &FlowState) -> Result<()> {
    let m = state.min_density();
    if m > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { value: m })
    }
}

/// `E = ∫ ½ρ|u|² + Π(ρ) − Π(ρ̄) + ½κ(ρ)|∇ρ|²`.
pub fn total_energy(sp: &Spectral, state: &FlowState, laws: &Laws) -> Result<f64> {
    check(state)?;
    let p = &laws.pressure;
    let pi_bar = p.pi_unchecked(p.rho_bar());
    let mut e = kinetic_and_capillary(sp, state, laws);
    for (v, &r) in e.values_mut().iter_mut().zip(state.rho().values()) {
        *v += p.pi_unchecked(r) - pi_bar;
    }
    Ok(e.integral())
}

/// `E^γ = ∫ ½ρ|u|² + a j_γ(ρ)/(γ−1) + ½κ(ρ)|∇ρ|²`.
pub fn gamma_energy(sp: &Spectral, state: &FlowState, laws: &Laws) -> Result<f64> {
    check(state)?;
    let p = &laws.pressure;
    let c = p.a() / (p.gamma() - 1.0);
    let mut e = kinetic_and_capillary(sp, state, laws);
    for (v, &r) in e.values_mut().iter_mut().zip(state.rho().values()) {
        *v += c * p.j_gamma(r);
    }
    Ok(e.integral())
}

/// `½‖∇A(ρ)‖²_{L²}` with `A` differentiated spectrally.
pub fn capillary_energy_a(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> Result<f64> {
    let a = rho.try_map(|r| model.a(r))?;
    Ok(0.5 * sp.gradient(&a).norm_sq().integral())
}

/// `[∫ 2μ|D(u)|² + λ(div u)², ∫ μ|D(u)|² + (μ+λ)(div u)²]`.
pub fn dissipation_rates(sp: &Spectral, state: &FlowState, viscosity: &ViscosityModel) -> [f64; 2] {
    if viscosity.is_inviscid() {
        return [0.0; 2];
    }
    let d = state.grid().dim();
    let u = state.velocity();
    let grads: Vec<_> = u.components().iter().map(|c| sp.gradient(c)).collect();
    let rho = state.rho();
    let (mut a, mut b) = (0.0, 0.0);
    for p in 0..rho.len() {
        let (mu, lambda) = viscosity.eval_unchecked(rho[p]);
        let mut dd = 0.0;
        let mut div = 0.0;
        for i in 0..d {
            div += grads[i].component(i)[p];
            for j in 0..d {
                let dij = 0.5 * (grads[i].component(j)[p] + grads[j].component(i)[p]);
                dd += dij * dij;
            }
        }
        a += 2.0 * mu * dd + lambda * div * div;
        b += mu * dd + (mu + lambda) * div * div;
    }
    let dv = state.grid().cell_volume();
    [a * dv, b * dv]
}

/// `r(t) = E(t) + ∫₀ᵗ∫(2μ|D(u)|² + λ(div u)²) − E(0)` for every sample.
pub fn energy_budget(series: &DiagnosticsSeries) -> Vec<f64> {
    series.samples().iter().map(|s| s.budget_residual).collect()
}
