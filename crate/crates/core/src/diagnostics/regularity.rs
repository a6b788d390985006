use alloc::vec::Vec;

use num_traits::Float;

use crate::constitutive::{orlicz_norm, CapillarityLaw};
use crate::{Error, Result, Spectral};

use super::time::trapezoid;
use super::{check_s_range, DiagnosticsSeries, TestFunctionSpec};

/// `(∫₀ᵀ ‖φB(ρ(t))‖²_{H^{1+s/2}} dt)^{1/2}`, trapezoidal in time.
pub fn gain_norm(series: &DiagnosticsSeries, phi: &TestFunctionSpec, s: f64) -> Result<f64> {
    let grid = *series.grid();
    check_s_range(s, grid.dim())?;
    let sp = Spectral::new(grid);
    let w = phi.field(&grid);
    let model = &series.laws().capillarity;
    let mut sq = Vec::with_capacity(series.len());
    for st in series.states() {
        let b = st.rho().try_map(|r| model.b(r))?;
        sq.push(sp.sobolev_norm(&(&b * &w), 1.0 + 0.5 * s, false)?.powi(2));
    }
    Ok(trapezoid(&series.times(), &sq).sqrt())
}

/// Space-time integrals of the integrability gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrabilityGain {
    /// `‖φρ‖^{γ+α}_{L^{γ+α}((0,T)×Ω)}`.
    pub norm_gamma_alpha: f64,
    /// `∫₀ᵀ∫ ρ^{α−2}|∇ρ|²`.
    pub weighted_gradient: f64,
}

/// Requires the critical capillarity law `κ(ρ) = κ/ρ²`.
pub fn integrability_gain(series: &DiagnosticsSeries, phi: &TestFunctionSpec, alpha_gain: f64) -> Result<IntegrabilityGain> {
    if !(alpha_gain > 0.0) {
        return Err(Error::InvalidArgument("alpha_gain must be positive"));
    }
    let laws = series.laws();
    if !matches!(laws.capillarity.law(), CapillarityLaw::Critical { .. }) {
        return Err(Error::InvalidModel("integrability gain needs the critical capillarity law"));
    }
    let grid = *series.grid();
    let sp = Spectral::new(grid);
    let w = phi.field(&grid);
    let q = laws.pressure.gamma() + alpha_gain;
    let mut norm = Vec::with_capacity(series.len());
    let mut grad = Vec::with_capacity(series.len());
    for st in series.states() {
        let rho = st.rho();
        if rho.min() <= 0.0 {
            return Err(Error::NonPositiveDensity { value: rho.min() });
        }
        norm.push((&w * rho).map(|v| v.abs().powf(q)).integral());
        let g2 = sp.gradient(rho).norm_sq();
        grad.push(rho.zip_map(&g2, |r, g| r.powf(alpha_gain - 2.0) * g).integral());
    }
    let t = series.times();
    Ok(IntegrabilityGain { norm_gamma_alpha: trapezoid(&t, &norm), weighted_gradient: trapezoid(&t, &grad) })
}

/// Measured constant of `sup_t‖∇A(ρ)‖ ≤ C(‖∇A(ρ₀)‖ + κ⁻¹(‖√ρ₀u₀‖ + ‖j_γ(ρ₀)‖_{L¹}^{1/2}))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeKappaReport {
    /// Smallest admissible `C`, reported as 1 when the bound holds with `C ≤ 1`.
    pub constant: f64,
    pub sup_grad_a: f64,
    pub initial_grad_a: f64,
    pub initial_kinetic: f64,
    pub initial_pressure: f64,
    pub kappa: f64,
}

pub fn large_kappa_check(series: &DiagnosticsSeries) -> Result<LargeKappaReport> {
    let grid = *series.grid();
    let sp = Spectral::new(grid);
    let laws = series.laws();
    let model = &laws.capillarity;
    let first = series.states().first().ok_or(Error::InvalidArgument("empty series"))?;
    let grad_a = |rho: &crate::ScalarField| -> Result<f64> { Ok(sp.gradient(&rho.try_map(|r| model.a(r))?).l2_norm()) };
    let mut sup: f64 = 0.0;
    for st in series.states() {
        sup = sup.max(grad_a(st.rho())?);
    }
    let initial_grad_a = grad_a(first.rho())?;
    let initial_kinetic = first.velocity().norm_sq().zip_map(first.rho(), |u2, r| r * u2).integral().sqrt();
    let initial_pressure = first.rho().map(|r| laws.pressure.j_gamma(r)).integral().max(0.0).sqrt();
    let kappa = model.kappa_scale();
    let rhs = initial_grad_a + (initial_kinetic + initial_pressure) / kappa;
    let constant = if rhs > 0.0 { (sup / rhs).max(1.0) } else { 1.0 };
    Ok(LargeKappaReport { constant, sup_grad_a: sup, initial_grad_a, initial_kinetic, initial_pressure, kappa })
}

/// Suprema in time of the density deviation in the Orlicz and `H¹` norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrliczReport {
    /// `sup_t ‖ρ − ρ̄‖_{L^γ_2}`.
    pub sup_orlicz: f64,
    /// `sup_t ‖ρ − ρ̄‖_{H¹}`.
    pub sup_h1: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

pub fn orlicz_energy_check(series: &DiagnosticsSeries) -> Result<OrliczReport> {
    let grid = *series.grid();
    let sp = Spectral::new(grid);
    let laws = series.laws();
    let rho_bar = laws.rho_bar();
    let delta = series.spec().delta_orlicz;
    let mut r = OrliczReport { sup_orlicz: 0.0, sup_h1: 0.0, rho_min: f64::INFINITY, rho_max: f64::NEG_INFINITY };
    for st in series.states() {
        let dev = st.rho().map(|v| v - rho_bar);
        r.sup_orlicz = r.sup_orlicz.max(orlicz_norm(&dev, 2.0, laws.pressure.gamma(), delta));
        r.sup_h1 = r.sup_h1.max(sp.sobolev_norm(&dev, 1.0, false)?);
        r.rho_min = r.rho_min.min(st.min_density());
        r.rho_max = r.rho_max.max(st.max_density());
    }
    Ok(r)
}
