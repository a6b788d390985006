use alloc::vec::Vec;

use crate::constitutive::Laws;
use crate::{FlowState, Result, ScalarField, Spectral, VectorField};

use super::time::cumulative_integral;
use super::{energy, DiagnosticsSeries, TestFunctionSpec};

/// Energy density `½ρ|u|² + Π(ρ) − Π(ρ̄) + ½κ(ρ)|∇ρ|²`.
fn energy_density(sp: &Spectral, state: &FlowState, laws: &Laws) -> ScalarField {
    let rho = state.rho();
    let u2 = state.velocity().norm_sq();
    let g2 = sp.gradient(rho).norm_sq();
    let p = &laws.pressure;
    let pi_bar = p.pi_unchecked(p.rho_bar());
    let mut e = ScalarField::zeros(*rho.grid());
    for i in 0..rho.len() {
        let r = rho[i];
        e[i] = 0.5 * r * u2[i] + p.pi_unchecked(r) - pi_bar + 0.5 * laws.capillarity.kappa_pair(r).0 * g2[i];
    }
    e
}

/// `½∫ψ(ρ|u|² + |∇A(ρ)|² + 2Π(ρ) − 2Π(ρ̄))`.
pub fn localized_energy(sp: &Spectral, state: &FlowState, psi: &TestFunctionSpec, laws: &Laws) -> Result<f64> {
    energy::total_energy(sp, state, laws)?;
    let w = psi.field(state.grid());
    Ok(energy_density(sp, state, laws).inner(&w))
}

/// Energy flux `F` and dissipation density `S:∇u`, so that
/// `∂_t e + div F = −S:∇u` with
/// `F = (½ρ|u|² + Π + P)u − Su − ρμ_c u + κ∇ρ div(ρu)`,
/// `S = 2μD(u) + λ div u I` and `μ_c = κΔρ + ½κ′|∇ρ|²`.
pub fn energy_flux(sp: &Spectral, state: &FlowState, laws: &Laws) -> (VectorField, ScalarField) {
    let grid = *state.grid();
    let d = grid.dim();
    let rho = state.rho();
    let u = state.velocity();
    let u2 = u.norm_sq();
    let grads: Vec<VectorField> = u.components().iter().map(|c| sp.gradient(c)).collect();
    let (g, lap) = sp.gradient_and_laplacian(rho);
    let g2 = g.norm_sq();
    let div_m = sp.divergence(state.momentum());
    let p = &laws.pressure;
    let mut flux: Vec<ScalarField> = (0..d).map(|_| ScalarField::zeros(grid)).collect();
    let mut diss = ScalarField::zeros(grid);
    for i in 0..rho.len() {
        let r = rho[i];
        let (k, kp) = laws.capillarity.kappa_pair(r);
        let (mu, lambda) = laws.viscosity.eval_unchecked(r);
        let mu_c = k * lap[i] + 0.5 * kp * g2[i];
        let scalar = 0.5 * r * u2[i] + p.pi_unchecked(r) + p.pressure(r) - r * mu_c;
        let mut div_u = 0.0;
        for a in 0..d {
            div_u += grads[a].component(a)[i];
        }
        let mut dd = 0.0;
        for a in 0..d {
            let mut su = 0.0;
            for b in 0..d {
                let dab = 0.5 * (grads[a].component(b)[i] + grads[b].component(a)[i]);
                dd += dab * dab;
                let s = 2.0 * mu * dab + if a == b { lambda * div_u } else { 0.0 };
                su += s * u.component(b)[i];
            }
            flux[a][i] = scalar * u.component(a)[i] - su + k * g.component(a)[i] * div_m[i];
        }
        diss[i] = 2.0 * mu * dd + lambda * div_u * div_u;
    }
    (VectorField::new(flux).expect("same grid"), diss)
}

/// `A(t,ψ) + ∫₀ᵗ∫ψ S:∇u − A(0,ψ) − ∫₀ᵗ∫∇ψ·F` at every sample.
pub fn localized_budget(series: &DiagnosticsSeries, psi: &TestFunctionSpec) -> Result<Vec<f64>> {
    let grid = *series.grid();
    let sp = Spectral::new(grid);
    let laws = series.laws();
    let w = psi.field(&grid);
    let gw = psi.gradient_field(&grid);
    let mut local = Vec::with_capacity(series.len());
    let mut source = Vec::with_capacity(series.len());
    for s in series.states() {
        local.push(localized_energy(&sp, s, psi, laws)?);
        let (flux, diss) = energy_flux(&sp, s, laws);
        source.push(gw.dot(&flux).integral() - diss.inner(&w));
    }
    let t = series.times();
    let integral = cumulative_integral(&t, &source);
    Ok(local.iter().zip(&integral).map(|(a, i)| a - local[0] - i).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{CapillarityModel, PressureLaw, ViscosityModel};
    use crate::diagnostics::{partition_of_unity, Region};
    use crate::Grid;

    fn laws() -> Laws {
        Laws::new(
            PressureLaw::new(1.0, 1.4, 1.0).unwrap(),
            ViscosityModel::constant(0.05, 0.02),
            CapillarityModel::power_law(0.1, -1.0, 1.0).unwrap(),
        )
    }

    fn state(g: Grid) -> FlowState {
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.2 * (x[0]).sin() * (x[1]).cos());
        let u = VectorField::new(alloc::vec![
            ScalarField::from_fn(g, |x| 0.3 * (x[1]).sin()),
            ScalarField::from_fn(g, |x| 0.1 * (x[0] + x[1]).cos()),
        ])
        .unwrap();
        FlowState::from_velocity(rho, &u, 0.0).unwrap()
    }

    #[test]
    fn unit_weight_gives_total_energy() {
        let g = Grid::new(2, 32, core::f64::consts::TAU).unwrap();
        let sp = Spectral::new(g);
        let s = state(g);
        let a = localized_energy(&sp, &s, &TestFunctionSpec::Unit, &laws()).unwrap();
        let e = energy::total_energy(&sp, &s, &laws()).unwrap();
        assert!((a - e).abs() < 1e-12 * e);
    }

    #[test]
    fn partition_sums_to_total() {
        let g = Grid::new(2, 32, core::f64::consts::TAU).unwrap();
        let sp = Spectral::new(g);
        let s = state(g);
        let l = g.length();
        let fam = partition_of_unity(&g, Region { lo: [0.0, 0.0], hi: [0.5 * l, 0.5 * l] }, 0.4).unwrap();
        // Linearity: Σ A(φ_k) = A(Σ φ_k).
        let sum: f64 = fam.iter().map(|f| localized_energy(&sp, &s, f, &laws()).unwrap()).sum();
        let combined = fam.iter().map(|f| f.field(&g)).fold(ScalarField::zeros(g), |acc, f| &acc + &f);
        let direct = energy_density(&sp, &s, &laws()).inner(&combined);
        assert!((sum - direct).abs() < 1e-12 * direct.abs().max(1e-300));
    }

    #[test]
    fn flux_divergence_matches_energy_rate() {
        // ∫ψ ∂_t e = ∫∇ψ·F − ∫ψ S:∇u with ∂_t e from the solver tendency.
        let g = Grid::new(2, 64, core::f64::consts::TAU).unwrap();
        let laws = laws();
        let solver = crate::solver::Solver::new(g, laws.clone(), 1e-6);
        let sp = solver.spectral();
        let s = state(g);
        let psi = TestFunctionSpec::Bump { center: [2.0, 3.0], radius: 1.5, order: 8 };
        let (flux, diss) = energy_flux(sp, &s, &laws);
        let rhs = psi.gradient_field(&g).dot(&flux).integral() - diss.inner(&psi.field(&g));
        let h = 1e-4;
        let k = solver.compute_rhs(&s, None).unwrap();
        let shifted = |c: f64| {
            let mut rho = s.rho().clone();
            rho.axpy(c * h, &k.rho);
            let mut m = s.momentum().clone();
            m.axpy(c * h, &k.momentum);
            localized_energy(sp, &FlowState::new(rho, m, 0.0).unwrap(), &psi, &laws).unwrap()
        };
        let lhs = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
        assert!((lhs - rhs).abs() < 1e-6 * rhs.abs(), "{lhs} {rhs}");
    }
}
