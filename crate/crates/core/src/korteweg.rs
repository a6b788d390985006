//! Capillary (Korteweg) stress in two independent formulations.
//!
//! The primitive form differentiates `ρκΔρ + ½(κ+ρκ′)|∇ρ|²` and `κ∇ρ⊗∇ρ`
//! directly. The A/B form builds the tensor
//! `K = (ΔB(ρ) − ½(κ+ρκ′)|∇ρ|²) I − ∇A(ρ)⊗∇A(ρ)` from the primitives
//! `A′ = √κ`, `B′ = ρκ` and takes its divergence. Both outputs are
//! projected onto the 2/3-dealiased band.

use alloc::vec::Vec;

use crate::constitutive::CapillarityModel;
use crate::{Error, Result, ScalarField, Spectral, TensorField, VectorField};

/// Stress, its divergence and the capillary energy `∫½κ(ρ)|∇ρ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct KortewegOutput {
    pub tensor: TensorField,
    pub force: VectorField,
    pub capillary_energy: f64,
}

fn check_density(rho: &ScalarField) -> Result<()> {
    let min = rho.min();
    if min > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { value: min })
    }
}

fn kappa_fields(rho: &ScalarField, model: &CapillarityModel) -> (ScalarField, ScalarField) {
    (rho.map(|r| model.kappa_pair(r).0), rho.map(|r| model.kappa_pair(r).1))
}

fn divergence_of_rows(sp: &Spectral, t: &TensorField) -> VectorField {
    let d = t.dim();
    VectorField::new((0..d).map(|i| sp.divergence(&t.row(i))).collect()).expect("rows share a grid")
}

fn dealiased(sp: &Spectral, v: VectorField) -> VectorField {
    v.map_components(|c| sp.dealias(c))
}

/// `div K` from the primitive form.
pub fn div_k_primitive(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> Result<VectorField> {
    check_density(rho)?;
    Ok(div_k_unchecked(sp, rho, model))
}

pub(crate) fn div_k_unchecked(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> VectorField {
    let d = rho.grid().dim();
    let (g, lap) = sp.gradient_and_laplacian(rho);
    let (k, kp) = kappa_fields(rho, model);
    let g2 = g.norm_sq();
    let mut scalar = ScalarField::zeros(*rho.grid());
    for i in 0..rho.len() {
        scalar[i] = rho[i] * k[i] * lap[i] + 0.5 * (k[i] + rho[i] * kp[i]) * g2[i];
    }
    let mut out = sp.gradient(&scalar);
    for i in 0..d {
        let row = VectorField::new((0..d).map(|j| &(&k * g.component(i)) * g.component(j)).collect())
            .expect("same grid");
        out.components_mut()[i].axpy(-1.0, &sp.divergence(&row));
    }
    dealiased(sp, out)
}

/// `K_ij = (ΔB − ½(κ+ρκ′)|∇ρ|²) δ_ij − ∂_iA ∂_jA`.
pub fn tensor_ab(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> Result<TensorField> {
    check_density(rho)?;
    let d = rho.grid().dim();
    let a = rho.map(|r| model.a_unchecked(r));
    let b = rho.map(|r| model.b_unchecked(r));
    let ga = sp.gradient(&a);
    let lap_b = sp.laplacian(&b);
    let g2 = sp.gradient(rho).norm_sq();
    let (k, kp) = kappa_fields(rho, model);
    let mut diag = lap_b;
    for i in 0..diag.len() {
        diag[i] -= 0.5 * (k[i] + rho[i] * kp[i]) * g2[i];
    }
    let mut comps = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut c = &ga.component(i).scale(-1.0) * ga.component(j);
            if i == j {
                c.axpy(1.0, &diag);
            }
            comps.push(c);
        }
    }
    if d == 2 {
        comps[2] = comps[1].clone();
    }
    TensorField::new(comps, true)
}

/// Both formulations together with the capillary energy.
pub fn korteweg(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> Result<KortewegOutput> {
    let tensor = tensor_ab(sp, rho, model)?;
    let force = div_k_unchecked(sp, rho, model);
    let capillary_energy = capillary_energy(sp, rho, model);
    Ok(KortewegOutput { tensor, force, capillary_energy })
}

/// `∫½κ(ρ)|∇ρ|²`.
pub fn capillary_energy(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> f64 {
    let g2 = sp.gradient(rho).norm_sq();
    rho.zip_map(&g2, |r, g| 0.5 * model.kappa_pair(r).0 * g).integral()
}

/// Relative L² distance between `div` of the A/B tensor and the primitive
/// force. Absolute when the primitive force vanishes.
pub fn equivalence_residual(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> Result<f64> {
    let prim = div_k_primitive(sp, rho, model)?;
    let ab = dealiased(sp, divergence_of_rows(sp, &tensor_ab(sp, rho, model)?));
    let mut diff = ab;
    diff.axpy(-1.0, &prim);
    let scale = prim.l2_norm();
    let err = diff.l2_norm();
    Ok(if scale > 0.0 { err / scale } else { err })
}

/// The two sides of the capillary energy exchange for a velocity `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapillaryPower {
    /// `∫ div K · u`.
    pub work: f64,
    /// `d/dt ∫½κ(ρ)|∇ρ|²` with `∂_tρ = −div(ρu)`.
    pub energy_rate: f64,
}

impl CapillaryPower {
    /// `|work + energy_rate|` relative to the larger side.
    pub fn residual(&self) -> f64 {
        let sum = (self.work + self.energy_rate).abs();
        let scale = self.work.abs().max(self.energy_rate.abs());
        if scale > 0.0 {
            sum / scale
        } else {
            sum
        }
    }
}

pub fn capillary_power(sp: &Spectral, rho: &ScalarField, u: &VectorField, model: &CapillarityModel) -> Result<CapillaryPower> {
    if rho.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    let force = div_k_primitive(sp, rho, model)?;
    let work = force.dot(u).integral();
    let rho_t = sp.divergence(&u.scale_by(rho)).scale(-1.0);
    let g = sp.gradient(rho);
    let g_t = sp.gradient(&rho_t);
    let (k, kp) = kappa_fields(rho, model);
    let g2 = g.norm_sq();
    let cross = g.dot(&g_t);
    let mut integrand = ScalarField::zeros(*rho.grid());
    for i in 0..rho.len() {
        integrand[i] = 0.5 * kp[i] * g2[i] * rho_t[i] + k[i] * cross[i];
    }
    Ok(CapillaryPower { work, energy_rate: integrand.integral() })
}

/// Relative residual of `∫div K·u + d/dt ∫½κ(ρ)|∇ρ|² = 0`.
pub fn capillary_power_residual(sp: &Spectral, rho: &ScalarField, u: &VectorField, model: &CapillarityModel) -> Result<f64> {
    Ok(capillary_power(sp, rho, u, model)?.residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::CapillarityLaw;
    use crate::Grid;
    use core::f64::consts::PI;

    fn sp(dim: usize, n: usize) -> Spectral {
        Spectral::new(Grid::new(dim, n, 2.0 * PI).unwrap())
    }

    #[test]
    fn constant_density_gives_zero() {
        let s = sp(2, 16);
        let rho = ScalarField::constant(*s.grid(), 1.7);
        let m = CapillarityModel::power_law(1.0, 1.0, 1.0).unwrap();
        let out = korteweg(&s, &rho, &m).unwrap();
        assert!(out.force.l2_norm() < 1e-14);
        assert!(out.tensor.components().iter().all(|c| c.max_abs() < 1e-12));
        assert_eq!(out.capillary_energy, 0.0);
        assert!(equivalence_residual(&s, &rho, &m).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_density() {
        let s = sp(1, 16);
        let rho = ScalarField::from_fn(*s.grid(), |x| x[0].sin());
        let m = CapillarityModel::power_law(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(div_k_primitive(&s, &rho, &m), Err(Error::NonPositiveDensity { .. })));
        assert!(tensor_ab(&s, &rho, &m).is_err());
    }

    #[test]
    fn hand_expanded_constant_kappa() {
        // κ ≡ 1: ∂_x(ρρ'' + ½ρ'²) − ∂_x(ρ'²) with ρ = 2 + ½ sin x.
        let s = sp(1, 64);
        let rho = ScalarField::from_fn(*s.grid(), |x| 2.0 + 0.5 * x[0].sin());
        let m = CapillarityModel::power_law(1.0, 0.0, 1.0).unwrap();
        let f = div_k_primitive(&s, &rho, &m).unwrap();
        let exact = ScalarField::from_fn(*s.grid(), |x| {
            let (sn, cs) = x[0].sin_cos();
            let (r, r1, r2, r3) = (2.0 + 0.5 * sn, 0.5 * cs, -0.5 * sn, -0.5 * cs);
            // ∂_x(ρρ″ − ½ρ′²) = ρ′ρ″ + ρρ‴ − ρ′ρ″
            r * r3 + r1 * r2 - r1 * r2
        });
        let err = (f.component(0) - &exact).max_abs();
        assert!(err < 1e-10, "{err:e}");
    }

    #[test]
    fn linearization_about_reference() {
        let s = sp(2, 32);
        let m = CapillarityModel::power_law(0.8, 1.5, 1.2).unwrap();
        let eps = 1e-6;
        let drho = ScalarField::from_fn(*s.grid(), |x| (x[0] + 2.0 * x[1]).cos());
        let rho = drho.map(|d| 1.2 + eps * d);
        let f = div_k_primitive(&s, &rho, &m).unwrap();
        let k = m.kappa(1.2).unwrap();
        let lin = s.gradient(&s.laplacian(&drho));
        for i in 0..2 {
            let expected = lin.component(i).scale(1.2 * k * eps);
            let err = (f.component(i) - &expected).max_abs();
            assert!(err < 1e-4 * expected.max_abs(), "axis {i}: {err}");
        }
    }

    #[test]
    fn force_has_zero_mean_and_tensor_is_symmetric() {
        let s = sp(2, 32);
        let rho = ScalarField::from_fn(*s.grid(), |x| 2.0 + 0.3 * x[0].sin() * (2.0 * x[1]).cos());
        let m = CapillarityModel::power_law(1.0, -1.0, 2.0).unwrap();
        let out = korteweg(&s, &rho, &m).unwrap();
        for c in out.force.components() {
            assert!(c.mean().abs() < 1e-12);
        }
        assert_eq!(out.tensor.asymmetry(), 0.0);
        assert!(out.tensor.is_symmetric());
    }

    #[test]
    fn alpha_zero_off_diagonal() {
        let s = sp(2, 32);
        let rho = ScalarField::from_fn(*s.grid(), |x| 2.0 + 0.3 * x[0].sin() * x[1].sin());
        let m = CapillarityModel::power_law(0.6, 0.0, 2.0).unwrap();
        let t = tensor_ab(&s, &rho, &m).unwrap();
        let g = s.gradient(&rho);
        let expected = (g.component(0) * g.component(1)).scale(-0.6);
        assert!((t.get(0, 1) - &expected).max_abs() < 1e-13);
    }

    #[test]
    fn critical_log_form() {
        let s = sp(2, 32);
        let kappa = 1.7;
        let rho = ScalarField::from_fn(*s.grid(), |x| 2.0 + 0.4 * x[0].cos() + 0.2 * (x[0] - x[1]).sin());
        let m = CapillarityModel::critical(kappa, 2.0).unwrap();
        let t = tensor_ab(&s, &rho, &m).unwrap();
        let l = rho.map(f64::ln);
        let (gl, lap) = s.gradient_and_laplacian(&l);
        let g2 = gl.norm_sq();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = (gl.component(i) * gl.component(j)).scale(-kappa);
                if i == j {
                    e.axpy(kappa, &lap);
                    e.axpy(0.5 * kappa, &g2);
                }
                assert!((t.get(i, j) - &e).max_abs() < 1e-10, "({i},{j})");
            }
        }
    }

    #[test]
    fn reproduces_power_law_constants() {
        // (A¹ΔB̃ − A²|∇Ã|²)δ − B̃_α ∂Ã⊗∂Ã with Ã = ρ^{α/2+1}, B̃ = ρ^{2+α}.
        let s = sp(2, 32);
        let rho = ScalarField::from_fn(*s.grid(), |x| 1.5 + 0.3 * x[0].sin() + 0.2 * x[1].cos());
        for alpha in [-3.0, -1.0, 0.0, 1.0, 2.0] {
            let kappa = 0.9;
            let m = CapillarityModel::power_law(kappa, alpha, 1.0).unwrap();
            let t = tensor_ab(&s, &rho, &m).unwrap();
            let a1 = kappa / (2.0 + alpha);
            let a2 = 2.0 * kappa * (alpha + 1.0) / ((alpha + 2.0) * (alpha + 2.0));
            let ba = 4.0 * kappa / ((alpha + 2.0) * (alpha + 2.0));
            let at = rho.map(|r| r.powf(0.5 * alpha + 1.0));
            let bt = rho.map(|r| r.powf(2.0 + alpha));
            let ga = s.gradient(&at);
            let diag = &s.laplacian(&bt).scale(a1) - &ga.norm_sq().scale(a2);
            for i in 0..2 {
                for j in 0..2 {
                    let mut e = (ga.component(i) * ga.component(j)).scale(-ba);
                    if i == j {
                        e.axpy(1.0, &diag);
                    }
                    let err = (t.get(i, j) - &e).max_abs();
                    assert!(err < 1e-10, "alpha={alpha} ({i},{j}) err={err}");
                }
            }
        }
    }

    #[test]
    fn equivalence_across_models() {
        let s1 = sp(1, 128);
        let rho1 = ScalarField::from_fn(*s1.grid(), |x| 2.0 + x[0].sin());
        let s2 = sp(2, 64);
        let rho2 = ScalarField::from_fn(*s2.grid(), |x| 2.0 + 0.3 * x[0].sin() * x[1].sin());
        let mut models: Vec<_> = [-3.0, -1.0, 0.0, 1.0, 2.0].iter().map(|&a| CapillarityModel::power_law(1.0, a, 2.0).unwrap()).collect();
        models.push(CapillarityModel::critical(1.0, 2.0).unwrap());
        models.push(CapillarityModel::new(CapillarityLaw::PiecewiseConstant { rho_threshold: 0.3, kappa: 1.0, epsilon: 0.5 }, 2.0).unwrap());
        for m in &models {
            let r1 = equivalence_residual(&s1, &rho1, m).unwrap();
            let r2 = equivalence_residual(&s2, &rho2, m).unwrap();
            assert!(r1 < 1e-8 && r2 < 1e-8, "{:?}: {r1:e} {r2:e}", m.law());
        }
    }

    #[test]
    fn capillary_power_balances() {
        let s = sp(2, 64);
        let g = *s.grid();
        let rho = ScalarField::from_fn(g, |x| 2.0 + 0.3 * (x[0] + x[1]).sin() + 0.2 * (2.0 * x[1]).cos());
        let u = VectorField::new(alloc::vec![
            ScalarField::from_fn(g, |x| (x[0] + x[1]).cos() + 0.5 * (2.0 * x[1]).sin()),
            ScalarField::from_fn(g, |x| (x[0] + x[1] + 0.3).sin() + 0.4 * (2.0 * x[1]).cos()),
        ])
        .unwrap();
        for m in [CapillarityModel::power_law(1.0, 0.0, 2.0).unwrap(), CapillarityModel::critical(1.0, 2.0).unwrap()] {
            let p = capillary_power(&s, &rho, &u, &m).unwrap();
            assert!(p.work.abs() > 1e-3, "{p:?}");
            assert!(p.residual() < 1e-8, "{:?}: {p:?}", m.law());
        }
        let zero = VectorField::zeros(g);
        assert_eq!(capillary_power_residual(&s, &rho, &zero, &CapillarityModel::critical(1.0, 2.0).unwrap()).unwrap(), 0.0);
    }
}
