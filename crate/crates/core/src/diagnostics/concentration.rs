use num_traits::Float;

use crate::constitutive::CapillarityModel;
use crate::{Error, Result, ScalarField, Spectral};

/// Largest `‖1_{B(x,r)} ∇A(ρ)‖_{L²}` over balls centered at grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentration {
    pub max_value: f64,
    pub center: [f64; 2],
    pub index: usize,
}

/// `|∇A(ρ)|²` on the grid.
fn density(sp: &Spectral, rho: &ScalarField, model: &CapillarityModel) -> Result<ScalarField> {
    let a = rho.try_map(|r| model.a(r))?;
    Ok(sp.gradient(&a).norm_sq())
}

fn ball(sp: &Spectral, r: f64) -> ScalarField {
    let g = *sp.grid();
    ScalarField::from_fn(g, |x| if g.periodic_distance(x, [0.0, 0.0]) <= r { 1.0 } else { 0.0 })
}

/// Scans all grid-centered balls of radius `r` using one circular
/// convolution of `|∇A|²` with the sharp ball indicator.
pub fn concentration_scan(sp: &Spectral, rho: &ScalarField, r: f64, model: &CapillarityModel) -> Result<Concentration> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("ball radius must be positive"));
    }
    let w = density(sp, rho, model)?;
    let mut fw = sp.forward(&w);
    let fb = sp.forward(&ball(sp, r));
    for (a, b) in fw.coeffs_mut().iter_mut().zip(fb.coeffs()) {
        *a *= b;
    }
    let conv = sp.inverse(&fw);
    let dv = sp.grid().cell_volume();
    let (index, value) = conv
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    Ok(Concentration { max_value: (value * dv).max(0.0).sqrt(), center: sp.grid().coords(index), index })
}
