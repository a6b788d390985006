//! Dyadic (Littlewood–Paley) blocks with sharp Fourier cutoffs and the
//! Besov norms built from them.
//!
//! Block `j ≥ 0` keeps `2^j ≤ |ξ| < 2^{j+1}`; the low block keeps `|ξ| < 1`
//! and carries weight 1.

use alloc::vec::Vec;

use num_traits::Float;

use crate::{Error, Result, ScalarField, Spectral};

/// `Δ_j f` for the low block followed by `j = 0, 1, …` up to the grid cutoff.
pub fn dyadic_blocks(sp: &Spectral, f: &ScalarField) -> Vec<(Option<u32>, ScalarField)> {
    let kmax = sp.max_wavenumber();
    let mut out = alloc::vec![(None, sp.band_pass(f, 0.0, 1.0))];
    let mut j = 0u32;
    while 2f64.powi(j as i32) <= kmax {
        let lo = 2f64.powi(j as i32);
        out.push((Some(j), sp.band_pass(f, lo, 2.0 * lo)));
        j += 1;
    }
    out
}

/// `‖f‖_{B^s_{p,q}}`; `p` and `q` may be `f64::INFINITY`.
pub fn besov_norm(sp: &Spectral, f: &ScalarField, s: f64, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::InvalidArgument("Besov indices p, q must lie in [1, inf]"));
    }
    let terms = dyadic_blocks(sp, f).into_iter().map(|(j, block)| {
        let weight = j.map_or(1.0, |j| 2f64.powf(j as f64 * s));
        weight * block.lp_norm(p)
    });
    Ok(if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    })
}

/// Ratio `‖f‖_{L^p} / (‖f‖^{1−θ}_{B^{−α}_{∞,∞}} ‖f‖^θ_{B^β_{q,q}})` with
/// `θ = q/p` and `β = α(p/q − 1)`: the smallest constant for which the
/// refined Sobolev inequality holds on `f`.
pub fn refined_sobolev_ratio(sp: &Spectral, f: &ScalarField, p: f64, q: f64, alpha: f64) -> Result<f64> {
    if !(1.0 <= q && q < p && p.is_finite()) || !(alpha > 0.0) {
        return Err(Error::InvalidArgument("need 1 <= q < p < inf and alpha > 0"));
    }
    let theta = q / p;
    let beta = alpha * (p / q - 1.0);
    let low = besov_norm(sp, f, -alpha, f64::INFINITY, f64::INFINITY)?;
    let high = besov_norm(sp, f, beta, q, q)?;
    let lhs = f.lp_norm(p);
    if lhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / (low.powf(1.0 - theta) * high.powf(theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Grid;
    use core::f64::consts::PI;

    #[test]
    fn single_mode_hits_one_block() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let sp = Spectral::new(g);
        // |ξ| = 5 ∈ [4, 8): block j = 2.
        let f = ScalarField::from_fn(g, |x| (5.0 * x[0]).sin());
        for &(p, q) in &[(2.0, 2.0), (4.0, 1.0), (f64::INFINITY, f64::INFINITY)] {
            let b = besov_norm(&sp, &f, 0.6, p, q).unwrap();
            assert!((b - 4f64.powf(0.6) * f.lp_norm(p)).abs() < 1e-11, "p={p} q={q}");
        }
        assert_eq!(besov_norm(&sp, &ScalarField::zeros(g), 1.0, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn blocks_partition_the_spectrum() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let sp = Spectral::new(g);
        let f = ScalarField::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() + 0.3 * (7.0 * x[1]).cos() + 1.0);
        let mut sum = ScalarField::zeros(g);
        for (_, b) in dyadic_blocks(&sp, &f) {
            sum.axpy(1.0, &b);
        }
        assert!((&sum - &f).max_abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_indices() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let sp = Spectral::new(g);
        let f = ScalarField::zeros(g);
        assert!(besov_norm(&sp, &f, 0.0, 0.5, 2.0).is_err());
        assert!(refined_sobolev_ratio(&sp, &f, 2.0, 3.0, 1.0).is_err());
    }
}
