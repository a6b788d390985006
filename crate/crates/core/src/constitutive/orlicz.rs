use num_traits::Float;

use crate::ScalarField;

/// `Ψ(x) = x^p` for `x ≤ δ`, `δ^{p−q} x^q` beyond (continuous at `δ`).
pub fn orlicz_psi(x: f64, p: f64, q: f64, delta: f64) -> f64 {
    if x <= delta {
        x.powf(p)
    } else {
        delta.powf(p - q) * x.powf(q)
    }
}

fn modular(f: &ScalarField, t: f64, p: f64, q: f64, delta: f64) -> f64 {
    f.values().iter().map(|v| orlicz_psi(v.abs() / t, p, q, delta)).sum::<f64>() * f.grid().cell_volume()
}

/// Luxemburg norm `inf{t > 0 : ∫Ψ(|f|/t) ≤ 1}` of the spliced Orlicz space
/// `L^q_p`, found by bisection to relative precision `1e-12`.
pub fn orlicz_norm(f: &ScalarField, p: f64, q: f64, delta: f64) -> f64 {
    debug_assert!(p >= 1.0 && q >= 1.0 && delta > 0.0);
    let top = f.max_abs();
    if top == 0.0 {
        return 0.0;
    }
    let mut hi = top;
    while modular(f, hi, p, q, delta) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while modular(f, lo, p, q, delta) <= 1.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return 0.0;
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if modular(f, mid, p, q, delta) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
