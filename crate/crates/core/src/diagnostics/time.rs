//! Quadrature and differentiation in time on recorded samples.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

fn is_uniform(t: &[f64]) -> bool {
    if t.len() < 3 {
        return true;
    }
    let h = t[1] - t[0];
    t.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
}

/// `∫ f dt` by the trapezoidal rule.
pub fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1])).sum()
}

/// `∫_{t_0}^{t_k} f dt` for every `k`. Fourth order on uniform samples
/// (Simpson, with a 3/8 panel for odd `k` and a four-point rule for the first
/// interval); trapezoidal otherwise.
pub fn cumulative_integral(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut out = vec![0.0; n];
    if n < 4 || !is_uniform(t) {
        for k in 1..n {
            out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
        }
        return out;
    }
    let h = t[1] - t[0];
    let simpson = |a: usize, b: usize| -> f64 {
        (a..b).step_by(2).map(|i| h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2])).sum()
    };
    for k in 1..n {
        out[k] = if k == 1 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if k % 2 == 0 {
            simpson(0, k)
        } else {
            simpson(0, k - 3) + 3.0 * h / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k])
        };
    }
    out
}
