//! Compactly supported test functions and smooth partitions of unity.

use alloc::vec::Vec;

use num_traits::Float;

use crate::{Error, Grid, Result, ScalarField, VectorField};

/// A test function on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunctionSpec {
    /// `ψ ≡ 1`.
    Unit,
    /// `(1 − r²/R²)^order` for `r < R` (periodic distance to `center`), else 0.
    Bump { center: [f64; 2], radius: f64, order: u32 },
    /// Tensor product `Π_i ψ((x_i − c_i)/h_i)` of the smooth hat `ψ`, where
    /// `ψ(t) = S(1 − |t|)` and `S` is the `C^∞` step with `S(t) + S(1−t) = 1`.
    /// Integer translates sum to one.
    PartitionCell { center: [f64; 2], spacing: [f64; 2] },
}

/// `e(t) = exp(−1/t)` for `t > 0`.
fn e(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = e(t);
        a / (a + e(1.0 - t))
    }
}

fn smooth_step_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (e(t), e(1.0 - t));
    let (da, db) = (a / (t * t), b / ((1.0 - t) * (1.0 - t)));
    // d/dt a/(a+b) with b(t) = e(1−t), b′ = −db
    (da * b + a * db) / ((a + b) * (a + b))
}

fn hat(t: f64) -> f64 {
    smooth_step(1.0 - t.abs())
}

fn hat_prime(t: f64) -> f64 {
    -t.signum() * smooth_step_prime(1.0 - t.abs())
}

impl TestFunctionSpec {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match *self {
            TestFunctionSpec::Unit => Ok(()),
            TestFunctionSpec::Bump { radius, order, .. } => {
                if order == 0 || !(radius > 0.0) {
                    return Err(Error::InvalidArgument("bump needs radius > 0 and order >= 1"));
                }
                let limit = 0.5 * grid.length();
                if radius >= limit {
                    return Err(Error::RadiusTooLarge { radius, limit });
                }
                Ok(())
            }
            TestFunctionSpec::PartitionCell { spacing, .. } => {
                let limit = 0.5 * grid.length();
                for &h in &spacing[..grid.dim()] {
                    if !(h > 0.0) {
                        return Err(Error::InvalidArgument("cell spacing must be positive"));
                    }
                    if h >= limit {
                        return Err(Error::RadiusTooLarge { radius: h, limit });
                    }
                }
                Ok(())
            }
        }
    }

    /// Value at `x`.
    pub fn eval(&self, grid: &Grid, x: [f64; 2]) -> f64 {
        match *self {
            TestFunctionSpec::Unit => 1.0,
            TestFunctionSpec::Bump { center, radius, order } => {
                let r = grid.periodic_distance(x, center);
                if r >= radius {
                    0.0
                } else {
                    (1.0 - r * r / (radius * radius)).powi(order as i32)
                }
            }
            TestFunctionSpec::PartitionCell { center, spacing } => (0..grid.dim())
                .map(|i| hat(grid.periodic_delta(center[i], x[i]) / spacing[i]))
                .product(),
        }
    }

    /// Exact gradient at `x`.
    pub fn gradient(&self, grid: &Grid, x: [f64; 2]) -> [f64; 2] {
        let d = grid.dim();
        match *self {
            TestFunctionSpec::Unit => [0.0; 2],
            TestFunctionSpec::Bump { center, radius, order } => {
                let delta = [grid.periodic_delta(center[0], x[0]), if d == 2 { grid.periodic_delta(center[1], x[1]) } else { 0.0 }];
                let r2 = delta[0] * delta[0] + delta[1] * delta[1];
                let r2max = radius * radius;
                if r2 >= r2max {
                    return [0.0; 2];
                }
                let c = -2.0 * order as f64 * (1.0 - r2 / r2max).powi(order as i32 - 1) / r2max;
                [c * delta[0], c * delta[1]]
            }
            TestFunctionSpec::PartitionCell { center, spacing } => {
                let t: Vec<f64> = (0..d).map(|i| grid.periodic_delta(center[i], x[i]) / spacing[i]).collect();
                let mut g = [0.0; 2];
                for i in 0..d {
                    let mut v = hat_prime(t[i]) / spacing[i];
                    for (j, &tj) in t.iter().enumerate() {
                        if j != i {
                            v *= hat(tj);
                        }
                    }
                    g[i] = v;
                }
                g
            }
        }
    }

    pub fn field(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(*grid, |x| self.eval(grid, x))
    }

    pub fn gradient_field(&self, grid: &Grid) -> VectorField {
        let comps = (0..grid.dim())
            .map(|i| ScalarField::from_fn(*grid, |x| self.gradient(grid, x)[i]))
            .collect();
        VectorField::new(comps).expect("components share a grid")
    }

    /// Center of the support (`None` for [`TestFunctionSpec::Unit`]).
    pub fn center(&self) -> Option<[f64; 2]> {
        match *self {
            TestFunctionSpec::Unit => None,
            TestFunctionSpec::Bump { center, .. } | TestFunctionSpec::PartitionCell { center, .. } => Some(center),
        }
    }

    /// Radius of a ball around [`Self::center`] containing the support.
    pub fn support_radius(&self, dim: usize) -> f64 {
        match *self {
            TestFunctionSpec::Unit => f64::INFINITY,
            TestFunctionSpec::Bump { radius, .. } => radius,
            TestFunctionSpec::PartitionCell { spacing, .. } => {
                spacing[..dim].iter().map(|h| h * h).sum::<f64>().sqrt()
            }
        }
    }
}

/// Axis-aligned box `[lo, hi]` (the second axis is ignored in 1D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

/// Smooth partition of unity of `region` subordinate to balls of radius
/// `lambda`: cells on a lattice with spacings `h_i ≤ λ/√dim` aligned with the
/// region ends, so every support fits in `B(x_k, λ)` and `Σφ_k = 1` on the
/// region.
pub fn partition_of_unity(grid: &Grid, region: Region, lambda: f64) -> Result<Vec<TestFunctionSpec>> {
    let d = grid.dim();
    let sizes: Vec<f64> = (0..d).map(|i| region.hi[i] - region.lo[i]).collect();
    if sizes.iter().any(|&s| !(s > 0.0)) || !(lambda > 0.0) {
        return Err(Error::InvalidArgument("region must be non-empty and lambda positive"));
    }
    let smallest = sizes.iter().cloned().fold(f64::INFINITY, f64::min);
    if lambda >= smallest {
        return Err(Error::RadiusTooLarge { radius: lambda, limit: smallest });
    }
    let largest = sizes.iter().cloned().fold(0.0, f64::max);
    if largest + 2.0 * lambda > grid.length() {
        return Err(Error::RadiusTooLarge { radius: lambda, limit: 0.5 * (grid.length() - largest) });
    }
    let target = lambda / (d as f64).sqrt();
    let cells: Vec<usize> = sizes.iter().map(|&s| (s / target - 1e-12).ceil().max(1.0) as usize).collect();
    let spacing: Vec<f64> = sizes.iter().zip(&cells).map(|(&s, &c)| s / c as f64).collect();
    let mut out = Vec::new();
    let ny = if d == 2 { cells[1] } else { 0 };
    for ky in 0..=ny {
        for kx in 0..=cells[0] {
            let cx = region.lo[0] + kx as f64 * spacing[0];
            let (cy, hy) = if d == 2 { (region.lo[1] + ky as f64 * spacing[1], spacing[1]) } else { (0.0, 0.0) };
            out.push(TestFunctionSpec::PartitionCell { center: [cx, cy], spacing: [spacing[0], hy] });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_symmetry() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
            let h = 1e-6;
            if t > 0.01 && t < 0.99 {
                let fd = (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h);
                assert!((fd - smooth_step_prime(t)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn bump_values_and_gradient() {
        let g = Grid::new(2, 16, 4.0).unwrap();
        let b = TestFunctionSpec::Bump { center: [3.8, 0.1], radius: 1.0, order: 4 };
        assert_eq!(b.eval(&g, [3.8, 0.1]), 1.0);
        assert_eq!(b.eval(&g, [2.0, 2.0]), 0.0);
        // periodic wrap
        assert!(b.eval(&g, [0.2, 0.1]) > 0.0);
        let x = [0.1, 3.9];
        let h = 1e-6;
        let fd = (b.eval(&g, [x[0] + h, x[1]]) - b.eval(&g, [x[0] - h, x[1]])) / (2.0 * h);
        assert!((fd - b.gradient(&g, x)[0]).abs() < 1e-6);
        assert!(TestFunctionSpec::Bump { center: [0.0; 2], radius: 2.0, order: 2 }.validate(&g).is_err());
    }

    #[test]
    fn partition_sums_to_one_on_region() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let region = Region { lo: [2.0, 2.5], hi: [5.0, 5.0] };
        let fam = partition_of_unity(&g, region, 0.6).unwrap();
        for p in 0..g.len() {
            let x = g.coords(p);
            let inside = (0..2).all(|i| x[i] >= region.lo[i] && x[i] <= region.hi[i]);
            let s: f64 = fam.iter().map(|f| f.eval(&g, x)).sum();
            if inside {
                assert!((s - 1.0).abs() < 1e-12, "{x:?}: {s}");
            }
            assert!(s <= 1.0 + 1e-12);
        }
        for f in &fam {
            let c = f.center().unwrap();
            for p in 0..g.len() {
                let x = g.coords(p);
                if g.periodic_distance(x, c) >= 0.6 {
                    assert_eq!(f.eval(&g, x), 0.0);
                }
            }
        }
    }

    #[test]
    fn partition_rejects_large_radius() {
        let g = Grid::new(1, 32, 4.0).unwrap();
        let r = Region { lo: [1.0, 0.0], hi: [2.0, 0.0] };
        assert!(matches!(partition_of_unity(&g, r, 1.5), Err(Error::RadiusTooLarge { .. })));
        let wide = Region { lo: [0.0, 0.0], hi: [3.5, 0.0] };
        assert!(matches!(partition_of_unity(&g, wide, 0.5), Err(Error::RadiusTooLarge { .. })));
    }
}
