use num_traits::Float;

use crate::{Bound, Error, Result};

/// `base + coeff · ρ^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityLaw {
    pub base: f64,
    pub coeff: f64,
    pub exponent: f64,
}

impl DensityLaw {
    pub fn constant(c: f64) -> Self {
        Self { base: c, coeff: 0.0, exponent: 0.0 }
    }

    pub fn power(coeff: f64, exponent: f64) -> Self {
        Self { base: 0.0, coeff, exponent }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        if self.coeff == 0.0 {
            self.base
        } else {
            self.base + self.coeff * rho.powf(self.exponent)
        }
    }
}

/// Constants of the near-vacuum lower bounds and polynomial growth bounds
/// required of μ and λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBounds {
    pub c: f64,
    pub s0: f64,
    pub c1: f64,
    pub m: i32,
    pub c_prime: f64,
    pub s0_prime: f64,
    pub c2: f64,
    pub m_prime: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViscosityModel {
    pub mu: DensityLaw,
    pub lambda: DensityLaw,
    pub bounds: Option<GrowthBounds>,
}

/// Outcome of a successful validation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscosityReport {
    pub samples: usize,
    pub min_mu: f64,
    pub min_lame: f64,
    pub growth_bounds_checked: bool,
}

impl ViscosityModel {
    pub fn constant(mu: f64, lambda: f64) -> Self {
        Self { mu: DensityLaw::constant(mu), lambda: DensityLaw::constant(lambda), bounds: None }
    }

    pub fn inviscid() -> Self {
        Self::constant(0.0, 0.0)
    }

    pub fn is_inviscid(&self) -> bool {
        self.mu == DensityLaw::constant(0.0) && self.lambda == DensityLaw::constant(0.0)
    }

    /// `(μ(ρ), λ(ρ))`.
    pub fn eval(&self, rho: f64) -> Result<(f64, f64)> {
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity { value: rho });
        }
        Ok(self.eval_unchecked(rho))
    }

    pub(crate) fn eval_unchecked(&self, rho: f64) -> (f64, f64) {
        (self.mu.eval(rho), self.lambda.eval(rho))
    }

    /// Samples `samples` log-spaced densities in `[lo, hi]` and checks
    /// `μ > 0`, `2μ + Nλ ≥ 0` and, when present, the growth bounds.
    pub fn validate(&self, lo: f64, hi: f64, dim: usize, samples: usize) -> Result<ViscosityReport> {
        if !(lo > 0.0 && hi >= lo) || samples < 2 {
            return Err(Error::InvalidArgument("validation range must satisfy 0 < lo <= hi"));
        }
        let mut min_mu = f64::INFINITY;
        let mut min_lame = f64::INFINITY;
        let ratio = (hi / lo).ln();
        for i in 0..samples {
            let rho = lo * (ratio * i as f64 / (samples - 1) as f64).exp();
            let (mu, lambda) = self.eval_unchecked(rho);
            let fail = |bound, value| Err(Error::ConstraintViolated { bound, rho, value });
            if !(mu > 0.0) {
                return fail(Bound::MuPositive, mu);
            }
            let lame = 2.0 * mu + dim as f64 * lambda;
            if !(lame >= 0.0) {
                return fail(Bound::LameCombination, lame);
            }
            if let Some(b) = &self.bounds {
                if rho <= b.s0 && !(mu > b.c) {
                    return fail(Bound::MuLower, mu);
                }
                if rho >= b.s0 && !(mu <= b.c1 * rho.powi(b.m)) {
                    return fail(Bound::MuUpper, mu);
                }
                if rho <= b.s0_prime && !(lambda > b.c_prime) {
                    return fail(Bound::LambdaLower, lambda);
                }
                if rho >= b.s0_prime && !(lambda <= b.c2 * rho.powi(b.m_prime)) {
                    return fail(Bound::LambdaUpper, lambda);
                }
            }
            min_mu = min_mu.min(mu);
            min_lame = min_lame.min(lame);
        }
        Ok(ViscosityReport { samples, min_mu, min_lame, growth_bounds_checked: self.bounds.is_some() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_viscosity_is_valid() {
        let v = ViscosityModel::constant(1.0, 0.0);
        let r = v.validate(1e-3, 1e3, 2, 200).unwrap();
        assert_eq!(r.min_mu, 1.0);
        assert!(!r.growth_bounds_checked);
    }

    #[test]
    fn degenerate_mu_fails_near_vacuum_bound() {
        let bounds = GrowthBounds { c: 0.1, s0: 0.5, c1: 10.0, m: 1, c_prime: -1.0, s0_prime: 0.5, c2: 10.0, m_prime: 1 };
        let v = ViscosityModel { mu: DensityLaw::power(1.0, 1.0), lambda: DensityLaw::constant(0.0), bounds: Some(bounds) };
        let err = v.validate(1e-6, 10.0, 2, 100).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolated { bound: Bound::MuLower, .. }), "{err:?}");
        // The same law away from vacuum passes.
        assert!(v.validate(0.2, 10.0, 2, 100).is_ok());
    }

    #[test]
    fn zero_mu_is_rejected() {
        let v = ViscosityModel::constant(0.0, 1.0);
        assert!(matches!(v.validate(0.1, 1.0, 1, 10), Err(Error::ConstraintViolated { bound: Bound::MuPositive, .. })));
        let w = ViscosityModel::constant(1.0, -1.5);
        assert!(matches!(w.validate(0.1, 1.0, 2, 10), Err(Error::ConstraintViolated { bound: Bound::LameCombination, .. })));
    }
}
