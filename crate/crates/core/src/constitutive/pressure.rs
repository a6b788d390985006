use num_traits::Float;

use crate::{Error, Result};

/// γ-law pressure `P(ρ) = aρ^γ` with reference density ρ̄.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureLaw {
    a: f64,
    gamma: f64,
    rho_bar: f64,
}

/// Measured two-sided bounds of `j_γ(ρ)` against powers of `|ρ − ρ̄|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JGammaBounds {
    /// Bounds of `j_γ / |ρ−ρ̄|²` on `{|ρ−ρ̄| ≤ δ}`.
    pub near: (f64, f64),
    /// Bounds of `j_γ / |ρ−ρ̄|^γ` on `{|ρ−ρ̄| ≥ δ}` (the pair `ν`, `C`).
    pub far: (f64, f64),
}

impl PressureLaw {
    pub fn new(a: f64, gamma: f64, rho_bar: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidModel("pressure coefficient a must be positive"));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidModel("gamma must exceed 1"));
        }
        if !(rho_bar > 0.0 && rho_bar.is_finite()) {
            return Err(Error::InvalidModel("rho_bar must be positive"));
        }
        Ok(Self { a, gamma, rho_bar })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    /// `aρ^γ`, for `ρ ≥ 0`.
    pub fn pressure(&self, rho: f64) -> f64 {
        debug_assert!(rho >= 0.0);
        self.a * rho.powf(self.gamma)
    }

    /// `aγρ^{γ−1}`.
    pub fn pressure_prime(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 1.0)
    }

    /// `Π(s) = s(∫_ρ̄^s P(z)/z² dz − P(ρ̄)/ρ̄)`, with the integral in closed form.
    pub fn pi_potential(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity { value: rho });
        }
        Ok(self.pi_unchecked(rho))
    }

    pub(crate) fn pi_unchecked(&self, rho: f64) -> f64 {
        let (a, g, r) = (self.a, self.gamma, self.rho_bar);
        // ∫_ρ̄^s a z^{γ−2} dz = a (s^{γ−1} − ρ̄^{γ−1}) / (γ−1)
        let integral = a * (rho.powf(g - 1.0) - r.powf(g - 1.0)) / (g - 1.0);
        rho * (integral - self.pressure(r) / r)
    }

    /// `Π′(s) = ∫_ρ̄^s P/z² + P(s)/s − P(ρ̄)/ρ̄`.
    pub fn pi_prime(&self, rho: f64) -> f64 {
        let (a, g, r) = (self.a, self.gamma, self.rho_bar);
        a * g * (rho.powf(g - 1.0) - r.powf(g - 1.0)) / (g - 1.0)
    }

    /// `Π″(s) = P′(s)/s`.
    pub fn pi_second(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 2.0)
    }

    /// `ρ^γ + (γ−1)ρ̄^γ − γρ̄^{γ−1}ρ`.
    pub fn j_gamma(&self, rho: f64) -> f64 {
        let (g, r) = (self.gamma, self.rho_bar);
        rho.powf(g) + (g - 1.0) * r.powf(g) - g * r.powf(g - 1.0) * rho
    }

    /// Samples `ρ ∈ (0, rho_max]` and reports the extreme ratios of `j_γ`
    /// against `|ρ−ρ̄|²` (near set) and `|ρ−ρ̄|^γ` (far set).
    pub fn j_gamma_bounds(&self, delta: f64, rho_max: f64, samples: usize) -> JGammaBounds {
        let mut near = (f64::INFINITY, 0.0f64);
        let mut far = (f64::INFINITY, 0.0f64);
        for i in 1..=samples {
            let rho = rho_max * i as f64 / samples as f64;
            let d = (rho - self.rho_bar).abs();
            if d == 0.0 {
                continue;
            }
            let j = self.j_gamma(rho);
            let (slot, ratio) = if d <= delta { (&mut near, j / (d * d)) } else { (&mut far, j / d.powf(self.gamma)) };
            slot.0 = slot.0.min(ratio);
            slot.1 = slot.1.max(ratio);
        }
        JGammaBounds { near, far }
    }
}
