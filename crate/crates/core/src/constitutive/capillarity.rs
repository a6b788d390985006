use num_traits::Float;

use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Shape of the capillarity coefficient κ(ρ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapillarityLaw {
    /// `κ ρ^α`, `α ≠ −2`.
    PowerLaw { kappa: f64, alpha: f64 },
    /// `κ ρ^{−2}`.
    Critical { kappa: f64 },
    /// `ρ^{−(2+ε)}` below `rho_threshold`, `κ` above twice the threshold,
    /// joined by a C¹ cubic bridge.
    PiecewiseConstant { rho_threshold: f64, kappa: f64, epsilon: f64 },
    /// Same profile as [`CapillarityLaw::PiecewiseConstant`], tagged for the
    /// one-dimensional large-data regime.
    OneD { rho_threshold: f64, kappa: f64, epsilon: f64 },
}

/// Cubic Hermite bridge on `[t, 2t]` matching values and slopes.
#[derive(Debug, Clone, PartialEq)]
struct Bridge {
    t: f64,
    eps: f64,
    kappa: f64,
    v0: f64,
    m0: f64,
    /// `∫_t^{2t} √κ` and `∫_t^{2t} zκ(z)`.
    a_span: f64,
    b_span: f64,
    gl: GaussLegendre,
}

impl Bridge {
    fn new(t: f64, kappa: f64, eps: f64) -> Result<Self> {
        let v0 = t.powf(-(2.0 + eps));
        let m0 = -(2.0 + eps) * t.powf(-(3.0 + eps));
        let gl = GaussLegendre::new(24);
        let mut b = Self { t, eps, kappa, v0, m0, a_span: 0.0, b_span: 0.0, gl };
        for i in 0..=256 {
            if b.eval(t * (1.0 + i as f64 / 256.0)).0 <= 0.0 {
                return Err(Error::InvalidModel("capillarity bridge is not positive"));
            }
        }
        b.a_span = b.gl.integrate(t, 2.0 * t, 8, |z| b.eval(z).0.sqrt());
        b.b_span = b.gl.integrate(t, 2.0 * t, 2, |z| z * b.eval(z).0);
        Ok(b)
    }

    /// `(θ₁(ρ), θ₁′(ρ))` for `ρ ∈ [t, 2t]`.
    fn eval(&self, rho: f64) -> (f64, f64) {
        let h = self.t;
        let s = (rho - self.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let v = h00 * self.v0 + h10 * h * self.m0 + h01 * self.kappa;
        let d = (d00 * self.v0 + d10 * h * self.m0 + d01 * self.kappa) / h;
        (v, d)
    }

    fn kappa(&self, rho: f64) -> (f64, f64) {
        if rho < self.t {
            let e = 2.0 + self.eps;
            (rho.powf(-e), -e * rho.powf(-e - 1.0))
        } else if rho <= 2.0 * self.t {
            self.eval(rho)
        } else {
            (self.kappa, 0.0)
        }
    }

    /// `∫_t^ρ √κ` (`which = 0`) or `∫_t^ρ zκ(z)` (`which = 1`).
    fn primitive(&self, rho: f64, which: usize) -> f64 {
        let t = self.t;
        if rho < t {
            // √κ = z^{−(1+ε/2)}, zκ = z^{−(1+ε)}: ∫_t^ρ z^{−1−c} = t^{−c} expm1(−c ln(ρ/t)) / (−c).
            let c = if which == 0 { 0.5 * self.eps } else { self.eps };
            let l = (rho / t).ln();
            if c == 0.0 {
                l
            } else {
                t.powf(-c) * (-c * l).exp_m1() / -c
            }
        } else if rho <= 2.0 * t {
            if which == 0 {
                self.gl.integrate(t, rho, 8, |z| self.eval(z).0.sqrt())
            } else {
                self.gl.integrate(t, rho, 2, |z| z * self.eval(z).0)
            }
        } else if which == 0 {
            self.a_span + self.kappa.sqrt() * (rho - 2.0 * t)
        } else {
            self.b_span + 0.5 * self.kappa * (rho * rho - 4.0 * t * t)
        }
    }
}

/// κ(ρ) together with the reference density at which `A` and `B` vanish.
///
/// `A′(ρ) = √κ(ρ)`, `B′(ρ) = ρ κ(ρ)`, `A(ρ̄) = B(ρ̄) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapillarityModel {
    law: CapillarityLaw,
    rho_ref: f64,
    bridge: Option<Bridge>,
}

impl CapillarityModel {
    pub fn new(law: CapillarityLaw, rho_ref: f64) -> Result<Self> {
        if !(rho_ref > 0.0 && rho_ref.is_finite()) {
            return Err(Error::InvalidModel("reference density must be positive"));
        }
        let bridge = match law {
            CapillarityLaw::PowerLaw { kappa, alpha } => {
                if !(kappa > 0.0) || !alpha.is_finite() {
                    return Err(Error::InvalidModel("power law needs kappa > 0 and finite alpha"));
                }
                if alpha == -2.0 {
                    return Err(Error::InvalidModel("alpha = -2 is the Critical law"));
                }
                None
            }
            CapillarityLaw::Critical { kappa } => {
                if !(kappa > 0.0) {
                    return Err(Error::InvalidModel("kappa must be positive"));
                }
                None
            }
            CapillarityLaw::PiecewiseConstant { rho_threshold, kappa, epsilon }
            | CapillarityLaw::OneD { rho_threshold, kappa, epsilon } => {
                if !(rho_threshold > 0.0) || !(kappa > 0.0) || !(epsilon >= 0.0) {
                    return Err(Error::InvalidModel("piecewise law needs threshold > 0, kappa > 0, epsilon >= 0"));
                }
                Some(Bridge::new(rho_threshold, kappa, epsilon)?)
            }
        };
        Ok(Self { law, rho_ref, bridge })
    }

    pub fn power_law(kappa: f64, alpha: f64, rho_ref: f64) -> Result<Self> {
        Self::new(CapillarityLaw::PowerLaw { kappa, alpha }, rho_ref)
    }

    pub fn critical(kappa: f64, rho_ref: f64) -> Result<Self> {
        Self::new(CapillarityLaw::Critical { kappa }, rho_ref)
    }

    pub fn law(&self) -> &CapillarityLaw {
        &self.law
    }

    pub fn rho_ref(&self) -> f64 {
        self.rho_ref
    }

    /// Scale factor κ of the law.
    pub fn kappa_scale(&self) -> f64 {
        match self.law {
            CapillarityLaw::PowerLaw { kappa, .. }
            | CapillarityLaw::Critical { kappa }
            | CapillarityLaw::PiecewiseConstant { kappa, .. }
            | CapillarityLaw::OneD { kappa, .. } => kappa,
        }
    }

    fn check(rho: f64) -> Result<()> {
        if rho > 0.0 {
            Ok(())
        } else {
            Err(Error::NonPositiveDensity { value: rho })
        }
    }

    pub fn kappa(&self, rho: f64) -> Result<f64> {
        Self::check(rho)?;
        Ok(self.kappa_pair(rho).0)
    }

    pub fn kappa_prime(&self, rho: f64) -> Result<f64> {
        Self::check(rho)?;
        Ok(self.kappa_pair(rho).1)
    }

    pub fn a(&self, rho: f64) -> Result<f64> {
        Self::check(rho)?;
        Ok(self.a_unchecked(rho))
    }

    pub fn b(&self, rho: f64) -> Result<f64> {
        Self::check(rho)?;
        Ok(self.b_unchecked(rho))
    }

    /// `A′(ρ) = √κ(ρ)`.
    pub fn a_prime(&self, rho: f64) -> Result<f64> {
        Ok(self.kappa(rho)?.sqrt())
    }

    /// `B′(ρ) = ρκ(ρ)`.
    pub fn b_prime(&self, rho: f64) -> Result<f64> {
        Ok(rho * self.kappa(rho)?)
    }

    /// `(κ(ρ), κ′(ρ))` for `ρ > 0` (not checked).
    pub(crate) fn kappa_pair(&self, rho: f64) -> (f64, f64) {
        match self.law {
            CapillarityLaw::PowerLaw { kappa, alpha } => {
                let k = kappa * rho.powf(alpha);
                (k, alpha * k / rho)
            }
            CapillarityLaw::Critical { kappa } => {
                let k = kappa / (rho * rho);
                (k, -2.0 * k / rho)
            }
            _ => self.bridge.as_ref().map(|b| b.kappa(rho)).unwrap_or((0.0, 0.0)),
        }
    }

    pub(crate) fn a_unchecked(&self, rho: f64) -> f64 {
        let r = self.rho_ref;
        match self.law {
            CapillarityLaw::PowerLaw { kappa, alpha } => {
                let p = 0.5 * alpha + 1.0;
                kappa.sqrt() * power_difference(rho, r, p)
            }
            CapillarityLaw::Critical { kappa } => kappa.sqrt() * (rho / r).ln(),
            _ => {
                let b = self.bridge.as_ref().expect("piecewise law has a bridge");
                b.primitive(rho, 0) - b.primitive(r, 0)
            }
        }
    }

    pub(crate) fn b_unchecked(&self, rho: f64) -> f64 {
        let r = self.rho_ref;
        match self.law {
            CapillarityLaw::PowerLaw { kappa, alpha } => kappa * power_difference(rho, r, alpha + 2.0),
            CapillarityLaw::Critical { kappa } => kappa * (rho / r).ln(),
            _ => {
                let b = self.bridge.as_ref().expect("piecewise law has a bridge");
                b.primitive(rho, 1) - b.primitive(r, 1)
            }
        }
    }
}

/// `(x^p − r^p) / p`, evaluated without cancellation near `x = r`.
fn power_difference(x: f64, r: f64, p: f64) -> f64 {
    r.powf(p) * (p * (x / r).ln()).exp_m1() / p
}
