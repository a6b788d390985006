//! Fourier-multiplier operators on the periodic grid.
//!
//! Every operator is a pointwise multiplier in the real-to-complex layout of
//! [`crate::fft::R2c`]. Conventions shared by all of them:
//!
//! * the wavevector of the mean mode is zero, and so is the Nyquist
//!   component along any axis, so that `div ∘ grad ≡ Δ` and `Λ² ≡ −Δ` hold
//!   on every grid function;
//! * `Λ^s` with `s ≠ 0` and the Riesz transforms annihilate modes with
//!   `|ξ| = 0`; `Λ^0` is the identity.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::fft::R2c;
use crate::{Error, Grid, Result, ScalarField, VectorField};

/// Transform plan plus the operators built on it. Immutable, so one instance
/// can be shared across threads.
#[derive(Debug, Clone)]
pub struct Spectral {
    grid: Grid,
    plan: R2c,
    /// Wavevector of every stored mode.
    xi: Vec<[f64; 2]>,
    /// Multiplicity of every stored mode in the full (two-sided) spectrum.
    weight: Vec<f64>,
    /// 2/3-rule mask.
    keep: Vec<bool>,
}

/// Half-spectrum of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let n = grid.n();
        let w = n / 2 + 1;
        let plan = R2c::new(grid.dim(), n);
        let len = plan.spectrum_len();
        let k0 = grid.k0();
        let mut xi = Vec::with_capacity(len);
        let mut weight = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        for idx in 0..len {
            let (jx, jy) = if grid.dim() == 1 { (idx, 0) } else { (idx % w, idx / w) };
            let mx = grid.signed_mode(jx);
            let my = if grid.dim() == 1 { 0 } else { grid.signed_mode(jy) };
            xi.push([k0 * mx as f64, k0 * my as f64]);
            weight.push(if jx == 0 || 2 * jx == n { 1.0 } else { 2.0 });
            let resolved = |j: usize| {
                let m = if 2 * j <= n { j } else { n - j };
                3 * m < n
            };
            keep.push(resolved(jx) && (grid.dim() == 1 || resolved(jy)));
        }
        Self { grid, plan, xi, weight, keep }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Wavevectors aligned with [`Spectrum::coeffs`].
    pub fn wavevectors(&self) -> &[[f64; 2]] {
        &self.xi
    }

    pub fn forward(&self, f: &ScalarField) -> Spectrum {
        debug_assert_eq!(f.grid(), &self.grid);
        Spectrum { grid: self.grid, coeffs: self.plan.forward(f.values()) }
    }

    pub fn inverse(&self, s: &Spectrum) -> ScalarField {
        ScalarField::from_vec(self.grid, self.plan.inverse(&s.coeffs))
    }

    fn map_spectrum(&self, s: &Spectrum, m: impl Fn([f64; 2]) -> Complex64) -> Spectrum {
        let coeffs = s.coeffs.iter().zip(&self.xi).map(|(c, &xi)| c * m(xi)).collect();
        Spectrum { grid: self.grid, coeffs }
    }

    /// Applies the multiplier `m(ξ)` to `f`.
    pub fn multiply(&self, f: &ScalarField, m: impl Fn([f64; 2]) -> Complex64) -> ScalarField {
        self.inverse(&self.map_spectrum(&self.forward(f), m))
    }

    /// `∂f/∂x_axis`.
    pub fn partial(&self, f: &ScalarField, axis: usize) -> ScalarField {
        self.multiply(f, |xi| Complex64::new(0.0, xi[axis]))
    }

    pub fn gradient(&self, f: &ScalarField) -> VectorField {
        let s = self.forward(f);
        self.gradient_of(&s)
    }

    pub(crate) fn gradient_of(&self, s: &Spectrum) -> VectorField {
        let comps = (0..self.grid.dim())
            .map(|axis| self.inverse(&self.map_spectrum(s, |xi| Complex64::new(0.0, xi[axis]))))
            .collect();
        VectorField::from_components(comps)
    }

    pub fn divergence(&self, v: &VectorField) -> ScalarField {
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); self.xi.len()];
        for (axis, c) in v.components().iter().enumerate() {
            let s = self.forward(c);
            for ((a, b), xi) in acc.iter_mut().zip(&s.coeffs).zip(&self.xi) {
                *a += b * Complex64::new(0.0, xi[axis]);
            }
        }
        self.inverse(&Spectrum { grid: self.grid, coeffs: acc })
    }

    /// `Σ_j ∂_j f_j` restricted to the 2/3 band, with one inverse transform.
    pub(crate) fn divergence_dealiased(&self, comps: &[&ScalarField]) -> ScalarField {
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); self.xi.len()];
        for (axis, c) in comps.iter().enumerate() {
            let s = self.forward(c);
            for ((a, b), xi) in acc.iter_mut().zip(&s.coeffs).zip(&self.xi) {
                *a += b * Complex64::new(0.0, xi[axis]);
            }
        }
        let mut out = Spectrum { grid: self.grid, coeffs: acc };
        self.dealias_spectrum(&mut out);
        self.inverse(&out)
    }

    pub fn laplacian(&self, f: &ScalarField) -> ScalarField {
        self.multiply(f, |xi| Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0))
    }

    /// Gradient and Laplacian from a single forward transform.
    pub fn gradient_and_laplacian(&self, f: &ScalarField) -> (VectorField, ScalarField) {
        let s = self.forward(f);
        let lap = self.inverse(&self.map_spectrum(&s, |xi| Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0)));
        (self.gradient_of(&s), lap)
    }

    fn zero_mean_tolerance(f: &ScalarField) -> f64 {
        1e-12 * f.max_abs().max(1.0)
    }

    /// `Λ^s f`, the multiplier `|ξ|^s`.
    pub fn fractional_power(&self, f: &ScalarField, s: f64) -> Result<ScalarField> {
        if s < 0.0 {
            let mean = f.mean();
            if mean.abs() > Self::zero_mean_tolerance(f) {
                return Err(Error::NegativePowerOnMean { mean });
            }
        }
        Ok(self.multiply(f, |xi| Complex64::new(lambda_symbol(xi, s), 0.0)))
    }

    /// Riesz transform `R_axis`, multiplier `iξ_axis / |ξ|`.
    pub fn riesz(&self, f: &ScalarField, axis: usize) -> ScalarField {
        self.multiply(f, |xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, xi[axis] / r)
            }
        })
    }

    /// Zero-mean solution of `Δg = f`.
    pub fn inverse_laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        let mean = f.mean();
        if mean.abs() > Self::zero_mean_tolerance(f) {
            return Err(Error::NonZeroMean { mean });
        }
        Ok(self.multiply(f, |xi| {
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            Complex64::new(if r2 == 0.0 { 0.0 } else { -1.0 / r2 }, 0.0)
        }))
    }

    /// `Σ_k |ξ_k|^{2s} |f̂_k|²` scaled so that `s = 0` gives `‖f‖²_{L²}`.
    /// With `homogeneous`, modes with `|ξ| = 0` are skipped for every `s`.
    fn weighted_energy(&self, s: &Spectrum, power: f64, homogeneous: bool) -> f64 {
        let n_total = self.grid.len() as f64;
        let scale = self.grid.volume() / (n_total * n_total);
        s.coeffs
            .iter()
            .zip(&self.xi)
            .zip(&self.weight)
            .filter(|((_, xi), _)| !homogeneous || xi[0] != 0.0 || xi[1] != 0.0)
            .map(|((c, &xi), w)| w * lambda_symbol(xi, power).powi(2) * c.norm_sqr())
            .sum::<f64>()
            * scale
    }

    /// `‖f‖²_{L²}` computed from the modes (Parseval).
    pub fn modal_energy(&self, f: &ScalarField) -> f64 {
        self.weighted_energy(&self.forward(f), 0.0, false)
    }

    /// `‖Λ^s f‖_{L²}` (homogeneous) or `(‖f‖² + ‖Λ^s f‖²)^{1/2}`.
    ///
    /// The homogeneous part never sees the mean, so a constant field has
    /// homogeneous norm 0 for every `s`, including `s = 0`.
    pub fn sobolev_norm(&self, f: &ScalarField, s: f64, homogeneous: bool) -> Result<f64> {
        if homogeneous && s < 0.0 {
            let mean = f.mean();
            if mean.abs() > Self::zero_mean_tolerance(f) {
                return Err(Error::NegativePowerOnMean { mean });
            }
        }
        let spec = self.forward(f);
        let top = self.weighted_energy(&spec, s, true);
        Ok(if homogeneous { top.sqrt() } else { (self.weighted_energy(&spec, 0.0, false) + top).sqrt() })
    }

    /// Zeroes every mode outside the 2/3-rule band.
    pub fn dealias(&self, f: &ScalarField) -> ScalarField {
        let mut s = self.forward(f);
        self.dealias_spectrum(&mut s);
        self.inverse(&s)
    }

    pub fn dealias_spectrum(&self, s: &mut Spectrum) {
        for (c, &k) in s.coeffs.iter_mut().zip(&self.keep) {
            if !k {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Keeps only modes with `lo ≤ |ξ| < hi`.
    pub fn band_pass(&self, f: &ScalarField, lo: f64, hi: f64) -> ScalarField {
        self.multiply(f, |xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            Complex64::new(if r >= lo && r < hi { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Largest `|ξ|` carried by the grid.
    pub fn max_wavenumber(&self) -> f64 {
        self.xi.iter().map(|xi| (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()).fold(0.0, f64::max)
    }
}

fn lambda_symbol(xi: [f64; 2], s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    if r == 0.0 {
        0.0
    } else {
        r.powf(s)
    }
}
