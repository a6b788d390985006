//! Sampled real fields on a [`Grid`].

use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::Float;

use crate::{Error, Grid, Result};

/// Real samples at the nodes of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("value count does not match grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite field value"));
        }
        Ok(Self { grid, values })
    }

    /// Unchecked constructor for values produced by the crate's own kernels.
    pub(crate) fn from_vec(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_vec(grid, alloc::vec![c; grid.len()])
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self::from_vec(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn try_map<E>(&self, f: impl Fn(f64) -> core::result::Result<f64, E>) -> core::result::Result<Self, E> {
        let values = self.values.iter().map(|&v| f(v)).collect::<core::result::Result<_, _>>()?;
        Ok(Self::from_vec(self.grid, values))
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_vec(self.grid, values)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Rectangle-rule integral over the torus (spectrally accurate for smooth periodic data).
    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }

    /// `∫ self · other`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `‖f‖_{L^p}` over the torus; `p = ∞` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn minus_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: Self) -> ScalarField {
        self.zip_map(rhs, |a, b| a * b)
    }
}

/// `dim` scalar components on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let first = components.first().ok_or(Error::InvalidArgument("empty vector field"))?;
        if components.len() != first.grid().dim() {
            return Err(Error::InvalidArgument("component count must equal dim"));
        }
        if components.iter().any(|c| c.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub(crate) fn from_components(components: Vec<ScalarField>) -> Self {
        debug_assert_eq!(components.len(), components[0].grid().dim());
        Self { components }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_components((0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect())
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [ScalarField] {
        &mut self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_components(self.components.iter().map(f).collect())
    }

    pub fn zip_components(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        Self::from_components(self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect())
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.axpy(c, b);
        }
    }

    /// Pointwise `|v|²`.
    pub fn norm_sq(&self) -> ScalarField {
        self.dot(self)
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &Self) -> ScalarField {
        let mut out = ScalarField::zeros(*self.grid());
        for (a, b) in self.components.iter().zip(&other.components) {
            for ((o, x), y) in out.values_mut().iter_mut().zip(a.values()).zip(b.values()) {
                *o += x * y;
            }
        }
        out
    }

    /// Multiplies every component by a scalar field pointwise.
    pub fn scale_by(&self, s: &ScalarField) -> Self {
        self.map_components(|c| c * s)
    }

    /// `∫ v` per component.
    pub fn integrals(&self) -> Vec<f64> {
        self.components.iter().map(ScalarField::integral).collect()
    }

    /// `‖v‖_{L²}` of the Euclidean magnitude.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().integral().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }
}

/// `dim × dim` components on a shared grid, row-major (`K_{ij}` at `i * dim + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    components: Vec<ScalarField>,
    symmetric: bool,
}

impl TensorField {
    pub fn new(components: Vec<ScalarField>, symmetric: bool) -> Result<Self> {
        let first = components.first().ok_or(Error::InvalidArgument("empty tensor field"))?;
        let dim = first.grid().dim();
        if components.len() != dim * dim {
            return Err(Error::InvalidArgument("component count must equal dim^2"));
        }
        if components.iter().any(|c| c.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        if symmetric && dim == 2 && components[1] != components[2] {
            return Err(Error::InvalidArgument("tensor flagged symmetric is not"));
        }
        Ok(Self { components, symmetric })
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i * self.dim() + j]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Row `i` as a vector field (`K_{i·}`).
    pub fn row(&self, i: usize) -> VectorField {
        let d = self.dim();
        VectorField::from_components(self.components[i * d..(i + 1) * d].to_vec())
    }

    /// Max pointwise asymmetry `|K_ij − K_ji|`.
    pub fn asymmetry(&self) -> f64 {
        if self.dim() == 1 {
            return 0.0;
        }
        (self.get(0, 1) - self.get(1, 0)).max_abs()
    }
}
