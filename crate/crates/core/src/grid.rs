use core::f64::consts::PI;

use num_traits::Float;

use crate::{Error, Result};

/// Uniform periodic grid on `[0, length)^dim`, `n` nodes per axis.
///
/// Nodes are stored x-fastest: index `iy * n + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid("dim must be 1 or 2"));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid("n must be a power of two >= 8"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid("length must be positive and finite"));
        }
        Ok(Self { dim, n, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total node count `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Measure of the whole torus.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Physical coordinates of node `idx` (second entry is 0 in 1D).
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let dx = self.dx();
        match self.dim {
            1 => [idx as f64 * dx, 0.0],
            _ => [(idx % self.n) as f64 * dx, (idx / self.n) as f64 * dx],
        }
    }

    /// Fundamental wavenumber `2π / L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed integer mode for FFT index `j` along a full axis. The Nyquist
    /// index maps to 0: it is not resolved by any multiplier.
    pub fn signed_mode(&self, j: usize) -> i64 {
        let n = self.n;
        if 2 * j == n {
            0
        } else if 2 * j < n {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Periodic displacement from `a` to `b` along one axis, in `[-L/2, L/2)`.
    pub fn periodic_delta(&self, a: f64, b: f64) -> f64 {
        let l = self.length;
        let mut d = (b - a) % l;
        if d < -0.5 * l {
            d += l;
        } else if d >= 0.5 * l {
            d -= l;
        }
        d
    }

    /// Periodic distance between two points.
    pub fn periodic_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = self.periodic_delta(a[0], b[0]);
        let dy = if self.dim == 2 {
            self.periodic_delta(a[1], b[1])
        } else {
            0.0
        };
        (dx * dx + dy * dy).sqrt()
    }
}
