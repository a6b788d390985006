//! Radix-2 FFT and the real-to-complex layouts used by [`crate::Spectral`].
//!
//! Transforms are unnormalized in the forward direction; the real inverses
//! divide by the number of samples so that `inverse(forward(x)) == x`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

/// In-place iterative Cooley–Tukey plan for a power-of-two length.
#[derive(Debug, Clone)]
pub struct ComplexFft {
    n: usize,
    /// `exp(-2πik/n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl ComplexFft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "fft length must be a power of two");
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self { n, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Unnormalized inverse (conjugate twiddles).
    pub fn backward(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Real transform of length `n` via a complex transform of length `n/2`.
/// Output holds modes `0..=n/2`.
#[derive(Debug, Clone)]
pub struct RealFft {
    n: usize,
    half: ComplexFft,
    /// `exp(-2πik/n)` for `k ≤ n/2`.
    twiddles: Vec<Complex64>,
}

impl RealFft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n.is_power_of_two());
        let twiddles = (0..=n / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        Self { n, half: ComplexFft::new(n / 2), twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spectrum_len(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn forward(&self, input: &[f64], out: &mut [Complex64]) {
        let (n, h) = (self.n, self.n / 2);
        debug_assert_eq!(input.len(), n);
        debug_assert_eq!(out.len(), h + 1);
        let mut z: Vec<Complex64> = input.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        self.half.forward(&mut z);
        let minus_half_i = Complex64::new(0.0, -0.5);
        for k in 0..=h {
            let zk = z[k % h];
            let zc = z[(h - k) % h].conj();
            let even = (zk + zc) * 0.5;
            let odd = (zk - zc) * minus_half_i;
            out[k] = even + self.twiddles[k] * odd;
        }
    }

    /// Inverse including the `1/n` normalization.
    pub fn inverse(&self, spec: &[Complex64], out: &mut [f64]) {
        let h = self.n / 2;
        debug_assert_eq!(spec.len(), h + 1);
        let i = Complex64::new(0.0, 1.0);
        let mut z: Vec<Complex64> = (0..h)
            .map(|k| {
                let xk = spec[k];
                let xc = spec[h - k].conj();
                let even = (xk + xc) * 0.5;
                let odd = (xk - xc) * 0.5 * self.twiddles[k].conj();
                even + i * odd
            })
            .collect();
        self.half.backward(&mut z);
        let scale = 1.0 / h as f64;
        for (k, zk) in z.iter().enumerate() {
            out[2 * k] = zk.re * scale;
            out[2 * k + 1] = zk.im * scale;
        }
    }
}

/// Real-to-complex transform on an `n`-point 1D or `n × n` 2D grid.
///
/// 2D layout: `n` rows in `ky`, `n/2 + 1` columns in `kx`, row-major.
#[derive(Debug, Clone)]
pub struct R2c {
    dim: usize,
    n: usize,
    rows: RealFft,
    cols: ComplexFft,
}

impl R2c {
    pub fn new(dim: usize, n: usize) -> Self {
        Self { dim, n, rows: RealFft::new(n), cols: ComplexFft::new(n) }
    }

    pub fn spectrum_len(&self) -> usize {
        let w = self.n / 2 + 1;
        if self.dim == 1 {
            w
        } else {
            self.n * w
        }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let w = n / 2 + 1;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.spectrum_len()];
        if self.dim == 1 {
            self.rows.forward(input, &mut out);
            return out;
        }
        for (row, dst) in input.chunks_exact(n).zip(out.chunks_exact_mut(w)) {
            self.rows.forward(row, dst);
        }
        let mut col = alloc::vec![Complex64::new(0.0, 0.0); n];
        for kx in 0..w {
            for ky in 0..n {
                col[ky] = out[ky * w + kx];
            }
            self.cols.forward(&mut col);
            for ky in 0..n {
                out[ky * w + kx] = col[ky];
            }
        }
        out
    }

    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let w = n / 2 + 1;
        let mut out = alloc::vec![0.0; n.pow(self.dim as u32)];
        if self.dim == 1 {
            self.rows.inverse(spec, &mut out);
            return out;
        }
        let mut work = spec.to_vec();
        let mut col = alloc::vec![Complex64::new(0.0, 0.0); n];
        let scale = 1.0 / n as f64;
        for kx in 0..w {
            for ky in 0..n {
                col[ky] = work[ky * w + kx];
            }
            self.cols.backward(&mut col);
            for ky in 0..n {
                work[ky * w + kx] = col[ky] * scale;
            }
        }
        for (src, dst) in work.chunks_exact(w).zip(out.chunks_exact_mut(n)) {
            self.rows.inverse(src, dst);
        }
        out
    }
}
