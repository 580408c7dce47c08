//! Cached FFT plans and the spectral kernels built on them.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Forward/inverse FFT pair of length `n` plus the angular wavenumbers of a
/// periodic domain of length `length`, in FFT order.
#[derive(Clone)]
pub struct Spectral<T: Real> {
    n: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    k: Vec<T>,
}

impl<T: Real> std::fmt::Debug for Spectral<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

/// FFT-ordered integer frequency index: `0, 1, .., n/2-1, -n/2, .., -1`.
#[inline]
pub fn freq_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl<T: Real> Spectral<T> {
    pub fn new(n: usize, length: T) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let dk = T::lit(2.0) * T::PI() / length;
        let k = (0..n)
            .map(|j| dk * T::lit(freq_index(j, n) as f64))
            .collect();
        Self { n, fwd, inv, k }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.k
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.fwd.process(buf);
    }

    /// Normalized inverse transform (divides by `n`), in place.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.inv.process(buf);
        let s = T::one() / T::from_usize_lossy(self.n);
        for v in buf.iter_mut() {
            *v = *v * s;
        }
    }

    /// Spectral derivative of the given order. The Nyquist mode is dropped for
    /// odd orders so real input stays real.
    pub fn derivative(&self, values: &[Complex<T>], order: u32) -> Vec<Complex<T>> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        let i = Complex::new(T::zero(), T::one());
        for (j, v) in buf.iter_mut().enumerate() {
            if order % 2 == 1 && j == self.n / 2 {
                *v = Complex::new(T::zero(), T::zero());
                continue;
            }
            let ik = i * self.k[j];
            let mut f = Complex::new(T::one(), T::zero());
            for _ in 0..order {
                f = f * ik;
            }
            *v = *v * f;
        }
        self.inverse(&mut buf);
        buf
    }

    /// Band-limited interpolation onto the grid shifted by `s` (samples at
    /// `x_j + s`). The Nyquist mode is treated as a cosine.
    pub fn shift(&self, values: &[Complex<T>], s: T) -> Vec<Complex<T>> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        for (j, v) in buf.iter_mut().enumerate() {
            let phase = self.k[j] * s;
            if j == self.n / 2 {
                *v = *v * phase.cos();
            } else {
                *v = *v * Complex::new(phase.cos(), phase.sin());
            }
        }
        self.inverse(&mut buf);
        buf
    }

    /// Band-limited interpolation to twice the resolution: output sample `2j`
    /// equals input sample `j`, odd samples fall on the half-grid midpoints.
    pub fn upsample2(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let mut spec = values.to_vec();
        self.forward(&mut spec);
        let zero = Complex::new(T::zero(), T::zero());
        let mut wide = vec![zero; 2 * n];
        wide[..n / 2].copy_from_slice(&spec[..n / 2]);
        wide[n + n / 2 + 1..].copy_from_slice(&spec[n / 2 + 1..]);
        let half = T::lit(0.5);
        wide[n / 2] = spec[n / 2] * half;
        wide[n + n / 2] = spec[n / 2] * half;
        let mut planner = FftPlanner::new();
        let inv = planner.plan_fft_inverse(2 * n);
        inv.process(&mut wide);
        let s = T::one() / T::from_usize_lossy(n);
        for v in wide.iter_mut() {
            *v = *v * s;
        }
        wide
    }
}
