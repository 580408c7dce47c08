use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{freq_index, Grid1D, PhaseSpaceGrid, SpatialField, Spectral};
use crate::scalar::Real;

/// Real phase-space distribution sampled on `x_i` (rows) by `p_k` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField<T: Real> {
    pub psgrid: PhaseSpaceGrid<T>,
    /// Row-major, `values[i * n + k] = F(x_i, p_k)`.
    pub values: Vec<T>,
    pub hbar: T,
}

impl<T: Real> WignerField<T> {
    pub fn n(&self) -> usize {
        self.psgrid.n()
    }

    pub fn at(&self, i: usize, k: usize) -> T {
        self.values[i * self.n() + k]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    /// `int F dp` at each `x_i`.
    pub fn x_marginal(&self) -> Vec<T> {
        let dp = self.psgrid.pgrid.dx();
        (0..self.n()).map(|i| self.row(i).iter().copied().sum::<T>() * dp).collect()
    }

    /// `int F dx` at each `p_k`.
    pub fn p_marginal(&self) -> Vec<T> {
        let n = self.n();
        let dx = self.psgrid.xgrid.dx();
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            for (o, &v) in out.iter_mut().zip(self.row(i)) {
                *o = *o + v;
            }
        }
        out.into_iter().map(|v| v * dx).collect()
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.psgrid.xgrid.dx() * self.psgrid.pgrid.dx()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Largest `|F - G|`.
    pub fn max_gap(&self, other: &Self) -> Result<T> {
        if self.n() != other.n() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max))
    }
}

/// Cross-Wigner transform
/// `W(phi, psi)(x, p) = (2 pi hbar)^{-1} int phi*(x - y/2) psi(x + y/2) exp(-i p y / hbar) dy`,
/// row-major over `(x_i, p_k)`.
///
/// Each row pairs grid samples `x_i -/+ s` with `y = 2s = 2m dx`, `m` in
/// `[-n/4, n/4)`, so no interpolated values enter and the transform is exact
/// (including both marginals) for states supported on less than half the
/// domain whose spectra lie inside the central half of the momentum grid.
/// Momenta outside that band are zero.
pub fn cross_wigner<T: Real>(
    phi: &SpatialField<Complex<T>>,
    psi: &SpatialField<Complex<T>>,
    hbar: T,
) -> Result<Vec<Complex<T>>> {
    if !phi.grid.compatible(&psi.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(wigner_from_pairs(psi.grid, hbar, |a, b| phi.values[a].conj() * psi.values[b]))
}

/// Wigner kernel over an arbitrary two-point function: `pair(a, b)` is the
/// contribution of grid samples `x_a = x - s` and `x_b = x + s`.
pub(crate) fn wigner_from_pairs<T: Real>(
    g: Grid1D<T>,
    hbar: T,
    pair: impl Fn(usize, usize) -> Complex<T> + Sync,
) -> Vec<Complex<T>> {
    let n = g.n();
    let (h, q) = (n / 2, n / 4);
    let fft = Spectral::new(h, g.length());
    let pre = g.dx() / (T::PI() * hbar);
    let zero = Complex::new(T::zero(), T::zero());
    let wrap = |i: i64| i.rem_euclid(n as i64) as usize;
    let half = T::lit(0.5);

    let rows: Vec<Vec<Complex<T>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let c = i as i64;
            let mut buf: Vec<Complex<T>> = (0..h)
                .map(|mi| {
                    let m = freq_index(mi, h);
                    if mi == q {
                        (pair(wrap(c - m), wrap(c + m)) + pair(wrap(c + m), wrap(c - m))) * half
                    } else {
                        pair(wrap(c - m), wrap(c + m))
                    }
                })
                .collect();
            fft.forward(&mut buf);
            let mut row = vec![zero; n];
            for (jj, v) in buf.into_iter().enumerate() {
                row[(freq_index(jj, h) + h as i64) as usize] = v * pre;
            }
            row
        })
        .collect();
    rows.concat()
}

pub fn wigner_transform<T: Real>(psi: &SpatialField<Complex<T>>, hbar: T) -> WignerField<T> {
    let w = cross_wigner(psi, psi, hbar).expect("same grid");
    WignerField {
        psgrid: PhaseSpaceGrid::conjugate(psi.grid, hbar),
        values: w.into_iter().map(|v| v.re).collect(),
        hbar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, to_momentum_rep};
    use crate::schrodinger::{chirped_gaussian, gaussian_packet, plane_wave, plane_wave_k, superpose};
    use proptest::prelude::*;

    #[test]
    fn gaussian_closed_form() {
        let g = build_grid(-20.0f64, 20.0, 256).unwrap();
        for (sigma, hbar) in [(1.0, 1.0), (1.4, 0.6)] {
            let psi = gaussian_packet(g, 0.0, sigma, 0.0, hbar).unwrap();
            let w = wigner_transform(&psi, hbar);
            let pg = w.psgrid.pgrid;
            let mut err = 0.0f64;
            for i in 0..g.n() {
                for k in 0..g.n() {
                    let (x, p) = (g.x(i), pg.x(k));
                    let exact = (-x * x / (2.0 * sigma * sigma) - 2.0 * sigma * sigma * p * p / (hbar * hbar)).exp()
                        / (std::f64::consts::PI * hbar);
                    err = err.max((w.at(i, k) - exact).abs());
                }
            }
            assert!(err < 1e-6, "{err}");
        }
    }

    #[test]
    fn plane_wave_sits_on_one_row() {
        let g = build_grid(0.0f64, 10.0, 64).unwrap();
        let hbar = 0.5;
        let w = wigner_transform(&plane_wave(g, 3), hbar);
        let k0 = w.psgrid.pgrid.nearest_index(hbar * plane_wave_k(&g, 3)).unwrap();
        for i in 0..g.n() {
            for k in 0..g.n() {
                if k == k0 {
                    assert!((w.at(i, k) * w.psgrid.pgrid.dx() - 0.1).abs() < 1e-12);
                } else {
                    assert!(w.at(i, k).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cat_state_is_negative_between_the_packets() {
        let g = build_grid(-20.0f64, 20.0, 256).unwrap();
        let l = gaussian_packet(g, -3.0, 0.8, 0.0, 1.0).unwrap();
        let r = gaussian_packet(g, 3.0, 0.8, 0.0, 1.0).unwrap();
        let one = Complex::new(1.0, 0.0);
        let cat = superpose(&l, &r, (one, one)).unwrap();
        let w = wigner_transform(&cat, 1.0);
        assert!(w.min() < 0.0);
        let mid = g.nearest_index(0.0).unwrap();
        assert!(w.row(mid).iter().any(|&v| v < -0.05));
    }

    #[test]
    fn marginals_of_chirped_packet() {
        let g = build_grid(-20.0f64, 20.0, 256).unwrap();
        let hbar = 0.8;
        let psi = chirped_gaussian(g, 1.0, 1.1, 0.7, 0.2, hbar).unwrap();
        let w = wigner_transform(&psi, hbar);
        for (a, b) in w.x_marginal().iter().zip(&psi.density().values) {
            assert!((a - b).abs() < 1e-8);
        }
        let phi = to_momentum_rep(&psi, hbar);
        for (a, b) in w.p_marginal().iter().zip(phi.density()) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
        assert!((w.total() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cross_wigner_is_hermitian() {
        let g = build_grid(-20.0f64, 20.0, 256).unwrap();
        let a = gaussian_packet(g, -1.0, 1.0, 0.5, 1.0).unwrap();
        let b = chirped_gaussian(g, 1.0, 1.2, -0.3, 0.1, 1.0).unwrap();
        let ab = cross_wigner(&a, &b, 1.0).unwrap();
        let ba = cross_wigner(&b, &a, 1.0).unwrap();
        for (x, y) in ab.iter().zip(&ba) {
            assert!((x - y.conj()).norm() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn wigner_is_real_with_exact_marginals(
            x0 in -2.0f64..2.0, sigma in 0.8f64..1.6, p0 in -1.5f64..1.5, chirp in -0.15f64..0.15, hbar in 0.7f64..1.5,
        ) {
            let g = build_grid(-24.0f64, 24.0, 256).unwrap();
            let psi = chirped_gaussian(g, x0, sigma, p0, chirp, hbar).unwrap();
            let w = cross_wigner(&psi, &psi, hbar).unwrap();
            prop_assert!(w.iter().all(|v| v.im.abs() < 1e-12));
            let f = wigner_transform(&psi, hbar);
            for (a, b) in f.x_marginal().iter().zip(&psi.density().values) {
                prop_assert!((a - b).abs() < 1e-8);
            }
            let phi = to_momentum_rep(&psi, hbar);
            for (a, b) in f.p_marginal().iter().zip(phi.density()) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
