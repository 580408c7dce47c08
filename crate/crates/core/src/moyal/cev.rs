use num_complex::Complex;

use super::wigner::WignerField;
use crate::bohm::{node_mask, MaskedField};
use crate::grid::{differentiate, from_momentum_rep, to_momentum_rep, MomentumField, Order, Scheme, SpatialField};
use crate::scalar::Real;

/// Conditional mean momentum `int p F dp / int F dp` at each position.
///
/// On the periodic grid, positions farther than a quarter box length from
/// where the density is concentrated pick up pairs with the periodic image
/// and lose accuracy.
pub fn cev_momentum<T: Real>(f: &WignerField<T>) -> MaskedField<T> {
    let n = f.n();
    let pg = f.psgrid.pgrid;
    let rho = f.x_marginal();
    let mask = node_mask(&rho);
    let values = (0..n)
        .map(|i| {
            let num = f.row(i).iter().enumerate().map(|(k, &v)| pg.x(k) * v).sum::<T>() * pg.dx();
            num / rho[i]
        })
        .collect();
    MaskedField::from_parts(f.psgrid.xgrid, values, mask)
}

/// Conditional mean position `int x F dx / int F dx` at each momentum.
pub fn wigner_cev_position<T: Real>(f: &WignerField<T>) -> MaskedField<T> {
    let n = f.n();
    let xg = f.psgrid.xgrid;
    let mut num = vec![T::zero(); n];
    let mut den = vec![T::zero(); n];
    for i in 0..n {
        let x = xg.x(i);
        for (k, &v) in f.row(i).iter().enumerate() {
            num[k] = num[k] + x * v;
            den[k] = den[k] + v;
        }
    }
    let marginal: Vec<T> = den.iter().map(|&d| d * xg.dx()).collect();
    let mask = node_mask(&marginal);
    let values = num.iter().zip(&den).map(|(a, b)| *a / *b).collect();
    MaskedField::from_parts(f.psgrid.pgrid, values, mask)
}

/// `-dS_p/dp` of the momentum-space phase, evaluated as
/// `Re((x psi)~(p) / phi(p))` since `x` acts as `i hbar d/dp` on `phi`.
pub fn cev_position<T: Real>(phi: &MomentumField<T>) -> MaskedField<T> {
    let psi = from_momentum_rep(phi);
    let xg = psi.grid;
    let xpsi = SpatialField {
        grid: xg,
        values: psi.values.iter().enumerate().map(|(j, v)| v * xg.x(j)).collect(),
    };
    let xphi = to_momentum_rep(&xpsi, phi.hbar);
    let mask = node_mask(&phi.density());
    let values = xphi.values.iter().zip(&phi.values).map(|(a, b)| (a / b).re).collect();
    MaskedField::from_parts(phi.pgrid, values, mask)
}

/// Complex local momentum `-i hbar psi'/psi`. Masked samples hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValue<T: Real> {
    pub field: SpatialField<Complex<T>>,
    pub mask: Vec<bool>,
}

impl<T: Real> WeakValue<T> {
    /// Real part, the Bohm momentum.
    pub fn real(&self) -> MaskedField<T> {
        MaskedField::from_parts(self.field.grid, self.field.values.iter().map(|v| v.re).collect(), self.mask.clone())
    }

    /// Imaginary part `-hbar R'/R`.
    pub fn imag(&self) -> MaskedField<T> {
        MaskedField::from_parts(self.field.grid, self.field.values.iter().map(|v| v.im).collect(), self.mask.clone())
    }
}

pub fn weak_value_momentum<T: Real>(psi: &SpatialField<Complex<T>>, hbar: T) -> WeakValue<T> {
    let d = differentiate(psi, Order::First, Scheme::Spectral);
    let mask = node_mask(&psi.density().values);
    let zero = Complex::new(T::zero(), T::zero());
    let c = Complex::new(T::zero(), -hbar);
    let values = d
        .values
        .iter()
        .zip(&psi.values)
        .zip(&mask)
        .map(|((dv, v), &m)| if m { zero } else { c * dv / v })
        .collect();
    WeakValue {
        field: SpatialField { grid: psi.grid, values },
        mask,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohm::{bohm_momentum, polar_decompose};
    use crate::grid::build_grid;
    use crate::moyal::wigner_transform;
    use crate::schrodinger::{chirped_gaussian, gaussian_packet, plane_wave, plane_wave_k, superpose};

    fn grid() -> crate::grid::Grid1D<f64> {
        build_grid(-20.0, 20.0, 256).unwrap()
    }

    #[test]
    fn momentum_cev_of_simple_states() {
        let g = build_grid(0.0f64, 10.0, 64).unwrap();
        let hbar = 0.7;
        let f = wigner_transform(&plane_wave(g, 4), hbar);
        let k = plane_wave_k(&g, 4);
        assert!(cev_momentum(&f).max_error(|_| hbar * k) < 1e-10);

        let f = wigner_transform(&gaussian_packet(grid(), 0.5, 1.2, 0.0, 1.0).unwrap(), 1.0);
        assert!(cev_momentum(&f).max_abs() < 1e-9);
    }

    #[test]
    fn momentum_cev_is_the_bohm_momentum() {
        let hbar = 0.9;
        let chirp = 0.15;
        let psi = chirped_gaussian(grid(), 0.0, 1.1, 0.0, chirp, hbar).unwrap();
        let cev = cev_momentum(&wigner_transform(&psi, hbar));
        let pb = bohm_momentum(&polar_decompose(&psi, hbar).unwrap());
        assert!(cev.max_gap(&pb).unwrap() < 1e-6);
        assert!(cev.max_error(|x| 2.0 * chirp * x) < 1e-6);

        let one = Complex::new(1.0, 0.0);
        let a = gaussian_packet(grid(), -3.0, 1.0, 1.5, hbar).unwrap();
        let b = gaussian_packet(grid(), 3.0, 1.0, -1.5, hbar).unwrap();
        let cat = superpose(&a, &b, (one, one)).unwrap();
        let cev = cev_momentum(&wigner_transform(&cat, hbar));
        let pb = bohm_momentum(&polar_decompose(&cat, hbar).unwrap());
        assert!(cev.max_gap(&pb).unwrap() < 1e-6, "{}", cev.max_gap(&pb).unwrap());
    }

    #[test]
    fn position_cev() {
        let hbar = 1.0;
        let x0 = 2.5;
        let phi = to_momentum_rep(&gaussian_packet(grid(), x0, 1.0, 0.4, hbar).unwrap(), hbar);
        assert!(cev_position(&phi).max_error(|_| x0) < 1e-9);

        let phi = to_momentum_rep(&gaussian_packet(grid(), 0.0, 1.3, 0.0, hbar).unwrap(), hbar);
        assert!(cev_position(&phi).max_abs() < 1e-9);

        let psi = chirped_gaussian(grid(), 0.7, 1.0, 0.3, -0.2, hbar).unwrap();
        let phi = to_momentum_rep(&psi, hbar);
        let direct = cev_position(&phi);
        let mut moments = wigner_cev_position(&wigner_transform(&psi, hbar));
        // Column sums of a row-wise transform carry an absolute rounding
        // floor, so the far momentum tail is left out of the comparison.
        let dens = phi.density();
        let cut = 1e-9 * dens.iter().copied().fold(0.0, f64::max);
        for (m, d) in moments.mask.iter_mut().zip(&dens) {
            *m |= *d < cut;
        }
        assert!(direct.max_gap(&moments).unwrap() < 1e-6, "{}", direct.max_gap(&moments).unwrap());
    }

    #[test]
    fn weak_value_parts() {
        let g = build_grid(0.0f64, 10.0, 64).unwrap();
        let wv = weak_value_momentum(&plane_wave(g, 2), 1.0);
        assert!(wv.real().max_error(|_| plane_wave_k(&g, 2)) < 1e-10);
        assert!(wv.imag().max_abs() < 1e-10);

        let sigma = 1.2;
        let hbar = 0.8;
        let wv = weak_value_momentum(&gaussian_packet(grid(), 0.0, sigma, 0.0, hbar).unwrap(), hbar);
        assert!(wv.real().max_abs() < 1e-9);
        let mut inner = wv.imag();
        for (j, m) in inner.mask.iter_mut().enumerate() {
            *m |= grid().x(j).abs() > 8.0;
        }
        assert!(inner.max_error(|x| hbar * x / (2.0 * sigma * sigma)) < 1e-8);

        let psi = chirped_gaussian(grid(), -1.0, 0.9, 1.0, 0.25, hbar).unwrap();
        let gap = weak_value_momentum(&psi, hbar)
            .real()
            .max_gap(&bohm_momentum(&polar_decompose(&psi, hbar).unwrap()))
            .unwrap();
        assert!(gap < 1e-9);
    }
}
