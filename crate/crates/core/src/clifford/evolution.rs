use super::algebra::{CliffordSignature, Multivector};
use super::field::{IdealElement, MultivectorField};
use crate::bohm::{PolarField, SliceFields};
use crate::error::Result;
use crate::scalar::Real;
use crate::schrodinger::EvolutionRecord;

const E: usize = 1;

/// `Psi_L = R (cos(S/hbar) + e sin(S/hbar))` in `Cl(0,1)`, with `epsilon = 1`.
/// The coefficients are read from the wave samples the polar pair came from.
pub fn schrodinger_embed<T: Real>(pf: &PolarField<T>) -> IdealElement<T> {
    let sig = CliffordSignature::schrodinger();
    let mut psi = MultivectorField::zeros(sig, pf.grid());
    for (j, v) in pf.psi().values.iter().enumerate() {
        psi.blade_mut(0)[j] = v.re;
        psi.blade_mut(E)[j] = v.im;
    }
    IdealElement {
        psi_l: psi,
        epsilon: Multivector::scalar(sig, T::one()),
        mask: pf.node_mask.clone(),
    }
}

/// Inverse of [`schrodinger_embed`] at one point: `(R, S)` with `S` in `(-pi hbar, pi hbar]`.
pub fn schrodinger_unembed<T: Real>(m: &Multivector<T>, hbar: T) -> (T, T) {
    let (a, b) = (m.coeff(0), m.coeff(E));
    (a.hypot(b), b.atan2(a) * hbar)
}

/// Max-abs residuals of the algebraic Liouville and Hamilton-Jacobi equations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlgebraicResiduals<T> {
    pub liouville_max: T,
    pub qhj_max: T,
}

pub fn algebraic_evolution_residuals<T: Real>(record: &EvolutionRecord<T>, t: T) -> Result<AlgebraicResiduals<T>> {
    let slice = SliceFields::new(record.triple_at(t)?, record.hbar)?;
    algebraic_residuals_of(&slice, record)
}

pub(crate) fn algebraic_residuals_of<T: Real>(
    slice: &SliceFields<T>,
    record: &EvolutionRecord<T>,
) -> Result<AlgebraicResiduals<T>> {
    let (hbar, m) = (record.hbar, record.mass);
    let two = T::lit(2.0);
    let grid = slice.polar.grid();
    let n = grid.n();
    let sig = CliffordSignature::schrodinger();
    let e = Multivector::generator(sig, 0);

    let psi = schrodinger_embed(&slice.polar).psi_l;
    let before = schrodinger_embed(&slice.before).psi_l;
    let after = schrodinger_embed(&slice.after).psi_l;
    let bar = psi.adjoint();

    // Liouville: e hbar d(rho)/dt = -(hbar^2/2m) d/dx[(D Psi) Psi~ - Psi (D Psi~)] / e
    let rho_before = before.mul(&before.adjoint())?;
    let rho_after = after.mul(&after.adjoint())?;
    let lhs = rho_after.sub(&rho_before)?.scale(hbar / (two * slice.dt)).mul_right(&e)?;
    let dpsi = psi.derivative(1);
    let flux = dpsi.mul(&bar)?.sub(&psi.mul(&dpsi.adjoint())?)?;
    let rhs = flux.derivative(1).scale(-hbar * hbar / (two * m));
    let liouville = lhs.sub(&rhs)?.mul_right(&e)?.scale(-T::one() / hbar);

    // Hamilton-Jacobi: e hbar[(dPsi/dt) Psi~ - Psi (dPsi~/dt)] = (H Psi) Psi~ + Psi (H Psi)~
    let mut dpsi_dt = MultivectorField::zeros(sig, grid);
    for j in 0..n {
        if slice.mask[j] {
            continue;
        }
        let rotor = &after.at(j) * &before.at(j).adjoint();
        let (_, angle) = schrodinger_unembed(&rotor, T::one());
        let ratio = slice.after.r.values[j] / slice.before.r.values[j];
        let log = &Multivector::scalar(sig, ratio.ln()) + &Multivector::blade(sig, E, angle);
        let d = &psi.at(j) * &log.scale(&(T::one() / (two * slice.dt)));
        dpsi_dt.blade_mut(0)[j] = d.coeff(0);
        dpsi_dt.blade_mut(E)[j] = d.coeff(E);
    }
    let lhs = dpsi_dt
        .mul(&bar)?
        .sub(&psi.mul(&dpsi_dt.adjoint())?)?
        .mul_right(&e)?
        .scale(hbar);
    let v = record.potential.sample(&grid, m)?;
    // D = e d/dx, so D^2 = -d^2/dx^2
    let h_psi = psi
        .derivative(2)
        .scale(-hbar * hbar / (two * m))
        .add(&psi.scale_by(&v.values))?;
    let rhs = h_psi.mul(&bar)?.add(&psi.mul(&h_psi.adjoint())?)?;
    let rho = psi.mul(&bar)?;
    let diff = lhs.sub(&rhs)?;

    let mut liouville_max = T::zero();
    let mut qhj_max = T::zero();
    for j in (0..n).filter(|&j| !slice.mask[j]) {
        liouville_max = liouville_max.max(liouville.scalar_part()[j].abs());
        let q = diff.scalar_part()[j] / (-two * rho.scalar_part()[j]);
        qhj_max = qhj_max.max(q.abs());
    }
    Ok(AlgebraicResiduals { liouville_max, qhj_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohm::{polar_decompose, residuals};
    use num_complex::Complex;
    use crate::grid::{build_grid, SpatialField};
    use crate::schrodinger::{
        gaussian_packet, harmonic_eigenstate, plane_wave, split_step_evolve, Potential, Propagation,
    };
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn as_complex(m: &Multivector<f64>) -> C {
        C::new(m.coeff(0), m.coeff(E))
    }

    #[test]
    fn embedding_examples() {
        let g = build_grid(0.0f64, 1.0, 8).unwrap();
        let one = SpatialField::from_fn(g, |_| C::new(1.0, 0.0));
        let e = schrodinger_embed(&polar_decompose(&one, 1.0).unwrap());
        assert_eq!(e.psi_l.at(3), Multivector::scalar(CliffordSignature::schrodinger(), 1.0));
        let i = SpatialField::from_fn(g, |_| C::new(0.0, 1.0));
        let e = schrodinger_embed(&polar_decompose(&i, 1.0).unwrap());
        let m = e.psi_l.at(0);
        assert!(m.coeff(0).abs() < 1e-16 && m.coeff(1) == 1.0);
    }

    #[test]
    fn embedding_round_trip() {
        let g = build_grid(-10.0f64, 10.0, 256).unwrap();
        let hbar = 0.8;
        let psi = gaussian_packet(g, 0.5, 1.2, 1.5, hbar).unwrap();
        let pf = polar_decompose(&psi, hbar).unwrap();
        let ideal = schrodinger_embed(&pf);
        let period = 2.0 * PI * hbar;
        for j in 0..g.n() {
            let m = ideal.psi_l.at(j);
            assert!((as_complex(&m) - psi.values[j]).norm() < 1e-12);
            if ideal.mask[j] {
                continue;
            }
            let (r, s) = schrodinger_unembed(&m, hbar);
            assert!((r - pf.r.values[j]).abs() < 1e-12);
            let ds = s - pf.s.values[j];
            assert!((ds - period * (ds / period).round()).abs() < 1e-12);
        }
    }

    fn record(psi: &SpatialField<C>, v: Potential<f64>, dt: f64, steps: usize) -> EvolutionRecord<f64> {
        let prop = Propagation {
            dt,
            steps,
            stride: 10,
            hbar: 1.0,
            mass: 1.0,
        };
        split_step_evolve(psi, &v, prop).unwrap()
    }

    #[test]
    fn stationary_and_plane_wave_residuals() {
        let g = build_grid(-12.0f64, 12.0, 256).unwrap();
        let psi = harmonic_eigenstate(g, 0, 1.0, 1.0, 1.0);
        let rec = record(&psi, Potential::Harmonic { omega: 1.0 }, 1e-3, 20);
        let r = algebraic_evolution_residuals(&rec, 0.01).unwrap();
        assert!(r.liouville_max < 1e-5 && r.qhj_max < 1e-5, "{r:?}");

        let g = build_grid(0.0f64, 2.0 * PI, 64).unwrap();
        let rec = record(&plane_wave(g, 3), Potential::Free, 1e-3, 20);
        let r = algebraic_evolution_residuals(&rec, 0.01).unwrap();
        assert!(r.liouville_max < 1e-10 && r.qhj_max < 1e-10, "{r:?}");
    }

    #[test]
    fn agrees_with_polar_residuals() {
        let g = build_grid(-20.0f64, 20.0, 512).unwrap();
        let psi = gaussian_packet(g, -2.0, 1.0, 1.5, 1.0).unwrap();
        for v in [Potential::Free, Potential::Harmonic { omega: 0.5 }] {
            let rec = record(&psi, v, 1e-3, 200);
            for &t in &rec.times {
                let a = algebraic_evolution_residuals(&rec, t).unwrap();
                let b = residuals(&rec, t).unwrap();
                assert!((a.liouville_max - b.continuity_max).abs() < 1e-8, "{a:?} {b:?}");
                assert!((a.qhj_max - b.qhj_max).abs() < 1e-8, "{a:?} {b:?}");
            }
        }
    }
}
