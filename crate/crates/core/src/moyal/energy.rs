use num_complex::Complex;

use super::symbol::Plane;
use super::wigner::{cross_wigner, wigner_transform, WignerField};
use crate::error::Result;
use crate::grid::{freq_index, PhaseSpaceGrid, SpatialField};
use crate::schrodinger::{EvolutionRecord, Potential, Triple};
use crate::scalar::Real;

/// `E(x, p) = (hbar/2) * (-i) [W(psi, dpsi/dt) - W(dpsi/dt, psi)]`, with the
/// time derivative taken as a centered difference over the fine neighbours.
pub fn energy_symbol<T: Real>(triple: Triple<'_, T>, hbar: T) -> Result<WignerField<T>> {
    let two_dt = T::lit(2.0) * triple.dt;
    let dpsi = SpatialField {
        grid: triple.at.grid,
        values: triple
            .after
            .values
            .iter()
            .zip(&triple.before.values)
            .map(|(a, b)| (a - b) / two_dt)
            .collect(),
    };
    let w = cross_wigner(triple.at, &dpsi, hbar)?;
    // W(dpsi, psi) is the conjugate of W(psi, dpsi).
    let values = w.iter().map(|v| hbar * v.im).collect();
    Ok(WignerField {
        psgrid: PhaseSpaceGrid::conjugate(triple.at.grid, hbar),
        values,
        hbar,
    })
}

/// `{H, F}_BB` for `H = p^2/2m + V(x)`:
/// `p^2 F/2m - hbar^2 F_xx/(8m)` plus `(V(X + y/2) + V(X - y/2))/2` applied
/// in the mixed representation.
pub fn baker_with_hamiltonian<T: Real>(f: &WignerField<T>, mass: T, potential: &Potential<T>) -> WignerField<T> {
    let plane = Plane::new(&f.psgrid);
    let n = plane.n;
    let (xg, pg) = (f.psgrid.xgrid, f.psgrid.pgrid);
    let hbar = f.hbar;
    let complex: Vec<Complex<T>> = f.values.iter().map(|&r| Complex::new(r, T::zero())).collect();

    let mut fxx = complex.clone();
    plane.cols(&mut fxx, |_, c| c.copy_from_slice(&plane.sx.derivative(c, 2)));

    let mut pot = complex;
    let half = T::lit(0.5);
    plane.rows(&mut pot, |i, row| {
        let x = xg.x(i);
        plane.sp.inverse(row);
        for (mi, r) in row.iter_mut().enumerate() {
            let y = T::lit(freq_index(mi, n) as f64) * xg.dx();
            *r = *r * (half * (potential.eval(x + half * y, mass) + potential.eval(x - half * y, mass)));
        }
        plane.sp.forward(row);
    });

    let two_m = T::lit(2.0) * mass;
    let c_xx = hbar * hbar / (T::lit(8.0) * mass);
    let values = (0..n * n)
        .map(|idx| {
            let p = pg.x(idx % n);
            p * p * f.values[idx] / two_m - c_xx * fxx[idx].re + pot[idx].re
        })
        .collect();
    WignerField {
        psgrid: f.psgrid,
        values,
        hbar,
    }
}

/// `max |E + {H, F}_BB|` at snapshot time `t`.
pub fn energy_symbol_residual<T: Real>(record: &EvolutionRecord<T>, t: T) -> Result<T> {
    let triple = record.triple_at(t)?;
    let e = energy_symbol(triple, record.hbar)?;
    let f = wigner_transform(triple.at, record.hbar);
    let bb = baker_with_hamiltonian(&f, record.mass, &record.potential);
    Ok(e.values
        .iter()
        .zip(&bb.values)
        .map(|(a, b)| (*a + *b).abs())
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::schrodinger::{gaussian_packet, harmonic_eigenstate, plane_wave, split_step_evolve, Propagation};

    fn eigen_record(level: usize, hbar: f64, dt: f64) -> (EvolutionRecord<f64>, f64) {
        let g = build_grid(-10.0, 10.0, 128).unwrap();
        let e = hbar * (level as f64 + 0.5);
        let psi = harmonic_eigenstate(g, level, 1.0, 1.0, hbar);
        let rec = EvolutionRecord::from_solution(vec![0.0, 0.7], dt, hbar, 1.0, Potential::Harmonic { omega: 1.0 }, |t| {
            psi.map(|v| v * Complex::new(0.0, -e * t / hbar).exp())
        });
        (rec, e)
    }

    #[test]
    fn calibration_constant_from_an_eigenstate() {
        let hbar = 0.8;
        let (rec, e) = eigen_record(1, hbar, 1e-4);
        let triple = rec.triple(0);
        let f = wigner_transform(triple.at, hbar);
        let bb = baker_with_hamiltonian(&f, 1.0, &rec.potential);
        let gap = f.values.iter().zip(&bb.values).map(|(a, b)| (e * a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-10, "{gap}");

        // Unscaled antisymmetric two-point integral, 2 Im W(psi, dpsi/dt).
        let raw: Vec<f64> = energy_symbol(triple, hbar).unwrap().values.iter().map(|v| 2.0 * v / hbar).collect();
        let peak = (0..raw.len()).max_by(|&a, &b| f.values[a].abs().total_cmp(&f.values[b].abs())).unwrap();
        let c = -e * f.values[peak] / raw[peak];
        assert!((c - hbar / 2.0).abs() < 1e-8, "{c}");
    }

    #[test]
    fn stationary_residuals() {
        for level in [0, 2] {
            let (rec, _) = eigen_record(level, 1.0, 1e-3);
            for &t in &rec.times {
                let r = energy_symbol_residual(&rec, t).unwrap();
                assert!(r < 1e-5, "level {level}: {r}");
            }
        }
    }

    #[test]
    fn plane_wave_residual() {
        let g = build_grid(0.0, 10.0, 64).unwrap();
        let prop = Propagation { dt: 1e-4, steps: 4, stride: 2, hbar: 1.0, mass: 1.0 };
        let rec = split_step_evolve(&plane_wave(g, 3), &Potential::Free, prop).unwrap();
        for &t in &rec.times {
            assert!(energy_symbol_residual(&rec, t).unwrap() < 1e-8);
        }
    }

    #[test]
    fn free_gaussian_residual_converges_quadratically() {
        let g = build_grid(-20.0, 20.0, 256).unwrap();
        let psi = gaussian_packet(g, 0.0, 1.0, 1.5, 1.0).unwrap();
        let at = |dt: f64| {
            let steps = (0.5 / dt).round() as usize;
            let prop = Propagation { dt, steps, stride: steps, hbar: 1.0, mass: 1.0 };
            let rec = split_step_evolve(&psi, &Potential::Free, prop).unwrap();
            energy_symbol_residual(&rec, 0.5).unwrap()
        };
        let (r1, r2) = (at(0.02), at(0.01));
        assert!(r1 / r2 >= 3.5, "{r1} {r2}");
    }
}
