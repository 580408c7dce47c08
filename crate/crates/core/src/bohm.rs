//! Polar decomposition `psi = R exp(iS/hbar)` and the Bohm fields derived from it.
//!
//! The quantum potential uses the negative sign convention
//! `Q = -hbar^2 R'' / (2 m R)`, the only one for which the quantum
//! Hamilton-Jacobi equation `dS/dt + (S')^2/2m + Q + V = 0` holds on exact
//! solutions.
//!
//! Gradients of `S` and `R` are evaluated through `psi` itself
//! (`S' = hbar Im(psi'/psi)`, `R''/R = Re(psi''/psi) + Im(psi'/psi)^2`), since
//! the unwrapped phase is in general not periodic on the grid.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SpatialField};
use crate::scalar::{wrap_angle, Real};
use crate::schrodinger::{EvolutionRecord, Triple};

/// Samples with `rho < NODE_THRESHOLD * max(rho)` are treated as nodes.
pub const NODE_THRESHOLD: f64 = 1e-12;

/// Real field with per-sample validity flags. Masked samples hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField<T: Real> {
    pub field: SpatialField<T>,
    pub mask: Vec<bool>,
}

impl<T: Real> MaskedField<T> {
    pub fn grid(&self) -> Grid1D<T> {
        self.field.grid
    }

    pub fn values(&self) -> &[T] {
        &self.field.values
    }

    pub fn get(&self, j: usize) -> Option<T> {
        (!self.mask[j]).then(|| self.field.values[j])
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Largest `|f|` over unmasked samples.
    pub fn max_abs(&self) -> T {
        self.iter_valid().map(|(_, v)| v.abs()).fold(T::zero(), T::max)
    }

    /// Largest `|f - g(x)|` over unmasked samples.
    pub fn max_error(&self, exact: impl Fn(T) -> T) -> T {
        let g = self.grid();
        self.iter_valid()
            .map(|(j, v)| (v - exact(g.x(j))).abs())
            .fold(T::zero(), T::max)
    }

    /// Largest `|f - g|` over samples valid in both fields.
    pub fn max_gap(&self, other: &Self) -> Result<T> {
        if !self.grid().compatible(&other.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .iter_valid()
            .filter(|&(j, _)| !other.mask[j])
            .map(|(j, v)| (v - other.field.values[j]).abs())
            .fold(T::zero(), T::max))
    }

    pub fn iter_valid(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.field
            .values
            .iter()
            .zip(&self.mask)
            .enumerate()
            .filter(|(_, (_, &m))| !m)
            .map(|(j, (&v, _))| (j, v))
    }

    pub(crate) fn from_parts(grid: Grid1D<T>, values: Vec<T>, mask: Vec<bool>) -> Self {
        let values = values
            .into_iter()
            .zip(&mask)
            .map(|(v, &m)| if m || !v.is_finite() { T::zero() } else { v })
            .collect();
        let mask = mask.clone();
        Self {
            field: SpatialField { grid, values },
            mask,
        }
    }
}

/// `psi = R exp(iS/hbar)` with an unwrapped phase and a node mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField<T: Real> {
    pub r: SpatialField<T>,
    /// Phase in action units, continuous off the node mask.
    pub s: SpatialField<T>,
    pub node_mask: Vec<bool>,
    pub hbar: T,
    psi: SpatialField<Complex<T>>,
}

impl<T: Real> PolarField<T> {
    pub fn grid(&self) -> Grid1D<T> {
        self.r.grid
    }

    pub fn psi(&self) -> &SpatialField<Complex<T>> {
        &self.psi
    }

    pub fn rho(&self) -> SpatialField<T> {
        self.r.map(|r| r * r)
    }

    /// Largest `|R exp(iS/hbar) - psi|` off the mask.
    pub fn reconstruction_error(&self) -> T {
        (0..self.psi.len())
            .filter(|&j| !self.node_mask[j])
            .map(|j| {
                let (r, s) = (self.r.values[j], self.s.values[j] / self.hbar);
                (Complex::new(r * s.cos(), r * s.sin()) - self.psi.values[j]).norm()
            })
            .fold(T::zero(), T::max)
    }

    /// `psi'/psi` and `psi''/psi`, zero on nodes.
    fn log_derivatives(&self) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let sp = self.grid().spectral();
        let d1 = sp.derivative(&self.psi.values, 1);
        let d2 = sp.derivative(&self.psi.values, 2);
        let z = Complex::new(T::zero(), T::zero());
        let ratio = |d: &[Complex<T>]| {
            d.iter()
                .zip(&self.psi.values)
                .zip(&self.node_mask)
                .map(|((&d, &p), &m)| if m { z } else { d / p })
                .collect()
        };
        (ratio(&d1), ratio(&d2))
    }
}

/// Mask of samples with `rho < NODE_THRESHOLD * max(rho)`.
pub fn node_mask<T: Real>(rho: &[T]) -> Vec<bool> {
    let max = rho.iter().copied().fold(T::zero(), T::max);
    let cut = T::lit(NODE_THRESHOLD) * max;
    rho.iter().map(|&r| r < cut).collect()
}

pub fn polar_decompose<T: Real>(psi: &SpatialField<Complex<T>>, hbar: T) -> Result<PolarField<T>> {
    let rho: Vec<T> = psi.values.iter().map(|v| v.norm_sqr()).collect();
    if !rho.iter().any(|&r| r > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    let mask = node_mask(&rho);
    let theta: Vec<T> = psi.values.iter().map(|v| v.arg()).collect();
    let anchor = rho
        .iter()
        .enumerate()
        .fold(0, |best, (j, &r)| if r > rho[best] { j } else { best });

    let n = psi.len();
    let mut phase = vec![T::zero(); n];
    phase[anchor] = theta[anchor];
    let mut walk = |range: &mut dyn Iterator<Item = usize>| {
        let mut last = anchor;
        for j in range {
            phase[j] = phase[last] + wrap_angle(theta[j] - theta[last]);
            if !mask[j] {
                last = j;
            }
        }
    };
    walk(&mut (anchor + 1..n));
    walk(&mut (0..anchor).rev());

    Ok(PolarField {
        r: psi.map(|v| v.norm()),
        s: SpatialField {
            grid: psi.grid,
            values: phase.into_iter().map(|p| p * hbar).collect(),
        },
        node_mask: mask,
        hbar,
        psi: psi.clone(),
    })
}

/// `Q = -hbar^2 R''/(2 m R)`.
pub fn quantum_potential<T: Real>(pf: &PolarField<T>, mass: T) -> MaskedField<T> {
    let (d1, d2) = pf.log_derivatives();
    let c = -pf.hbar * pf.hbar / (T::lit(2.0) * mass);
    let values = d1.iter().zip(&d2).map(|(a, b)| c * (b.re + a.im * a.im)).collect();
    MaskedField::from_parts(pf.grid(), values, pf.node_mask.clone())
}

/// `P_B = S'`.
pub fn bohm_momentum<T: Real>(pf: &PolarField<T>) -> MaskedField<T> {
    let (d1, _) = pf.log_derivatives();
    let values = d1.iter().map(|a| pf.hbar * a.im).collect();
    MaskedField::from_parts(pf.grid(), values, pf.node_mask.clone())
}

/// `E_B = -(S(t + dt) - S(t))/dt`, with the phase increment taken modulo `2 pi hbar`.
pub fn bohm_energy<T: Real>(pf_t: &PolarField<T>, pf_next: &PolarField<T>, dt: T) -> Result<MaskedField<T>> {
    if !pf_t.grid().compatible(&pf_next.grid()) {
        return Err(Error::GridMismatch);
    }
    let hbar = pf_t.hbar;
    let values = pf_t
        .psi
        .values
        .iter()
        .zip(&pf_next.psi.values)
        .map(|(a, b)| -hbar * (b * a.conj()).arg() / dt)
        .collect();
    let mask = pf_t.node_mask.iter().zip(&pf_next.node_mask).map(|(a, b)| *a || *b).collect();
    Ok(MaskedField::from_parts(pf_t.grid(), values, mask))
}

/// Density, quantum potential, Bohm momentum and (optionally) Bohm energy.
#[derive(Debug, Clone, PartialEq)]
pub struct BohmFieldSet<T: Real> {
    pub rho: SpatialField<T>,
    pub q: MaskedField<T>,
    pub p_b: MaskedField<T>,
    pub e_b: Option<MaskedField<T>>,
}

impl<T: Real> BohmFieldSet<T> {
    pub fn new(pf: &PolarField<T>, mass: T, next: Option<(&PolarField<T>, T)>) -> Result<Self> {
        Ok(Self {
            rho: pf.rho(),
            q: quantum_potential(pf, mass),
            p_b: bohm_momentum(pf),
            e_b: next.map(|(p, dt)| bohm_energy(pf, p, dt)).transpose()?,
        })
    }
}

/// Max-abs residuals of the continuity, quantum Hamilton-Jacobi and energy equations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResidualReport<T> {
    pub continuity_max: T,
    pub qhj_max: T,
    pub energy_conservation_max: T,
    /// Pointwise gap between the phase route `dS/dt + H` and `-(E_B - H)`.
    pub energy_identity_gap: T,
}

/// Bohm fields of a snapshot and its fine-step neighbours, shared with
/// other pictures that need the same time derivatives.
#[derive(Debug, Clone)]
pub struct SliceFields<T: Real> {
    pub polar: PolarField<T>,
    pub before: PolarField<T>,
    pub after: PolarField<T>,
    /// Samples excluded from residuals (node at any of the three times).
    pub mask: Vec<bool>,
    pub dt: T,
}

impl<T: Real> SliceFields<T> {
    pub fn new(triple: Triple<'_, T>, hbar: T) -> Result<Self> {
        let polar = polar_decompose(triple.at, hbar)?;
        let before = polar_decompose(triple.before, hbar)?;
        let after = polar_decompose(triple.after, hbar)?;
        let mask = (0..polar.node_mask.len())
            .map(|j| polar.node_mask[j] || before.node_mask[j] || after.node_mask[j])
            .collect();
        Ok(Self {
            polar,
            before,
            after,
            mask,
            dt: triple.dt,
        })
    }

    /// Centered `d rho / dt`.
    pub fn drho_dt(&self) -> Vec<T> {
        let two_dt = T::lit(2.0) * self.dt;
        self.after
            .r
            .values
            .iter()
            .zip(&self.before.r.values)
            .map(|(a, b)| (*a * *a - *b * *b) / two_dt)
            .collect()
    }

    /// Probability current `J = hbar Im(psi* psi')/m`.
    pub fn current(&self, mass: T) -> Vec<T> {
        let psi = &self.polar.psi.values;
        let d1 = self.polar.grid().spectral().derivative(psi, 1);
        psi.iter()
            .zip(&d1)
            .map(|(p, d)| self.polar.hbar * (p.conj() * d).im / mass)
            .collect()
    }

    /// `d rho/dt + J'` (unmasked everywhere).
    pub fn continuity(&self, mass: T) -> Vec<T> {
        let j = self.current(mass);
        let sp = self.polar.grid().spectral();
        let jc: Vec<Complex<T>> = j.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let dj = sp.derivative(&jc, 1);
        self.drho_dt().iter().zip(&dj).map(|(a, b)| *a + b.re).collect()
    }

    fn max_off_mask(&self, v: &[T]) -> T {
        v.iter()
            .zip(&self.mask)
            .filter(|(_, &m)| !m)
            .map(|(x, _)| x.abs())
            .fold(T::zero(), T::max)
    }
}

/// Residual report at the snapshot nearest `t`.
pub fn residuals<T: Real>(record: &EvolutionRecord<T>, t: T) -> Result<ResidualReport<T>> {
    let slice = SliceFields::new(record.triple_at(t)?, record.hbar)?;
    residuals_of(&slice, record)
}

pub(crate) fn residuals_of<T: Real>(slice: &SliceFields<T>, record: &EvolutionRecord<T>) -> Result<ResidualReport<T>> {
    let m = record.mass;
    let grid = slice.polar.grid();
    let v = record.potential.sample(&grid, m)?;
    let q = quantum_potential(&slice.polar, m);
    let p = bohm_momentum(&slice.polar);
    let two = T::lit(2.0);
    let hbar = slice.polar.hbar;
    let period = two * T::PI() * hbar;

    // phase route: unwrapped S differences, reduced modulo 2 pi hbar
    let qhj: Vec<T> = (0..grid.n())
        .map(|j| {
            let mut ds = slice.after.s.values[j] - slice.before.s.values[j];
            ds = ds - period * (ds / period).round();
            let ds_dt = ds / (two * slice.dt);
            let pj = p.field.values[j];
            ds_dt + pj * pj / (two * m) + q.field.values[j] + v.values[j]
        })
        .collect();

    // energy route: E_B from the centered slice pair
    let e_b = bohm_energy(&slice.before, &slice.after, two * slice.dt)?;
    let energy: Vec<T> = (0..grid.n())
        .map(|j| {
            let pj = p.field.values[j];
            e_b.field.values[j] - (pj * pj / (two * m) + q.field.values[j] + v.values[j])
        })
        .collect();

    Ok(ResidualReport {
        continuity_max: slice.max_off_mask(&slice.continuity(m)),
        qhj_max: slice.max_off_mask(&qhj),
        energy_conservation_max: slice.max_off_mask(&energy),
        energy_identity_gap: slice.max_off_mask(&qhj.iter().zip(&energy).map(|(a, b)| *a + *b).collect::<Vec<_>>()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::schrodinger::{
        chirped_gaussian, gaussian_packet, harmonic_eigenstate, plane_wave, plane_wave_k, split_step_evolve,
        Potential, Propagation,
    };
    use proptest::prelude::*;

    type C = Complex<f64>;

    #[test]
    fn plane_wave_polar_form() {
        let g = build_grid(0.0f64, 10.0, 128).unwrap();
        let hbar = 0.7;
        let k = plane_wave_k(&g, 4);
        let psi = plane_wave(g, 4);
        let pf = polar_decompose(&psi, hbar).unwrap();
        assert!(pf.node_mask.iter().all(|m| !m));
        let r0 = pf.r.values[0];
        assert!(pf.r.values.iter().all(|r| (r - r0).abs() < 1e-14));
        let c = pf.s.values[0] - hbar * k * g.x(0);
        for j in 0..g.n() {
            assert!((pf.s.values[j] - hbar * k * g.x(j) - c).abs() < 1e-11);
        }
        assert!(quantum_potential(&pf, 1.0).max_abs() < 1e-10);
        let p = bohm_momentum(&pf);
        assert!(p.max_error(|_| hbar * k) < 1e-10);
    }

    #[test]
    fn real_gaussian_has_constant_phase() {
        let g = build_grid(-10.0f64, 10.0, 256).unwrap();
        let psi = gaussian_packet(g, 0.0, 1.0, 0.0, 1.0).unwrap();
        let pf = polar_decompose(&psi, 1.0).unwrap();
        assert!(pf.s.values.iter().all(|&s| s == 0.0));
        for (r, p) in pf.r.values.iter().zip(&psi.values) {
            assert_eq!(*r, p.norm());
        }
        assert!(bohm_momentum(&pf).max_abs() < 1e-9);
    }

    #[test]
    fn nodes_are_masked_with_half_period_steps() {
        // zeros of cos(kx) fall on grid points
        let g = build_grid(-16.0f64, 16.0, 512).unwrap();
        let k = std::f64::consts::PI / 2.0;
        let hbar = 1.0;
        let psi = SpatialField::from_fn(g, |x: f64| C::new((k * x).cos() * (-x * x / 50.0).exp(), 0.0));
        let pf = polar_decompose(&psi, hbar).unwrap();
        let zeros: Vec<usize> = (0..g.n()).filter(|&j| ((g.x(j) - 1.0) / 2.0).fract() == 0.0).collect();
        for &j in &zeros {
            assert!(pf.node_mask[j], "x={}", g.x(j));
        }
        assert_eq!(pf.node_mask.iter().filter(|&&m| m).count(), zeros.len());
        let pi = std::f64::consts::PI;
        for w in zeros.windows(2) {
            let (a, b) = (w[0], w[1]);
            let inside = pf.s.values[(a + b) / 2];
            for j in a + 1..b {
                assert_eq!(pf.s.values[j], inside);
            }
            let step = (pf.s.values[b + 1] - pf.s.values[b - 1]).abs();
            assert!((step - pi * hbar).abs() < 1e-12);
        }
        assert!(pf.reconstruction_error() < 1e-10);
    }

    #[test]
    fn zero_field_is_rejected() {
        let g = build_grid(0.0f64, 1.0, 16).unwrap();
        let psi = SpatialField::<C>::zeros(g);
        assert_eq!(polar_decompose(&psi, 1.0), Err(Error::ZeroNorm));
    }

    #[test]
    fn gaussian_quantum_potential() {
        let g = build_grid(-12.0f64, 12.0, 128).unwrap();
        let (sigma, hbar, m) = (1.2, 0.9, 1.5);
        let psi = gaussian_packet(g, 0.0, sigma, 0.4, hbar).unwrap();
        let pf = polar_decompose(&psi, hbar).unwrap();
        let q = quantum_potential(&pf, m);
        let s2 = sigma * sigma;
        let err = q.max_error(|x| hbar * hbar / (4.0 * m * s2) - hbar * hbar * x * x / (8.0 * m * s2 * s2));
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn harmonic_ground_state_quantum_potential() {
        let g = build_grid(-10.0f64, 10.0, 256).unwrap();
        let (omega, m, hbar) = (1.3, 0.8, 1.1);
        let psi = harmonic_eigenstate(g, 0, omega, m, hbar);
        let q = quantum_potential(&polar_decompose(&psi, hbar).unwrap(), m);
        let err = q.max_error(|x| hbar * omega / 2.0 - 0.5 * m * omega * omega * x * x);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn chirped_gaussian_momentum() {
        let g = build_grid(-12.0f64, 12.0, 512).unwrap();
        let alpha = 0.35;
        let psi = chirped_gaussian(g, 0.5, 1.0, 0.0, alpha, 1.0).unwrap();
        let p = bohm_momentum(&polar_decompose(&psi, 1.0).unwrap());
        let err = p.max_error(|x| 2.0 * alpha * x);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn plane_wave_energy() {
        let g = build_grid(0.0f64, 10.0, 64).unwrap();
        let k = plane_wave_k(&g, 2);
        let (hbar, m, dt) = (1.0, 1.0, 1e-3);
        let omega = hbar * k * k / (2.0 * m);
        let psi = plane_wave(g, 2);
        let next = psi.map(|v| v * C::new(0.0, -omega * dt).exp());
        let e = bohm_energy(&polar_decompose(&psi, hbar).unwrap(), &polar_decompose(&next, hbar).unwrap(), dt).unwrap();
        assert!(e.max_error(|_| hbar * omega) < 1e-10);
    }

    #[test]
    fn harmonic_eigenstate_energies() {
        let g = build_grid(-10.0f64, 10.0, 256).unwrap();
        let (omega, m, hbar) = (1.0, 1.0, 1.0);
        for level in 0..4 {
            let psi = harmonic_eigenstate(g, level, omega, m, hbar);
            let prop = Propagation { dt: 2.5e-4, steps: 0, stride: 1, hbar, mass: m };
            let rec = split_step_evolve(&psi, &Potential::Harmonic { omega }, prop).unwrap();
            let (a, b) = rec.pair(0);
            let e = bohm_energy(&polar_decompose(a, hbar).unwrap(), &polar_decompose(b, hbar).unwrap(), rec.dt).unwrap();
            let want = (level as f64 + 0.5) * hbar * omega;
            let err = e.max_error(|_| want);
            assert!(err < 1e-6, "level {level}: {err}");
        }
    }

    #[test]
    fn free_gaussian_center_energy_equals_q() {
        let g = build_grid(-20.0f64, 20.0, 512).unwrap();
        let (sigma, hbar, m) = (1.0, 1.0, 1.0);
        let psi = gaussian_packet(g, 0.0, sigma, 0.0, hbar).unwrap();
        let prop = Propagation { dt: 1e-4, steps: 0, stride: 1, hbar, mass: m };
        let rec = split_step_evolve(&psi, &Potential::Free, prop).unwrap();
        let (a, b) = rec.pair(0);
        let e = bohm_energy(&polar_decompose(a, hbar).unwrap(), &polar_decompose(b, hbar).unwrap(), rec.dt).unwrap();
        let j = g.nearest_index(0.0).unwrap();
        let want = hbar * hbar / (4.0 * m * sigma * sigma);
        assert!((e.get(j).unwrap() - want).abs() < 1e-4);
    }

    fn run(psi: &SpatialField<C>, v: Potential<f64>, dt: f64, steps: usize) -> EvolutionRecord<f64> {
        let prop = Propagation { dt, steps, stride: steps.max(1), hbar: 1.0, mass: 1.0 };
        split_step_evolve(psi, &v, prop).unwrap()
    }

    #[test]
    fn harmonic_ground_state_residuals() {
        let g = build_grid(-10.0f64, 10.0, 256).unwrap();
        let psi = harmonic_eigenstate(g, 0, 1.0, 1.0, 1.0);
        let rec = run(&psi, Potential::Harmonic { omega: 1.0 }, 1e-3, 500);
        let r = residuals(&rec, 0.5).unwrap();
        assert!(r.continuity_max < 1e-5 && r.qhj_max < 1e-5 && r.energy_conservation_max < 1e-5, "{r:?}");
        assert!((r.qhj_max - r.energy_conservation_max).abs() < 1e-10);
        assert!(r.energy_identity_gap < 1e-10, "{r:?}");
    }

    #[test]
    fn plane_wave_residuals() {
        let g = build_grid(0.0f64, 10.0, 64).unwrap();
        let rec = run(&plane_wave(g, 3), Potential::Free, 1e-3, 100);
        let r = residuals(&rec, 0.1).unwrap();
        assert!(r.continuity_max < 1e-10 && r.qhj_max < 1e-10 && r.energy_conservation_max < 1e-10, "{r:?}");
    }

    #[test]
    fn free_gaussian_residuals() {
        let g = build_grid(-20.0f64, 20.0, 1024).unwrap();
        let psi = gaussian_packet(g, 0.0, 1.0, 0.0, 1.0).unwrap();
        let rec = run(&psi, Potential::Free, 1e-3, 1000);
        let r = residuals(&rec, 1.0).unwrap();
        assert!(r.continuity_max < 1e-4 && r.qhj_max < 1e-4 && r.energy_conservation_max < 1e-4, "{r:?}");
        assert!((r.qhj_max - r.energy_conservation_max).abs() < 1e-10);
        assert!(r.energy_identity_gap < 1e-10, "{r:?}");
    }

    #[test]
    fn residuals_need_a_snapshot() {
        let g = build_grid(0.0f64, 10.0, 64).unwrap();
        let rec = run(&plane_wave(g, 1), Potential::Free, 1e-3, 10);
        assert!(matches!(residuals(&rec, 0.005), Err(Error::MissingSnapshot(_))));
    }

    #[test]
    fn qhj_residual_is_second_order_in_dt() {
        let g = build_grid(-20.0f64, 20.0, 512).unwrap();
        let psi = gaussian_packet(g, -1.0, 1.0, 1.0, 1.0).unwrap();
        let r1 = residuals(&run(&psi, Potential::Free, 0.01, 50), 0.5).unwrap().qhj_max;
        let r2 = residuals(&run(&psi, Potential::Free, 0.005, 100), 0.5).unwrap().qhj_max;
        assert!(r1 / r2 >= 3.5, "{r1} {r2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn reconstruction_holds(x0 in -3.0f64..3.0, sigma in 0.5f64..2.0, p0 in -3.0f64..3.0, chirp in -0.5f64..0.5) {
            let g = build_grid(-15.0f64, 15.0, 256).unwrap();
            let psi = chirped_gaussian(g, x0, sigma, p0, chirp, 1.0).unwrap();
            let pf = polar_decompose(&psi, 1.0).unwrap();
            prop_assert!(pf.reconstruction_error() < 1e-10);
            prop_assert!(pf.r.values.iter().all(|&r| r >= 0.0));
        }
    }
}
