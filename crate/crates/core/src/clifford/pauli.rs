//! Bohm momentum and energy of a Pauli particle in spinor-component,
//! Euler-angle and Clifford phase-space form.
//!
//! Without a magnetic field the two spinor components evolve as independent
//! Schrödinger waves, so a spinor history is a pair of evolution records.

use num_complex::Complex;

use super::algebra::{CliffordSignature, Multivector};
use super::field::{density_element, purity_check, IdealElement, MultivectorField};
use crate::bohm::{node_mask, MaskedField};
use crate::error::{Error, Result};
use crate::grid::{integrate, Grid1D, SpatialField};
use crate::moyal::{cev_momentum, wigner_from_pairs, WignerField};
use crate::scalar::{wrap_angle, Real};
use crate::schrodinger::EvolutionRecord;

type Wave<T> = SpatialField<Complex<T>>;

/// Points with `sin(theta)` below this are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-8;

const E1: usize = 0b001;
const E3: usize = 0b100;
const E23: usize = 0b110;
const E123: usize = 0b111;

/// Two-component spinor `(psi_1, psi_2)` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSpinorField<T: Real> {
    pub psi1: Wave<T>,
    pub psi2: Wave<T>,
    pub hbar: T,
}

impl<T: Real> PauliSpinorField<T> {
    /// Builds the spinor and rescales it to unit total norm.
    pub fn new(psi1: Wave<T>, psi2: Wave<T>, hbar: T) -> Result<Self> {
        if !psi1.grid.compatible(&psi2.grid) {
            return Err(Error::GridMismatch);
        }
        let norm = psi1.norm_sqr() + psi2.norm_sqr();
        if !(norm > T::zero()) {
            return Err(Error::ZeroNorm);
        }
        let s = T::one() / norm.sqrt();
        Ok(Self {
            psi1: psi1.map(|v| v * s),
            psi2: psi2.map(|v| v * s),
            hbar,
        })
    }

    pub fn grid(&self) -> Grid1D<T> {
        self.psi1.grid
    }

    pub fn components(&self) -> [&Wave<T>; 2] {
        [&self.psi1, &self.psi2]
    }

    pub fn rho(&self) -> Vec<T> {
        self.psi1.values.iter().zip(&self.psi2.values).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    }

    pub fn component_rho(&self, i: usize) -> Vec<T> {
        self.components()[i].values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn norm(&self) -> T {
        integrate(&SpatialField {
            grid: self.grid(),
            values: self.rho(),
        })
    }

    /// `S_i = hbar arg(psi_i)`, zero where the component vanishes.
    pub fn phase(&self, i: usize) -> Vec<T> {
        self.components()[i].values.iter().map(|v| self.hbar * v.arg()).collect()
    }
}

/// Spinor at a snapshot and one fine step either side.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSlice<F> {
    pub before: F,
    pub at: F,
    pub after: F,
    pub dt: f64,
}

impl<F> SpinSlice<F> {
    pub fn map<G>(&self, f: impl Fn(&F) -> Result<G>) -> Result<SpinSlice<G>> {
        Ok(SpinSlice {
            before: f(&self.before)?,
            at: f(&self.at)?,
            after: f(&self.after)?,
            dt: self.dt,
        })
    }
}

/// Slice of a spinor whose components were evolved as `up` and `down`.
/// The spinor is normalized by the initial norm so that neighbouring
/// snapshots share one scale.
pub fn spin_slice<T: Real>(
    up: &EvolutionRecord<T>,
    down: &EvolutionRecord<T>,
    t: T,
) -> Result<SpinSlice<PauliSpinorField<T>>> {
    if !up.grid().compatible(&down.grid()) || up.dt != down.dt || up.hbar != down.hbar {
        return Err(Error::GridMismatch);
    }
    let (a, b) = (up.triple_at(t)?, down.triple_at(t)?);
    let norm = up.states[0].norm_sqr() + down.states[0].norm_sqr();
    if !(norm > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    let s = T::one() / norm.sqrt();
    let make = |x: &Wave<T>, y: &Wave<T>| PauliSpinorField {
        psi1: x.map(|v| v * s),
        psi2: y.map(|v| v * s),
        hbar: up.hbar,
    };
    Ok(SpinSlice {
        before: make(a.before, b.before),
        at: make(a.at, b.at),
        after: make(a.after, b.after),
        dt: up.dt.to_f64_lossy(),
    })
}

/// Bohm momentum in bilinear and weighted-mean form and Bohm energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliBohmFields<T: Real> {
    /// `2 rho P_B = -i hbar sum[psi_i* psi_i' - psi_i psi_i*']`.
    pub p_bilinear: MaskedField<T>,
    /// `rho P_B = sum rho_i S_i'`.
    pub p_weighted: MaskedField<T>,
    /// `rho E_B = -sum rho_i dS_i/dt`.
    pub e_b: MaskedField<T>,
}

/// Node mask of the total density and the points where each component vanishes.
fn component_masks<T: Real>(s: &PauliSpinorField<T>) -> (Vec<bool>, [Vec<bool>; 2]) {
    let mask = node_mask(&s.rho());
    let comp = |i: usize| s.component_rho(i).into_iter().map(|r| r == T::zero()).collect();
    (mask, [comp(0), comp(1)])
}

pub fn pauli_bohm_components<T: Real>(slice: &SpinSlice<PauliSpinorField<T>>) -> Result<PauliBohmFields<T>> {
    let s = &slice.at;
    let grid = s.grid();
    let n = grid.n();
    let hbar = s.hbar;
    let sp = grid.spectral();
    let rho = s.rho();
    let (mask, comp_mask) = component_masks(s);
    let two_dt = T::lit(2.0 * slice.dt);

    let mut bilinear = vec![T::zero(); n];
    let mut weighted = vec![T::zero(); n];
    let mut energy = vec![T::zero(); n];
    for (i, psi) in s.components().into_iter().enumerate() {
        let d = sp.derivative(&psi.values, 1);
        let before = &slice.before.components()[i].values;
        let after = &slice.after.components()[i].values;
        for j in 0..n {
            let (p, dp) = (psi.values[j], d[j]);
            let two_rho_p = -(p.conj() * dp - p * dp.conj()) * Complex::new(T::zero(), hbar);
            bilinear[j] = bilinear[j] + two_rho_p.re / (T::lit(2.0) * rho[j]);
            if comp_mask[i][j] {
                continue;
            }
            let rho_i = p.norm_sqr();
            let grad_s = hbar * (dp / p).im;
            weighted[j] = weighted[j] + rho_i * grad_s / rho[j];
            let ds_dt = hbar * (after[j] * before[j].conj()).arg() / two_dt;
            energy[j] = energy[j] - rho_i * ds_dt / rho[j];
        }
    }
    Ok(PauliBohmFields {
        p_bilinear: MaskedField::from_parts(grid, bilinear, mask.clone()),
        p_weighted: MaskedField::from_parts(grid, weighted, mask.clone()),
        e_b: MaskedField::from_parts(grid, energy, mask),
    })
}

/// Euler-angle form `psi_1 = sqrt(rho) cos(theta/2) e^{i(phi+psi_E)/2}`,
/// `psi_2 = i sqrt(rho) sin(theta/2) e^{i(psi_E-phi)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerAngleField<T: Real> {
    pub theta: SpatialField<T>,
    pub phi: SpatialField<T>,
    pub psi_e: SpatialField<T>,
    pub rho: SpatialField<T>,
    /// `sin(theta) < POLE_THRESHOLD`: `phi` and `psi_E` are not separately defined.
    pub pole_mask: Vec<bool>,
    pub hbar: T,
}

impl<T: Real> EulerAngleField<T> {
    pub fn grid(&self) -> Grid1D<T> {
        self.rho.grid
    }

    /// Samples `(theta, phi, psi_E)` and the density from closures of `x`.
    pub fn from_fn(grid: Grid1D<T>, hbar: T, f: impl Fn(T) -> (T, T, T, T)) -> Self {
        let vals: Vec<_> = grid.positions().into_iter().map(f).collect();
        let field = |k: usize| SpatialField {
            grid,
            values: vals
                .iter()
                .map(|v| match k {
                    0 => v.0,
                    1 => v.1,
                    2 => v.2,
                    _ => v.3,
                })
                .collect(),
        };
        let theta = field(0);
        let pole_mask = theta.values.iter().map(|t| t.sin() < T::lit(POLE_THRESHOLD)).collect();
        Self {
            theta,
            phi: field(1),
            psi_e: field(2),
            rho: field(3),
            pole_mask,
            hbar,
        }
    }
}

pub fn spinor_to_euler<T: Real>(s: &PauliSpinorField<T>) -> EulerAngleField<T> {
    let grid = s.grid();
    let half_pi = T::FRAC_PI_2();
    let two = T::lit(2.0);
    let mut out = EulerAngleField::from_fn(grid, s.hbar, |_| (T::zero(), T::zero(), T::zero(), T::zero()));
    for j in 0..grid.n() {
        let (a, b) = (s.psi1.values[j], s.psi2.values[j]);
        let (s1, s2) = (a.arg(), b.arg());
        let theta = two * b.norm().atan2(a.norm());
        out.theta.values[j] = theta;
        out.phi.values[j] = s1 - s2 + half_pi;
        out.psi_e.values[j] = s1 + s2 - half_pi;
        out.rho.values[j] = a.norm_sqr() + b.norm_sqr();
        out.pole_mask[j] = theta.sin() < T::lit(POLE_THRESHOLD);
    }
    out
}

pub fn euler_to_spinor<T: Real>(e: &EulerAngleField<T>) -> PauliSpinorField<T> {
    let grid = e.grid();
    let half = T::lit(0.5);
    let n = grid.n();
    let mut psi1 = Vec::with_capacity(n);
    let mut psi2 = Vec::with_capacity(n);
    for j in 0..n {
        let r = e.rho.values[j].sqrt();
        let th = e.theta.values[j] * half;
        let (phi, psi) = (e.phi.values[j], e.psi_e.values[j]);
        psi1.push(Complex::from_polar(r * th.cos(), (phi + psi) * half));
        psi2.push(Complex::new(T::zero(), T::one()) * Complex::from_polar(r * th.sin(), (psi - phi) * half));
    }
    PauliSpinorField {
        psi1: SpatialField { grid, values: psi1 },
        psi2: SpatialField { grid, values: psi2 },
        hbar: e.hbar,
    }
}

/// Spinor/Euler conversion in either direction.
#[derive(Debug, Clone, PartialEq)]
pub enum SpinForm<T: Real> {
    Spinor(PauliSpinorField<T>),
    Euler(EulerAngleField<T>),
}

pub fn euler_spinor_convert<T: Real>(input: &SpinForm<T>) -> SpinForm<T> {
    match input {
        SpinForm::Spinor(s) => SpinForm::Euler(spinor_to_euler(s)),
        SpinForm::Euler(e) => SpinForm::Spinor(euler_to_spinor(e)),
    }
}

/// Bohm momentum and energy from the Euler angles.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerBohmFields<T: Real> {
    pub p_b: MaskedField<T>,
    pub e_b: MaskedField<T>,
}

/// `P_B = hbar(psi_E' + cos(theta) phi')/2`, `E_B = -hbar(d psi_E/dt + cos(theta) d phi/dt)/2`.
///
/// Angle gradients are read off the band-limited products
/// `psi_1 psi_2 ~ e^{i psi_E}` and `psi_1 psi_2* ~ e^{i phi}` of the reconstructed
/// spinor, which stay smooth where the angles themselves wind.
pub fn pauli_bohm_euler<T: Real>(slice: &SpinSlice<EulerAngleField<T>>) -> Result<EulerBohmFields<T>> {
    let e = &slice.at;
    let grid = e.grid();
    let n = grid.n();
    let half = T::lit(0.5);
    let hbar = e.hbar;
    let s = euler_to_spinor(e);
    let sp = grid.spectral();
    let d1 = sp.derivative(&s.psi1.values, 1);
    let d2 = sp.derivative(&s.psi2.values, 1);
    let nodes = node_mask(&e.rho.values);
    let mask: Vec<bool> = (0..n)
        .map(|j| nodes[j] || e.pole_mask[j] || slice.before.pole_mask[j] || slice.after.pole_mask[j])
        .collect();
    let two_dt = T::lit(2.0 * slice.dt);

    let mut p = vec![T::zero(); n];
    let mut en = vec![T::zero(); n];
    for j in 0..n {
        if mask[j] {
            continue;
        }
        let (a, b, da, db) = (s.psi1.values[j], s.psi2.values[j], d1[j], d2[j]);
        let w = a * b;
        let dw = da * b + a * db;
        let u = a * b.conj();
        let du = da * b.conj() + a * db.conj();
        let grad_psi = (dw / w).im;
        let grad_phi = (du / u).im;
        let cos = e.theta.values[j].cos();
        p[j] = hbar * (grad_psi + cos * grad_phi) * half;

        let dpsi = wrap_angle(slice.after.psi_e.values[j] - slice.before.psi_e.values[j]) / two_dt;
        let dphi = wrap_angle(slice.after.phi.values[j] - slice.before.phi.values[j]) / two_dt;
        en[j] = -hbar * (dpsi + cos * dphi) * half;
    }
    Ok(EulerBohmFields {
        p_b: MaskedField::from_parts(grid, p, mask.clone()),
        e_b: MaskedField::from_parts(grid, en, mask),
    })
}

/// `(1 + e_3)/2`.
pub fn spin_up_idempotent<T: Real>() -> Multivector<T> {
    let sig = CliffordSignature::pauli();
    let half = T::lit(0.5);
    &Multivector::scalar(sig, half) + &Multivector::blade(sig, E3, half)
}

/// `Psi_L = (Re psi_1 + Im psi_1 e123 + Re psi_2 e1 + Im psi_2 e23)(1 + e3)/2`,
/// the ideal image of the column spinor.
pub fn pauli_embed<T: Real>(s: &PauliSpinorField<T>) -> IdealElement<T> {
    let sig = CliffordSignature::pauli();
    let eps = spin_up_idempotent::<T>();
    let mut base = MultivectorField::zeros(sig, s.grid());
    for j in 0..s.grid().n() {
        let (a, b) = (s.psi1.values[j], s.psi2.values[j]);
        base.blade_mut(0)[j] = a.re;
        base.blade_mut(E123)[j] = a.im;
        base.blade_mut(E1)[j] = b.re;
        base.blade_mut(E23)[j] = b.im;
    }
    IdealElement {
        psi_l: base.mul_right(&eps).expect("same signature"),
        epsilon: eps,
        mask: node_mask(&s.rho()),
    }
}

/// Inverse of [`pauli_embed`] at one point.
pub fn pauli_unembed<T: Real>(m: &Multivector<T>) -> (Complex<T>, Complex<T>) {
    let two = T::lit(2.0);
    (
        Complex::new(m.coeff(0), m.coeff(E123)) * two,
        Complex::new(m.coeff(E1), m.coeff(E23)) * two,
    )
}

/// Largest `|rho^2 - rho|` of the locally normalized density of `s`.
pub fn spinor_purity<T: Real>(s: &PauliSpinorField<T>) -> Result<T> {
    let rho = density_element(&pauli_embed(s))?;
    Ok(purity_check(&rho.local_normalized()))
}

/// Spin-traced Wigner function `int Tr[Psi_L(x + y/2) Psi_L(x - y/2)^dagger] e^{-ipy/hbar} dy / (2 pi hbar)`.
pub fn clifford_wigner<T: Real>(s: &PauliSpinorField<T>) -> WignerField<T> {
    let ideal = pauli_embed(s);
    let grid = s.grid();
    let pts: Vec<Multivector<T>> = (0..grid.n()).map(|j| ideal.psi_l.at(j)).collect();
    let adj: Vec<Multivector<T>> = pts.iter().map(|m| m.adjoint()).collect();
    let w = wigner_from_pairs(grid, s.hbar, |a, b| (&pts[b] * &adj[a]).trace().expect("Cl(3,0) trace"));
    WignerField {
        psgrid: crate::grid::PhaseSpaceGrid::conjugate(grid, s.hbar),
        values: w.into_iter().map(|v| v.re).collect(),
        hbar: s.hbar,
    }
}

/// First momentum moment of [`clifford_wigner`] divided by the density.
pub fn clifford_wigner_cev<T: Real>(s: &PauliSpinorField<T>) -> MaskedField<T> {
    cev_momentum(&clifford_wigner(s))
}

/// Max-abs residuals of the Pauli Liouville equation
/// `e123 hbar d(rho_psi)/dt = -(hbar^2/2m) d/dx[(Psi_L' Psi_L~) - Psi_L (Psi_L~')]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PauliLiouville<T> {
    /// Twice the scalar part, i.e. the trace.
    pub trace_max: T,
    /// All blades.
    pub full_max: T,
    /// Sum of the componentwise continuity residuals, for comparison with `trace_max`.
    pub continuity_max: T,
}

pub fn pauli_liouville_residual<T: Real>(slice: &SpinSlice<PauliSpinorField<T>>, mass: T) -> Result<PauliLiouville<T>> {
    let s = &slice.at;
    let hbar = s.hbar;
    let two = T::lit(2.0);
    let two_dt = T::lit(2.0 * slice.dt);
    let sig = CliffordSignature::pauli();
    let i = Multivector::blade(sig, E123, T::one());
    let rho = |x: &PauliSpinorField<T>| density_element(&pauli_embed(x)).map(|d| d.rho);
    let psi = pauli_embed(s);
    let mask: Vec<bool> = (0..s.grid().n())
        .map(|j| psi.mask[j] || pauli_embed(&slice.before).mask[j] || pauli_embed(&slice.after).mask[j])
        .collect();
    let psi = psi.psi_l;

    let lhs = rho(&slice.after)?.sub(&rho(&slice.before)?)?.scale(hbar / two_dt).mul_right(&i)?;
    let d = psi.derivative(1);
    let flux = d.mul(&psi.adjoint())?.sub(&psi.mul(&d.adjoint())?)?;
    let rhs = flux.derivative(1).scale(-hbar * hbar / (two * mass));
    let res = lhs.sub(&rhs)?.mul_right(&i)?.scale(-T::one() / hbar);

    let sp = s.grid().spectral();
    let mut cont = vec![T::zero(); s.grid().n()];
    for c in 0..2 {
        let (b, a, f) = (
            &slice.before.components()[c].values,
            &slice.after.components()[c].values,
            &s.components()[c].values,
        );
        let df = sp.derivative(f, 1);
        let jc: Vec<Complex<T>> = f
            .iter()
            .zip(&df)
            .map(|(p, q)| Complex::new(hbar * (p.conj() * q).im / mass, T::zero()))
            .collect();
        let dj = sp.derivative(&jc, 1);
        for k in 0..cont.len() {
            cont[k] = cont[k] + (a[k].norm_sqr() - b[k].norm_sqr()) / two_dt + dj[k].re;
        }
    }
    let off = |v: &[T]| {
        v.iter()
            .zip(&mask)
            .filter(|(_, &m)| !m)
            .map(|(x, _)| x.abs())
            .fold(T::zero(), T::max)
    };
    let trace: Vec<T> = res.scalar_part().iter().map(|&v| v * two).collect();
    Ok(PauliLiouville {
        trace_max: off(&trace),
        full_max: res.max_abs(Some(&mask)),
        continuity_max: off(&cont),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::schrodinger::{
        free_gaussian, gaussian_packet, plane_wave, plane_wave_k, split_step_evolve, Potential, Propagation,
    };
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn grid() -> Grid1D<f64> {
        build_grid(0.0, 2.0 * PI, 64).unwrap()
    }

    fn spinor(a: C, ka: i64, b: C, kb: i64) -> PauliSpinorField<f64> {
        let g = grid();
        let psi1 = plane_wave(g, ka).map(|v| v * a);
        let psi2 = plane_wave(g, kb).map(|v| v * b);
        PauliSpinorField::new(psi1, psi2, 1.0).unwrap()
    }

    fn still(s: PauliSpinorField<f64>) -> SpinSlice<PauliSpinorField<f64>> {
        SpinSlice {
            before: s.clone(),
            at: s.clone(),
            after: s,
            dt: 1e-3,
        }
    }

    fn assert_const(f: &MaskedField<f64>, want: f64, tol: f64) {
        assert_eq!(f.masked_count(), 0);
        assert!(f.max_error(|_| want) < tol, "{:?} vs {want}", &f.values()[..4]);
    }

    #[test]
    fn component_examples() {
        let k = plane_wave_k(&grid(), 3);
        let zero = C::new(0.0, 0.0);
        let up = still(spinor(C::new(1.0, 0.0), 3, zero, 0));
        let f = pauli_bohm_components(&up).unwrap();
        assert_const(&f.p_bilinear, k, 1e-10);
        assert_const(&f.p_weighted, k, 1e-10);

        let h = 0.5f64.sqrt();
        let f = pauli_bohm_components(&still(spinor(C::new(h, 0.0), 3, C::new(h, 0.0), -3))).unwrap();
        assert_const(&f.p_bilinear, 0.0, 1e-10);
        assert_const(&f.p_weighted, 0.0, 1e-10);

        let mixed = spinor(C::new((PI / 6.0).cos(), 0.0), 3, C::new(0.0, (PI / 6.0).sin()), -3);
        let f = pauli_bohm_components(&still(mixed)).unwrap();
        assert_const(&f.p_bilinear, k / 2.0, 1e-10);
        assert_const(&f.p_weighted, k / 2.0, 1e-10);
        assert_const(&f.e_b, 0.0, 1e-12);
    }

    #[test]
    fn euler_examples() {
        let g = grid();
        let k = plane_wave_k(&g, 3);
        let rho = 1.0 / (2.0 * PI);
        let e = EulerAngleField::from_fn(g, 1.0, |x| (PI / 3.0, 2.0 * k * x, 0.0, rho));
        let slice = SpinSlice {
            before: e.clone(),
            at: e.clone(),
            after: e.clone(),
            dt: 1e-3,
        };
        assert_const(&pauli_bohm_euler(&slice).unwrap().p_b, k / 2.0, 1e-10);

        let flat = EulerAngleField::from_fn(g, 1.0, |_| (PI / 2.0, 0.4, -1.1, rho));
        let slice = SpinSlice {
            before: flat.clone(),
            at: flat.clone(),
            after: flat,
            dt: 1e-3,
        };
        assert_const(&pauli_bohm_euler(&slice).unwrap().p_b, 0.0, 1e-12);

        let (omega, dt) = (0.7, 1e-3);
        let at = |t: f64| EulerAngleField::from_fn(g, 1.0, move |_| (PI / 3.0, 2.0 * omega * t, 0.0, rho));
        let slice = SpinSlice {
            before: at(-dt),
            at: at(0.0),
            after: at(dt),
            dt,
        };
        assert_const(&pauli_bohm_euler(&slice).unwrap().e_b, -omega / 2.0, 1e-10);
    }

    #[test]
    fn conversion_poles_and_round_trip() {
        let zero = C::new(0.0, 0.0);
        let up = spinor(C::new(1.0, 0.0), 0, zero, 0);
        let e = spinor_to_euler(&up);
        assert!(e.theta.values.iter().all(|&t| t == 0.0));
        assert!(e.pole_mask.iter().all(|&m| m));
        for j in 0..up.grid().n() {
            let s = e.phi.values[j] + e.psi_e.values[j];
            assert!(wrap_angle(s).abs() < 1e-15);
        }
        let down = spinor(zero, 0, C::new(0.0, 1.0), 0);
        let e = spinor_to_euler(&down);
        assert!(e.theta.values.iter().all(|&t| (t - PI).abs() < 1e-15));

        let mixed = spinor(C::new((PI / 6.0).cos(), 0.0), 3, C::new(0.0, (PI / 6.0).sin()), -3);
        let SpinForm::Euler(e) = euler_spinor_convert(&SpinForm::Spinor(mixed.clone())) else {
            panic!()
        };
        assert!(e.theta.values.iter().all(|&t| (t - PI / 3.0).abs() < 1e-12));
        let SpinForm::Spinor(back) = euler_spinor_convert(&SpinForm::Euler(e)) else {
            panic!()
        };
        for c in 0..2 {
            for (a, b) in back.components()[c].values.iter().zip(&mixed.components()[c].values) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn embedding_and_purity() {
        let g = grid();
        let up = spinor(C::new(1.0, 0.0), 0, C::new(0.0, 0.0), 0);
        let ideal = pauli_embed(&up);
        let eps = spin_up_idempotent::<f64>();
        let scaled = ideal.psi_l.scale((2.0 * PI).sqrt());
        let unit = IdealElement::new(scaled, eps, vec![false; g.n()]).unwrap();
        assert!(purity_check(&density_element(&unit).unwrap()) < 1e-12);

        let mixed = spinor(C::new(0.3, 0.4), 2, C::new(-0.5, 0.7), -1);
        let ideal = pauli_embed(&mixed);
        IdealElement::new(ideal.psi_l.clone(), ideal.epsilon.clone(), ideal.mask.clone()).unwrap();
        for j in 0..g.n() {
            let (a, b) = pauli_unembed(&ideal.psi_l.at(j));
            assert!((a - mixed.psi1.values[j]).norm() < 1e-14);
            assert!((b - mixed.psi2.values[j]).norm() < 1e-14);
        }
        assert!(spinor_purity(&mixed).unwrap() < 1e-12);
    }

    #[test]
    fn clifford_wigner_examples() {
        let k = plane_wave_k(&grid(), 3);
        let zero = C::new(0.0, 0.0);
        let up = spinor(C::new(1.0, 0.0), 3, zero, 0);
        assert_const(&clifford_wigner_cev(&up), k, 1e-10);
        let mixed = spinor(C::new((PI / 6.0).cos(), 0.0), 3, C::new(0.0, (PI / 6.0).sin()), -3);
        assert_const(&clifford_wigner_cev(&mixed), k / 2.0, 1e-10);

        let g = build_grid(-16.0f64, 16.0, 256).unwrap();
        let real = PauliSpinorField::new(
            gaussian_packet(g, -1.0, 1.0, 0.0, 1.0).unwrap(),
            gaussian_packet(g, 1.5, 0.8, 0.0, 1.0).unwrap().map(|v| -v * 0.5),
            1.0,
        )
        .unwrap();
        assert!(clifford_wigner_cev(&real).max_abs() < 1e-8);
        let w = clifford_wigner(&real);
        let rho = real.rho();
        for (m, r) in w.x_marginal().iter().zip(&rho) {
            assert!((m - r).abs() < 1e-10f64);
        }
    }

    fn evolve(psi: &Wave<f64>, v: &Potential<f64>) -> EvolutionRecord<f64> {
        let prop = Propagation {
            dt: 2e-3,
            steps: 500,
            stride: 100,
            hbar: 1.0,
            mass: 1.0,
        };
        split_step_evolve(psi, v, prop).unwrap()
    }

    fn exact(g: Grid1D<f64>, x0: f64, w: f64, p0: f64, weight: C) -> EvolutionRecord<f64> {
        let times = vec![0.0, 0.5, 1.0];
        EvolutionRecord::from_solution(times, 2e-3, 1.0, 1.0, Potential::Free, move |t| {
            free_gaussian(g, x0, w, p0, 0.0, t, 1.0, 1.0).unwrap().map(|v| v * weight)
        })
    }

    fn gap(a: &MaskedField<f64>, b: &MaskedField<f64>) -> f64 {
        a.iter_valid()
            .filter(|(j, _)| !b.mask[*j])
            .map(|(j, x)| (x - b.values()[j]).abs())
            .fold(0.0, f64::max)
    }

    fn check(up: &EvolutionRecord<f64>, down: &EvolutionRecord<f64>, with_cev: bool) {
        for &t in &up.times {
            let slice = spin_slice(up, down, t).unwrap();
            let comp = pauli_bohm_components(&slice).unwrap();
            assert!(comp.p_bilinear.max_gap(&comp.p_weighted).unwrap() < 1e-9);

            let euler = slice.map(|s| Ok(spinor_to_euler(s))).unwrap();
            let eb = pauli_bohm_euler(&euler).unwrap();
            assert!(gap(&eb.p_b, &comp.p_bilinear) < 1e-8);
            assert!(gap(&eb.e_b, &comp.e_b) < 1e-8);

            if with_cev {
                let cev = clifford_wigner_cev(&slice.at);
                assert!(gap(&cev, &comp.p_bilinear) < 1e-6, "{}", gap(&cev, &comp.p_bilinear));
            }

            assert!(spinor_purity(&slice.at).unwrap() < 1e-8);
            let l = pauli_liouville_residual(&slice, 1.0).unwrap();
            assert!((l.trace_max - l.continuity_max).abs() < 1e-8, "{l:?}");
        }
    }

    #[test]
    fn pictures_agree_on_exact_states() {
        let g = build_grid(-24.0, 24.0, 512).unwrap();
        let up = exact(g, -1.0, 1.0, 1.2, C::new(1.0, 0.0));
        let down = exact(g, 1.0, 1.3, -0.8, C::new(0.0, 0.6));
        check(&up, &down, true);
    }

    #[test]
    fn components_agree_under_propagation() {
        let g = build_grid(-24.0, 24.0, 512).unwrap();
        let v = Potential::Harmonic { omega: 0.3 };
        let up = evolve(&gaussian_packet(g, -1.0, 1.0, 1.2, 1.0).unwrap(), &v);
        let down = evolve(
            &gaussian_packet(g, 1.0, 1.3, -0.8, 1.0).unwrap().map(|c| c * C::new(0.0, 0.6)),
            &v,
        );
        check(&up, &down, false);
    }
}
