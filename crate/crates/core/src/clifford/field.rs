use num_complex::Complex;
use rayon::prelude::*;

use super::algebra::{blade_product, CliffordSignature, Multivector};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::Real;

/// Multivector-valued field stored blade by blade (`coeffs[blade][j]`).
#[derive(Debug, Clone, PartialEq)]
pub struct MultivectorField<T: Real> {
    pub sig: CliffordSignature,
    pub grid: Grid1D<T>,
    coeffs: Vec<Vec<T>>,
}

impl<T: Real> MultivectorField<T> {
    pub fn zeros(sig: CliffordSignature, grid: Grid1D<T>) -> Self {
        Self {
            sig,
            grid,
            coeffs: vec![vec![T::zero(); grid.n()]; sig.blades()],
        }
    }

    pub fn from_fn(sig: CliffordSignature, grid: Grid1D<T>, f: impl Fn(usize) -> Multivector<T>) -> Self {
        let mut out = Self::zeros(sig, grid);
        for j in 0..grid.n() {
            let m = f(j);
            assert_eq!(m.sig, sig, "signature mismatch");
            for (b, c) in m.coeffs().iter().enumerate() {
                out.coeffs[b][j] = *c;
            }
        }
        out
    }

    pub fn constant(grid: Grid1D<T>, m: &Multivector<T>) -> Self {
        Self::from_fn(m.sig, grid, |_| m.clone())
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn at(&self, j: usize) -> Multivector<T> {
        let c = self.coeffs.iter().map(|b| b[j]).collect();
        Multivector::from_coeffs(self.sig, c).expect("blade count")
    }

    pub fn blade(&self, mask: usize) -> &[T] {
        &self.coeffs[mask]
    }

    pub fn blade_mut(&mut self, mask: usize) -> &mut [T] {
        &mut self.coeffs[mask]
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::Signature(self.sig.p, self.sig.q, other.sig.p, other.sig.q));
        }
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Pointwise geometric product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let sig = self.sig;
        let n = self.n();
        let coeffs = (0..sig.blades())
            .into_par_iter()
            .map(|c| {
                let mut out = vec![T::zero(); n];
                for a in 0..sig.blades() {
                    let b = a ^ c;
                    let (sign, _) = blade_product(&sig, a, b);
                    let (xa, xb) = (&self.coeffs[a], &other.coeffs[b]);
                    for j in 0..n {
                        let v = xa[j] * xb[j];
                        out[j] = if sign > 0 { out[j] + v } else { out[j] - v };
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            sig,
            grid: self.grid,
            coeffs,
        })
    }

    /// Pointwise product with a constant element on the right.
    pub fn mul_right(&self, m: &Multivector<T>) -> Result<Self> {
        self.mul(&Self::constant(self.grid, m))
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
            .collect();
        Ok(Self {
            sig: self.sig,
            grid: self.grid,
            coeffs,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_blades(|_, c| c.iter().map(|&v| v * s).collect())
    }

    /// Multiplies every blade by a real scalar field.
    pub fn scale_by(&self, f: &[T]) -> Self {
        self.map_blades(|_, c| c.iter().zip(f).map(|(&v, &s)| v * s).collect())
    }

    fn map_blades(&self, f: impl Fn(usize, &[T]) -> Vec<T>) -> Self {
        Self {
            sig: self.sig,
            grid: self.grid,
            coeffs: self.coeffs.iter().enumerate().map(|(b, c)| f(b, c)).collect(),
        }
    }

    fn signed_by(&self, unit: Multivector<T>) -> Self {
        self.map_blades(|b, c| {
            if unit.coeff(b) < T::zero() {
                c.iter().map(|&v| -v).collect()
            } else {
                c.to_vec()
            }
        })
    }

    fn all_ones(&self) -> Multivector<T> {
        Multivector::from_coeffs(self.sig, vec![T::one(); self.sig.blades()]).expect("blade count")
    }

    pub fn reversion(&self) -> Self {
        self.signed_by(self.all_ones().reversion())
    }

    pub fn adjoint(&self) -> Self {
        self.signed_by(self.all_ones().adjoint())
    }

    /// Spectral `d^order/dx^order` of every coefficient. Blades `2k` and
    /// `2k+1` share one complex transform as real and imaginary parts.
    pub fn derivative(&self, order: u32) -> Self {
        let sp = self.grid.spectral();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for pair in self.coeffs.chunks(2) {
            let z: Vec<Complex<T>> = (0..self.n())
                .map(|j| Complex::new(pair[0][j], pair.get(1).map_or(T::zero(), |c| c[j])))
                .collect();
            let d = sp.derivative(&z, order);
            coeffs.push(d.iter().map(|v| v.re).collect());
            if pair.len() == 2 {
                coeffs.push(d.iter().map(|v| v.im).collect());
            }
        }
        Self {
            sig: self.sig,
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scalar_part(&self) -> &[T] {
        &self.coeffs[0]
    }

    /// Largest coefficient magnitude over unmasked points.
    pub fn max_abs(&self, mask: Option<&[bool]>) -> T {
        let keep = |j: usize| mask.is_none_or(|m| !m[j]);
        self.coeffs
            .iter()
            .flat_map(|c| c.iter().enumerate().filter(|(j, _)| keep(*j)).map(|(_, v)| v.abs()))
            .fold(T::zero(), T::max)
    }
}

/// Element of the minimal left ideal generated by the idempotent `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealElement<T: Real> {
    pub psi_l: MultivectorField<T>,
    pub epsilon: Multivector<T>,
    /// Points where the embedded state has a node.
    pub mask: Vec<bool>,
}

impl<T: Real> IdealElement<T> {
    pub fn new(psi_l: MultivectorField<T>, epsilon: Multivector<T>, mask: Vec<bool>) -> Result<Self> {
        let tol = T::lit(1e-12);
        if (&(&epsilon * &epsilon) - &epsilon).max_abs() > tol * epsilon.max_abs() {
            return Err(Error::config("clifford.idempotent", "epsilon * epsilon != epsilon"));
        }
        let projected = psi_l.mul_right(&epsilon)?;
        let scale = psi_l.max_abs(None).max(T::one());
        if projected.sub(&psi_l)?.max_abs(None) > tol * scale {
            return Err(Error::config("clifford.ideal", "psi_l * epsilon != psi_l"));
        }
        if mask.len() != psi_l.n() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { psi_l, epsilon, mask })
    }
}

/// `rho_psi = Psi_L Psi_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordDensity<T: Real> {
    pub rho: MultivectorField<T>,
    pub mask: Vec<bool>,
}

impl<T: Real> CliffordDensity<T> {
    /// Density divided by its local complex-trace weight, which is a
    /// projector at every point for a pure state.
    pub fn local_normalized(&self) -> Self {
        let s = T::from_usize_lossy(self.rho.sig.trace_scale());
        let w: Vec<T> = self
            .rho
            .scalar_part()
            .iter()
            .zip(&self.mask)
            .map(|(&r, &m)| if m { T::zero() } else { T::one() / (r * s) })
            .collect();
        Self {
            rho: self.rho.scale_by(&w),
            mask: self.mask.clone(),
        }
    }
}

/// `Psi_R` is the adjoint of `Psi_L`, which coincides with reversion in `Cl(p,0)`.
pub fn density_element<T: Real>(psi: &IdealElement<T>) -> Result<CliffordDensity<T>> {
    if psi.psi_l.max_abs(None) == T::zero() {
        return Err(Error::ZeroNorm);
    }
    Ok(CliffordDensity {
        rho: psi.psi_l.mul(&psi.psi_l.adjoint())?,
        mask: psi.mask.clone(),
    })
}

/// Max-norm of `rho^2 - rho` over unmasked points.
pub fn purity_check<T: Real>(rho: &CliffordDensity<T>) -> T {
    let sq = rho.rho.mul(&rho.rho).expect("same field");
    sq.sub(&rho.rho).expect("same field").max_abs(Some(&rho.mask))
}
