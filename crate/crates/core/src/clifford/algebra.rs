use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Real, Ring};

/// Orthogonal signature: `p` generators square to `+1`, then `q` to `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CliffordSignature {
    pub p: usize,
    pub q: usize,
}

pub const MAX_GENERATORS: usize = 4;

impl CliffordSignature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q > MAX_GENERATORS {
            return Err(Error::config(
                "clifford.signature",
                format!("Cl({p},{q}) has more than {MAX_GENERATORS} generators"),
            ));
        }
        Ok(Self { p, q })
    }

    /// `Cl(0,1)`, a single generator `e` with `e^2 = -1`.
    pub const fn schrodinger() -> Self {
        Self { p: 0, q: 1 }
    }

    /// `Cl(3,0)`.
    pub const fn pauli() -> Self {
        Self { p: 3, q: 0 }
    }

    /// `Cl(1,3)`: `gamma_0^2 = 1`, `gamma_i^2 = -1`.
    pub const fn dirac() -> Self {
        Self { p: 1, q: 3 }
    }

    pub fn generators(&self) -> usize {
        self.p + self.q
    }

    pub fn blades(&self) -> usize {
        1 << self.generators()
    }

    /// Square of generator `i`.
    pub fn square(&self, i: usize) -> i32 {
        if i < self.p {
            1
        } else {
            -1
        }
    }

    pub fn pseudoscalar(&self) -> usize {
        self.blades() - 1
    }

    /// Matrix size of the irreducible complex representation, `2^(n/2)`.
    pub fn trace_scale(&self) -> usize {
        1 << (self.generators() / 2)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Signature(self.p, self.q, other.p, other.q))
        }
    }
}

pub fn grade_of(blade: usize) -> usize {
    blade.count_ones() as usize
}

/// Product of canonical basis blades as `(sign, blade)`.
pub fn blade_product(sig: &CliffordSignature, a: usize, b: usize) -> (i32, usize) {
    let mut swaps = 0;
    let mut s = a >> 1;
    while s != 0 {
        swaps += (s & b).count_ones();
        s >>= 1;
    }
    let mut sign = if swaps % 2 == 0 { 1 } else { -1 };
    let common = a & b;
    for i in 0..sig.generators() {
        if common & (1 << i) != 0 {
            sign *= sig.square(i);
        }
    }
    (sign, a ^ b)
}

fn reversion_sign(blade: usize) -> i32 {
    let g = grade_of(blade);
    if (g * g.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn negative_count(sig: &CliffordSignature, blade: usize) -> u32 {
    (blade >> sig.p).count_ones()
}

/// Element of `Cl(p,q)`; `coeffs[mask]` multiplies the blade whose bits
/// name its generators in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<S> {
    pub sig: CliffordSignature,
    coeffs: Vec<S>,
}

impl<S: Ring> Multivector<S> {
    pub fn zero(sig: CliffordSignature) -> Self {
        Self {
            sig,
            coeffs: vec![S::zero(); sig.blades()],
        }
    }

    pub fn scalar(sig: CliffordSignature, s: S) -> Self {
        Self::blade(sig, 0, s)
    }

    pub fn blade(sig: CliffordSignature, mask: usize, s: S) -> Self {
        let mut m = Self::zero(sig);
        m.coeffs[mask] = s;
        m
    }

    /// Generator `e_{i+1}`.
    pub fn generator(sig: CliffordSignature, i: usize) -> Self {
        Self::blade(sig, 1 << i, S::one())
    }

    pub fn from_coeffs(sig: CliffordSignature, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != sig.blades() {
            return Err(Error::config(
                "clifford.coefficients",
                format!("expected {} coefficients, got {}", sig.blades(), coeffs.len()),
            ));
        }
        Ok(Self { sig, coeffs })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> S {
        self.coeffs[mask].clone()
    }

    pub fn set(&mut self, mask: usize, s: S) {
        self.coeffs[mask] = s;
    }

    pub fn grade(&self, k: usize) -> Self {
        let mut m = Self::zero(self.sig);
        for (b, c) in self.coeffs.iter().enumerate() {
            if grade_of(b) == k {
                m.coeffs[b] = c.clone();
            }
        }
        m
    }

    pub fn scalar_part(&self) -> S {
        self.coeffs[0].clone()
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn signed(&self, sign: impl Fn(usize) -> i32) -> Self {
        Self {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(b, c)| if sign(b) < 0 { -c.clone() } else { c.clone() })
                .collect(),
        }
    }

    /// Reverses the generator order of every blade.
    pub fn reversion(&self) -> Self {
        self.signed(reversion_sign)
    }

    /// Reversion combined with `e_i -> -e_i` on generators squaring to `-1`;
    /// the algebraic Hermitian adjoint. Equals reversion for `Cl(p,0)`.
    pub fn adjoint(&self) -> Self {
        let sig = self.sig;
        self.signed(|b| {
            let flip = if negative_count(&sig, b).is_multiple_of(2) { 1 } else { -1 };
            reversion_sign(b) * flip
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.sig.check(&other.sig)?;
        Ok(self * other)
    }
}

impl<T: Real> Multivector<T> {
    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.abs()).fold(T::zero(), T::max)
    }

    /// Complex trace in the irreducible representation, with the unit
    /// pseudoscalar of `Cl(3,0)` and the generator of `Cl(0,1)` acting as `i`.
    pub fn trace(&self) -> Result<num_complex::Complex<T>> {
        let s = T::from_usize_lossy(self.sig.trace_scale());
        match (self.sig.p, self.sig.q) {
            (0, 1) | (3, 0) => {
                let i = self.sig.pseudoscalar();
                Ok(num_complex::Complex::new(self.coeffs[0], self.coeffs[i]) * s)
            }
            _ => Err(Error::Unsupported(format!(
                "complex trace for Cl({},{})",
                self.sig.p, self.sig.q
            ))),
        }
    }
}

pub fn geometric_product<S: Ring>(a: &Multivector<S>, b: &Multivector<S>) -> Result<Multivector<S>> {
    a.try_mul(b)
}

pub fn reversion<S: Ring>(a: &Multivector<S>) -> Multivector<S> {
    a.reversion()
}

pub fn scalar_part<S: Ring>(a: &Multivector<S>) -> S {
    a.scalar_part()
}

/// Geometric product. Panics on mismatched signatures; see
/// [`geometric_product`] for the checked form.
impl<S: Ring> Mul for &Multivector<S> {
    type Output = Multivector<S>;
    fn mul(self, rhs: Self) -> Multivector<S> {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        let mut out: Multivector<S> = Multivector::zero(self.sig);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in rhs.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let (sign, c) = blade_product(&self.sig, a, b);
                let v = ca.clone() * cb.clone();
                out.coeffs[c] = if sign > 0 {
                    out.coeffs[c].clone() + v
                } else {
                    out.coeffs[c].clone() - v
                };
            }
        }
        out
    }
}

impl<S: Ring> Add for &Multivector<S> {
    type Output = Multivector<S>;
    fn add(self, rhs: Self) -> Multivector<S> {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Ring> Sub for &Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: Self) -> Multivector<S> {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<S: Ring> Neg for &Multivector<S> {
    type Output = Multivector<S>;
    fn neg(self) -> Multivector<S> {
        self.map(|c| -c.clone())
    }
}
