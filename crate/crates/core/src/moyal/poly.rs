use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};

use crate::grid::PhaseSpaceGrid;
use crate::scalar::{Real, Ring};

/// Polynomial phase-space symbol `sum c_ab x^a p^b` with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol<S: Ring> {
    terms: BTreeMap<(u32, u32), Complex<S>>,
}

fn int<S: Ring>(v: u64) -> S {
    S::from_u64(v).expect("integer fits the coefficient ring")
}

/// `a (a-1) ... (a-k+1)`.
fn falling(a: u32, k: u32) -> u64 {
    (0..k).map(|i| (a - i) as u64).product()
}

fn binomial(n: u32, k: u32) -> u64 {
    falling(n, k) / falling(k, k)
}

impl<S: Ring> PolySymbol<S> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: Complex<S>) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(S::one(), S::zero()))
    }

    /// `c x^a p^b`.
    pub fn monomial(a: u32, b: u32, c: Complex<S>) -> Self {
        let mut s = Self::zero();
        s.add_term(a, b, c);
        s
    }

    /// `x^a p^b`.
    pub fn xp(a: u32, b: u32) -> Self {
        Self::monomial(a, b, Complex::new(S::one(), S::zero()))
    }

    pub fn x() -> Self {
        Self::xp(1, 0)
    }

    pub fn p() -> Self {
        Self::xp(0, 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Complex<S>)>) -> Self {
        let mut s = Self::zero();
        for ((a, b), c) in terms {
            s.add_term(a, b, c);
        }
        s
    }

    fn add_term(&mut self, a: u32, b: u32, c: Complex<S>) {
        let slot = self
            .terms
            .entry((a, b))
            .or_insert_with(|| Complex::new(S::zero(), S::zero()));
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Complex<S>)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex<S> {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| Complex::new(S::zero(), S::zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree `a + b`, or `None` for the zero symbol.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn scale(&self, c: &Complex<S>) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.conj())))
    }

    /// `d^i/dx^i d^j/dp^j`.
    pub fn derivative(&self, i: u32, j: u32) -> Self {
        Self::from_terms(self.terms.iter().filter(|((a, b), _)| *a >= i && *b >= j).map(|((a, b), c)| {
            let f: S = int(falling(*a, i) * falling(*b, j));
            ((a - i, b - j), c.clone() * f)
        }))
    }

    pub fn eval(&self, x: &S, p: &S) -> Complex<S> {
        let mut acc = Complex::new(S::zero(), S::zero());
        for ((a, b), c) in &self.terms {
            let mut m = S::one();
            for _ in 0..*a {
                m = m * x.clone();
            }
            for _ in 0..*b {
                m = m * p.clone();
            }
            acc = acc + c.clone() * m;
        }
        acc
    }

    /// Real and imaginary parts of each coefficient converted to `T`.
    pub fn to_real<T: Real>(&self) -> PolySymbol<T>
    where
        S: ToPrimitive,
    {
        PolySymbol::from_terms(self.terms.iter().map(|(k, c)| {
            let re = T::lit(c.re.to_f64().unwrap_or(f64::NAN));
            let im = T::lit(c.im.to_f64().unwrap_or(f64::NAN));
            (*k, Complex::new(re, im))
        }))
    }

    /// True if every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }
}

impl<T: Real> PolySymbol<T> {
    /// Values at the phase-space grid points, row-major over `(x_i, p_k)`.
    pub fn sample(&self, psgrid: &PhaseSpaceGrid<T>) -> Vec<Complex<T>> {
        let n = psgrid.n();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let x = psgrid.xgrid.x(i);
            for k in 0..n {
                out.push(self.eval(&x, &psgrid.pgrid.x(k)));
            }
        }
        out
    }
}

impl<S: Ring> Add for &PolySymbol<S> {
    type Output = PolySymbol<S>;
    fn add(self, rhs: Self) -> PolySymbol<S> {
        let mut s = self.clone();
        for (k, v) in &rhs.terms {
            s.add_term(k.0, k.1, v.clone());
        }
        s
    }
}

impl<S: Ring> Sub for &PolySymbol<S> {
    type Output = PolySymbol<S>;
    fn sub(self, rhs: Self) -> PolySymbol<S> {
        let mut s = self.clone();
        for (k, v) in &rhs.terms {
            s.add_term(k.0, k.1, -v.clone());
        }
        s
    }
}

impl<S: Ring> Neg for &PolySymbol<S> {
    type Output = PolySymbol<S>;
    fn neg(self) -> PolySymbol<S> {
        PolySymbol::from_terms(self.terms.iter().map(|(k, v)| (*k, -v.clone())))
    }
}

/// Pointwise (commutative) product.
impl<S: Ring> Mul for &PolySymbol<S> {
    type Output = PolySymbol<S>;
    fn mul(self, rhs: Self) -> PolySymbol<S> {
        let mut s = PolySymbol::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                s.add_term(a1 + a2, b1 + b2, c1.clone() * c2.clone());
            }
        }
        s
    }
}

/// A star product together with whether its series was cut short.
#[derive(Debug, Clone, PartialEq)]
pub struct Starred<S: Ring> {
    pub symbol: PolySymbol<S>,
    pub truncated: bool,
}

/// Highest order at which the star series of `a` and `b` can be nonzero.
pub fn series_length<S: Ring>(a: &PolySymbol<S>, b: &PolySymbol<S>) -> u32 {
    a.degree().unwrap_or(0).min(b.degree().unwrap_or(0))
}

/// Star product by the bidifferential series
/// `sum_n (i hbar/2)^n / n! sum_k C(n,k) (-1)^k (dx^{n-k} dp^k a)(dx^k dp^{n-k} b)`,
/// summed through `order`.
pub fn star_poly<S: Ring>(a: &PolySymbol<S>, b: &PolySymbol<S>, hbar: &S, order: u32) -> Starred<S> {
    let needed = series_length(a, b);
    let top = needed.min(order);
    let two: S = int(2);
    let step = Complex::new(S::zero(), hbar.clone() / two);
    let mut weight = Complex::new(S::one(), S::zero());
    let mut out = PolySymbol::zero();
    for n in 0..=top {
        if n > 0 {
            weight = weight * step.clone() / Complex::new(int::<S>(n as u64), S::zero());
        }
        for k in 0..=n {
            let da = a.derivative(n - k, k);
            let db = b.derivative(k, n - k);
            if da.is_zero() || db.is_zero() {
                continue;
            }
            let mut c = weight.clone() * int::<S>(binomial(n, k));
            if k % 2 == 1 {
                c = -c;
            }
            out = &out + &(&da * &db).scale(&c);
        }
    }
    Starred {
        symbol: out,
        truncated: order < needed,
    }
}

/// Bracket selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketKind {
    /// `(a*b - b*a) / (i hbar)`.
    Moyal,
    /// `(a*b + b*a) / 2`.
    Baker,
    /// `a_x b_p - a_p b_x`.
    Poisson,
}

pub fn bracket_poly<S: Ring>(
    a: &PolySymbol<S>,
    b: &PolySymbol<S>,
    kind: BracketKind,
    hbar: &S,
    order: u32,
) -> Starred<S> {
    match kind {
        BracketKind::Poisson => Starred {
            symbol: &(&a.derivative(1, 0) * &b.derivative(0, 1)) - &(&a.derivative(0, 1) * &b.derivative(1, 0)),
            truncated: false,
        },
        BracketKind::Moyal | BracketKind::Baker => {
            let ab = star_poly(a, b, hbar, order);
            let ba = star_poly(b, a, hbar, order);
            let truncated = ab.truncated || ba.truncated;
            let symbol = if kind == BracketKind::Moyal {
                let inv = Complex::new(S::zero(), -(S::one() / hbar.clone()));
                (&ab.symbol - &ba.symbol).scale(&inv)
            } else {
                let half = Complex::new(S::one() / int::<S>(2), S::zero());
                (&ab.symbol + &ba.symbol).scale(&half)
            };
            Starred { symbol, truncated }
        }
    }
}
