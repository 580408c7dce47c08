//! Uniform periodic grids, spectral and finite-difference calculus,
//! quadrature, and the position/momentum representation change.
//!
//! Every grid is periodic: samples sit at `x_j = x_min + j*dx` for
//! `j = 0..n`, with `x_max` excluded and `dx = (x_max - x_min)/n`.

mod spectral;

pub use spectral::{freq_index, Spectral};

use num_complex::Complex;

use crate::error::{Error, Result};
use num_traits::{Float, One, Zero};

use crate::scalar::{FieldKind, Real, Sample};

/// Uniform periodic 1-D grid with a power-of-two sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::config(
                "grid.bounds",
                format!("need finite x_max > x_min, got [{x_min}, {x_max})"),
            ));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::config(
                "grid.n",
                format!("sample count must be a power of two >= 8, got {n}"),
            ));
        }
        let dx = (x_max - x_min) / T::from_usize_lossy(n);
        Ok(Self {
            x_min,
            x_max,
            n,
            dx,
        })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn x(&self, j: usize) -> T {
        self.x_min + self.dx * T::from_usize_lossy(j)
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn spectral(&self) -> Spectral<T> {
        Spectral::new(self.n, self.length())
    }

    /// The conjugate momentum grid `p_k = hbar*k`, sorted ascending and
    /// running from `-(n/2)*dp` to `(n/2 - 1)*dp`.
    pub fn momentum_grid(&self, hbar: T) -> Grid1D<T> {
        let dp = T::lit(2.0) * T::PI() * hbar / self.length();
        let half = T::from_usize_lossy(self.n / 2);
        Grid1D {
            x_min: -half * dp,
            x_max: half * dp,
            n: self.n,
            dx: dp,
        }
    }

    /// Index of the sample nearest to `x`, if `x` lies inside `[x_min, x_max)`.
    pub fn nearest_index(&self, x: T) -> Option<usize> {
        if x < self.x_min || x >= self.x_max {
            return None;
        }
        let j = ((x - self.x_min) / self.dx).round().to_usize()?;
        Some(j % self.n)
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Builds a [`Grid1D`], checking the power-of-two and bound guards.
pub fn build_grid<T: Real>(x_min: T, x_max: T, n: usize) -> Result<Grid1D<T>> {
    Grid1D::new(x_min, x_max, n)
}

/// Samples of a real or complex field on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField<V: Sample> {
    pub grid: Grid1D<V::Real>,
    pub values: Vec<V>,
}

impl<V: Sample> SpatialField<V> {
    pub fn new(grid: Grid1D<V::Real>, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::config(
                "field.len",
                format!("{} values for a grid of {}", values.len(), grid.n()),
            ));
        }
        if let Some(j) = values.iter().position(|v| !v.finite()) {
            return Err(Error::config(
                "field.finite",
                format!("non-finite sample at index {j}"),
            ));
        }
        Ok(Self { grid, values })
    }

    /// Builds a field by evaluating `f` at each grid position.
    pub fn from_fn(grid: Grid1D<V::Real>, f: impl Fn(V::Real) -> V) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D<V::Real>) -> Self {
        Self {
            values: vec![V::zero(); grid.n()],
            grid,
        }
    }

    pub fn kind(&self) -> FieldKind {
        V::KIND
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<W: Sample<Real = V::Real>>(&self, f: impl Fn(V) -> W) -> SpatialField<W> {
        SpatialField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `|f|^2` as a real field.
    pub fn density(&self) -> SpatialField<V::Real> {
        self.map(|v| v.abs2())
    }

    pub fn norm_sqr(&self) -> V::Real {
        integrate(&self.density())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > V::Real::zero()) {
            return Err(Error::ZeroNorm);
        }
        let s = V::Real::one() / n2.sqrt();
        Ok(self.map(|v| v.scale(s)))
    }

    pub fn max_abs(&self) -> V::Real {
        self.values
            .iter()
            .map(|v| v.abs2().sqrt())
            .fold(V::Real::zero(), V::Real::max)
    }

    /// Largest `|f|` at the two boundary samples relative to the field maximum.
    /// Periodic propagation assumes this stays negligible.
    pub fn boundary_ratio(&self) -> V::Real {
        let m = self.max_abs();
        if m == V::Real::zero() {
            return m;
        }
        let a = self.values[0].abs2().sqrt();
        let b = self.values[self.len() - 1].abs2().sqrt();
        a.max(b) / m
    }

    pub(crate) fn to_complex_vec(&self) -> Vec<Complex<V::Real>> {
        self.values.iter().map(|v| v.to_complex()).collect()
    }
}

/// Boundary contamination threshold relative to the field maximum.
pub const BOUNDARY_WARN_RATIO: f64 = 1e-8;

/// Derivative order accepted by [`differentiate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

impl Order {
    fn as_u32(self) -> u32 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

/// Differentiation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Fourier collocation; exact for band-limited periodic data.
    Spectral,
    /// Fourth-order periodic central differences.
    Central4,
}

/// `d^order f / dx^order` on the periodic grid.
pub fn differentiate<V: Sample>(f: &SpatialField<V>, order: Order, scheme: Scheme) -> SpatialField<V> {
    let values = match scheme {
        Scheme::Spectral => {
            let sp = f.grid.spectral();
            sp.derivative(&f.to_complex_vec(), order.as_u32())
                .into_iter()
                .map(V::from_complex)
                .collect()
        }
        Scheme::Central4 => central4(&f.values, f.grid.dx(), order),
    };
    SpatialField {
        grid: f.grid,
        values,
    }
}

fn central4<V: Sample>(v: &[V], dx: V::Real, order: Order) -> Vec<V> {
    let n = v.len();
    let at = |j: isize| v[j.rem_euclid(n as isize) as usize];
    let c = |x: f64| V::from_real(V::Real::lit(x));
    (0..n as isize)
        .map(|j| match order {
            Order::First => {
                let s = c(8.0) * (at(j + 1) - at(j - 1)) - (at(j + 2) - at(j - 2));
                s.scale(V::Real::one() / (V::Real::lit(12.0) * dx))
            }
            Order::Second => {
                let s = -at(j + 2) + c(16.0) * at(j + 1) - c(30.0) * at(j) + c(16.0) * at(j - 1)
                    - at(j - 2);
                s.scale(V::Real::one() / (V::Real::lit(12.0) * dx * dx))
            }
        })
        .collect()
}

/// Periodic rectangle rule `sum_j f_j * dx`.
pub fn integrate<V: Sample>(f: &SpatialField<V>) -> V {
    let mut acc = V::zero();
    for &v in &f.values {
        acc = acc + v;
    }
    acc.scale(f.grid.dx())
}

/// A wavefunction in the momentum representation.
///
/// Samples are sorted by ascending momentum on `pgrid`; `xgrid` is the
/// position grid the field was transformed from and is needed to go back.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField<T: Real> {
    pub pgrid: Grid1D<T>,
    pub xgrid: Grid1D<T>,
    pub hbar: T,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> MomentumField<T> {
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|v| v.abs2()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        self.values.iter().map(|v| v.abs2()).sum::<T>() * self.pgrid.dx()
    }

    /// Mean momentum `sum p |phi|^2 dp / sum |phi|^2 dp`.
    pub fn mean_momentum(&self) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for (k, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            num = num + self.pgrid.x(k) * w;
            den = den + w;
        }
        num / den
    }

    /// Standard deviation of `|phi(p)|^2`.
    pub fn momentum_spread(&self) -> T {
        let mean = self.mean_momentum();
        let mut num = T::zero();
        let mut den = T::zero();
        for (k, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            let d = self.pgrid.x(k) - mean;
            num = num + d * d * w;
            den = den + w;
        }
        (num / den).sqrt()
    }
}

/// Unitary change to the momentum representation with kernel
/// `(2 pi hbar)^{-1/2} exp(-i p x / hbar)`.
pub fn to_momentum_rep<T: Real>(psi: &SpatialField<Complex<T>>, hbar: T) -> MomentumField<T> {
    let g = psi.grid;
    let n = g.n();
    let sp = g.spectral();
    let mut buf = psi.values.clone();
    sp.forward(&mut buf);
    let pgrid = g.momentum_grid(hbar);
    let pre = g.dx() / (T::lit(2.0) * T::PI() * hbar).sqrt();
    let mut values = vec![Complex::new(T::zero(), T::zero()); n];
    for (j, &b) in buf.iter().enumerate() {
        let p = hbar * sp.wavenumbers()[j];
        let ph = -p * g.x_min() / hbar;
        let k = (freq_index(j, n) + (n / 2) as i64) as usize;
        values[k] = b * Complex::new(ph.cos(), ph.sin()) * pre;
    }
    MomentumField {
        pgrid,
        xgrid: g,
        hbar,
        values,
    }
}

/// Inverse of [`to_momentum_rep`].
pub fn from_momentum_rep<T: Real>(phi: &MomentumField<T>) -> SpatialField<Complex<T>> {
    let g = phi.xgrid;
    let n = g.n();
    let sp = g.spectral();
    let pre = (T::lit(2.0) * T::PI() * phi.hbar).sqrt() / g.dx();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for (j, slot) in buf.iter_mut().enumerate() {
        let p = phi.hbar * sp.wavenumbers()[j];
        let ph = p * g.x_min() / phi.hbar;
        let k = (freq_index(j, n) + (n / 2) as i64) as usize;
        *slot = phi.values[k] * Complex::new(ph.cos(), ph.sin()) * pre;
    }
    sp.inverse(&mut buf);
    SpatialField {
        grid: g,
        values: buf,
    }
}

/// Position grid paired with its conjugate momentum grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid<T> {
    pub xgrid: Grid1D<T>,
    pub pgrid: Grid1D<T>,
}

impl<T: Real> PhaseSpaceGrid<T> {
    /// Momentum samples `p = hbar*k` conjugate to `xgrid`.
    pub fn conjugate(xgrid: Grid1D<T>, hbar: T) -> Self {
        Self {
            pgrid: xgrid.momentum_grid(hbar),
            xgrid,
        }
    }

    /// Independent position and momentum grids, for sampling phase-space
    /// symbols that are not tied to a wavefunction.
    pub fn new(xgrid: Grid1D<T>, pgrid: Grid1D<T>) -> Result<Self> {
        if xgrid.n() != pgrid.n() {
            return Err(Error::config(
                "phase_grid.n",
                format!("x has {} samples, p has {}", xgrid.n(), pgrid.n()),
            ));
        }
        Ok(Self { xgrid, pgrid })
    }

    pub fn n(&self) -> usize {
        self.xgrid.n()
    }
}
