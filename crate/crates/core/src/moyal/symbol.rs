use num_complex::Complex;
use rayon::prelude::*;

use super::poly::{bracket_poly, star_poly, BracketKind, PolySymbol};
use crate::error::{Error, Result};
use crate::grid::{PhaseSpaceGrid, Spectral};
use crate::scalar::Real;

/// Star-product evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Bidifferential series: exact on polynomial descriptors, spectral
    /// derivatives on sampled symbols.
    Series,
    /// Fourier integral (twisted convolution) on sampled symbols.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketConfig<T> {
    pub hbar: T,
    pub series_order: u32,
    pub backend: Backend,
}

impl<T: Real> BracketConfig<T> {
    pub fn new(hbar: T, series_order: u32, backend: Backend) -> Result<Self> {
        if series_order < 1 {
            return Err(Error::config("bracket.series_order", "series order must be >= 1"));
        }
        if !(hbar > T::zero()) {
            return Err(Error::config("bracket.hbar", "hbar must be positive"));
        }
        Ok(Self {
            hbar,
            series_order,
            backend,
        })
    }
}

/// Weyl symbol sampled on a phase-space grid, optionally with an exact
/// polynomial descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSymbol<T: Real> {
    pub psgrid: PhaseSpaceGrid<T>,
    /// Row-major over `(x_i, p_k)`.
    pub values: Vec<Complex<T>>,
    pub poly: Option<PolySymbol<T>>,
    /// Set when a series was cut before it terminated or converged.
    pub truncated: bool,
}

impl<T: Real> PhaseSymbol<T> {
    pub fn from_poly(psgrid: PhaseSpaceGrid<T>, poly: PolySymbol<T>) -> Self {
        Self {
            values: poly.sample(&psgrid),
            psgrid,
            poly: Some(poly),
            truncated: false,
        }
    }

    pub fn from_fn(psgrid: PhaseSpaceGrid<T>, f: impl Fn(T, T) -> Complex<T>) -> Self {
        let n = psgrid.n();
        let values = (0..n * n)
            .map(|idx| f(psgrid.xgrid.x(idx / n), psgrid.pgrid.x(idx % n)))
            .collect();
        Self {
            psgrid,
            values,
            poly: None,
            truncated: false,
        }
    }

    pub fn n(&self) -> usize {
        self.psgrid.n()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Largest `|a - b|` over the grid.
    pub fn max_gap(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    fn sampled(psgrid: PhaseSpaceGrid<T>, values: Vec<Complex<T>>, truncated: bool) -> Self {
        Self {
            psgrid,
            values,
            poly: None,
            truncated,
        }
    }
}

/// Separable 2-D FFT on a square phase-space grid.
#[derive(Debug, Clone)]
pub(crate) struct Plane<T: Real> {
    pub n: usize,
    pub sx: Spectral<T>,
    pub sp: Spectral<T>,
}

pub(crate) fn transpose<V: Copy + Send + Sync>(values: &[V], n: usize) -> Vec<V> {
    (0..n * n).map(|idx| values[(idx % n) * n + idx / n]).collect()
}

impl<T: Real> Plane<T> {
    pub fn new(psgrid: &PhaseSpaceGrid<T>) -> Self {
        Self {
            n: psgrid.n(),
            sx: psgrid.xgrid.spectral(),
            sp: psgrid.pgrid.spectral(),
        }
    }

    /// Applies `f(row_index, row)` to every `p` row in parallel.
    pub fn rows(&self, values: &mut [Complex<T>], f: impl Fn(usize, &mut [Complex<T>]) + Sync) {
        values.par_chunks_mut(self.n).enumerate().for_each(|(i, r)| f(i, r));
    }

    /// Applies `f(column_index, column)` to every `x` column in parallel.
    pub fn cols(&self, values: &mut [Complex<T>], f: impl Fn(usize, &mut [Complex<T>]) + Sync) {
        let mut t = transpose(values, self.n);
        self.rows(&mut t, f);
        values.copy_from_slice(&transpose(&t, self.n));
    }

    pub fn forward(&self, values: &mut [Complex<T>]) {
        self.rows(values, |_, r| self.sp.forward(r));
        self.cols(values, |_, c| self.sx.forward(c));
    }

    pub fn inverse(&self, values: &mut [Complex<T>]) {
        self.rows(values, |_, r| self.sp.inverse(r));
        self.cols(values, |_, c| self.sx.inverse(c));
    }

    /// `d^i/dx^i d^j/dp^j` from a forward spectrum.
    pub fn derivative_from(&self, spec: &[Complex<T>], i: u32, j: u32) -> Vec<Complex<T>> {
        let n = self.n;
        let factor = |k: T, order: u32, idx: usize| {
            if order % 2 == 1 && idx == n / 2 {
                return Complex::new(T::zero(), T::zero());
            }
            let ik = Complex::new(T::zero(), k);
            (0..order).fold(Complex::new(T::one(), T::zero()), |acc, _| acc * ik)
        };
        let fx: Vec<Complex<T>> = (0..n).map(|r| factor(self.sx.wavenumbers()[r], i, r)).collect();
        let fp: Vec<Complex<T>> = (0..n).map(|c| factor(self.sp.wavenumbers()[c], j, c)).collect();
        let mut out: Vec<Complex<T>> = spec
            .iter()
            .enumerate()
            .map(|(idx, v)| v * fx[idx / n] * fp[idx % n])
            .collect();
        self.inverse(&mut out);
        out
    }
}

fn check_grids<T: Real>(a: &PhaseSymbol<T>, b: &PhaseSymbol<T>) -> Result<()> {
    let same = a.psgrid.xgrid.compatible(&b.psgrid.xgrid) && a.psgrid.pgrid.compatible(&b.psgrid.pgrid);
    if same {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Relative size below which the last series term counts as converged.
const SERIES_TOLERANCE: f64 = 1e-9;

/// Spectral modes below this fraction of the peak are roundoff and are
/// dropped before high-order differentiation amplifies them.
const SPECTRAL_FLOOR: f64 = 1e-14;

fn drop_noise<T: Real>(spec: &mut [Complex<T>]) {
    let peak = spec.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let floor = peak * T::lit(SPECTRAL_FLOOR);
    for v in spec.iter_mut().filter(|v| v.norm() < floor) {
        *v = Complex::new(T::zero(), T::zero());
    }
}

fn star_series_sampled<T: Real>(a: &PhaseSymbol<T>, b: &PhaseSymbol<T>, hbar: T, order: u32) -> (Vec<Complex<T>>, bool) {
    let plane = Plane::new(&a.psgrid);
    let mut sa = a.values.clone();
    let mut sb = b.values.clone();
    plane.forward(&mut sa);
    plane.forward(&mut sb);
    drop_noise(&mut sa);
    drop_noise(&mut sb);
    let mut acc = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect::<Vec<_>>();
    let step = Complex::new(T::zero(), hbar / T::lit(2.0));
    let mut weight = Complex::new(T::one(), T::zero());
    let mut last = T::zero();
    for n in 1..=order {
        weight = weight * step / T::from_usize_lossy(n as usize);
        let mut term = vec![Complex::new(T::zero(), T::zero()); acc.len()];
        let mut binom = T::one();
        for k in 0..=n {
            if k > 0 {
                binom = binom * T::from_usize_lossy((n - k + 1) as usize) / T::from_usize_lossy(k as usize);
            }
            let da = plane.derivative_from(&sa, n - k, k);
            let db = plane.derivative_from(&sb, k, n - k);
            let c = if k % 2 == 1 { -weight * binom } else { weight * binom };
            for ((t, x), y) in term.iter_mut().zip(&da).zip(&db) {
                *t = *t + c * x * y;
            }
        }
        last = term.iter().map(|v| v.norm()).fold(T::zero(), T::max);
        for (s, t) in acc.iter_mut().zip(&term) {
            *s = *s + t;
        }
    }
    let scale = acc.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    (acc, last > T::lit(SERIES_TOLERANCE) * scale)
}

/// Twisted convolution in the mixed `(k_x, p)` representation:
/// `(a*b)~(kappa, p) = sum_{k + k' = kappa} a~(k, p + hbar k'/2) b~(k', p - hbar k/2)`.
fn star_spectral_sampled<T: Real>(a: &PhaseSymbol<T>, b: &PhaseSymbol<T>, hbar: T) -> Vec<Complex<T>> {
    let plane = Plane::new(&a.psgrid);
    let n = plane.n;
    let to_kx = |v: &[Complex<T>]| {
        let mut t = transpose(v, n);
        t.par_chunks_mut(n).for_each(|c| plane.sx.forward(c));
        transpose(&t, n)
    };
    let fa = to_kx(&a.values);
    let fb = to_kx(&b.values);
    let kx = plane.sx.wavenumbers();
    let half = hbar / T::lit(2.0);
    let inv_n = T::one() / T::from_usize_lossy(n);
    let mut out: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|kappa| {
            let mut acc = vec![Complex::new(T::zero(), T::zero()); n];
            for k in 0..n {
                let kp = (kappa + n - k) % n;
                let ra = &fa[k * n..(k + 1) * n];
                let rb = &fb[kp * n..(kp + 1) * n];
                if ra.iter().all(|v| v.norm_sqr() == T::zero()) || rb.iter().all(|v| v.norm_sqr() == T::zero()) {
                    continue;
                }
                let sa = plane.sp.shift(ra, half * kx[kp]);
                let sb = plane.sp.shift(rb, -half * kx[k]);
                for ((o, x), y) in acc.iter_mut().zip(&sa).zip(&sb) {
                    *o = *o + x * y * inv_n;
                }
            }
            acc
        })
        .collect();
    let mut t = transpose(&out, n);
    t.par_chunks_mut(n).for_each(|c| plane.sx.inverse(c));
    out.copy_from_slice(&transpose(&t, n));
    out
}

pub fn star_product<T: Real>(a: &PhaseSymbol<T>, b: &PhaseSymbol<T>, cfg: &BracketConfig<T>) -> Result<PhaseSymbol<T>> {
    check_grids(a, b)?;
    match (cfg.backend, &a.poly, &b.poly) {
        (Backend::Series, Some(pa), Some(pb)) => {
            let r = star_poly(pa, pb, &cfg.hbar, cfg.series_order);
            let mut s = PhaseSymbol::from_poly(a.psgrid, r.symbol);
            s.truncated = r.truncated;
            Ok(s)
        }
        (Backend::Series, _, _) => {
            let (v, truncated) = star_series_sampled(a, b, cfg.hbar, cfg.series_order);
            Ok(PhaseSymbol::sampled(a.psgrid, v, truncated))
        }
        (Backend::Spectral, _, _) => Ok(PhaseSymbol::sampled(a.psgrid, star_spectral_sampled(a, b, cfg.hbar), false)),
    }
}

pub fn bracket<T: Real>(a: &PhaseSymbol<T>, b: &PhaseSymbol<T>, kind: BracketKind, cfg: &BracketConfig<T>) -> Result<PhaseSymbol<T>> {
    check_grids(a, b)?;
    if let (Backend::Series, Some(pa), Some(pb)) = (cfg.backend, &a.poly, &b.poly) {
        let r = bracket_poly(pa, pb, kind, &cfg.hbar, cfg.series_order);
        let mut s = PhaseSymbol::from_poly(a.psgrid, r.symbol);
        s.truncated = r.truncated;
        return Ok(s);
    }
    if kind == BracketKind::Poisson {
        let plane = Plane::new(&a.psgrid);
        let (mut sa, mut sb) = (a.values.clone(), b.values.clone());
        plane.forward(&mut sa);
        plane.forward(&mut sb);
        let (ax, ap) = (plane.derivative_from(&sa, 1, 0), plane.derivative_from(&sa, 0, 1));
        let (bx, bp) = (plane.derivative_from(&sb, 1, 0), plane.derivative_from(&sb, 0, 1));
        let v = (0..ax.len()).map(|i| ax[i] * bp[i] - ap[i] * bx[i]).collect();
        return Ok(PhaseSymbol::sampled(a.psgrid, v, false));
    }
    let ab = star_product(a, b, cfg)?;
    let ba = star_product(b, a, cfg)?;
    let values = if kind == BracketKind::Moyal {
        let inv = Complex::new(T::zero(), -T::one() / cfg.hbar);
        ab.values.iter().zip(&ba.values).map(|(x, y)| (x - y) * inv).collect()
    } else {
        ab.values.iter().zip(&ba.values).map(|(x, y)| (x + y) * T::lit(0.5)).collect()
    };
    Ok(PhaseSymbol::sampled(a.psgrid, values, ab.truncated || ba.truncated))
}

/// One row of a classical-limit sweep.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClassicalLimitRow<T> {
    pub hbar: T,
    /// `max |{a,b}_MB - {a,b}_PB|` over the sampling window.
    pub moyal_minus_poisson: T,
    /// `max |{a,b}_BB - a b|` over the sampling window.
    pub baker_minus_product: T,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ClassicalLimitReport<T> {
    pub rows: Vec<ClassicalLimitRow<T>>,
    /// Least-squares slope of `log deviation` against `log hbar`; `None`
    /// when some deviation vanishes.
    pub moyal_exponent: Option<T>,
    pub baker_exponent: Option<T>,
}

/// Samples per axis of the `[-window, window]^2` box used for the maxima.
const WINDOW_SAMPLES: usize = 33;

/// Deviations of the Moyal bracket from the Poisson bracket and of the Baker
/// bracket from the pointwise product for each `hbar`, using exact series.
pub fn classical_limit_report<T: Real>(
    a: &PolySymbol<T>,
    b: &PolySymbol<T>,
    hbars: &[T],
    window: T,
) -> ClassicalLimitReport<T> {
    let order = super::poly::series_length(a, b);
    let pb = bracket_poly(a, b, BracketKind::Poisson, &T::one(), order).symbol;
    let prod = a * b;
    let axis: Vec<T> = (0..WINDOW_SAMPLES)
        .map(|i| -window + T::lit(2.0) * window * T::from_usize_lossy(i) / T::from_usize_lossy(WINDOW_SAMPLES - 1))
        .collect();
    let sup = |f: &PolySymbol<T>| {
        axis.iter()
            .flat_map(|x| axis.iter().map(move |p| f.eval(x, p).norm()))
            .fold(T::zero(), T::max)
    };
    let rows: Vec<ClassicalLimitRow<T>> = hbars
        .iter()
        .map(|&h| {
            let mb = bracket_poly(a, b, BracketKind::Moyal, &h, order).symbol;
            let bb = bracket_poly(a, b, BracketKind::Baker, &h, order).symbol;
            ClassicalLimitRow {
                hbar: h,
                moyal_minus_poisson: sup(&(&mb - &pb)),
                baker_minus_product: sup(&(&bb - &prod)),
            }
        })
        .collect();
    let fit = |f: fn(&ClassicalLimitRow<T>) -> T| loglog_slope(&rows.iter().map(|r| (r.hbar, f(r))).collect::<Vec<_>>());
    ClassicalLimitReport {
        moyal_exponent: fit(|r| r.moyal_minus_poisson),
        baker_exponent: fit(|r| r.baker_minus_product),
        rows,
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(points: &[(T, T)]) -> Option<T> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > T::zero() && y > T::zero())) {
        return None;
    }
    let n = T::from_usize_lossy(points.len());
    let lx: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxy = lx.iter().zip(&ly).map(|(x, y)| (*x - mx) * (*y - my)).sum::<T>();
    let sxx = lx.iter().map(|x| (*x - mx) * (*x - mx)).sum::<T>();
    (sxx > T::zero()).then(|| sxy / sxx)
}
