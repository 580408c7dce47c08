//! Initial states and Strang split-step evolution under `H = p^2/2m + V(x)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SpatialField, Spectral};
use crate::scalar::Real;

type Wave<T> = SpatialField<Complex<T>>;

/// Time-independent external potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential<T: Real> {
    Free,
    /// `V = m omega^2 x^2 / 2`.
    Harmonic { omega: T },
    /// `V = height * exp(-(x - center)^2 / (2 width^2))`.
    GaussianBarrier { height: T, width: T, center: T },
    /// Samples on `grid`; evaluated off-grid by periodic cubic interpolation.
    Tabulated { grid: Grid1D<T>, values: Vec<T> },
}

impl<T: Real> Potential<T> {
    pub fn eval(&self, x: T, mass: T) -> T {
        match self {
            Potential::Free => T::zero(),
            Potential::Harmonic { omega } => T::lit(0.5) * mass * *omega * *omega * x * x,
            Potential::GaussianBarrier {
                height,
                width,
                center,
            } => {
                let d = (x - *center) / *width;
                *height * (-T::lit(0.5) * d * d).exp()
            }
            Potential::Tabulated { grid, values } => cubic_periodic(grid, values, x),
        }
    }

    pub fn sample(&self, grid: &Grid1D<T>, mass: T) -> Result<SpatialField<T>> {
        if let Potential::Tabulated { grid: g, values } = self {
            if values.len() != g.n() {
                return Err(Error::config("potential.tabulated", "length differs from its grid"));
            }
        }
        SpatialField::new(*grid, (0..grid.n()).map(|j| self.eval(grid.x(j), mass)).collect())
    }

    /// Second derivative, used by the Baker-bracket series on quadratic symbols.
    pub fn is_quadratic(&self) -> bool {
        matches!(self, Potential::Free | Potential::Harmonic { .. })
    }
}

/// Four-point Lagrange interpolation on a periodic grid.
pub(crate) fn cubic_periodic<T: Real>(grid: &Grid1D<T>, values: &[T], x: T) -> T {
    let n = grid.n() as i64;
    let s = (x - grid.x_min()) / grid.dx();
    let j = s.floor();
    let t = s - j;
    let j = j.to_i64().unwrap_or(0);
    let at = |i: i64| values[i.rem_euclid(n) as usize];
    let (y0, y1, y2, y3) = (at(j - 1), at(j), at(j + 1), at(j + 2));
    let one = T::one();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let c0 = -t * (t - one) * (t - two) / six;
    let c1 = (t + one) * (t - one) * (t - two) / two;
    let c2 = -(t + one) * t * (t - two) / two;
    let c3 = (t + one) * t * (t - one) / six;
    c0 * y0 + c1 * y1 + c2 * y2 + c3 * y3
}

fn cis<T: Real>(a: T) -> Complex<T> {
    Complex::new(a.cos(), a.sin())
}

/// Normalized Gaussian packet
/// `(2 pi sigma^2)^{-1/4} exp(-(x-x0)^2/(4 sigma^2)) exp(i p0 x / hbar)`.
pub fn gaussian_packet<T: Real>(grid: Grid1D<T>, center: T, width: T, momentum: T, hbar: T) -> Result<Wave<T>> {
    chirped_gaussian(grid, center, width, momentum, T::zero(), hbar)
}

/// Gaussian packet with an extra quadratic phase `S = chirp * x^2`.
pub fn chirped_gaussian<T: Real>(
    grid: Grid1D<T>,
    center: T,
    width: T,
    momentum: T,
    chirp: T,
    hbar: T,
) -> Result<Wave<T>> {
    if !(width > T::lit(4.0) * grid.dx()) {
        return Err(Error::config(
            "state.resolution",
            format!("width {width} must exceed 4*dx = {}", T::lit(4.0) * grid.dx()),
        ));
    }
    let amp = (T::lit(2.0) * T::PI() * width * width).powf(T::lit(-0.25));
    Ok(SpatialField::from_fn(grid, |x: T| {
        let d = x - center;
        let env = amp * (-d * d / (T::lit(4.0) * width * width)).exp();
        cis((momentum * x + chirp * x * x) / hbar) * env
    }))
}

/// Free evolution of [`chirped_gaussian`] to time `t`, sampled from the
/// closed-form solution on the infinite line.
#[allow(clippy::too_many_arguments)]
pub fn free_gaussian<T: Real>(
    grid: Grid1D<T>,
    center: T,
    width: T,
    momentum: T,
    chirp: T,
    t: T,
    hbar: T,
    mass: T,
) -> Result<Wave<T>> {
    let psi0 = chirped_gaussian(grid, center, width, momentum, chirp, hbar)?;
    if t == T::zero() {
        return Ok(psi0);
    }
    // exp(-a u^2 + i k u + i phase0), u = x - center
    let two = T::lit(2.0);
    let a = Complex::new(T::one() / (T::lit(4.0) * width * width), -chirp / hbar);
    let k = (momentum + two * chirp * center) / hbar;
    let phase0 = (momentum * center + chirp * center * center) / hbar;
    let amp = (two * T::PI() * width * width).powf(T::lit(-0.25));
    let denom = Complex::new(T::one(), T::zero()) + a * Complex::new(T::zero(), two * hbar * t / mass);
    let pre = denom.sqrt().inv() * amp;
    let drift = hbar * k * t / mass;
    Ok(SpatialField::from_fn(grid, |x: T| {
        let u = x - center - drift;
        let arg = -a * u * u / denom + Complex::new(T::zero(), k * (x - center) - hbar * k * k * t / (two * mass) + phase0);
        pre * arg.exp()
    }))
}

/// Normalized on-grid plane wave `exp(i k x)/sqrt(L)` with `k = 2 pi mode / L`.
pub fn plane_wave<T: Real>(grid: Grid1D<T>, mode: i64) -> Wave<T> {
    let k = T::lit(2.0) * T::PI() * T::lit(mode as f64) / grid.length();
    let amp = T::one() / grid.length().sqrt();
    SpatialField::from_fn(grid, |x| cis(k * x) * amp)
}

/// Angular wavenumber of [`plane_wave`] mode `mode`.
pub fn plane_wave_k<T: Real>(grid: &Grid1D<T>, mode: i64) -> T {
    T::lit(2.0) * T::PI() * T::lit(mode as f64) / grid.length()
}

/// Harmonic-oscillator eigenstate `level` (normalized Hermite function).
pub fn harmonic_eigenstate<T: Real>(grid: Grid1D<T>, level: usize, omega: T, mass: T, hbar: T) -> Wave<T> {
    let a = (mass * omega / hbar).sqrt();
    let n0 = (a * a / T::PI()).powf(T::lit(0.25));
    SpatialField::from_fn(grid, |x| {
        let xi = a * x;
        let mut prev = T::zero();
        let mut cur = n0 * (-xi * xi / T::lit(2.0)).exp();
        for k in 0..level {
            let kf = T::from_usize_lossy(k);
            let next = (T::lit(2.0) / (kf + T::one())).sqrt() * xi * cur
                - (kf / (kf + T::one())).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        Complex::new(cur, T::zero())
    })
}

/// Normalized weighted sum `w1 psi1 + w2 psi2`.
pub fn superpose<T: Real>(psi1: &Wave<T>, psi2: &Wave<T>, weights: (Complex<T>, Complex<T>)) -> Result<Wave<T>> {
    if !psi1.grid.compatible(&psi2.grid) {
        return Err(Error::GridMismatch);
    }
    let values = psi1
        .values
        .iter()
        .zip(&psi2.values)
        .map(|(a, b)| weights.0 * a + weights.1 * b)
        .collect();
    let sum = SpatialField {
        grid: psi1.grid,
        values,
    };
    let n2 = sum.norm_sqr();
    let scale = psi1.max_abs().max(psi2.max_abs());
    if !(n2.sqrt() > T::lit(1e-12) * scale * psi1.grid.length().sqrt()) {
        return Err(Error::ZeroNorm);
    }
    sum.normalized()
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation<T> {
    pub dt: T,
    pub steps: usize,
    /// Keep every `stride`-th step as a snapshot.
    pub stride: usize,
    pub hbar: T,
    pub mass: T,
}

/// Strang splitting `exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2)` with the
/// kinetic factor applied in Fourier space.
#[derive(Debug, Clone)]
pub struct SplitStep<T: Real> {
    spectral: Spectral<T>,
    half_potential: Vec<Complex<T>>,
    kinetic: Vec<Complex<T>>,
}

/// Largest admissible `dt * max|V| / hbar`.
pub const STABILITY_LIMIT: f64 = 0.5;

impl<T: Real> SplitStep<T> {
    pub fn new(grid: &Grid1D<T>, potential: &Potential<T>, dt: T, hbar: T, mass: T) -> Result<Self> {
        let v = potential.sample(grid, mass)?;
        let vmax = v.max_abs();
        if !(dt.abs() * vmax / hbar < T::lit(STABILITY_LIMIT)) {
            return Err(Error::config(
                "propagator.stability",
                format!(
                    "dt*max|V|/hbar = {} must stay below {STABILITY_LIMIT}",
                    dt.abs() * vmax / hbar
                ),
            ));
        }
        let spectral = grid.spectral();
        let half_potential = v
            .values
            .iter()
            .map(|&vj| cis(-vj * dt / (T::lit(2.0) * hbar)))
            .collect();
        let kinetic = spectral
            .wavenumbers()
            .iter()
            .map(|&k| cis(-hbar * k * k * dt / (T::lit(2.0) * mass)))
            .collect();
        Ok(Self {
            spectral,
            half_potential,
            kinetic,
        })
    }

    pub fn step(&self, psi: &mut [Complex<T>]) {
        for (v, h) in psi.iter_mut().zip(&self.half_potential) {
            *v = *v * h;
        }
        self.spectral.forward(psi);
        for (v, k) in psi.iter_mut().zip(&self.kinetic) {
            *v = *v * k;
        }
        self.spectral.inverse(psi);
        for (v, h) in psi.iter_mut().zip(&self.half_potential) {
            *v = *v * h;
        }
    }
}

/// Snapshot history of one evolution.
///
/// Besides the strided snapshots the record keeps the states one fine step
/// before and after each snapshot, so centered time derivatives are always
/// available. With stride 1 the neighbours are the adjacent snapshots and only
/// the two outermost ones are stored separately.
#[derive(Debug, Clone)]
pub struct EvolutionRecord<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<Wave<T>>,
    pub dt: T,
    pub hbar: T,
    pub mass: T,
    /// Fine steps between snapshots; zero for records built from a known solution.
    pub stride: usize,
    pub potential: Potential<T>,
    edges: (Wave<T>, Wave<T>),
    neighbors: Vec<(Wave<T>, Wave<T>)>,
}

/// A snapshot together with its fine-step neighbours.
#[derive(Debug, Clone, Copy)]
pub struct Triple<'a, T: Real> {
    pub before: &'a Wave<T>,
    pub at: &'a Wave<T>,
    pub after: &'a Wave<T>,
    pub t: T,
    pub dt: T,
}

impl<T: Real> EvolutionRecord<T> {
    pub fn grid(&self) -> Grid1D<T> {
        self.states[0].grid
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the snapshot at time `t` (within half a fine step).
    pub fn index_at(&self, t: T) -> Result<usize> {
        self.times
            .iter()
            .position(|&tk| (tk - t).abs() <= self.dt.abs() * T::lit(0.5))
            .ok_or(Error::MissingSnapshot(t.to_f64_lossy()))
    }

    /// Record sampled from a known solution `psi(t)` at `times`, with
    /// neighbours at `t -/+ dt`.
    pub fn from_solution(
        times: Vec<T>,
        dt: T,
        hbar: T,
        mass: T,
        potential: Potential<T>,
        solution: impl Fn(T) -> Wave<T>,
    ) -> Self {
        let states: Vec<_> = times.iter().map(|&t| solution(t)).collect();
        let neighbors = times.iter().map(|&t| (solution(t - dt), solution(t + dt))).collect();
        let edges = (states[0].clone(), states[0].clone());
        Self {
            times,
            states,
            dt,
            hbar,
            mass,
            stride: 0,
            potential,
            edges,
            neighbors,
        }
    }

    fn compact(&self) -> bool {
        self.neighbors.is_empty()
    }

    fn before(&self, k: usize) -> &Wave<T> {
        match (self.compact(), k) {
            (true, 0) => &self.edges.0,
            (true, _) => &self.states[k - 1],
            _ => &self.neighbors[k].0,
        }
    }

    fn after(&self, k: usize) -> &Wave<T> {
        if !self.compact() {
            &self.neighbors[k].1
        } else if k + 1 == self.states.len() {
            &self.edges.1
        } else {
            &self.states[k + 1]
        }
    }

    pub fn triple(&self, k: usize) -> Triple<'_, T> {
        let (before, after) = (self.before(k), self.after(k));
        Triple {
            before,
            at: &self.states[k],
            after,
            t: self.times[k],
            dt: self.dt,
        }
    }

    pub fn triple_at(&self, t: T) -> Result<Triple<'_, T>> {
        Ok(self.triple(self.index_at(t)?))
    }

    /// `(psi(t), psi(t + dt))` for forward-difference energy extraction.
    pub fn pair(&self, k: usize) -> (&Wave<T>, &Wave<T>) {
        (&self.states[k], self.after(k))
    }

    /// Largest `| ||psi(t)||^2 - ||psi(0)||^2 |` over all snapshots.
    pub fn norm_drift(&self) -> T {
        let n0 = self.states[0].norm_sqr();
        self.states
            .iter()
            .map(|s| (s.norm_sqr() - n0).abs())
            .fold(T::zero(), T::max)
    }
}

/// Evolves `psi0` for `prop.steps` Strang steps of size `prop.dt`.
pub fn split_step_evolve<T: Real>(psi0: &Wave<T>, potential: &Potential<T>, prop: Propagation<T>) -> Result<EvolutionRecord<T>> {
    if prop.stride == 0 {
        return Err(Error::config("propagator.stride", "snapshot stride must be >= 1"));
    }
    if !(prop.dt > T::zero()) || !(prop.hbar > T::zero()) || !(prop.mass > T::zero()) {
        return Err(Error::config("propagator.positive", "dt, hbar and mass must be positive"));
    }
    let grid = psi0.grid;
    let fwd = SplitStep::new(&grid, potential, prop.dt, prop.hbar, prop.mass)?;
    let back = SplitStep::new(&grid, potential, -prop.dt, prop.hbar, prop.mass)?;
    let wrap = |v: Vec<Complex<T>>| SpatialField { grid, values: v };

    let mut prev = psi0.values.clone();
    back.step(&mut prev);
    let mut cur = psi0.values.clone();
    let mut times = vec![T::zero()];
    let mut states = vec![psi0.clone()];
    let mut neighbors = Vec::new();
    let first_before = wrap(prev.clone());
    let keep_neighbors = prop.stride > 1;
    let mut pending_before = keep_neighbors.then_some(prev);
    let mut last_after = None;
    for s in 1..=prop.steps + 1 {
        let mut next = cur.clone();
        fwd.step(&mut next);
        if let Some(before) = pending_before.take() {
            neighbors.push((wrap(before), wrap(next.clone())));
        }
        if s > prop.steps {
            last_after = Some(wrap(next));
            break;
        }
        if s % prop.stride == 0 {
            times.push(T::from_usize_lossy(s) * prop.dt);
            states.push(wrap(next.clone()));
            if keep_neighbors {
                pending_before = Some(cur.clone());
            }
        }
        cur = next;
    }
    let edges = (first_before, last_after.expect("loop runs at least once"));
    Ok(EvolutionRecord {
        times,
        states,
        dt: prop.dt,
        hbar: prop.hbar,
        mass: prop.mass,
        stride: prop.stride,
        potential: potential.clone(),
        edges,
        neighbors,
    })
}
