//! Bohm trajectory ensembles guided by `dx/dt = S'(x, t)/m`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bohm::{bohm_momentum, polar_decompose};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, SpatialField};
use crate::scalar::Real;
use crate::schrodinger::EvolutionRecord;

/// Positions of `n_particles` trajectories at `times`, particle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble<T> {
    pub n_particles: usize,
    pub times: Vec<T>,
    pub positions: Vec<T>,
    pub seed: u64,
    /// Particles that left the domain; excluded from statistics.
    pub exited: Vec<bool>,
}

impl<T: Real> TrajectoryEnsemble<T> {
    pub fn path(&self, i: usize) -> &[T] {
        let nt = self.times.len();
        &self.positions[i * nt..(i + 1) * nt]
    }

    pub fn position(&self, i: usize, k: usize) -> T {
        self.positions[i * self.times.len() + k]
    }

    /// Positions of the particles still inside the domain at time index `k`.
    pub fn snapshot(&self, k: usize) -> Vec<T> {
        (0..self.n_particles)
            .filter(|&i| !self.exited[i])
            .map(|i| self.position(i, k))
            .collect()
    }

    pub fn time_index(&self, t: T, tol: T) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }

    /// Number of (time, neighbouring pair) order inversions relative to the
    /// initial ordering.
    pub fn crossing_violations(&self) -> usize {
        let mut order: Vec<usize> = (0..self.n_particles).filter(|&i| !self.exited[i]).collect();
        order.sort_by(|&a, &b| self.position(a, 0).partial_cmp(&self.position(b, 0)).unwrap_or(Ordering::Equal));
        (1..self.times.len())
            .map(|k| {
                order
                    .windows(2)
                    .filter(|w| self.position(w[0], k) > self.position(w[1], k))
                    .count()
            })
            .sum()
    }

    /// Largest per-step displacement over all particles.
    pub fn max_step(&self) -> T {
        (0..self.n_particles)
            .flat_map(|i| self.path(i).windows(2).map(|w| (w[1] - w[0]).abs()).collect::<Vec<_>>())
            .fold(T::zero(), T::max)
    }
}

/// Inverse-CDF samples from `rho` treated as constant on cells centred at the grid points.
pub fn sample_initial<T: Real>(rho: &SpatialField<T>, n: usize, seed: u64) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::config("ensemble.size", "particle count must be positive"));
    }
    if rho.values.iter().any(|&r| r < T::zero()) {
        return Err(Error::config("ensemble.density", "density must be non-negative"));
    }
    let cdf = cell_cdf(&rho.values);
    let total = *cdf.last().unwrap();
    if !(total > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    let g = rho.grid;
    let half = g.dx() / T::lit(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let u = T::lit(rng.random::<f64>()) * total;
            let j = cdf.partition_point(|&c| c <= u).clamp(1, g.n()) - 1;
            let w = cdf[j + 1] - cdf[j];
            let frac = if w > T::zero() { (u - cdf[j]) / w } else { T::lit(0.5) };
            g.x(j) - half + frac * g.dx()
        })
        .collect())
}

/// Running sums of `rho`, with a leading zero.
fn cell_cdf<T: Real>(rho: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    std::iter::once(T::zero())
        .chain(rho.iter().map(|&r| {
            acc = acc + r;
            acc
        }))
        .collect()
}

/// Bohm velocity `P_B/m` with nodes filled by the nearest unmasked value.
pub fn velocity_field<T: Real>(psi: &SpatialField<num_complex::Complex<T>>, hbar: T, mass: T) -> Result<Vec<T>> {
    let p = bohm_momentum(&polar_decompose(psi, hbar)?);
    let n = p.mask.len();
    let valid: Vec<usize> = (0..n).filter(|&j| !p.mask[j]).collect();
    Ok((0..n)
        .map(|j| {
            let src = if p.mask[j] {
                let k = valid.partition_point(|&v| v < j);
                match (k.checked_sub(1).map(|i| valid[i]), valid.get(k)) {
                    (Some(a), Some(&b)) if j - a <= b - j => a,
                    (_, Some(&b)) => b,
                    (Some(a), None) => a,
                    (None, None) => j,
                }
            } else {
                j
            };
            p.field.values[src] / mass
        })
        .collect())
}

/// Velocity snapshot blended in time and padded for periodic cubic lookup.
struct Stage<T> {
    x_min: T,
    dx: T,
    n: usize,
    /// `padded[i] = v[(i - 1) mod n]`, length `n + 3`.
    padded: Vec<T>,
}

impl<T: Real> Stage<T> {
    fn blend(grid: &Grid1D<T>, a: &[T], b: &[T], w: T) -> Self {
        let n = a.len();
        let padded = (0..n + 3)
            .map(|i| {
                let j = (i + n - 1) % n;
                a[j] + (b[j] - a[j]) * w
            })
            .collect();
        Self {
            x_min: grid.x_min(),
            dx: grid.dx(),
            n,
            padded,
        }
    }

    fn at(&self, x: T) -> T {
        let s = (x - self.x_min) / self.dx;
        let fl = s.floor();
        let t = s - fl;
        let j = fl.to_i64().unwrap_or(0).rem_euclid(self.n as i64) as usize;
        let y = &self.padded[j..j + 4];
        let one = T::one();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let (tm, tp, t2) = (t - one, t + one, t - two);
        -t * tm * t2 / six * y[0] + tp * tm * t2 / two * y[1] - tp * t * t2 / two * y[2] + tp * t * tm / six * y[3]
    }
}

/// Upper bound on `|dv/dx|` for the piecewise-cubic interpolant of `f`.
fn lipschitz<T: Real>(f: &[T], dx: T) -> T {
    let n = f.len();
    let max = (0..n).map(|j| (f[(j + 1) % n] - f[j]).abs()).fold(T::zero(), T::max);
    T::lit(1.5) * max / dx
}

const MAX_STEP_STIFFNESS: f64 = 0.5;
const MAX_SUBSTEPS: usize = 4096;

/// RK4 through the snapshot velocity fields of `record`; positions are kept
/// at every snapshot.
pub fn integrate_ensemble<T: Real>(record: &EvolutionRecord<T>, initial: &[T]) -> Result<TrajectoryEnsemble<T>> {
    integrate_ensemble_with(record, initial, 1, 0)
}

/// As [`integrate_ensemble`], keeping positions at every `keep_every`-th
/// snapshot and tagging the ensemble with `seed`.
///
/// Velocities are cubic in space and linear in time between snapshots. Each
/// snapshot interval is split into equal RK4 substeps, shared by all
/// particles, with `h * |dv/dx| <= 0.5` so the discrete flow preserves the
/// ordering of particles.
pub fn integrate_ensemble_with<T: Real>(
    record: &EvolutionRecord<T>,
    initial: &[T],
    keep_every: usize,
    seed: u64,
) -> Result<TrajectoryEnsemble<T>> {
    if initial.is_empty() {
        return Err(Error::config("ensemble.size", "particle count must be positive"));
    }
    if keep_every == 0 {
        return Err(Error::config("ensemble.keep_every", "must be >= 1"));
    }
    let grid = record.grid();
    let fields = record
        .states
        .par_iter()
        .map(|psi| velocity_field(psi, record.hbar, record.mass))
        .collect::<Result<Vec<_>>>()?;
    let inside = |x: T| x >= grid.x_min() && x < grid.x_max();

    let kept: Vec<usize> = (0..record.len()).filter(|k| k % keep_every == 0).collect();
    let nk = kept.len();
    let np = initial.len();
    let mut positions = vec![T::zero(); np * nk];
    let mut state: Vec<(T, bool)> = initial.iter().map(|&x| (x, !inside(x))).collect();
    let mut column = 0;
    let mut store = |state: &[(T, bool)], column: usize| {
        for (i, &(x, _)) in state.iter().enumerate() {
            positions[i * nk + column] = x;
        }
    };
    store(&state, column);
    column += 1;

    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    for k in 1..record.len() {
        let (a, b) = (&fields[k - 1], &fields[k]);
        let span = record.times[k] - record.times[k - 1];
        let stiff = span.abs() * lipschitz(a, grid.dx()).max(lipschitz(b, grid.dx()));
        let m = (stiff / T::lit(MAX_STEP_STIFFNESS))
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .clamp(1, MAX_SUBSTEPS);
        let mf = T::from_usize_lossy(m);
        let h = span / mf;
        let stage = |q: T| Stage::blend(&grid, a, b, q / mf);
        let mut start = stage(T::zero());
        for sub in 0..m {
            let sf = T::from_usize_lossy(sub);
            let mid = stage(sf + half);
            let end = stage(sf + T::one());
            state.par_iter_mut().filter(|(_, out)| !*out).for_each(|(x, out)| {
                let k1 = start.at(*x);
                let k2 = mid.at(*x + half * h * k1);
                let k3 = mid.at(*x + half * h * k2);
                let k4 = end.at(*x + h * k3);
                let next = *x + h * sixth * (k1 + T::lit(2.0) * (k2 + k3) + k4);
                if inside(next) {
                    *x = next;
                } else {
                    *out = true;
                }
            });
            start = end;
        }
        if k % keep_every == 0 {
            store(&state, column);
            column += 1;
        }
    }

    Ok(TrajectoryEnsemble {
        n_particles: np,
        times: kept.iter().map(|&k| record.times[k]).collect(),
        positions,
        seed,
        exited: state.into_iter().map(|(_, e)| e).collect(),
    })
}

/// Kolmogorov-Smirnov distance between the ensemble at time `t` and `|psi(t)|^2`.
pub fn equivariance_check<T: Real>(ensemble: &TrajectoryEnsemble<T>, record: &EvolutionRecord<T>, t: T) -> Result<T> {
    let k = ensemble
        .time_index(t, record.dt * T::lit(0.5))
        .ok_or(Error::MissingSnapshot(t.to_f64_lossy()))?;
    let psi = &record.states[record.index_at(t)?];
    ks_distance(&ensemble.snapshot(k), &psi.density())
}

/// KS distance between `samples` and the cell-constant distribution `rho`.
pub fn ks_distance<T: Real>(samples: &[T], rho: &SpatialField<T>) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::config("ensemble.size", "no particles left inside the domain"));
    }
    let g = rho.grid;
    let cdf = cell_cdf(&rho.values);
    let total = *cdf.last().unwrap();
    let model = |x: T| {
        let s = (x - g.x_min()) / g.dx() + T::lit(0.5);
        if s <= T::zero() {
            return T::zero();
        }
        let j = s.floor().to_usize().unwrap_or(usize::MAX);
        if j >= g.n() {
            return T::one();
        }
        let f = s - T::from_usize_lossy(j);
        (cdf[j] + f * (cdf[j + 1] - cdf[j])) / total
    };
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = T::from_usize_lossy(xs.len());
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model(x);
            let lo = T::from_usize_lossy(i) / n;
            let hi = T::from_usize_lossy(i + 1) / n;
            (hi - f).max(f - lo)
        })
        .fold(T::zero(), T::max))
}
