use num_complex::Complex;

use super::poly::PolySymbol;
use super::symbol::{BracketConfig, Backend, Plane};
use super::wigner::WignerField;
use crate::error::{Error, Result};
use crate::grid::freq_index;
use crate::schrodinger::{Potential, STABILITY_LIMIT};
use crate::scalar::Real;

/// Hamiltonian driving `dF/dt + {F, H}_MB = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseHamiltonian<T: Real> {
    /// Real polynomial symbol; steps exactly when of degree at most two.
    Polynomial(PolySymbol<T>),
    /// `p^2/2m + V(x)`.
    Separable { mass: T, potential: Potential<T> },
}

/// `h20 x^2 + h11 x p + h02 p^2 + h10 x + h01 p`, constants dropped.
#[derive(Debug, Clone, Copy)]
struct Quadratic<T> {
    h20: T,
    h11: T,
    h02: T,
    h10: T,
    h01: T,
}

impl<T: Real> PhaseHamiltonian<T> {
    pub fn free(mass: T) -> Self {
        Self::Separable {
            mass,
            potential: Potential::Free,
        }
    }

    pub fn harmonic(mass: T, omega: T) -> Self {
        Self::Separable {
            mass,
            potential: Potential::Harmonic { omega },
        }
    }

    fn quadratic(&self) -> Option<Quadratic<T>> {
        match self {
            Self::Polynomial(h) => {
                if h.degree().unwrap_or(0) > 2 || h.terms().any(|(_, c)| c.im != T::zero()) {
                    return None;
                }
                let c = |a, b| h.coeff(a, b).re;
                Some(Quadratic {
                    h20: c(2, 0),
                    h11: c(1, 1),
                    h02: c(0, 2),
                    h10: c(1, 0),
                    h01: c(0, 1),
                })
            }
            Self::Separable { mass, potential } => {
                let h20 = match potential {
                    Potential::Free => T::zero(),
                    Potential::Harmonic { omega } => T::lit(0.5) * *mass * *omega * *omega,
                    _ => return None,
                };
                Some(Quadratic {
                    h20,
                    h11: T::zero(),
                    h02: T::lit(0.5) / *mass,
                    h10: T::zero(),
                    h01: T::zero(),
                })
            }
        }
    }
}

type Mat<T> = [[T; 2]; 2];

/// Pulls `F` back along the exact flow: `F_new(z) = F_old(T z + w)` with
/// `T = exp(-A t)` and `w = -T v`, where `z(t) = exp(A t) z0 + v`.
fn pullback<T: Real>(q: &Quadratic<T>, t: T) -> (Mat<T>, [T; 2]) {
    let a = [[q.h11, T::lit(2.0) * q.h02], [-T::lit(2.0) * q.h20, -q.h11]];
    let c = [q.h01, -q.h10];
    let delta = q.h11 * q.h11 - T::lit(4.0) * q.h02 * q.h20;
    let two = T::lit(2.0);
    let (cc, ss, ic, is) = if delta < T::zero() {
        let w = (-delta).sqrt();
        let h = (w * t / two).sin();
        ((w * t).cos(), (w * t).sin() / w, (w * t).sin() / w, two * h * h / (w * w))
    } else if delta > T::zero() {
        let w = delta.sqrt();
        let h = (w * t / two).sinh();
        ((w * t).cosh(), (w * t).sinh() / w, (w * t).sinh() / w, two * h * h / (w * w))
    } else {
        (T::one(), t, t, t * t / two)
    };
    let ac = [a[0][0] * c[0] + a[0][1] * c[1], a[1][0] * c[0] + a[1][1] * c[1]];
    let v = [ic * c[0] + is * ac[0], ic * c[1] + is * ac[1]];
    let tm = [
        [cc - ss * a[0][0], -ss * a[0][1]],
        [-ss * a[1][0], cc - ss * a[1][1]],
    ];
    let w = [
        -(tm[0][0] * v[0] + tm[0][1] * v[1]),
        -(tm[1][0] * v[0] + tm[1][1] * v[1]),
    ];
    (tm, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shear<T> {
    /// `G(x, p) = F(x + s p, p)`.
    U(T),
    /// `G(x, p) = F(x, p + s x)`.
    L(T),
}

fn matmul<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let mut m = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Shears whose successive pullbacks compose to `F(T z)` for unimodular `T`.
fn shears<T: Real>(t: &Mat<T>) -> Vec<Shear<T>> {
    let eps = T::lit(1e-12);
    let [[a, b], [c, d]] = *t;
    if b.abs() < eps && c.abs() < eps {
        if (a - T::one()).abs() < eps && (d - T::one()).abs() < eps {
            return Vec::new();
        }
        let (s, co) = (T::FRAC_PI_4().sin(), T::FRAC_PI_4().cos());
        let r = [[co, -s], [s, co]];
        let rinv = [[co, s], [-s, co]];
        let mut out = shears(&r);
        out.extend(shears(&matmul(&rinv, t)));
        return out;
    }
    if c.abs() >= b.abs() {
        vec![Shear::U((a - T::one()) / c), Shear::L(c), Shear::U((d - T::one()) / c)]
    } else {
        vec![Shear::L((d - T::one()) / b), Shear::U(b), Shear::L((a - T::one()) / b)]
    }
}

fn apply_quadratic<T: Real>(f: &WignerField<T>, q: &Quadratic<T>, dt: T) -> WignerField<T> {
    let (tm, w) = pullback(q, dt);
    let plane = Plane::new(&f.psgrid);
    let (xg, pg) = (f.psgrid.xgrid, f.psgrid.pgrid);
    let mut v: Vec<Complex<T>> = f.values.iter().map(|&r| Complex::new(r, T::zero())).collect();
    let tol = T::lit(1e-15);
    if w[0].abs() > tol {
        plane.cols(&mut v, |_, c| c.copy_from_slice(&plane.sx.shift(c, w[0])));
    }
    if w[1].abs() > tol {
        plane.rows(&mut v, |_, r| r.copy_from_slice(&plane.sp.shift(r, w[1])));
    }
    for s in shears(&tm) {
        match s {
            Shear::U(s) => plane.cols(&mut v, |k, c| c.copy_from_slice(&plane.sx.shift(c, s * pg.x(k)))),
            Shear::L(s) => plane.rows(&mut v, |i, r| r.copy_from_slice(&plane.sp.shift(r, s * xg.x(i)))),
        }
    }
    WignerField {
        psgrid: f.psgrid,
        values: v.into_iter().map(|c| c.re).collect(),
        hbar: f.hbar,
    }
}

/// Multiplies each row, in the mixed `(X, y)` representation, by
/// `exp(-i tau [V(X + y/2) - V(X - y/2)] / hbar)`.
fn potential_kick<T: Real>(plane: &Plane<T>, f: &WignerField<T>, v: &mut [Complex<T>], potential: &Potential<T>, mass: T, tau: T) {
    let n = plane.n;
    let xg = f.psgrid.xgrid;
    let dx = xg.dx();
    let half = T::lit(0.5);
    plane.rows(v, |i, row| {
        let x = xg.x(i);
        plane.sp.inverse(row);
        for (mi, r) in row.iter_mut().enumerate() {
            let y = T::lit(freq_index(mi, n) as f64) * dx;
            let theta = -tau * (potential.eval(x + half * y, mass) - potential.eval(x - half * y, mass)) / f.hbar;
            *r = if mi == n / 2 {
                *r * theta.cos()
            } else {
                *r * Complex::new(theta.cos(), theta.sin())
            };
        }
        plane.sp.forward(row);
    });
}

fn separable_step<T: Real>(f: &WignerField<T>, mass: T, potential: &Potential<T>, dt: T) -> Result<WignerField<T>> {
    let xg = f.psgrid.xgrid;
    let vmax = (0..xg.n()).map(|i| potential.eval(xg.x(i), mass).abs()).fold(T::zero(), T::max);
    if !(dt * vmax / f.hbar < T::lit(STABILITY_LIMIT)) {
        return Err(Error::config(
            "moyal.stability",
            format!("dt*max|V|/hbar = {:e} exceeds {STABILITY_LIMIT}", (dt * vmax / f.hbar).to_f64_lossy()),
        ));
    }
    let plane = Plane::new(&f.psgrid);
    let pg = f.psgrid.pgrid;
    let mut v: Vec<Complex<T>> = f.values.iter().map(|&r| Complex::new(r, T::zero())).collect();
    let half = T::lit(0.5) * dt;
    potential_kick(&plane, f, &mut v, potential, mass, half);
    let s = -dt / mass;
    plane.cols(&mut v, |k, c| c.copy_from_slice(&plane.sx.shift(c, s * pg.x(k))));
    potential_kick(&plane, f, &mut v, potential, mass, half);
    Ok(WignerField {
        psgrid: f.psgrid,
        values: v.into_iter().map(|c| c.re).collect(),
        hbar: f.hbar,
    })
}

/// Advances `F` by `dt` under `dF/dt + {F, H}_MB = 0`. Quadratic Hamiltonians
/// use the exact classical flow; other separable ones need the spectral
/// backend, which splits kinetic shears from mixed-representation potential
/// phases.
pub fn moyal_liouville_step<T: Real>(
    f: &WignerField<T>,
    h: &PhaseHamiltonian<T>,
    dt: T,
    cfg: &BracketConfig<T>,
) -> Result<WignerField<T>> {
    if let Some(q) = h.quadratic() {
        return Ok(apply_quadratic(f, &q, dt));
    }
    match (cfg.backend, h) {
        (Backend::Spectral, PhaseHamiltonian::Separable { mass, potential }) => separable_step(f, *mass, potential, dt),
        (_, PhaseHamiltonian::Polynomial(_)) => Err(Error::Unsupported(
            "polynomial Hamiltonians above degree two have no exact Liouville flow".into(),
        )),
        (Backend::Series, _) => Err(Error::Unsupported(
            "non-quadratic Hamiltonians require the spectral backend".into(),
        )),
    }
}

/// Repeated [`moyal_liouville_step`], returning `F` after every step.
pub fn moyal_liouville_evolve<T: Real>(
    f: &WignerField<T>,
    h: &PhaseHamiltonian<T>,
    dt: T,
    steps: usize,
    cfg: &BracketConfig<T>,
) -> Result<Vec<WignerField<T>>> {
    let mut out = Vec::with_capacity(steps);
    let mut cur = f.clone();
    for _ in 0..steps {
        cur = moyal_liouville_step(&cur, h, dt, cfg)?;
        out.push(cur.clone());
    }
    Ok(out)
}
