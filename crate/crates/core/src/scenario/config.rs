use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{build_grid, to_momentum_rep, Grid1D};
use crate::schrodinger::{
    chirped_gaussian, harmonic_eigenstate, plane_wave, Potential, SplitStep,
};
use crate::{Grid, Wave, C64};

use super::{ANALYSES, SCENARIOS};

/// One scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub grid: GridSpec,
    pub state: StateSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    pub evolution: EvolutionSpec,
    #[serde(default)]
    pub physics: PhysicsSpec,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub analyses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub pauli: PauliSpec,
    #[serde(default)]
    pub moyal: MoyalSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

/// Gaussian packet `center`, `width` (position spread), `momentum`, `chirp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub momentum: f64,
    #[serde(default)]
    pub chirp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian {
        center: f64,
        width: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default)]
        chirp: f64,
    },
    /// Normalized `sum w_i g_i`; weights are `[re, im]` pairs.
    Superposition {
        packets: Vec<PacketSpec>,
        weights: Vec<[f64; 2]>,
    },
    Harmonic {
        level: usize,
        omega: f64,
    },
    PlaneWave {
        mode: i64,
    },
    /// Two-component spinor `(w_up g_up, w_down g_down)`, normalized.
    Spinor {
        up: PacketSpec,
        down: PacketSpec,
        weights: [[f64; 2]; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Free,
    Harmonic {
        omega: f64,
    },
    Barrier {
        height: f64,
        width: f64,
        center: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorKind {
    #[default]
    SplitStep,
    /// Sample the known solution at every time (free packets, plane waves,
    /// eigenstates of the configured well).
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    pub dt: f64,
    pub t_final: f64,
    /// Fine steps between snapshots.
    pub stride: usize,
    #[serde(default)]
    pub propagator: PropagatorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSpec {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicsSpec {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub particles: usize,
    pub seed: u64,
    /// Fine steps between the velocity snapshots the trajectories are
    /// integrated through; defaults to the evolution stride.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substride: Option<usize>,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            particles: 10_000,
            seed: 0,
            substride: None,
        }
    }
}

/// Symbol terms `[x power, p power, coefficient]`.
pub type Terms = Vec<(u32, u32, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub hbars: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_a")]
    pub a: Terms,
    #[serde(default = "default_b")]
    pub b: Terms,
}

fn default_window() -> f64 {
    2.0
}

fn default_a() -> Terms {
    vec![(3, 0, 1.0)]
}

fn default_b() -> Terms {
    vec![(0, 3, 1.0)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliSpec {
    /// Plane-wave mode of the `cos(pi/6) e^{ikx}, i sin(pi/6) e^{-ikx}` reference spinor.
    pub reference_mode: i64,
}

impl Default for PauliSpec {
    fn default() -> Self {
        Self { reference_mode: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoyalSpec {
    /// Liouville steps per snapshot interval.
    pub substeps: usize,
}

impl Default for MoyalSpec {
    fn default() -> Self {
        Self { substeps: 1 }
    }
}

/// Command-line overrides applied after parsing. They change results and are
/// therefore part of the echoed configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub hbar: Option<f64>,
}

/// Analyses that need a Wigner function of the evolving state.
const WIGNER_ANALYSES: [&str; 4] = ["momentum_cev", "wigner", "moyal_liouville", "pauli"];
const SCALAR_ONLY: [&str; 6] = [
    "bohm_fields",
    "momentum_cev",
    "wigner",
    "trajectories",
    "energy_symbol",
    "moyal_liouville",
];
const BAND_TOLERANCE: f64 = 1e-8;
const STEP_TOLERANCE: f64 = 1e-6;
const MAX_PARTICLES: usize = 1_000_000;

fn guard(name: &'static str, detail: impl Into<String>) -> Error {
    Error::Config {
        guard: name,
        detail: detail.into(),
    }
}

fn positive(name: &'static str, what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(guard(name, format!("{what} = {v} must be positive and finite")))
    }
}

impl ScenarioConfig {
    /// Parses TOML; syntax and field errors carry line and key information.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.ensemble.seed = s;
        }
        if let Some(h) = o.hbar {
            self.physics.hbar = h;
        }
    }

    pub fn is_spinor(&self) -> bool {
        matches!(self.state, StateSpec::Spinor { .. })
    }

    pub fn build_grid(&self) -> Result<Grid> {
        build_grid(self.grid.x_min, self.grid.x_max, self.grid.n)
    }

    pub fn potential(&self) -> Potential<f64> {
        match self.potential {
            PotentialSpec::Free => Potential::Free,
            PotentialSpec::Harmonic { omega } => Potential::Harmonic { omega },
            PotentialSpec::Barrier { height, width, center } => Potential::GaussianBarrier { height, width, center },
        }
    }

    /// Number of fine steps, `t_final / dt`.
    pub fn steps(&self) -> usize {
        (self.evolution.t_final / self.evolution.dt).round() as usize
    }

    /// `hbar` values the pipeline runs at: the sweep for `hbar_sweep`,
    /// otherwise the configured one.
    pub fn run_hbars(&self) -> Vec<f64> {
        match (&self.sweep, self.scenario.as_str()) {
            (Some(s), "hbar_sweep") => s.hbars.clone(),
            _ => vec![self.physics.hbar],
        }
    }

    pub fn trajectory_substride(&self) -> usize {
        self.ensemble.substride.unwrap_or(self.evolution.stride)
    }

    /// Checks every guard that can be checked without evolving.
    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(Error::Unknown {
                kind: "scenario",
                name: self.scenario.clone(),
                valid: SCENARIOS.join(", "),
            });
        }
        for (i, a) in self.analyses.iter().enumerate() {
            if !ANALYSES.contains(&a.as_str()) {
                return Err(Error::Unknown {
                    kind: "analysis",
                    name: a.clone(),
                    valid: ANALYSES.join(", "),
                });
            }
            if self.analyses[..i].contains(a) {
                return Err(guard("analyses.unique", format!("`{a}` requested twice")));
            }
        }
        if self.analyses.is_empty() {
            return Err(guard("analyses.nonempty", "request at least one analysis"));
        }

        let grid = self.build_grid()?;
        positive("physics.positive", "hbar", self.physics.hbar)?;
        positive("physics.positive", "mass", self.physics.mass)?;
        self.validate_evolution(&grid)?;
        self.validate_state(&grid)?;
        self.validate_analyses(&grid)
    }

    fn validate_evolution(&self, grid: &Grid) -> Result<()> {
        let ev = &self.evolution;
        positive("evolution.dt", "dt", ev.dt)?;
        if !(ev.t_final >= 0.0 && ev.t_final.is_finite()) {
            return Err(guard("evolution.t_final", "t_final must be finite and non-negative"));
        }
        let steps = self.steps();
        if (steps as f64 * ev.dt - ev.t_final).abs() > STEP_TOLERANCE * ev.t_final.max(ev.dt) {
            return Err(guard(
                "evolution.steps",
                format!("t_final = {} is not a whole number of dt = {} steps", ev.t_final, ev.dt),
            ));
        }
        if ev.stride == 0 || (steps > 0 && ev.stride > steps) {
            return Err(guard("evolution.stride", format!("stride must lie in 1..={steps}")));
        }
        let pot = self.potential();
        if let PotentialSpec::Harmonic { omega } = self.potential {
            positive("potential.omega", "omega", omega)?;
        }
        if let PotentialSpec::Barrier { width, .. } = self.potential {
            positive("potential.width", "width", width)?;
        }
        let mass = self.physics.mass;
        for h in self.run_hbars() {
            positive("physics.positive", "hbar", h)?;
            if ev.propagator == PropagatorKind::SplitStep {
                SplitStep::new(grid, &pot, ev.dt, h, mass)?;
            }
        }
        if ev.propagator == PropagatorKind::ClosedForm {
            let ok = match (&self.state, self.potential) {
                (StateSpec::Harmonic { omega, .. }, PotentialSpec::Harmonic { omega: w }) => *omega == w,
                (StateSpec::Harmonic { .. }, _) => false,
                (_, PotentialSpec::Free) => true,
                _ => false,
            };
            if !ok {
                return Err(guard(
                    "propagator.closed_form",
                    "closed-form evolution needs free packets/plane waves or an eigenstate of the configured well",
                ));
            }
        }
        Ok(())
    }

    fn validate_state(&self, grid: &Grid) -> Result<()> {
        let spinor_scenario = self.scenario == "pauli_mixed_spinor";
        if spinor_scenario != self.is_spinor() {
            return Err(guard(
                "state.kind",
                format!("scenario `{}` does not accept this state kind", self.scenario),
            ));
        }
        match &self.state {
            StateSpec::Superposition { packets, weights } => {
                if packets.is_empty() || packets.len() != weights.len() {
                    return Err(guard("state.weights", "one weight per packet is required"));
                }
            }
            StateSpec::Harmonic { omega, .. } => positive("state.omega", "omega", *omega)?,
            _ => {}
        }
        for h in self.run_hbars() {
            for psi in initial_components(&self.state, *grid, h, self.physics.mass)? {
                if psi.norm_sqr() <= 0.0 {
                    return Err(Error::ZeroNorm);
                }
                if self.analyses.iter().any(|a| WIGNER_ANALYSES.contains(&a.as_str())) {
                    check_band(&psi, h)?;
                }
            }
        }
        Ok(())
    }

    fn validate_analyses(&self, grid: &Grid) -> Result<()> {
        for a in &self.analyses {
            let applicable = match a.as_str() {
                "pauli" => self.is_spinor(),
                "classical_limit" => self.sweep.is_some(),
                s if SCALAR_ONLY.contains(&s) => !self.is_spinor(),
                _ => true,
            };
            if !applicable {
                return Err(guard(
                    "analysis.applicable",
                    format!("`{a}` does not apply to scenario `{}` with this state", self.scenario),
                ));
            }
        }
        if let Some(s) = &self.sweep {
            if s.hbars.len() < 2 {
                return Err(guard("sweep.hbars", "at least two hbar values are needed for a fit"));
            }
            for &h in &s.hbars {
                positive("sweep.hbars", "hbar", h)?;
            }
            positive("sweep.window", "window", s.window)?;
            if s.a.is_empty() || s.b.is_empty() {
                return Err(guard("sweep.symbols", "symbols a and b need at least one term"));
            }
        }
        if self.analyses.iter().any(|a| a == "trajectories") {
            let p = self.ensemble.particles;
            if p == 0 || p > MAX_PARTICLES {
                return Err(guard("ensemble.size", format!("particles must lie in 1..={MAX_PARTICLES}")));
            }
            let sub = self.trajectory_substride();
            if sub == 0 || !self.evolution.stride.is_multiple_of(sub) {
                return Err(guard("ensemble.substride", "substride must divide the evolution stride"));
            }
        }
        if self.moyal.substeps == 0 {
            return Err(guard("moyal.substeps", "substeps must be >= 1"));
        }
        if self.is_spinor() {
            let m = self.pauli.reference_mode.unsigned_abs() as usize;
            if m == 0 || 4 * m >= grid.n() {
                return Err(guard("pauli.reference_mode", "mode must be nonzero and inside the central half band"));
            }
        }
        Ok(())
    }
}

/// Rejects states with spectral weight outside the central half of the
/// momentum grid, where the on-grid Wigner transform is not exact.
fn check_band(psi: &Wave, hbar: f64) -> Result<()> {
    let phi = to_momentum_rep(psi, hbar);
    let n = phi.values.len();
    let peak = phi.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let outside = phi
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| *k < n / 4 || *k >= 3 * n / 4)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    if outside > BAND_TOLERANCE * peak {
        return Err(guard(
            "wigner.band",
            format!("spectrum reaches the outer half band ({:e} of peak); refine the grid", outside / peak),
        ));
    }
    Ok(())
}

fn weight(w: [f64; 2]) -> C64 {
    Complex::new(w[0], w[1])
}

fn packet(grid: Grid1D<f64>, p: &PacketSpec, hbar: f64) -> Result<Wave> {
    chirped_gaussian(grid, p.center, p.width, p.momentum, p.chirp, hbar)
}

/// Initial wave components (one, or two for a spinor), unnormalized for
/// spinors and normalized otherwise.
pub(crate) fn initial_components(state: &StateSpec, grid: Grid, hbar: f64, mass: f64) -> Result<Vec<Wave>> {
    Ok(match state {
        StateSpec::Gaussian {
            center,
            width,
            momentum,
            chirp,
        } => vec![chirped_gaussian(grid, *center, *width, *momentum, *chirp, hbar)?],
        StateSpec::Superposition { packets, weights } => {
            let parts = packets.iter().map(|p| packet(grid, p, hbar)).collect::<Result<Vec<_>>>()?;
            let mut sum = Wave::zeros(grid);
            for (w, p) in weights.iter().zip(&parts) {
                for (s, v) in sum.values.iter_mut().zip(&p.values) {
                    *s += weight(*w) * v;
                }
            }
            vec![sum.normalized()?]
        }
        StateSpec::Harmonic { level, omega } => vec![harmonic_eigenstate(grid, *level, *omega, mass, hbar)],
        StateSpec::PlaneWave { mode } => vec![plane_wave(grid, *mode)],
        StateSpec::Spinor { up, down, weights } => {
            let norm = (weight(weights[0]).norm_sqr() + weight(weights[1]).norm_sqr()).sqrt();
            if !(norm > 0.0) {
                return Err(Error::ZeroNorm);
            }
            vec![
                packet(grid, up, hbar)?.map(|v| v * weight(weights[0]) / norm),
                packet(grid, down, hbar)?.map(|v| v * weight(weights[1]) / norm),
            ]
        }
    })
}
