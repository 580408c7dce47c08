//! Scenario files, the analysis registry and the run pipeline
//! (build, evolve, extract, analyze, emit).
//!
//! A run is a pure function of its configuration: [`run_scenario`] returns
//! the report and every output file as bytes, and [`RunOutput::write`] puts
//! them on disk in a fixed order.

mod config;
mod output;
mod run;

pub use config::{
    EnsembleSpec, EvolutionSpec, GridSpec, MoyalSpec, Overrides, PacketSpec, PauliSpec, PhysicsSpec, PotentialSpec,
    PropagatorKind, ScenarioConfig, StateSpec, SweepSpec, Terms,
};
pub use output::{
    decode_mbw, encode_mbw, AnalysisEntry, Check, OutputFile, RunOutput, RunReport, MBW_MAGIC, PLOT_FILE, REPORT_FILE,
};
pub use run::{bounds, run_scenario};

use crate::error::{Error, Result};

/// Version stamped into reports and data-file headers.
pub const FORMAT_VERSION: u32 = 1;

pub const SCENARIOS: [&str; 6] = [
    "free_gaussian",
    "harmonic_eigenstate",
    "two_gaussian_interference",
    "pauli_mixed_spinor",
    "hbar_sweep",
    "moyal_vs_schrodinger",
];

pub const ANALYSES: [&str; 10] = [
    "bohm_fields",
    "residuals",
    "clifford",
    "momentum_cev",
    "wigner",
    "trajectories",
    "energy_symbol",
    "moyal_liouville",
    "pauli",
    "classical_limit",
];

const BUILTIN: [&str; 6] = [
    include_str!("../../../../configs/free_gaussian.toml"),
    include_str!("../../../../configs/harmonic_eigenstate.toml"),
    include_str!("../../../../configs/two_gaussian_interference.toml"),
    include_str!("../../../../configs/pauli_mixed_spinor.toml"),
    include_str!("../../../../configs/hbar_sweep.toml"),
    include_str!("../../../../configs/moyal_vs_schrodinger.toml"),
];

/// TOML text of a built-in scenario.
pub fn builtin_config(name: &str) -> Result<&'static str> {
    SCENARIOS
        .iter()
        .position(|s| *s == name)
        .map(|i| BUILTIN[i])
        .ok_or_else(|| Error::Unknown {
            kind: "scenario",
            name: name.to_string(),
            valid: SCENARIOS.join(", "),
        })
}

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::parse(builtin_config(name)?)
}
