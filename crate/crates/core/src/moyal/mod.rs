//! Non-commutative phase space: Wigner transforms, star products, Moyal and
//! Baker brackets, phase-space evolution and conditional expectation values.

mod cev;
mod energy;
mod liouville;
mod poly;
mod symbol;
mod wigner;

pub use cev::{cev_momentum, cev_position, weak_value_momentum, wigner_cev_position, WeakValue};
pub use energy::{baker_with_hamiltonian, energy_symbol, energy_symbol_residual};
pub use liouville::{moyal_liouville_evolve, moyal_liouville_step, PhaseHamiltonian};
pub use poly::{bracket_poly, series_length, star_poly, BracketKind, PolySymbol, Starred};
pub use symbol::{
    bracket, classical_limit_report, loglog_slope, star_product, Backend, BracketConfig, ClassicalLimitReport,
    ClassicalLimitRow, PhaseSymbol,
};
pub use wigner::{cross_wigner, wigner_transform, WignerField};
pub(crate) use wigner::wigner_from_pairs;
