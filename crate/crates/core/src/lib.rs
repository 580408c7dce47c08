//! Bohmian quantum dynamics in three equivalent pictures.
//!
//! * configuration-space Bohm fields ([`bohm`], [`trajectories`]) built on a
//!   periodic spectral grid ([`grid`]) and a split-step propagator
//!   ([`schrodinger`]);
//! * the Moyal non-commutative phase space ([`moyal`]): Wigner transforms,
//!   star products, Moyal/Baker brackets and conditional expectation values;
//! * a representation-free orthogonal Clifford algebra engine ([`clifford`])
//!   with density elements, the paired algebraic evolution equations and the
//!   Pauli-particle Bohm variables.
//!
//! The numerical core is generic over the floating-point type through
//! [`Real`]; the exact-arithmetic parts (polynomial star products, multivector
//! algebra) are generic over any commutative ring such as `f64` or a rational
//! type. Concrete `f64` aliases live at the crate root.

pub mod bohm;
pub mod clifford;
pub mod error;
pub mod grid;
pub mod moyal;
pub mod scalar;
pub mod scenario;
pub mod schrodinger;
pub mod trajectories;

pub use error::{Error, Result};
pub use scalar::{Real, Ring, Sample};

pub use num_complex::Complex;

/// Double-precision complex sample.
pub type C64 = Complex<f64>;

pub type Grid = grid::Grid1D<f64>;
pub type Wave = grid::SpatialField<C64>;
pub type RealField = grid::SpatialField<f64>;
pub type Momentum = grid::MomentumField<f64>;
pub type PhaseGrid = grid::PhaseSpaceGrid<f64>;
pub type Polar = bohm::PolarField<f64>;
pub type Masked = bohm::MaskedField<f64>;
pub type Record = schrodinger::EvolutionRecord<f64>;
pub type Wigner = moyal::WignerField<f64>;
pub type Ensemble = trajectories::TrajectoryEnsemble<f64>;
pub type Spinor = clifford::PauliSpinorField<f64>;
pub type Euler = clifford::EulerAngleField<f64>;
