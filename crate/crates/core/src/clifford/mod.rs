//! Orthogonal Clifford algebras `Cl(p,q)` with `p + q <= 4`, field-valued
//! multivectors, ideal elements and density elements, and the Schrödinger and
//! Pauli particles expressed inside the algebra.

mod algebra;
mod evolution;
mod field;
mod pauli;

pub use algebra::{
    blade_product, geometric_product, grade_of, reversion, scalar_part, CliffordSignature, Multivector,
    MAX_GENERATORS,
};
pub use evolution::{algebraic_evolution_residuals, schrodinger_embed, schrodinger_unembed, AlgebraicResiduals};
pub(crate) use evolution::algebraic_residuals_of;
pub use field::{density_element, purity_check, CliffordDensity, IdealElement, MultivectorField};
pub use pauli::{
    clifford_wigner, clifford_wigner_cev, euler_spinor_convert, euler_to_spinor, pauli_bohm_components,
    pauli_bohm_euler, pauli_embed, pauli_liouville_residual, pauli_unembed, spin_slice, spin_up_idempotent,
    spinor_purity, spinor_to_euler, EulerAngleField, EulerBohmFields, PauliBohmFields, PauliLiouville,
    PauliSpinorField, SpinForm, SpinSlice, POLE_THRESHOLD,
};
