//! The intertwiner of the quantum mutation on L²(A_i): the Heisenberg
//! operators on test functions, the grid realisation of K = K♯∘K′, and the
//! numerical checks built on them (commutation with the quantum mutation,
//! scalar composites along relations, the kernel of K⁻¹, Langlands
//! self-duality of the multiplier).

pub mod checks;
pub mod grid;
pub mod kernel;
pub mod operators;
pub mod wfunction;

pub use checks::{
    commutation_residual, default_tests, emit_difference_system, kernel_g, kernel_g_consistency, kernel_g_profile, langlands_residual,
    unitarity_defect, verify_relation_numeric, CommutationItem, DifferenceSystem, KernelG, RelationReport, DEFAULT_GRID,
};
pub use grid::{fourier_1d, inverse_fourier_1d, CenteredDft, FourierGrid, GridFunction};
pub use kernel::{GridIntertwiner, Lattice};
pub use operators::{heisenberg_residuals, old_realization_residual, DiffOperator, Heisenberg, HeisenbergResiduals};
pub use wfunction::{Poly, WFunction, WSum};
