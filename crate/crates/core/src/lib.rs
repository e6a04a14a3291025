//! Spectrahedral approximations of the copositive and completely positive cones.
//!
//! A symmetric matrix `A` is copositive when `xᵀ A x ≥ 0` on the nonnegative
//! orthant. Fixing a measure `μ` supported on the orthant with moments `y`,
//! the cones
//!
//! ```text
//! C_d = { A : M_d(f_A y) ⪰ 0 },   f_A(x) = xᵀ A x
//! ```
//!
//! decrease with `d` and intersect exactly in the copositive cone. Testing
//! `A ∈ C_d` is a single smallest-eigenvalue computation ([`outer`]). The
//! dual cones `C*_d` are generated by second moments of measures with
//! sum-of-squares densities `σ dμ` and increase towards the completely
//! positive cone ([`inner`]).
//!
//! All moment, localizing and generator matrices are assembled with exact
//! rational arithmetic; floating point enters only in [`spectra`].

pub mod cli;
pub mod error;
pub mod indexing;
pub mod inner;
pub mod measures;
pub mod momentmatrix;
pub mod oracles;
pub mod outer;
pub mod poly;
pub mod rational;
pub mod spectra;
pub mod symmetric;

pub use error::{Error, Result};
pub use indexing::{basis_size, enumerate_basis, IndexBasis, MultiIndex};
pub use inner::{
    dual_membership, generator_from_poly, generator_from_psd, pairing, pairing_matrices,
    DualMethod, DualOptions, DualOutcome, DualProblem, SosCertificate,
};
pub use measures::{
    affine_simplex_moments, exponential_moment, load_moments, simplex_moment, MeasureDescriptor,
    MomentSequence,
};
pub use momentmatrix::{localizing_matrix, moment_matrix, quadratic_form, shifted_sequence};
pub use oracles::{det_c1, exact_2x2, grid_copositivity, Copositivity, OracleVerdict};
pub use outer::{
    hierarchy_scan, membership, simplicial_cone_membership, slice_scan_2x2, Decision, GridAxis,
    HierarchyReport, MembershipOptions, MembershipVerdict, Scaling,
};
pub use poly::Polynomial;
pub use spectra::{min_eigenvalue, psd_projection, to_float, SymMatrixF};
pub use symmetric::SymMatrixQ;
