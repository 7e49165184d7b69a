//! Numerical kernel for non-symmetric Dirichlet forms on finite-dimensional
//! von Neumann algebras.
//!
//! The carrier is a direct sum of full complex matrix blocks equipped with a
//! weighted trace `τ(x) = Σ_k w_k Tr(x_k)`. On the trace Hilbert space
//! `L²(𝒜,τ)` the crate builds sesquilinear forms, their generators,
//! resolvents and semigroups, derivations with Lipschitz/divided-difference
//! functional calculus, and the explicit Dirichlet-form constructions from
//! derivation families with central coefficient matrices.
//!
//! Checks with a universal quantifier ("for all `x` in the Hermitian part")
//! are decided by seeded sampling plus local descent refinement; a failed
//! check always carries a witness that re-evaluates to a violation, while a
//! passing verdict is recorded as evidence (`SampledPass`), not proof.

pub mod algebra;
pub mod calculus;
pub mod constructions;
pub mod derivations;
pub mod error;
pub mod forms;
pub mod instance;
pub mod json;
pub mod linalg;
pub mod par;
pub mod sample;
pub mod semigroups;
pub mod triangle;
pub mod verdict;

pub use algebra::{Algebra, AlgebraRef, Element, ElementBasis};
pub use calculus::{MollifierFamily, ScalarFunction, SpectralDecomposition};
pub use constructions::CoefficientMatrix;
pub use derivations::Derivation;
pub use error::{Error, Result};
pub use forms::Form;
pub use semigroups::SuperOperator;
pub use verdict::{Status, Verdict, Witness};

/// Complex scalar used throughout: double precision, no arbitrary-precision mode.
pub type C64 = num_complex::Complex64;
