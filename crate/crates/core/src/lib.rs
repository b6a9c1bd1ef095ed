//! Exact string topology of finite dg models.
//!
//! A finite dg algebra `A` is contracted onto its cohomology, the
//! word-length induction produces `(ω, ð)` on `A ⊗ k⟨X⟩`, and loop space
//! homology, Hochschild cohomology and brane homology are read off twisted
//! complexes over a degree window. Everything is exact over ℚ.

pub mod algebra;
pub mod checks;
pub mod element;
pub mod error;
pub mod linalg;
pub mod loops;
pub mod model_io;
pub mod oracle;
pub mod scalar;
pub mod transfer;
pub mod twisted;
pub mod words;

pub use algebra::{Carrier, DGAlgebra, GradedBasis, ValidationReport};
pub use element::{Derivation, Space, TwistedElement};
pub use error::{Error, Result};
pub use linalg::SparseVec;
pub use scalar::Scalar;
pub use transfer::{Connection, HomotopyData};
pub use words::{Generators, Word};
