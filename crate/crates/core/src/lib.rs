//! Self-adjoint boundary conditions `A Y(a) + B Y(b) = 0` for differential
//! operators of order `m`, represented by the pair `(A:B)`.
//!
//! - [`matcore`]: complex dense kernels (eigen, SVD, rank, Haar unitaries).
//! - [`structure`]: the fixed matrices `C_m`, `V`, `Q4` and `Z`.
//! - [`csd`]: CS decomposition for nearly balanced partitions.
//! - [`bvpforms`]: verification, synthesis, recovery of `W`, canonical forms
//!   and classification.
//! - [`io`]: JSON matrix files.

pub mod bvpforms;
pub mod csd;
pub mod error;
pub mod io;
pub mod matcore;
pub mod structure;

pub use bvpforms::{
    block_rank_formula, canonical_decompose, check_self_adjoint, classify, construct_from_w,
    even_canonical_decompose, generate_random_even_pair, generate_random_pair, predicted_ranks,
    recover_w, BoundaryPair, CanonicalForm, Classification, EvenCanonicalForm, SelfAdjointReport,
};
pub use csd::{cs_decompose, cs_reconstruct, CsFactors};
pub use error::{Error, Result};
pub use matcore::{Complex64, ComplexMatrix, Tolerances};
pub use structure::{OrderSpec, Parity};
