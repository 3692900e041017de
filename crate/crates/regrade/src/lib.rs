//! regrade: exact-arithmetic analysis of regular group gradings on
//! associative algebras.
//!
//! The crate constructs twisted group algebras over cyclotomic scalar
//! rings, computes their commutation functions and commutation matrices,
//! decides simplicity questions, builds Grassmann envelopes, checks
//! graded polynomial identities, and classifies nondegenerate abelian
//! bicharacters into canonical tensor factors. All arithmetic is exact;
//! floating point appears only inside tests as an oracle.

pub mod classify;
pub mod cli;
pub mod cocycles;
pub mod comm_matrix;
pub mod commfun;
pub mod envelopes;
pub mod cyclo;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod twisted;

pub use error::{Error, Result};
