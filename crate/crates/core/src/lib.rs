//! Construction, enumeration and verification of biplanes, the symmetric
//! 2-(v, k, 2) designs.
//!
//! The toolkit works on incidence matrices in canonical form: the first `k`
//! rows and columns are fixed, and the remaining rows are drawn from the
//! *2-space*, the 0/1 vectors meeting every header row in exactly two
//! points. On top of that it provides level-set classification of 2-space
//! vectors, invariant-seeded completion search, canonical certificates and
//! automorphism group orders, and a small on-disk catalog.

pub mod autgroup;
pub mod bitrow;
pub mod canonical;
pub mod catalog;
pub mod construct;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod levelsets;
pub mod matrix;
pub mod params;
pub mod partial;
pub mod stats;
pub mod twospace;

pub use bitrow::BitRow;
pub use canonical::{canonical_header, check_lemma_zero_pattern, BlockIndex, CanonicalHeader};
pub use error::{Error, Result};
pub use generators::{build_generator, BinMatrix, Generator};
pub use matrix::{IncidenceMatrix, MatrixStats, Violation};
pub use params::{params_from_order, BiplaneParams, MAX_ORDER};
pub use partial::PartialMatrix;
pub use twospace::TwoSpace;
