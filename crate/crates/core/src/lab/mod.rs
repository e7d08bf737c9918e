//! Sampling laboratory: explicit monads with exact coefficients, graded
//! section counts, and randomized degeneration scans over prime fields.
//!
//! Everything here is deterministic given a seed, including the parallel
//! execution lane, so reports can be compared byte for byte.

pub mod field;
pub mod forms;
pub mod linalg;
pub mod monad;
pub mod scan;

pub use crate::par::{set_worker_threads, Exec};
pub use field::{Field, LabError, PrimeField, Rationals};
pub use forms::{monomial_count, monomials, LinForm};
pub use linalg::{nullspace_field, rank_field, Mat};
pub use monad::{
    planted_monad, random_monad, AnyMonad, ExplicitMonad, FieldDesc, Planted,
};
pub use scan::{
    degeneration_scan, Classification, DegenerationReport, DimScan, ScanConfig,
};
