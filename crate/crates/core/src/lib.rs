//! Exact-arithmetic workbench for linear monads on cyclic projective varieties.
//!
//! A linear monad is a three-term complex of twists of the structure sheaf
//! (or of spinor bundles on a quadric) whose cohomology sheaf is the object
//! of study.  Everything here is computed over the integers or exact
//! rationals: dimension tables are intervals that only ever narrow, Chern
//! data lives in truncated polynomial rings over `BigRational`, and the
//! numeric laboratory instantiates monads with explicit linear-form matrices
//! over Q or a prime field.
//!
//! Module map:
//! * [`varieties`] - ambient variety descriptors and closed-form cohomology
//!   oracles for line bundles, twisted forms and spinor bundles.
//! * [`chern`] - truncated Chern series, K-classes and slopes.
//! * [`monads`] - monad specs, display sequences, duals, existence checks.
//! * [`engine`] - interval propagation along long exact sequences, derived
//!   cohomology tables, exterior-power replay, Beilinson-style dimension
//!   reconstruction.
//! * [`stability`] - slope-stability verdicts with machine-checkable
//!   certificates.
//! * [`lab`] - explicit monads over exact fields: sampling, section counts,
//!   degeneration scans.

pub mod chern;
pub mod engine;
pub mod lab;
pub mod monads;
pub(crate) mod par;
pub mod stability;
pub mod varieties;
