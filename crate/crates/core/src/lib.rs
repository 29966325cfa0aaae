//! Exact computation of scales, tidy subgroups, and flat-group data for
//! totally disconnected locally compact groups, on three worked models:
//! linear automorphisms of K^n for a local field K, isometries of the
//! (q+1)-regular tree, and the two-sided shift over GF(2). A fourth
//! component computes relative profinite completions of marked dense
//! subgroup pairs.
//!
//! All arithmetic is exact (rationals, rational functions, explicit prime
//! factorizations); the precision parameter is a certified watermark that
//! turns would-be truncation into a hard error.

pub mod error;
pub mod field;
pub mod flat;
pub mod index;
pub mod lattice;
pub mod model;
pub mod relprof;
pub mod scale;
pub mod shift;
pub mod tree;

pub use error::{Error, Result};
pub use field::{FieldElem, FieldKind, LocalFieldSpec};
pub use index::{Displacement, IndexValue};
pub use model::{ChainLimit, GroupModel, TidyCertificate};
