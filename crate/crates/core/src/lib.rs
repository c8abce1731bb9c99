//! Cross-intersecting set families over a small ground set `[n]`.
//!
//! The crate is organised bottom-up:
//!
//! - [`set`] and [`family`]: bit-indexed element sets, rank sets, families,
//!   the lexicographic order and the family text format.
//! - [`compress`]: the shifting operators `s_{i,j}`, left-compression and
//!   up-sets.
//! - [`genset`]: generating families, cells and the boundary surgery used to
//!   move mass between families of a cross-intersecting tuple.
//! - [`bounds`]: every closed-form quantity (stars, `M1`/`M2` families, the
//!   non-uniform maximum and its equality cases, classic bounds).
//! - [`oracle`]: exact maximisation of `sum |F_j|` by an L-initial profile
//!   search and by exhaustive enumeration, plus grid verification.
//! - [`extremal`]: constructors for the extremal tuples and an
//!   isomorphism-based classifier.

pub mod binomial;
pub mod bounds;
pub mod compress;
pub mod error;
pub mod extremal;
pub mod family;
pub mod genset;
pub mod oracle;
pub mod set;

pub use error::{Error, Result};
pub use family::{FamilyTuple, Instance, SetFamily};
pub use set::{ElementSet, RankSet, MAX_UNIVERSE};
