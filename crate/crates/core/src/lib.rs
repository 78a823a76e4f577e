//! Opposite series of tame power series: detection of finite rational
//! accumulation, the opposite denominator, boundary poles of rational series
//! and the duality between the two.
//!
//! Verdicts rest on exact arithmetic over `Q`, `Q(i)` and real cyclotomic
//! fields. Limits are located with multi-precision sequences and then
//! reconstructed exactly.

// index loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod corpus;
pub mod duality;
pub mod error;
pub mod field;
pub mod groups;
pub mod hp;
pub mod linalg;
pub mod numfield;
pub mod operators;
pub mod opposite;
pub mod poles;
pub mod poly;
pub mod ratfn;
pub mod roots;
pub mod sequence;
pub mod subsets;

pub use error::{Error, Result};
