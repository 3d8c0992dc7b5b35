// Negated float comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod copulas;
pub mod error;
pub mod marginals;
pub mod montecarlo;
pub mod numerics;
mod rng;
pub mod table;
pub mod zoc;

pub use error::{Result, ZocError};
