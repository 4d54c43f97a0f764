//! Dimensional-scaling models of electron correlation.
//!
//! * [`atom`]: N-electron atoms in the D → ∞ limit, mean-field and
//!   correlated, with the triangle-area difference between the two.
//! * [`mh`]: simple-cubic metallic hydrogen in the D → ∞ limit.
//! * [`d3`]: three-dimensional comparison formulas.
//! * [`bound`]: the ε_corr ≤ C·Δarea check over any result table.
//! * [`numerics`]: the root finders and minimizers the models share.

// `!(x > 0.0)` style checks deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod bound;
pub mod d3;
pub mod error;
pub mod mh;
pub mod numerics;
pub mod table;

pub use error::{Error, Result};
pub use table::{Cell, Column, SweepTable};
