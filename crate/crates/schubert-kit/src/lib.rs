//! Exact combinatorics of affine flag varieties: root data and fundamental
//! groups, Iwahori-Weyl groups with Bruhat order and Demazure point counts,
//! truncated-series witnesses for non-reducedness, and a rank-2 lattice model
//! over finite fields that serves as an independent check on the counts.
//!
//! Everything is integer/exact arithmetic: no floats anywhere.

pub mod acceptance;
pub mod cartan;
pub mod demazure;
pub mod error;
pub mod fq;
pub mod lattice;
pub mod root_datum;
pub mod roots;
pub mod series;
pub mod snf;
pub mod weyl;
pub mod witness;

pub use error::{KitError, Result};
