//! Exact arithmetic for multiplicative dependence in orbits of rational maps
//! over Q: Weil and canonical heights, ramification, special forms, S-unit
//! lattices, exhaustive dependence searches, Zsigmondy sets and genera of
//! curves `F(X) = c G(X) Y^m`.

pub mod arith;
pub mod error;
pub mod genus;
pub mod heights;
pub mod interval;
pub mod lattice;
pub mod poly;
pub mod ratmap;
pub mod search;
pub mod unit_group;

pub use error::{Error, Result};
