//! Exact arithmetic over Q: rationals, integer factorization, p-adic
//! valuations, places, points of the projective line and their Weil heights.

mod factor;
mod point;
mod rational;

pub use factor::{
    coprime_base, factor, factor_with_budget, is_prime, Factorization, PartialFactorization,
};
pub use point::{count_points, enumerate_points, weil_height, HeightValue, PointStream, ProjPoint};
pub use rational::{
    parse_rational, rational_height_magnitude, rational_to_string, valuation, Place, Rational,
};
