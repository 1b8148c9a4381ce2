//! Reduced fractions, rational levels, complete Gauss sums, continued-fraction
//! approximation and major-arc geometry.

mod approx;
mod arcs;
mod fraction;
mod gauss;
mod levels;

pub use approx::{convergents, farey_bracket, find_alpha_s, fractions_in_interval, Convergent};
pub use arcs::{
    locate_major_arc, verify_major_arc_disjointness, verify_major_arc_disjointness_with, ArcParams,
    DisjointnessOptions, DisjointnessReport, FractionPair,
};
pub use fraction::ReducedFraction;
pub use gauss::{gauss_sum, gauss_sums_all_b, level_max_gauss_modulus};
pub use levels::{enumerate_level, level_of, level_range, totient, RationalPairLevel, MAX_LEVEL};

/// Support radius of `χ_s`: `χ_s(t) = 0` once `|t| >= radius`.
pub fn chi_s_radius(s: u32) -> f64 {
    0.2 * 10f64.powi(-(s as i32))
}
