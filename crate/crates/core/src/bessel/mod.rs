//! Bessel functions `J_n`, their zeros, and a persistent zero cache.

mod cache;
mod eval;
mod zeros;

pub use cache::{file_path, parse, write_table, ZeroCache, CACHE_ENV, CACHE_HEADER, CACHE_VERSION, DEFAULT_CACHE_DIR};
pub use eval::{bessel_j, bessel_j_and_derivative, bessel_jp, second_derivative, MAX_ARGUMENT, MAX_ORDER};
pub use zeros::{
    airy_guess, count_estimate, count_with, count_zeros_below, mcmahon_guess, ordinate, phase_bracket, zero,
    zeros_below, BesselZero, ZeroKind, MAX_ZERO,
};
