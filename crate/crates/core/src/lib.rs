//! Numerical laboratory for the two-term Weyl remainder of the planar disk.
//!
//! The disk eigenvalue count is compared with the count of shifted lattice
//! points in the dilated cusp domain `mu * Omega`, where
//! `Omega = { -1 <= t <= 1, max(0, -t) <= s <= g(t) }` and
//! `g(t) = (sqrt(1 - t^2) - t arccos t) / pi`.
//!
//! Modules:
//! - [`geometry`]: the profile `g`, curvature, inverse Gauss map, support
//!   function `H`, and the homogeneous cone function `F`.
//! - [`bessel`]: `J_n`, its zeros, zero counting, and the on-disk zero cache.
//! - [`lattice`]: exact `O(mu)` counting in `mu * Omega` and its brute-force oracle.
//! - [`spectral`]: Dirichlet/Neumann eigenvalue counts of the unit disk.
//! - [`oscillatory`]: the boundary oscillatory integral and its stationary-phase form.
//! - [`expsum`]: exponential sums and Weyl-Van der Corput differencing.
//! - [`analysis`]: remainder series, dyadic suprema and exponent fits.
//!
//! The geometric and quadrature code is generic over [`Real`]; the aliases
//! below fix it to `f64`, which is what every stated tolerance refers to.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bessel;
pub mod error;
pub mod expsum;
pub(crate) mod fd;
pub mod geometry;
pub mod lattice;
pub mod oscillatory;
pub mod scalar;
pub mod spectral;

pub use error::{Result, WeylError};
pub use scalar::Real;
pub use bessel::{BesselZero, ZeroCache, ZeroKind};
pub use lattice::{CountRecord, LatticeShift};
pub use spectral::{BoundaryCondition, SpectralCountRecord};

pub type BoundaryPoint = geometry::BoundaryPoint<f64>;
pub type ConeDirection = geometry::ConeDirection<f64>;
pub type ConePoint = geometry::ConePoint<f64>;
pub type HessianEigen = geometry::HessianEigen<f64>;
pub type OscIntegralResult = oscillatory::OscIntegralResult<f64>;
pub type StationaryPrediction = oscillatory::StationaryPrediction<f64>;
pub type PhasePair = expsum::PhasePair<f64>;
pub type DifferencedPair = expsum::DifferencedPair<f64>;
pub type HqResult = expsum::HqResult<f64>;
pub type DyadicFitResult = analysis::DyadicFitResult<f64>;
