//! Dirichlet and Neumann eigenvalue counts of the unit disk.
//!
//! The eigenvalues are `j_{n,k}^2` (Dirichlet) and `j'_{n,k}^2` (Neumann),
//! with multiplicity 2 for `n >= 1`. Counting is in terms of `mu = sqrt(lambda)`
//! with the strict inequality `mu_n < mu`. The Neumann count also contains the
//! constant eigenfunction (eigenvalue 0), which is the `n = 0` member of the
//! Neumann lattice family `F(n, k - 3/4)`.

use crate::bessel::{ZeroCache, ZeroKind};
use crate::error::{Result, WeylError};
use crate::geometry::cone_f;
use crate::lattice::{self, LatticeShift};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `mu` accepted by [`count_eigs`].
pub const MAX_MU: f64 = 1e5;
/// Validity cone `j_{n,k} > (1 + c0) n` for [`sta_gap`].
pub const STA_C0: f64 = 0.2;
/// Window half-width constant `C` in the disk/lattice comparison.
pub const COMPARE_C: f64 = 2.0;
/// Additive constant `C'` (times `mu^{1/3}`) in the disk/lattice comparison,
/// calibrated on `mu` in `[10, 400]` with a safety factor and frozen.
pub const COMPARE_C_PRIME: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    #[serde(rename = "dirichlet")]
    Dirichlet,
    #[serde(rename = "neumann")]
    Neumann,
}

impl BoundaryCondition {
    pub fn zero_kind(self) -> ZeroKind {
        match self {
            BoundaryCondition::Dirichlet => ZeroKind::J,
            BoundaryCondition::Neumann => ZeroKind::JPrime,
        }
    }

    /// `+1` for Dirichlet, `-1` for Neumann.
    pub fn sigma(self) -> f64 {
        match self {
            BoundaryCondition::Dirichlet => 1.0,
            BoundaryCondition::Neumann => -1.0,
        }
    }

    /// Lattice translation matching this boundary condition.
    pub fn lattice_shift(self) -> LatticeShift {
        match self {
            BoundaryCondition::Dirichlet => LatticeShift::DIRICHLET,
            BoundaryCondition::Neumann => LatticeShift::NEUMANN,
        }
    }

    /// Eigenvalues that do not come from a positive zero (the Neumann constant).
    fn extra_modes(self) -> u64 {
        match self {
            BoundaryCondition::Dirichlet => 0,
            BoundaryCondition::Neumann => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            _ => Err(WeylError::Domain(format!("unknown boundary condition {s:?}"))),
        }
    }
}

/// Eigenvalue count with the two-term Weyl normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCountRecord {
    pub mu: f64,
    pub count: u64,
    /// `mu^2 / 4`
    pub area_term: f64,
    /// `mu / 2`
    pub boundary_term: f64,
    /// `count - mu^2/4 + sigma mu/2`
    pub remainder: f64,
}

impl SpectralCountRecord {
    pub fn new(mu: f64, count: u64, bc: BoundaryCondition) -> Self {
        let area_term = 0.25 * mu * mu;
        let boundary_term = 0.5 * mu;
        SpectralCountRecord {
            mu,
            count,
            area_term,
            boundary_term,
            remainder: count as f64 - area_term + bc.sigma() * boundary_term,
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(WeylError::Domain(format!("mu = {mu} must be positive")));
    }
    if mu > MAX_MU {
        return Err(WeylError::guard("mu", mu, MAX_MU));
    }
    Ok(())
}

fn multiplicity(n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        2
    }
}

/// `#{eigenvalues with mu_n < mu}` with multiplicity, using (and filling) `cache`.
pub fn count_eigs_with(cache: &ZeroCache, mu: f64, bc: BoundaryCondition) -> Result<u64> {
    check_mu(mu)?;
    let kind = bc.zero_kind();
    // no zero of order n lies below n, so orders n >= mu contribute nothing
    let orders = mu.ceil() as u32;
    let total: u64 = (0..orders)
        .into_par_iter()
        .map(|n| Ok(multiplicity(n) * cache.count_zeros_below(n, mu, kind)?))
        .sum::<Result<u64>>()?;
    Ok(total + bc.extra_modes())
}

/// [`count_eigs_with`] on a throwaway in-memory cache.
pub fn count_eigs(mu: f64, bc: BoundaryCondition) -> Result<u64> {
    count_eigs_with(&ZeroCache::in_memory(), mu, bc)
}

pub fn weyl_remainder_with(cache: &ZeroCache, mu: f64, bc: BoundaryCondition) -> Result<SpectralCountRecord> {
    Ok(SpectralCountRecord::new(mu, count_eigs_with(cache, mu, bc)?, bc))
}

pub fn weyl_remainder(mu: f64, bc: BoundaryCondition) -> Result<SpectralCountRecord> {
    weyl_remainder_with(&ZeroCache::in_memory(), mu, bc)
}

/// Distinct eigenvalue roots `mu_j < mu` with multiplicities, sorted. These are
/// the jump points of the counting function. The Neumann constant mode is
/// reported as `(0.0, 1)`.
pub fn spectrum_below(cache: &ZeroCache, mu: f64, bc: BoundaryCondition) -> Result<Vec<(f64, u64)>> {
    check_mu(mu)?;
    let kind = bc.zero_kind();
    let orders = mu.ceil() as u32;
    let per_order: Vec<Vec<f64>> = (0..orders)
        .into_par_iter()
        .map(|n| cache.zeros_below(n, mu, kind))
        .collect::<Result<_>>()?;
    let mut out: Vec<(f64, u64)> = Vec::with_capacity(per_order.iter().map(Vec::len).sum::<usize>() + 1);
    if bc.extra_modes() > 0 {
        out.push((0.0, bc.extra_modes()));
    }
    for (n, zs) in per_order.into_iter().enumerate() {
        let m = multiplicity(n as u32);
        out.extend(zs.into_iter().map(|z| (z, m)));
    }
    out.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// `j_{n,k} - F(n, k - 1/4)` inside the cone `j_{n,k} > 1.2 n`.
pub fn sta_gap_with(cache: &ZeroCache, n: u32, k: u32) -> Result<f64> {
    let j = cache.zero_value(n, k, ZeroKind::J)?;
    if !(j > (1.0 + STA_C0) * f64::from(n)) {
        return Err(WeylError::Precondition(format!(
            "j_{{{n},{k}}} = {j} is not above (1 + {STA_C0}) n"
        )));
    }
    Ok(j - cone_f(f64::from(n), f64::from(k) - 0.25)?)
}

pub fn sta_gap(n: u32, k: u32) -> Result<f64> {
    sta_gap_with(&ZeroCache::in_memory(), n, k)
}

/// Disk count against the lattice count at one `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountComparison {
    pub mu: f64,
    pub eig_count: u64,
    pub lattice_count: u64,
    /// `|eig_count - lattice_count|`
    pub diff: u64,
    /// `3 (N(mu + C/mu) - N(mu - C/mu)) + C' mu^{1/3}`
    pub bound: f64,
}

impl CountComparison {
    pub fn holds(&self) -> bool {
        (self.diff as f64) <= self.bound
    }
}

/// Dirichlet disk count versus the `(0, -1/4)` lattice count, with the
/// window bound built from lattice counts at `mu +- C/mu`.
pub fn compare_counts_with(cache: &ZeroCache, mu: f64, c: f64, c_prime: f64) -> Result<CountComparison> {
    if !(mu >= 10.0) {
        return Err(WeylError::Precondition(format!("compare_counts needs mu >= 10, got {mu}")));
    }
    if !(c > 0.0) || !(c_prime >= 0.0) {
        return Err(WeylError::Domain("constants C > 0 and C' >= 0 required".into()));
    }
    let shift = LatticeShift::DIRICHLET;
    let eig_count = count_eigs_with(cache, mu, BoundaryCondition::Dirichlet)?;
    let lattice_count = lattice::count(mu, shift)?;
    let window = lattice::count(mu + c / mu, shift)? - lattice::count(mu - c / mu, shift)?;
    Ok(CountComparison {
        mu,
        eig_count,
        lattice_count,
        diff: eig_count.abs_diff(lattice_count),
        bound: 3.0 * window as f64 + c_prime * mu.cbrt(),
    })
}

pub fn compare_counts(mu: f64, c: f64) -> Result<CountComparison> {
    compare_counts_with(&ZeroCache::in_memory(), mu, c, COMPARE_C_PRIME)
}
