//! Shifted lattice points in the dilated cusp domain `mu * Omega`.
//!
//! A point `(t, s) = (m1 + a, m2 + b)` is counted when
//! `-mu <= t <= mu`, `s >= max(0, -t)` and `s <= mu g(t / mu)`, all tested with
//! plain binary64 comparisons (closed set, no epsilon). The column algorithm
//! and the brute-force oracle evaluate exactly the same expressions, so they
//! agree bit for bit, including at floating-point ties.

use crate::error::{Result, WeylError};
use crate::geometry::{cone_f_from_above, g_unchecked};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `mu` accepted by [`count`].
pub const MAX_MU: f64 = 1e6;
/// Largest `mu` accepted by [`count_bruteforce`].
pub const MAX_MU_BRUTEFORCE: f64 = 500.0;

/// Translation `(a, b)` of the integer lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeShift {
    pub a: f64,
    pub b: f64,
}

impl LatticeShift {
    /// `(0, -1/4)`, matching Dirichlet eigenvalues.
    pub const DIRICHLET: LatticeShift = LatticeShift { a: 0.0, b: -0.25 };
    /// `(0, -3/4)`, matching Neumann eigenvalues.
    pub const NEUMANN: LatticeShift = LatticeShift { a: 0.0, b: -0.75 };

    pub fn new(a: f64, b: f64) -> Self {
        LatticeShift { a, b }
    }
}

impl Default for LatticeShift {
    fn default() -> Self {
        Self::DIRICHLET
    }
}

/// Count and remainder at one `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub mu: f64,
    pub count: u64,
    /// `Area(Omega) mu^2 = mu^2 / 4`
    pub area_term: f64,
    /// `-mu / 2`
    pub correction: f64,
    /// `P(mu) = count - mu^2 / 4`
    pub remainder: f64,
    /// `Q(mu) = P(mu) + mu / 2`
    pub q: f64,
}

impl CountRecord {
    pub fn new(mu: f64, count: u64) -> Self {
        let area_term = AREA_OMEGA * mu * mu;
        let remainder = count as f64 - area_term;
        CountRecord { mu, count, area_term, correction: -0.5 * mu, remainder, q: remainder + 0.5 * mu }
    }
}

/// `Area(Omega)`; `int g = 3/4` minus the triangle under `max(0, -t)`.
pub const AREA_OMEGA: f64 = 0.25;

pub fn area_omega() -> f64 {
    AREA_OMEGA
}

fn check_mu(mu: f64, limit: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(WeylError::Domain(format!("mu = {mu} must be a finite non-negative number")));
    }
    if mu > limit {
        return Err(WeylError::guard("mu", mu, limit));
    }
    Ok(())
}

/// Is `(t, s)` in the closed set `mu * Omega`?
#[inline]
pub fn contains(mu: f64, t: f64, s: f64) -> bool {
    mu > 0.0 && t >= -mu && t <= mu && s >= 0.0f64.max(-t) && s <= mu * g_unchecked(t / mu)
}

/// Range of `m1` whose column can meet `mu * Omega`.
fn column_range(mu: f64, shift: LatticeShift) -> (i64, i64) {
    ((-mu - shift.a).ceil() as i64, (mu - shift.a).floor() as i64)
}

/// Smallest `m2` with `m2 + b >= max(0, -t)`.
fn column_bottom(t: f64, b: f64) -> i64 {
    let lower = 0.0f64.max(-t);
    let mut m = (lower - b).ceil() as i64;
    while m as f64 + b < lower {
        m += 1;
    }
    while (m - 1) as f64 + b >= lower {
        m -= 1;
    }
    m
}

/// Largest `m2` with `m2 + b <= mu g(t / mu)`.
fn column_top(mu: f64, t: f64, b: f64) -> i64 {
    let upper = mu * g_unchecked(t / mu);
    let mut m = (upper - b).floor() as i64;
    while m as f64 + b > upper {
        m -= 1;
    }
    while (m + 1) as f64 + b <= upper {
        m += 1;
    }
    m
}

/// Number of lattice points of column `m1` inside `mu * Omega`.
pub fn column_count(mu: f64, m1: i64, shift: LatticeShift) -> u64 {
    let t = m1 as f64 + shift.a;
    if !(mu > 0.0) || t < -mu || t > mu {
        return 0;
    }
    let lo = column_bottom(t, shift.b);
    let hi = column_top(mu, t, shift.b);
    if hi >= lo {
        (hi - lo + 1) as u64
    } else {
        0
    }
}

/// Exact number of points of `Z^2 + (a, b)` in `mu * Omega`, O(mu) columns.
pub fn count(mu: f64, shift: LatticeShift) -> Result<u64> {
    check_mu(mu, MAX_MU)?;
    if mu == 0.0 {
        return Ok(0);
    }
    let (first, last) = column_range(mu, shift);
    if last < first {
        return Ok(0);
    }
    Ok((0..(last - first + 1) as usize)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| column_count(mu, first + i as i64, shift))
        .sum())
}

/// O(mu^2) double loop over the bounding box, testing membership directly.
pub fn count_bruteforce(mu: f64, shift: LatticeShift) -> Result<u64> {
    check_mu(mu, MAX_MU_BRUTEFORCE)?;
    if mu == 0.0 {
        return Ok(0);
    }
    let lo1 = (-mu - 1.0 - shift.a).floor() as i64;
    let hi1 = (mu + 1.0 - shift.a).ceil() as i64;
    let lo2 = (-mu - 1.0 - shift.b).floor() as i64;
    let hi2 = (mu + 1.0 - shift.b).ceil() as i64;
    let mut n = 0;
    for m1 in lo1..=hi1 {
        let t = m1 as f64 + shift.a;
        for m2 in lo2..=hi2 {
            if contains(mu, t, m2 as f64 + shift.b) {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Count with the area term, the `-mu/2` correction and both remainders.
pub fn remainder(mu: f64, shift: LatticeShift) -> Result<CountRecord> {
    Ok(CountRecord::new(mu, count(mu, shift)?))
}

/// Sorted values `F(t, s)` of the lattice points with `lo < F <= hi`: the jump
/// locations of `count` on `(lo, hi]`, with multiplicity.
///
/// The set of points is selected with the same comparisons as [`count`], so
/// `count(hi) - count(lo)` equals the returned length.
pub fn jumps(lo: f64, hi: f64, shift: LatticeShift) -> Result<Vec<f64>> {
    check_mu(hi, MAX_MU)?;
    check_mu(lo, hi)?;
    if hi == 0.0 {
        return Ok(Vec::new());
    }
    let (first, last) = column_range(hi, shift);
    if last < first {
        return Ok(Vec::new());
    }
    let columns: Vec<Vec<f64>> = (0..(last - first + 1) as usize)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| column_jumps(lo, hi, first + i as i64, shift))
        .collect::<Result<_>>()?;
    let mut out: Vec<f64> = Vec::with_capacity(columns.iter().map(Vec::len).sum());
    for c in columns {
        out.extend(c);
    }
    out.par_sort_unstable_by(f64::total_cmp);
    Ok(out)
}

fn column_jumps(lo: f64, hi: f64, m1: i64, shift: LatticeShift) -> Result<Vec<f64>> {
    let t = m1 as f64 + shift.a;
    if t < -hi || t > hi {
        return Ok(Vec::new());
    }
    let bottom = column_bottom(t, shift.b);
    let top = column_top(hi, t, shift.b);
    let below = if lo > 0.0 && t >= -lo && t <= lo { column_top(lo, t, shift.b).max(bottom - 1) } else { bottom - 1 };
    let mut out = Vec::with_capacity((top - below).max(0) as usize);
    let mut upper = hi;
    for m2 in ((below + 1)..=top).rev() {
        let s = m2 as f64 + shift.b;
        if t == 0.0 && s == 0.0 {
            // the apex belongs to mu * Omega for every mu > 0
            out.push(lo.next_up());
            continue;
        }
        let f = cone_f_from_above(t, s, upper)?;
        // keep the value inside the window chosen by the exact comparisons
        let f = f.clamp(lo.next_up(), hi);
        out.push(f);
        upper = f;
    }
    Ok(out)
}
