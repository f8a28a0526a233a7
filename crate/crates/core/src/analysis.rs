//! Remainder series, dyadic suprema and log-log exponent fits.
//!
//! Both remainders are step functions minus a quadratic:
//! `Q(mu) = N_Omega(mu) - mu^2/4 + mu/2` for the lattice and
//! `R(mu) = N_disk(mu) - mu^2/4 + sigma mu/2` for the disk. Between two jumps
//! the step part is constant and the quadratic is monotone (for `mu > 1`), so
//! the supremum of `|Q|` over a window is attained at a one-sided limit at a
//! jump or at a window end. The exact routines below walk the sorted jump
//! set instead of sampling.

use crate::bessel::ZeroCache;
use crate::error::{Result, WeylError};
use crate::lattice::{self, LatticeShift};
use crate::scalar::{lit, Real};
use crate::spectral::{self, BoundaryCondition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest `mu_max` for lattice series.
pub const MAX_MU_LATTICE: f64 = 1e5;
/// Largest `mu_max` for spectral series.
pub const MAX_MU_SPECTRAL: f64 = 2e4;
/// Largest number of jumps a materialised series may bracket.
pub const MAX_SERIES_JUMPS: f64 = 5e6;
/// Largest `mu` accepted by [`ept_average`].
pub const MAX_MU_EPT: f64 = 5e3;
/// Offset of the samples on either side of a jump.
pub const JUMP_OFFSET: f64 = 1e-9;
/// Default seed of the random sampling.
pub const DEFAULT_SEED: u64 = 17;
/// Frozen bound on `|Q(mu)| / mu^{2/3}` over `[2^6, 2^14]`.
pub const THEOREM12_FIXTURE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    /// `Q(mu) = P_Omega(mu) + mu/2` for the `(0, -1/4)` lattice.
    #[serde(rename = "lattice_q")]
    LatticeQ,
    /// Disk remainder `R(mu)`.
    #[serde(rename = "spectral_r")]
    SpectralR,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::LatticeQ => "lattice_q",
            SeriesKind::SpectralR => "spectral_r",
        }
    }
}

impl std::str::FromStr for SeriesKind {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lattice_q" | "lattice" | "q" => Ok(SeriesKind::LatticeQ),
            "spectral_r" | "spectral" | "r" => Ok(SeriesKind::SpectralR),
            _ => Err(WeylError::Domain(format!("unknown series kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPolicy {
    pub n_random: usize,
    pub seed: u64,
    pub jump_offset: f64,
    /// Number of jumps bracketed.
    pub jumps: usize,
    pub boundary: BoundaryCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderSeries {
    pub kind: SeriesKind,
    pub mu_min: f64,
    pub mu_max: f64,
    /// `(mu, value)`, sorted by `mu`.
    pub samples: Vec<(f64, f64)>,
    pub policy: SamplingPolicy,
}

/// `count - mu^2/4 + sign mu/2`, rounded exactly as the count records do.
#[inline]
fn remainder_value(count: u64, mu: f64, sign: f64) -> f64 {
    (count as f64 - 0.25 * mu * mu) + sign * (0.5 * mu)
}

fn boundary_sign(kind: SeriesKind, bc: BoundaryCondition) -> f64 {
    match kind {
        SeriesKind::LatticeQ => 1.0,
        SeriesKind::SpectralR => bc.sigma(),
    }
}

/// Count at the left end plus the jumps after it. The lattice count is
/// right-continuous (a jump at `z` is included at `z`), the disk count
/// left-continuous (strict inequality `mu_j < mu`).
struct StepFunction {
    base: u64,
    jumps: Vec<(f64, u64)>,
    right_continuous: bool,
}

/// Step function of the counting problem on `[lo, hi]`.
fn step_function(cache: &ZeroCache, kind: SeriesKind, bc: BoundaryCondition, lo: f64, hi: f64) -> Result<StepFunction> {
    match kind {
        SeriesKind::LatticeQ => {
            let base = lattice::count(lo, LatticeShift::DIRICHLET)?;
            let jumps = lattice::jumps(lo, hi, LatticeShift::DIRICHLET)?.into_iter().map(|f| (f, 1)).collect();
            Ok(StepFunction { base, jumps, right_continuous: true })
        }
        SeriesKind::SpectralR => {
            // eigenvalues with mu_j < lo are in the base, the rest are jumps
            let all = if hi > 0.0 { spectral::spectrum_below(cache, hi.next_up(), bc)? } else { Vec::new() };
            let split = all.partition_point(|z| z.0 < lo);
            let base = all[..split].iter().map(|z| z.1).sum();
            Ok(StepFunction { base, jumps: all[split..].to_vec(), right_continuous: false })
        }
    }
}

fn check_range(kind: SeriesKind, mu_min: f64, mu_max: f64) -> Result<()> {
    if !(mu_min >= 0.0 && mu_max >= mu_min && mu_max.is_finite()) {
        return Err(WeylError::Domain(format!("need 0 <= mu_min <= mu_max, got [{mu_min}, {mu_max}]")));
    }
    let limit = match kind {
        SeriesKind::LatticeQ => MAX_MU_LATTICE,
        SeriesKind::SpectralR => MAX_MU_SPECTRAL,
    };
    if mu_max > limit {
        return Err(WeylError::guard("mu_max", mu_max, limit));
    }
    Ok(())
}

/// [`sample_series_with`] on a fresh in-memory cache, Dirichlet, default seed.
pub fn sample_series(kind: SeriesKind, mu_min: f64, mu_max: f64, n_random: usize) -> Result<RemainderSeries> {
    sample_series_with(&ZeroCache::in_memory(), kind, BoundaryCondition::Dirichlet, mu_min, mu_max, n_random, DEFAULT_SEED)
}

/// Samples at both ends, at `n_random` uniform points of `[mu_min, mu_max]`
/// and at every jump `+- 1e-9` (clamped to the range).
pub fn sample_series_with(
    cache: &ZeroCache,
    kind: SeriesKind,
    bc: BoundaryCondition,
    mu_min: f64,
    mu_max: f64,
    n_random: usize,
    seed: u64,
) -> Result<RemainderSeries> {
    check_range(kind, mu_min, mu_max)?;
    // jumps up to mu_max are about mu_max^2/4 - mu_min^2/4 in number
    let expected = 0.25 * (mu_max * mu_max - mu_min * mu_min);
    if expected > MAX_SERIES_JUMPS {
        return Err(WeylError::Budget(format!(
            "about {expected:.0} jumps in [{mu_min}, {mu_max}] (limit {MAX_SERIES_JUMPS})"
        )));
    }
    let sign = boundary_sign(kind, bc);
    let mut policy = SamplingPolicy { n_random, seed, jump_offset: JUMP_OFFSET, jumps: 0, boundary: bc };
    if mu_min == mu_max {
        let value = remainder_at(cache, kind, bc, mu_min)?;
        return Ok(RemainderSeries { kind, mu_min, mu_max, samples: vec![(mu_min, value)], policy });
    }
    let step = step_function(cache, kind, bc, mu_min, mu_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<f64> = (0..n_random).map(|_| rng.gen_range(mu_min..=mu_max)).collect();
    points.push(mu_min);
    points.push(mu_max);
    for &(z, _) in &step.jumps {
        if z > mu_max {
            continue;
        }
        points.push((z - JUMP_OFFSET).max(mu_min));
        points.push((z + JUMP_OFFSET).min(mu_max));
    }
    policy.jumps = step.jumps.iter().filter(|z| z.0 <= mu_max).count();
    points.sort_by(f64::total_cmp);
    // walk the sorted points and the sorted jumps together
    let mut samples = Vec::with_capacity(points.len());
    let mut idx = 0usize;
    let mut count = step.base;
    for x in points {
        while idx < step.jumps.len() && (step.jumps[idx].0 < x || (step.right_continuous && step.jumps[idx].0 == x)) {
            count += step.jumps[idx].1;
            idx += 1;
        }
        samples.push((x, remainder_value(count, x, sign)));
    }
    Ok(RemainderSeries { kind, mu_min, mu_max, samples, policy })
}

/// Remainder at a single point, recomputed from the counting functions.
pub fn remainder_at(cache: &ZeroCache, kind: SeriesKind, bc: BoundaryCondition, mu: f64) -> Result<f64> {
    match kind {
        SeriesKind::LatticeQ => Ok(lattice::remainder(mu, LatticeShift::DIRICHLET)?.q),
        SeriesKind::SpectralR => {
            if mu == 0.0 {
                return Ok(0.0);
            }
            Ok(spectral::weyl_remainder_with(cache, mu, bc)?.remainder)
        }
    }
}

/// One dyadic window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicWindow<T> {
    pub lo: T,
    pub hi: T,
    pub sup_abs: T,
    pub rms: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicFitResult<T> {
    pub windows: Vec<DyadicWindow<T>>,
    /// Least-squares slope of `log2 sup_abs` against `log2` of the window centre.
    pub slope: T,
    pub intercept: T,
    pub r2: T,
    /// The same fit for the RMS values.
    pub rms_slope: T,
}

/// Least-squares line `y = slope x + intercept` and `r^2`.
pub fn least_squares<T: Real>(points: &[(T, T)]) -> Result<(T, T, T)> {
    if points.len() < 2 {
        return Err(WeylError::DegenerateFit(format!("{} points", points.len())));
    }
    let n = T::from_usize(points.len()).expect("point count");
    let mx = points.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = points.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxx = points.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = points.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let syy = points.iter().fold(T::zero(), |a, p| a + (p.1 - my) * (p.1 - my));
    if !(sxx > T::zero()) || !points.iter().all(|p| p.0.is_finite() && p.1.is_finite()) {
        return Err(WeylError::DegenerateFit("abscissae coincide or values are not finite".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    Ok((slope, intercept, r2))
}

/// Fit over per-window values; errors if a window statistic is zero.
pub fn fit_windows<T: Real>(windows: Vec<DyadicWindow<T>>) -> Result<DyadicFitResult<T>> {
    if windows.len() < 4 {
        return Err(WeylError::DegenerateFit(format!("{} dyadic windows, need at least 4", windows.len())));
    }
    let center = |w: &DyadicWindow<T>| ((w.lo + w.hi) / lit(2.0)).log2();
    let sup: Vec<(T, T)> = windows.iter().map(|w| (center(w), w.sup_abs.log2())).collect();
    let rms: Vec<(T, T)> = windows.iter().map(|w| (center(w), w.rms.log2())).collect();
    if windows.iter().any(|w| !(w.sup_abs > T::zero())) {
        return Err(WeylError::DegenerateFit("a window has zero supremum".into()));
    }
    let (slope, intercept, r2) = least_squares(&sup)?;
    let rms_slope = least_squares(&rms).map(|f| f.0).unwrap_or_else(|_| T::nan());
    Ok(DyadicFitResult { windows, slope, intercept, r2, rms_slope })
}

/// Complete dyadic windows `[2^j, 2^{j+1}]` inside `[lo, hi]`.
pub fn dyadic_windows(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if !(lo > 0.0 && hi > lo) {
        return Vec::new();
    }
    let mut j = lo.log2().ceil() as i32;
    let mut out = Vec::new();
    while 2f64.powi(j + 1) <= hi {
        out.push((2f64.powi(j), 2f64.powi(j + 1)));
        j += 1;
    }
    out
}

/// Dyadic sup (and sample RMS) fit of a sampled series over the complete
/// dyadic windows of its range. Samples with
/// `lo <= mu < hi` belong to a window; the last window also takes `mu = hi`.
pub fn dyadic_fit(series: &RemainderSeries) -> Result<DyadicFitResult<f64>> {
    let ranges = dyadic_windows(series.mu_min, series.mu_max);
    let n = ranges.len();
    let mut windows = Vec::with_capacity(n);
    for (i, &(lo, hi)) in ranges.iter().enumerate() {
        let inside = series.samples.iter().filter(|s| s.0 >= lo && (s.0 < hi || (i + 1 == n && s.0 == hi)));
        let (mut sup, mut sq, mut k) = (0.0f64, 0.0, 0usize);
        for s in inside {
            sup = sup.max(s.1.abs());
            sq += s.1 * s.1;
            k += 1;
        }
        if k == 0 {
            return Err(WeylError::DegenerateFit(format!("no samples in [{lo}, {hi}]")));
        }
        windows.push(DyadicWindow { lo, hi, sup_abs: sup, rms: (sq / k as f64).sqrt() });
    }
    fit_windows(windows)
}

/// `int_0^d (c - p1 u - u^2/4)^2 du`: the square of the remainder on a
/// segment where the count is constant, expanded about the left end.
fn segment_square(c: f64, p1: f64, d: f64) -> f64 {
    let d2 = d * d;
    let d3 = d2 * d;
    c * c * d - c * p1 * d2 - c * d3 / 6.0 + p1 * p1 * d3 / 3.0 + p1 * d2 * d2 / 8.0 + d2 * d3 / 80.0
}

/// Accumulates the exact sup and integral of the square over one window.
struct WindowAccumulator {
    lo: f64,
    hi: f64,
    sign: f64,
    sup: f64,
    square: f64,
    x: f64,
    count: u64,
}

impl WindowAccumulator {
    fn new(lo: f64, hi: f64, count_at_lo: u64, sign: f64) -> Self {
        let v = remainder_value(count_at_lo, lo, sign);
        WindowAccumulator { lo, hi, sign, sup: v.abs(), square: 0.0, x: lo, count: count_at_lo }
    }

    /// Advance to the jump at `z` (inside the window) of size `m`.
    fn jump(&mut self, z: f64, m: u64) {
        self.close_segment(z);
        self.count += m;
        self.sup = self.sup.max((remainder_value(self.count, z, self.sign)).abs());
    }

    fn close_segment(&mut self, z: f64) {
        let c = remainder_value(self.count, self.x, self.sign);
        self.square += segment_square(c, 0.5 * self.x - 0.5 * self.sign, z - self.x);
        self.sup = self.sup.max((remainder_value(self.count, z, self.sign)).abs());
        self.x = z;
    }

    fn finish(mut self) -> DyadicWindow<f64> {
        let hi = self.hi;
        self.close_segment(hi);
        DyadicWindow { lo: self.lo, hi, sup_abs: self.sup, rms: (self.square / (hi - self.lo)).sqrt() }
    }
}

/// Jumps per chunk of the streaming lattice walk.
const CHUNK_JUMPS: f64 = 4e6;

/// Exact sup and RMS of `Q` over `[2^j_lo, 2^j_hi]`, streaming the lattice jumps in chunks.
pub fn lattice_dyadic_exact(j_lo: i32, j_hi: i32) -> Result<DyadicFitResult<f64>> {
    if !(j_lo >= 1 && j_hi > j_lo) {
        return Err(WeylError::Domain(format!("need 1 <= j_lo < j_hi, got {j_lo}, {j_hi}")));
    }
    let top = 2f64.powi(j_hi);
    if top > MAX_MU_LATTICE {
        return Err(WeylError::guard("mu_max", top, MAX_MU_LATTICE));
    }
    let shift = LatticeShift::DIRICHLET;
    let mut windows = Vec::new();
    for j in j_lo..j_hi {
        let (lo, hi) = (2f64.powi(j), 2f64.powi(j + 1));
        let mut acc = WindowAccumulator::new(lo, hi, lattice::count(lo, shift)?, 1.0);
        // about mu dmu / 2 jumps in a chunk of width dmu
        let pieces = ((hi * hi - lo * lo) / 4.0 / CHUNK_JUMPS).ceil().max(1.0) as usize;
        for p in 0..pieces {
            let a = lo + (hi - lo) * p as f64 / pieces as f64;
            let b = if p + 1 == pieces { hi } else { lo + (hi - lo) * (p + 1) as f64 / pieces as f64 };
            for z in lattice::jumps(a, b, shift)? {
                acc.jump(z, 1);
            }
        }
        debug_assert_eq!(acc.count, lattice::count(hi, shift)?);
        windows.push(acc.finish());
    }
    fit_windows(windows)
}

/// Exact sup and RMS of the disk remainder over `[2^j_lo, 2^j_hi]`.
pub fn spectral_dyadic_exact(cache: &ZeroCache, bc: BoundaryCondition, j_lo: i32, j_hi: i32) -> Result<DyadicFitResult<f64>> {
    if !(j_lo >= 1 && j_hi > j_lo) {
        return Err(WeylError::Domain(format!("need 1 <= j_lo < j_hi, got {j_lo}, {j_hi}")));
    }
    let top = 2f64.powi(j_hi);
    if top > MAX_MU_SPECTRAL {
        return Err(WeylError::guard("mu_max", top, MAX_MU_SPECTRAL));
    }
    let spectrum = spectral::spectrum_below(cache, top.next_up(), bc)?;
    let sign = bc.sigma();
    let mut windows = Vec::new();
    for j in j_lo..j_hi {
        let (lo, hi) = (2f64.powi(j), 2f64.powi(j + 1));
        // strict inequality: N(lo) counts mu_j < lo
        let start = spectrum.partition_point(|z| z.0 < lo);
        let base: u64 = spectrum[..start].iter().map(|z| z.1).sum();
        // at lo itself the count is base; a zero exactly at lo is a jump there
        let mut acc = WindowAccumulator::new(lo, hi, base, sign);
        for &(z, m) in spectrum[start..].iter().take_while(|z| z.0 < hi) {
            acc.jump(z, m);
        }
        windows.push(acc.finish());
    }
    fit_windows(windows)
}

/// `(1/mu) int_mu^{2mu} R(tau) dtau` for the Dirichlet disk, by exact piecewise integration.
pub fn ept_average_with(cache: &ZeroCache, mu: f64) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(WeylError::Precondition(format!("ept_average needs mu > 0, got {mu}")));
    }
    if mu > MAX_MU_EPT {
        return Err(WeylError::guard("mu", mu, MAX_MU_EPT));
    }
    let bc = BoundaryCondition::Dirichlet;
    let spectrum = spectral::spectrum_below(cache, 2.0 * mu, bc)?;
    // int_mu^{2mu} N = sum over eigenvalues of the length of [max(mu_j, mu), 2mu]
    let integral_n: f64 = spectrum.iter().map(|&(z, m)| m as f64 * (2.0 * mu - z.max(mu))).sum();
    // int_mu^{2mu} (tau^2/4 - tau/2) = 7 mu^3 / 12 - 3 mu^2 / 4
    let smooth_part = 7.0 * mu * mu * mu / 12.0 - 0.75 * mu * mu;
    Ok((integral_n - smooth_part) / mu)
}

pub fn ept_average(mu: f64) -> Result<f64> {
    ept_average_with(&ZeroCache::in_memory(), mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem12Row {
    pub mu: f64,
    pub q: f64,
    /// `Q(mu) / mu^{2/3}`
    pub normalized: f64,
}

/// `(mu, Q(mu), Q(mu)/mu^{2/3})` on the grid.
pub fn theorem12_residual(mu_grid: &[f64]) -> Result<Vec<Theorem12Row>> {
    use rayon::prelude::*;
    mu_grid
        .par_iter()
        .map(|&mu| {
            let r = lattice::remainder(mu, LatticeShift::DIRICHLET)?;
            let normalized = if mu > 0.0 { r.q / mu.powf(2.0 / 3.0) } else { 0.0 };
            Ok(Theorem12Row { mu, q: r.q, normalized })
        })
        .collect()
}

/// Number of strict sign changes along a sequence (zeros are skipped).
pub fn sign_changes(values: impl IntoIterator<Item = f64>) -> usize {
    let mut last = 0.0f64;
    let mut n = 0;
    for v in values {
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                n += 1;
            }
            last = v;
        }
    }
    n
}

/// Slope of `log |y|` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.abs().ln())).collect();
    Ok(least_squares(&logs)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_square_matches_quadrature() {
        let (c, p1, d) = (0.7, 3.2, 0.37);
        let n = 20000;
        let h = d / n as f64;
        let s: f64 = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                let v = c - p1 * u - u * u / 4.0;
                v * v * h
            })
            .sum();
        assert!((segment_square(c, p1, d) - s).abs() < 1e-8);
    }

    #[test]
    fn synthetic_power_laws() {
        for alpha in [0.0, 0.5, 2.0 / 3.0] {
            let samples: Vec<(f64, f64)> = (0..4000).map(|i| {
                let mu = 16.0 * (1024.0f64 / 16.0).powf(i as f64 / 3999.0);
                (mu, 3.0 * mu.powf(alpha))
            }).collect();
            let s = RemainderSeries {
                kind: SeriesKind::LatticeQ,
                mu_min: 16.0,
                mu_max: 1024.0,
                samples,
                policy: SamplingPolicy { n_random: 0, seed: 0, jump_offset: 0.0, jumps: 0, boundary: BoundaryCondition::Dirichlet },
            };
            let f = dyadic_fit(&s).unwrap();
            assert_eq!(f.windows.len(), 6);
            assert!((f.slope - alpha).abs() < 0.01, "{alpha}: {}", f.slope);
        }
    }

    #[test]
    fn sign_change_count() {
        assert_eq!(sign_changes([1.0, 0.0, -2.0, -1.0, 3.0]), 2);
        assert_eq!(sign_changes([]), 0);
    }
}
