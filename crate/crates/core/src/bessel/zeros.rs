//! Positive zeros of `J_n` and `J_n'`.
//!
//! Zero `k` of order `n` is tied to the lattice ordinate
//! `s = k - 1/4` (for `J_n`) or `s = k - 3/4` (for `J_n'`, shifted by one for
//! `n = 0` because the zero of `J_0'` at the origin is not reported): the
//! large-order phase of `J_n` at `x` is `pi x g(n/x) - pi/4`, so the zero sits
//! near `F(n, s)` and is the only one between `F(n, s - 1/2)` and `F(n, s + 1/2)`.
//! That bracket is checked for a sign change, then refined by safeguarded Newton
//! iteration from a McMahon (k >= n) or Airy-type (k < n) starting value.

use super::eval::{bessel_j, bessel_j_and_derivative, bessel_jp, second_derivative};
use crate::error::{Result, WeylError};
use crate::geometry::{cone_f, g_unchecked};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Upper limit on the value of a requested zero.
pub const MAX_ZERO: f64 = 1e6;

/// Which function the zero belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ZeroKind {
    /// zero of `J_n`
    #[serde(rename = "J")]
    J,
    /// positive zero of `J_n'`
    #[serde(rename = "JP")]
    JPrime,
}

impl ZeroKind {
    pub fn tag(self) -> &'static str {
        match self {
            ZeroKind::J => "J",
            ZeroKind::JPrime => "JP",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "J" => Some(ZeroKind::J),
            "JP" => Some(ZeroKind::JPrime),
            _ => None,
        }
    }

    /// Offset `c` with `ordinate = k - c`.
    fn ordinate_offset(self, n: u32) -> f64 {
        match (self, n) {
            (ZeroKind::J, _) => 0.25,
            (ZeroKind::JPrime, 0) => -0.25,
            (ZeroKind::JPrime, _) => 0.75,
        }
    }
}

/// A computed zero `j_{n,k}` or `j'_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselZero {
    pub n: u32,
    pub k: u32,
    pub kind: ZeroKind,
    pub value: f64,
    /// `|J_n(value)|` or `|J_n'(value)|`.
    pub residual: f64,
}

/// Lattice ordinate associated with zero `k` of order `n`.
pub fn ordinate(n: u32, k: u32, kind: ZeroKind) -> f64 {
    f64::from(k) - kind.ordinate_offset(n)
}

/// Function value and slope whose root is the zero of the given kind.
pub(crate) fn target(n: u32, x: f64, kind: ZeroKind) -> Result<(f64, f64)> {
    let (j, jp) = bessel_j_and_derivative(n, x)?;
    Ok(match kind {
        ZeroKind::J => (j, jp),
        ZeroKind::JPrime => (jp, second_derivative(n, x, j, jp)),
    })
}

/// McMahon's large-zero expansion (three terms).
pub fn mcmahon_guess(n: u32, k: u32, kind: ZeroKind) -> f64 {
    let mu = 4.0 * f64::from(n) * f64::from(n);
    match kind {
        ZeroKind::J => {
            let beta = (f64::from(k) + 0.5 * f64::from(n) - 0.25) * PI;
            let e = 8.0 * beta;
            beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
        }
        ZeroKind::JPrime => {
            // for n = 0 the zero at the origin is skipped
            let kk = if n == 0 { k + 1 } else { k };
            let beta = (f64::from(kk) + 0.5 * f64::from(n) - 0.75) * PI;
            let e = 8.0 * beta;
            beta - (mu + 3.0) / e - 4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) / (3.0 * e.powi(3))
        }
    }
}

/// Transition-region guess `n + |a_k| (n/2)^{1/3}` with `a_k` the k-th Airy zero
/// (of `Ai` for `J`, of `Ai'` for `J'`).
pub fn airy_guess(n: u32, k: u32, kind: ZeroKind) -> f64 {
    let kf = f64::from(k);
    let a = match kind {
        ZeroKind::J => (3.0 * PI * (4.0 * kf - 1.0) / 8.0).powf(2.0 / 3.0),
        ZeroKind::JPrime => (3.0 * PI * (4.0 * kf - 3.0) / 8.0).powf(2.0 / 3.0),
    };
    let nf = f64::from(n);
    nf + a * (nf / 2.0).cbrt()
}

fn initial_guess(n: u32, k: u32, kind: ZeroKind) -> f64 {
    if k >= n {
        mcmahon_guess(n, k, kind)
    } else {
        airy_guess(n, k, kind)
    }
}

/// Bracket `[F(n, s - 1/2), F(n, s + 1/2)]` around zero `k` (lower end clamped to `n`).
pub fn phase_bracket(n: u32, k: u32, kind: ZeroKind) -> Result<(f64, f64)> {
    let s = ordinate(n, k, kind);
    let nf = f64::from(n);
    let lo = if s - 0.5 > 0.0 { cone_f(nf, s - 0.5)? } else { nf };
    let hi = cone_f(nf, s + 0.5)?;
    Ok((lo, hi))
}

/// Zero `k >= 1` of `J_n` or `J_n'`.
pub fn zero(n: u32, k: u32, kind: ZeroKind) -> Result<BesselZero> {
    if k == 0 {
        return Err(WeylError::Domain("zero index k must be >= 1".into()));
    }
    let (lo, hi) = phase_bracket(n, k, kind)?;
    if lo > MAX_ZERO {
        return Err(WeylError::guard("zero value", lo, MAX_ZERO));
    }
    refine(n, k, kind, lo, hi, initial_guess(n, k, kind))
}

/// Value of the function whose root is sought (one evaluation path cheaper
/// than [`target`] for `J`).
fn value(n: u32, x: f64, kind: ZeroKind) -> Result<f64> {
    match kind {
        ZeroKind::J => bessel_j(n, x),
        ZeroKind::JPrime => bessel_jp(n, x),
    }
}

pub(crate) fn refine(n: u32, k: u32, kind: ZeroKind, lo: f64, hi: f64, guess: f64) -> Result<BesselZero> {
    let flo = value(n, lo, kind)?;
    let fhi = value(n, hi, kind)?;
    refine_with_ends(n, k, kind, (lo, flo), (hi, fhi), guess)
}

fn refine_with_ends(
    n: u32,
    k: u32,
    kind: ZeroKind,
    (lo, flo): (f64, f64),
    (hi, fhi): (f64, f64),
    guess: f64,
) -> Result<BesselZero> {
    if flo == 0.0 && lo > 0.0 {
        return Ok(BesselZero { n, k, kind, value: lo, residual: 0.0 });
    }
    if fhi == 0.0 {
        return Ok(BesselZero { n, k, kind, value: hi, residual: 0.0 });
    }
    if flo.signum() == fhi.signum() {
        return Err(WeylError::Bracket(format!(
            "no sign change for {}-zero n={n} k={k} on [{lo}, {hi}]",
            kind.tag()
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let sign_a = flo.signum();
    let mut x = if guess > a && guess < b {
        guess
    } else {
        cone_f(f64::from(n), ordinate(n, k, kind))?.clamp(a, b)
    };
    for _ in 0..200 {
        let (f, fp) = target(n, x, kind)?;
        if f == 0.0 {
            return Ok(BesselZero { n, k, kind, value: x, residual: 0.0 });
        }
        if f.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - f / fp;
        let newton = next > a && next < b && next.is_finite();
        if !newton {
            next = 0.5 * (a + b);
        }
        let step = (next - x).abs();
        x = next;
        // a Newton step this small leaves an error of order step^2 / x
        if (newton && step <= 1e-9 * x) || b - a <= 4.0 * f64::EPSILON * x {
            let residual = value(n, x, kind)?.abs();
            return Ok(BesselZero { n, k, kind, value: x, residual });
        }
    }
    Err(WeylError::Convergence(format!("{}-zero n={n} k={k} did not converge", kind.tag())))
}

/// Smallest possible zero location: no zero of `J_n` (or of `J_n'`, `n >= 1`)
/// lies in `(0, n]`.
fn no_zero_below(n: u32, kind: ZeroKind) -> f64 {
    match (kind, n) {
        (ZeroKind::JPrime, 0) => 0.0,
        _ => f64::from(n),
    }
}

/// Estimate `#{k : zero_k < mu}` from the phase: `#{k >= 1 : k - c < mu g(n/mu)}`.
pub fn count_estimate(n: u32, mu: f64, kind: ZeroKind) -> u64 {
    let nf = f64::from(n);
    if mu <= nf {
        return 0;
    }
    let s = mu * g_unchecked(nf / mu);
    let c = kind.ordinate_offset(n);
    let k = (s + c).ceil() - 1.0;
    if k <= 0.0 {
        0
    } else {
        k as u64
    }
}

/// Number of zeros strictly below `mu` using the phase estimate and at most
/// three zero evaluations supplied by `zero_at(k)`.
pub fn count_with<Z>(n: u32, mu: f64, kind: ZeroKind, mut zero_at: Z) -> Result<u64>
where
    Z: FnMut(u32) -> Result<f64>,
{
    if !(mu > 0.0) {
        return Err(WeylError::Domain(format!("mu = {mu} must be positive")));
    }
    if mu > MAX_ZERO {
        return Err(WeylError::guard("mu", mu, MAX_ZERO));
    }
    if mu <= no_zero_below(n, kind) {
        return Ok(0);
    }
    let mut k = count_estimate(n, mu, kind);
    let mut evals = 0;
    let mut eval = |k: u64, evals: &mut u32| -> Result<f64> {
        *evals += 1;
        if *evals > 3 {
            return Err(WeylError::Convergence(format!(
                "zero count correction for n={n}, mu={mu} needs more than 3 evaluations"
            )));
        }
        let k = u32::try_from(k).map_err(|_| WeylError::guard("k", k as f64, f64::from(u32::MAX)))?;
        zero_at(k)
    };
    if k >= 1 && eval(k, &mut evals)? >= mu {
        // estimate too high: walk down until the zero is below mu
        k -= 1;
        while k >= 1 && eval(k, &mut evals)? >= mu {
            k -= 1;
        }
        return Ok(k);
    }
    while eval(k + 1, &mut evals)? < mu {
        k += 1;
    }
    Ok(k)
}

/// Number of zeros of the given kind strictly below `mu` (uncached).
pub fn count_zeros_below(n: u32, mu: f64, kind: ZeroKind) -> Result<u64> {
    count_with(n, mu, kind, |k| Ok(zero(n, k, kind)?.value))
}

/// All zeros of order `n` strictly below `mu`, in increasing order (uncached).
///
/// Consecutive phase brackets share endpoints, so each zero costs one
/// evaluation of `F` plus the Newton refinement.
pub fn zeros_below(n: u32, mu: f64, kind: ZeroKind) -> Result<Vec<BesselZero>> {
    if mu > MAX_ZERO {
        return Err(WeylError::guard("mu", mu, MAX_ZERO));
    }
    let mut out = Vec::new();
    if mu <= no_zero_below(n, kind) {
        return Ok(out);
    }
    let estimate = count_estimate(n, mu, kind) + 2;
    let nf = f64::from(n);
    let mut lo = phase_bracket(n, 1, kind)?.0;
    let mut flo = value(n, lo, kind)?;
    for k in 1..=estimate as u32 {
        if lo >= mu {
            break;
        }
        let hi = cone_f(nf, ordinate(n, k, kind) + 0.5)?;
        let fhi = value(n, hi, kind)?;
        let z = refine_with_ends(n, k, kind, (lo, flo), (hi, fhi), initial_guess(n, k, kind))?;
        if z.value >= mu {
            break;
        }
        out.push(z);
        lo = hi;
        flo = fhi;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::eval::series;

    /// Bisection on the ascending series, independent of the Newton path.
    fn bisect_series(n: u32, mut a: f64, mut b: f64, derivative: bool) -> f64 {
        let f = |x: f64| {
            if derivative {
                let h = 1e-6;
                (series(n, x + h) - series(n, x - h)) / (2.0 * h)
            } else {
                series(n, x)
            }
        };
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn first_zeros_match_series_bisection() {
        let z = zero(0, 1, ZeroKind::J).unwrap();
        let o = bisect_series(0, 2.0, 3.0, false);
        assert!((z.value - o).abs() < 1e-12, "{} vs {o}", z.value);
        assert!((z.value - 2.404825557695773).abs() < 1e-12);
        assert!(z.residual <= 1e-10);
        let z = zero(1, 1, ZeroKind::J).unwrap();
        let o = bisect_series(1, 3.0, 4.5, false);
        assert!((z.value - o).abs() < 1e-12);
        assert!((z.value - 3.831705970207512).abs() < 1e-12);
    }

    #[test]
    fn first_positive_derivative_zero() {
        let z = zero(0, 1, ZeroKind::JPrime).unwrap();
        assert!(z.value > 0.0);
        assert!(z.residual <= 1e-10);
        let o = bisect_series(0, 3.0, 4.5, true);
        assert!((z.value - o).abs() < 1e-8, "{} vs {o}", z.value);
        // j'_{1,1}
        let z = zero(1, 1, ZeroKind::JPrime).unwrap();
        assert!((z.value - 1.841183781340659).abs() < 1e-12);
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_zeros_below(0, 3.0, ZeroKind::J).unwrap(), 1);
        assert_eq!(count_zeros_below(0, 2.0, ZeroKind::J).unwrap(), 0);
        assert_eq!(count_zeros_below(50, 50.0, ZeroKind::J).unwrap(), 0);
        assert!(count_zeros_below(0, 0.0, ZeroKind::J).is_err());
    }

    #[test]
    fn zero_index_zero_rejected() {
        assert!(zero(3, 0, ZeroKind::J).is_err());
    }

    #[test]
    fn large_order_zero_is_in_transition_region() {
        let z = zero(1000, 1, ZeroKind::J).unwrap();
        // j_{1000,1} = 1018.6660...
        assert!((z.value - 1018.66).abs() < 0.01, "{}", z.value);
        let z = zero(1000, 1, ZeroKind::JPrime).unwrap();
        assert!(z.value > 1000.0 && z.value < 1010.0, "{}", z.value);
    }

    #[test]
    fn enumeration_matches_individual_zeros() {
        for kind in [ZeroKind::J, ZeroKind::JPrime] {
            for n in [0u32, 1, 7, 40] {
                let all = zeros_below(n, 80.0, kind).unwrap();
                assert_eq!(all.len() as u64, count_zeros_below(n, 80.0, kind).unwrap());
                for z in &all {
                    let single = zero(n, z.k, kind).unwrap();
                    assert!((single.value - z.value).abs() <= 1e-13 * z.value);
                }
            }
        }
    }
}
