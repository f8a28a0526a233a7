//! Evaluation of `J_n(x)` for integer order and real argument.
//!
//! Method by region:
//! - `x^2 <= 4(n + 1)`: ascending power series. Terms decrease from the
//!   first one on and cancellation is bounded by `e`, so the result is good
//!   to a few ulps.
//! - `x >= max(40, n^2)`: Hankel's large-argument expansion, truncated at the
//!   smallest term. Used only when that term is below `1e-12` of the envelope.
//! - otherwise: the uniform/Miller machinery of the `complex-bessel` crate
//!   (an implementation of Amos' algorithm), which is O(1) in the order.

use crate::error::{Result, WeylError};
use complex_bessel::besselj;
use num_complex::Complex;
use std::f64::consts::PI;

pub const MAX_ORDER: u32 = 1_000_000;
pub const MAX_ARGUMENT: f64 = 1e7;

fn check(n: u32, x: f64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(WeylError::guard("n", f64::from(n), f64::from(MAX_ORDER)));
    }
    if !(x >= 0.0) {
        return Err(WeylError::Domain(format!("Bessel argument x = {x} must be >= 0")));
    }
    if x > MAX_ARGUMENT {
        return Err(WeylError::guard("x", x, MAX_ARGUMENT));
    }
    Ok(())
}

fn amos_error(n: f64, x: f64, e: complex_bessel::Error) -> WeylError {
    WeylError::Accuracy(format!("J_{n}({x}) not representable: {e}"))
}

/// Ascending series `sum (-x^2/4)^m (x/2)^n / (m! (m+n)!)`.
pub(crate) fn series(n: u32, x: f64) -> f64 {
    let nf = f64::from(n);
    let half = 0.5 * x;
    let log_prefactor = nf * half.ln() - libm::lgamma(nf + 1.0);
    if log_prefactor < -745.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + nf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || m > 500.0 {
            break;
        }
        m += 1.0;
    }
    sum * log_prefactor.exp()
}

/// Hankel expansion; `None` if the smallest term is not small enough.
fn hankel(n: u32, x: f64) -> Option<f64> {
    let mu = 4.0 * f64::from(n) * f64::from(n);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1.0f64;
    let mut last = f64::INFINITY;
    loop {
        let next = term * (mu - (2.0 * k - 1.0).powi(2)) / (k * 8.0 * x);
        if next.abs() >= last.abs() {
            // past the smallest term
            break;
        }
        if next == 0.0 {
            last = 0.0;
            break;
        }
        // a_k / x^k with sign pattern (+ - - + + - - ...) split into P and Q
        let kk = k as i64;
        match kk % 4 {
            1 => q += next,
            2 => p -= next,
            3 => q -= next,
            _ => p += next,
        }
        term = next;
        last = next;
        k += 1.0;
        if k > 200.0 {
            break;
        }
        if last.abs() < 1e-17 {
            break;
        }
    }
    if last.abs() > 1e-12 {
        return None;
    }
    let chi = x - (0.5 * f64::from(n) + 0.25) * PI;
    Some((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

fn uses_series(n: u32, x: f64) -> bool {
    x * x <= 4.0 * (f64::from(n) + 1.0)
}

fn uses_hankel(n: u32, x: f64) -> bool {
    let nf = f64::from(n);
    x >= 40.0_f64.max(nf * nf)
}

/// Bessel function of the first kind `J_n(x)`, `n >= 0`, `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check(n, x)?;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if uses_series(n, x) {
        return Ok(series(n, x));
    }
    if uses_hankel(n, x) {
        if let Some(v) = hankel(n, x) {
            return Ok(v);
        }
    }
    let nf = f64::from(n);
    besselj(nf, Complex::new(x, 0.0))
        .map(|z| z.re)
        .map_err(|e| amos_error(nf, x, e))
}

/// `J_n'(x)` from the recurrences (`J_0' = -J_1`).
pub fn bessel_jp(n: u32, x: f64) -> Result<f64> {
    Ok(bessel_j_and_derivative(n, x)?.1)
}

/// `(J_n(x), J_n'(x))` sharing one evaluation of the neighbouring orders.
pub fn bessel_j_and_derivative(n: u32, x: f64) -> Result<(f64, f64)> {
    check(n, x)?;
    if x == 0.0 {
        let j = if n == 0 { 1.0 } else { 0.0 };
        let jp = if n == 1 { 0.5 } else { 0.0 };
        return Ok((j, jp));
    }
    if n == 0 {
        return Ok((bessel_j(0, x)?, -bessel_j(1, x)?));
    }
    if uses_series(n + 1, x) || uses_hankel(n + 1, x) {
        let jm = bessel_j(n - 1, x)?;
        let j = bessel_j(n, x)?;
        let jp1 = bessel_j(n + 1, x)?;
        return Ok((j, 0.5 * (jm - jp1)));
    }
    // J_n' = (n/x) J_n - J_{n+1}; the sequence routine of the crate returns
    // rotated values for real arguments, so the two orders are evaluated apart
    let nf = f64::from(n);
    let z = Complex::new(x, 0.0);
    let j = besselj(nf, z).map_err(|e| amos_error(nf, x, e))?.re;
    let j1 = besselj(nf + 1.0, z).map_err(|e| amos_error(nf + 1.0, x, e))?.re;
    Ok((j, nf / x * j - j1))
}

/// `J_n''(x)` from Bessel's equation, given `J_n` and `J_n'`.
pub fn second_derivative(n: u32, x: f64, j: f64, jp: f64) -> f64 {
    let nf = f64::from(n);
    -jp / x - (1.0 - nf * nf / (x * x)) * j
}
