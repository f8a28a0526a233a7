//! The boundary oscillatory integral
//!
//! `I(mu, xi) = int_{-1}^{1} exp(-i mu (xi1 t + xi2 g(t))) (xi2 - xi1 g'(t)) dt`
//!
//! and its stationary-phase form. With `t = cos(theta)` the integrand becomes
//! `exp(-i mu (xi1 cos + xi2 (sin - theta cos) / pi)) (xi2 + xi1 theta / pi) sin`
//! on `[0, pi]`, which is analytic up to both endpoints, so a fixed
//! Gauss-Kronrod rule on short panels converges fast.

use crate::error::{Result, WeylError};
use crate::geometry::{gauss_inverse, ConeDirection};
use crate::lattice::LatticeShift;
use crate::scalar::{from_usize, lit, Real};
use num_complex::Complex;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Largest `mu` accepted by [`i_eval`].
pub const MAX_MU: f64 = 1e5;
/// Largest panel count of one quadrature.
pub const MAX_PANELS: usize = 100_000_000;
/// Largest lattice radius accepted by [`poisson_sum_partial`].
pub const MAX_CUTOFF: f64 = 1e3;

// 15-point Kronrod nodes and weights, with the embedded 7-point Gauss weights
// (Gauss nodes are the odd-indexed Kronrod nodes). Digits as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of one quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscIntegralResult<T> {
    pub mu: T,
    pub xi: [T; 2],
    pub value: Complex<T>,
    /// Sum over panels of |Kronrod - Gauss| plus a rounding allowance.
    pub est_error: T,
    pub panels: usize,
}

/// Leading stationary-phase term and the size of the neglected terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPrediction<T> {
    pub leading: Complex<T>,
    /// `K^{5/2} mu^{-3/2} + K mu^{-1} + (|xi2/xi1| + |(xi2+xi1)/(xi2-xi1)|) mu^{-1}`
    pub error_budget: T,
}

/// Quadrature controls; the defaults give the documented accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    /// Multiplies the maximal panel width (use `0.5` for a refinement check).
    pub width_scale: T,
    /// Evaluate with `exp(+i mu ...)` instead of `exp(-i mu ...)`.
    pub flip_phase: bool,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        QuadratureOptions { width_scale: T::one(), flip_phase: false }
    }
}

fn check_closed_cone<T: Real>(xi: [T; 2]) -> Result<()> {
    if !(xi[0].is_finite() && xi[1].is_finite()) || xi[0] < T::zero() || xi[1] < xi[0] || xi[1] <= T::zero() {
        return Err(WeylError::Domain(format!("direction ({}, {}) outside the closed cone", xi[0], xi[1])));
    }
    Ok(())
}

/// `I(mu, xi)` for `xi` in the closed cone `0 <= xi1 <= xi2` (any length).
pub fn i_eval<T: Real>(mu: T, xi: [T; 2]) -> Result<OscIntegralResult<T>> {
    i_eval_with(mu, xi, QuadratureOptions::default())
}

pub fn i_eval_with<T: Real>(mu: T, xi: [T; 2], opts: QuadratureOptions<T>) -> Result<OscIntegralResult<T>> {
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(WeylError::Domain(format!("mu = {mu} must be positive")));
    }
    if mu > lit(MAX_MU) {
        return Err(WeylError::guard("mu", mu.to_f64().unwrap_or(f64::INFINITY), MAX_MU));
    }
    quadrature(mu, xi, opts)
}

/// The quadrature itself, without the `mu` guard (the panel budget still applies).
fn quadrature<T: Real>(mu: T, xi: [T; 2], opts: QuadratureOptions<T>) -> Result<OscIntegralResult<T>> {
    check_closed_cone(xi)?;
    let pi = T::PI();
    let norm = xi[0].hypot(xi[1]);
    // |d phase / d theta| <= |xi| on [0, pi], so this width spans <= 1/8 oscillation
    let mut width = lit::<T>(0.1).min(lit::<T>(2.0) * pi / (lit::<T>(8.0) * mu * norm.max(T::epsilon())));
    width = width * opts.width_scale;
    let panels_f = (pi / width).ceil();
    let panels = panels_f.to_usize().unwrap_or(usize::MAX);
    if panels > MAX_PANELS {
        return Err(WeylError::Budget(format!("{panels} panels exceed the budget of {MAX_PANELS}")));
    }
    let h = pi / panels_f;
    let sign = if opts.flip_phase { T::one() } else { -T::one() };
    let integrand = |theta: T| -> Complex<T> {
        let (s, c) = theta.sin_cos();
        let phase = xi[0] * c + xi[1] * (s - theta * c) / pi;
        let amp = (xi[1] + xi[0] * theta / pi) * s;
        let (ps, pc) = (sign * mu * phase).sin_cos();
        Complex::new(amp * pc, amp * ps)
    };
    let mut total = Complex::new(T::zero(), T::zero());
    let mut err = T::zero();
    let mut abs_total = T::zero();
    let half = h / lit(2.0);
    for p in 0..panels {
        let center = h * (from_usize::<T>(p) + lit(0.5));
        let fc = integrand(center);
        let mut kron = fc * lit::<T>(WGK[7]);
        let mut gauss = fc * lit::<T>(WG[3]);
        let mut absk = fc.norm() * lit::<T>(WGK[7]);
        for j in 0..7 {
            let dx = half * lit::<T>(XGK[j]);
            let f1 = integrand(center - dx);
            let f2 = integrand(center + dx);
            let sum = f1 + f2;
            kron = kron + sum * lit::<T>(WGK[j]);
            absk = absk + (f1.norm() + f2.norm()) * lit::<T>(WGK[j]);
            if j % 2 == 1 {
                gauss = gauss + sum * lit::<T>(WG[j / 2]);
            }
        }
        total = total + kron * half;
        err = err + (kron - gauss).norm() * half;
        abs_total = abs_total + absk * half;
    }
    let rounding = lit::<T>(50.0) * T::epsilon() * abs_total * from_usize::<T>(panels).sqrt().max(T::one());
    Ok(OscIntegralResult { mu, xi, value: total, est_error: err + rounding, panels })
}

/// Leading stationary-phase term of `I(mu, xi)` for `xi` strictly inside the cone:
/// `sqrt(2 pi) e^{-i pi/4} |xi|^{1/2} K^{-1/2} e^{-i mu H(xi)} mu^{-1/2}`.
/// For unit `xi` the factor `|xi|^{1/2}` is 1.
pub fn stationary_prediction<T: Real>(mu: T, dir: &ConeDirection<T>) -> Result<StationaryPrediction<T>> {
    if !dir.is_interior() || !(dir.xi2 > dir.xi1) {
        return Err(WeylError::Domain("stationary prediction needs a direction strictly inside the cone".into()));
    }
    if !(mu > T::zero()) {
        return Err(WeylError::Domain(format!("mu = {mu} must be positive")));
    }
    let k = dir.k;
    let pi = T::PI();
    let modulus = (lit::<T>(2.0) * pi * dir.norm() / (k * mu)).sqrt();
    let arg = -pi / lit(4.0) - mu * dir.h;
    let leading = Complex::from_polar(modulus, arg);
    let (x1, x2) = (dir.xi1, dir.xi2);
    let error_budget = k.powf(lit(2.5)) * mu.powf(lit(-1.5))
        + k / mu
        + ((x2 / x1).abs() + ((x2 + x1) / (x2 - x1)).abs()) / mu;
    Ok(StationaryPrediction { leading, error_budget })
}

/// One row of [`regime_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRow {
    pub mu: f64,
    pub abs_i: f64,
    /// `c_small mu^{-2/3}`
    pub bound_small: f64,
    /// `c_large mu^{-1/2} K^{-1/2}`
    pub bound_large: f64,
}

/// `|I|` along a `mu` grid for a near-cusp direction, against the two regime
/// envelopes. The constants are measured: `c_small = max |I| mu^{2/3}` over
/// `mu <= K^3`, `c_large = max |I| mu^{1/2} K^{1/2}` over `mu >= K^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeTable {
    pub k: f64,
    pub k_cubed: f64,
    pub c_small: f64,
    pub c_large: f64,
    pub rows: Vec<RegimeRow>,
}

pub fn regime_check(dir: &ConeDirection<f64>, mu_grid: &[f64]) -> Result<RegimeTable> {
    if !(dir.k >= 10.0) {
        return Err(WeylError::Precondition(format!("regime check needs K >= 10, got {}", dir.k)));
    }
    let u = dir.unit();
    let k = u.k;
    let k3 = k.powi(3);
    let abs: Vec<f64> = mu_grid
        .par_iter()
        .map(|&mu| Ok(i_eval(mu, u.xi())?.value.norm()))
        .collect::<Result<_>>()?;
    let mut c_small: f64 = 0.0;
    let mut c_large: f64 = 0.0;
    for (&mu, &a) in mu_grid.iter().zip(&abs) {
        if mu <= k3 {
            c_small = c_small.max(a * mu.powf(2.0 / 3.0));
        } else {
            c_large = c_large.max(a * (mu * k).sqrt());
        }
    }
    let rows = mu_grid
        .iter()
        .zip(&abs)
        .map(|(&mu, &abs_i)| RegimeRow {
            mu,
            abs_i,
            bound_small: c_small * mu.powf(-2.0 / 3.0),
            bound_large: c_large / (mu * k).sqrt(),
        })
        .collect();
    Ok(RegimeTable { k, k_cubed: k3, c_small, c_large, rows })
}

/// Radial bump `rho(x) = c exp(-1/(1 - |x|^2))` on the unit disk, `int rho = 1`,
/// and its Fourier transform `rho^(eta) = int rho(x) e^{-2 pi i <x, eta>} dx`.
///
/// The transform is `2 pi int_0^1 rho(r) J_0(2 pi |eta| r) r dr`, tabulated on
/// `|eta| <= 60` and interpolated by cubic Lagrange; beyond the table it is
/// below `1e-10` in magnitude and is taken as zero.
pub struct Mollifier {
    step: f64,
    table: Vec<f64>,
}

const ETA_MAX: f64 = 60.0;
const ETA_STEP: f64 = 0.01;

fn bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (-1.0 / ((1.0 - r) * (1.0 + r))).exp()
    }
}

/// Composite 15-point Kronrod rule on `[0, 1]` with `panels` panels.
fn radial_integral(panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / panels as f64;
    let half = 0.5 * h;
    let mut total = 0.0;
    for p in 0..panels {
        let c = h * (p as f64 + 0.5);
        let mut s = WGK[7] * f(c);
        for j in 0..7 {
            let dx = half * XGK[j];
            s += WGK[j] * (f(c - dx) + f(c + dx));
        }
        total += s * half;
    }
    total
}

impl Mollifier {
    fn build() -> Self {
        let norm = 2.0 * std::f64::consts::PI * radial_integral(64, |r| bump(r) * r);
        let n = (ETA_MAX / ETA_STEP).round() as usize + 4;
        let table = (0..n)
            .into_par_iter()
            .map(|i| {
                let eta = i as f64 * ETA_STEP;
                let w = 2.0 * std::f64::consts::PI * eta;
                2.0 * std::f64::consts::PI * radial_integral(96, |r| bump(r) * libm::j0(w * r) * r) / norm
            })
            .collect();
        Mollifier { step: ETA_STEP, table }
    }

    /// Shared instance (built on first use).
    pub fn standard() -> &'static Mollifier {
        static M: OnceLock<Mollifier> = OnceLock::new();
        M.get_or_init(Mollifier::build)
    }

    /// `rho(x)` at radius `r`.
    pub fn density(&self, r: f64) -> f64 {
        static C: OnceLock<f64> = OnceLock::new();
        let c = *C.get_or_init(|| 1.0 / (2.0 * std::f64::consts::PI * radial_integral(64, |r| bump(r) * r)));
        c * bump(r)
    }

    /// `rho^(eta)` at radius `|eta|`.
    pub fn transform(&self, eta: f64) -> f64 {
        let eta = eta.abs();
        if eta >= ETA_MAX {
            return 0.0;
        }
        let x = eta / self.step;
        let i = (x.floor() as usize).clamp(1, self.table.len() - 3);
        let u = x - i as f64;
        let (p0, p1, p2, p3) = (self.table[i - 1], self.table[i], self.table[i + 1], self.table[i + 2]);
        // cubic through nodes at -1, 0, 1, 2
        let a = -p0 * u * (u - 1.0) * (u - 2.0) / 6.0;
        let b = p1 * (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let c = -p2 * (u + 1.0) * u * (u - 2.0) / 2.0;
        let d = p3 * (u + 1.0) * u * (u - 1.0) / 6.0;
        a + b + c + d
    }
}

/// Truncated, mollified Poisson sum for the curved boundary part of `Q(mu)`:
///
/// `2 Re sum_{k in Z^2, 0 < k1 < k2, |k| <= cutoff} (-2 pi i |k|)^{-1} mu
///  I(2 pi mu |k|, k/|k|) rho^(eps k) e^{-2 pi i (1/4 + 2 eps) k2}`.
///
/// The factor `(-2 pi i |k|)^{-1}` comes from Green's formula for the Fourier
/// transform of the indicator (boundary traversed counter-clockwise); the
/// `-k` terms are the complex conjugates, hence `2 Re`. Terms whose
/// magnitude bound `3 mu rho^(eps k) / (2 pi |k|)` is below `1e-13` are skipped.
/// Diagnostic only.
pub fn poisson_sum_partial(mu: f64, eps: f64, cutoff: f64) -> Result<f64> {
    if !(mu > 0.0) || !(eps > 0.0) {
        return Err(WeylError::Domain("mu and eps must be positive".into()));
    }
    if !(cutoff >= 0.0) {
        return Err(WeylError::Domain(format!("cutoff = {cutoff} must be non-negative")));
    }
    if cutoff > MAX_CUTOFF {
        return Err(WeylError::guard("cutoff", cutoff, MAX_CUTOFF));
    }
    let m = Mollifier::standard();
    let b = -LatticeShift::DIRICHLET.b;
    let kmax = cutoff.floor() as i64;
    let mut ks = Vec::new();
    for k2 in 1..=kmax {
        for k1 in 1..k2 {
            let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
            if r > cutoff {
                continue;
            }
            let w = m.transform(eps * r);
            if 3.0 * mu * w.abs() / (2.0 * std::f64::consts::PI * r) < 1e-13 {
                continue;
            }
            ks.push((k1, k2, r, w));
        }
    }
    let terms: Vec<f64> = ks
        .par_iter()
        .map(|&(k1, k2, r, w)| {
            let xi = [k1 as f64 / r, k2 as f64 / r];
            let i = quadrature(2.0 * std::f64::consts::PI * mu * r, xi, QuadratureOptions::default())?.value;
            let shift = Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * (b + 2.0 * eps) * k2 as f64);
            let green = Complex::new(0.0, -2.0 * std::f64::consts::PI * r).inv();
            Ok(2.0 * (green * mu * i * w * shift).re)
        })
        .collect::<Result<_>>()?;
    // fixed order reduction
    Ok(terms.iter().sum())
}

/// Direction with contact point at angle `theta` (`t_contact = cos theta`).
pub fn direction_at_angle(theta: f64) -> Result<ConeDirection<f64>> {
    let r = theta / std::f64::consts::PI;
    let n = (1.0 + r * r).sqrt();
    gauss_inverse(r / n, 1.0 / n)
}
