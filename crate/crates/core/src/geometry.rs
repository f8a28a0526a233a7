//! Geometry of the cusp domain
//! `Omega = { -1 <= t <= 1, max(0, -t) <= s <= g(t) }` with
//! `g(t) = (sqrt(1 - t^2) - t arccos t) / pi`.
//!
//! The upper boundary curve runs from the cusp `P1 = (-1, 1)` to the cusp
//! `P2 = (1, 0)`. Its exterior normal at `t` is parallel to `(-g'(t), 1)` =
//! `(arccos(t)/pi, 1)`, so a direction `xi` with `0 <= xi1 < xi2` touches the
//! curve at `t = cos(pi xi1 / xi2)`. Working in the angle `theta = arccos t`
//! keeps everything accurate near the cusps.

use crate::error::{Result, WeylError};
use crate::fd;
use crate::scalar::{lit, Real};

/// A point of the boundary curve with its first two derivatives and curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint<T> {
    pub t: T,
    pub g: T,
    pub gp: T,
    /// `+inf` at `t = +-1`.
    pub gpp: T,
    /// `+inf` at `t = +-1`.
    pub kappa: T,
}

fn check_abscissa<T: Real>(t: T) -> Result<()> {
    if t.is_nan() || t.abs() > T::one() {
        return Err(WeylError::Domain(format!("profile abscissa t = {t} outside [-1, 1]")));
    }
    Ok(())
}

/// `g(t)` without range checks. Callers guarantee `|t| <= 1`.
#[inline]
pub fn g_unchecked<T: Real>(t: T) -> T {
    let one = T::one();
    let root = ((one - t) * (one + t)).max(T::zero()).sqrt();
    (root - t * t.max(-one).min(one).acos()) / T::PI()
}

/// `g`, `g'`, `g''` and curvature at `t`.
pub fn profile<T: Real>(t: T) -> Result<BoundaryPoint<T>> {
    check_abscissa(t)?;
    let one = T::one();
    let theta = t.acos();
    let root = ((one - t) * (one + t)).sqrt();
    let g = (root - t * theta) / T::PI();
    let gp = -theta / T::PI();
    let (gpp, kappa) = if root > T::zero() {
        let gpp = one / (T::PI() * root);
        (gpp, gpp / (one + gp * gp).powf(lit(1.5)))
    } else {
        (T::infinity(), T::infinity())
    };
    Ok(BoundaryPoint { t, g, gp, gpp, kappa })
}

/// Boundary point in the angular parametrisation `t = cos(theta)`, `theta` in `[0, pi]`.
pub fn profile_at_angle<T: Real>(theta: T) -> BoundaryPoint<T> {
    let one = T::one();
    let (s, c) = theta.sin_cos();
    let g = (s - theta * c) / T::PI();
    let gp = -theta / T::PI();
    let (gpp, kappa) = if s > T::zero() {
        let gpp = one / (T::PI() * s);
        (gpp, gpp / (one + gp * gp).powf(lit(1.5)))
    } else {
        (T::infinity(), T::infinity())
    };
    BoundaryPoint { t: c, g, gp, gpp, kappa }
}

/// Third derivative `g'''(t) = t / (pi (1 - t^2)^{3/2})` on the open interval.
pub fn g_third<T: Real>(t: T) -> Result<T> {
    check_abscissa(t)?;
    let one = T::one();
    let w = (one - t) * (one + t);
    if w <= T::zero() {
        return Err(WeylError::Domain(format!("g''' diverges at t = {t}")));
    }
    Ok(t / (T::PI() * w * w.sqrt()))
}

/// Curvature `g'' / (1 + g'^2)^{3/2}` on `(-1, 1)`.
pub fn curvature<T: Real>(t: T) -> Result<T> {
    check_abscissa(t)?;
    if t.abs() >= T::one() {
        return Err(WeylError::Domain(format!(
            "curvature diverges at the cusp t = {t}; use the asymptotic form"
        )));
    }
    Ok(profile(t)?.kappa)
}

/// Unit exterior normal of the boundary curve at `t`.
pub fn exterior_normal<T: Real>(t: T) -> Result<[T; 2]> {
    let p = profile(t)?;
    let n = (T::one() + p.gp * p.gp).sqrt();
    Ok([-p.gp / n, T::one() / n])
}

/// Support value `H(xi) = <xi, x(xi)>` in closed form, `(xi2 / pi) sin(pi xi1 / xi2)`.
///
/// No cone check: the expression is the analytic continuation of `H` and is
/// used by the finite-difference routines, which do their own domain checks.
#[inline]
pub fn support_value<T: Real>(xi: [T; 2]) -> T {
    xi[1] / T::PI() * (T::PI() * xi[0] / xi[1]).sin()
}

/// Gradient of [`support_value`]: `(cos a, sin(a)/pi - (xi1/xi2) cos a)` with `a = pi xi1 / xi2`.
/// It equals the contact point `x(xi)`.
pub fn support_gradient<T: Real>(xi: [T; 2]) -> [T; 2] {
    let r = xi[0] / xi[1];
    let (s, c) = (T::PI() * r).sin_cos();
    [c, s / T::PI() - r * c]
}

/// Hessian of [`support_value`] in closed form: `-(pi sin a / xi2) w w^T` with
/// `w = (1, -xi1/xi2)`. Rank one and negative semidefinite.
pub fn support_hessian<T: Real>(xi: [T; 2]) -> [[T; 2]; 2] {
    let r = xi[0] / xi[1];
    let c = -(T::PI() * r).sin() * T::PI() / xi[1];
    [[c, -c * r], [-c * r, c * r * r]]
}

/// `true` if `xi` lies in the open cone `0 < xi1 < xi2`.
pub fn in_open_cone<T: Real>(xi: [T; 2]) -> bool {
    xi[0] > T::zero() && xi[1] > xi[0]
}

/// Direction in the closed cone together with the data of its contact point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeDirection<T> {
    pub xi1: T,
    pub xi2: T,
    /// `t(xi) = cos(pi xi1 / xi2)`.
    pub t_contact: T,
    /// `x(xi) = (t(xi), g(t(xi)))`.
    pub x_contact: [T; 2],
    /// Curvature `K_xi` at the contact point (`+inf` for `xi1 = 0`).
    pub k: T,
    /// `H(xi) = <xi, x(xi)>`.
    pub h: T,
}

impl<T: Real> ConeDirection<T> {
    pub fn xi(&self) -> [T; 2] {
        [self.xi1, self.xi2]
    }

    pub fn norm(&self) -> T {
        self.xi1.hypot(self.xi2)
    }

    /// Same direction rescaled to unit length.
    pub fn unit(&self) -> Self {
        let n = self.norm();
        ConeDirection {
            xi1: self.xi1 / n,
            xi2: self.xi2 / n,
            h: self.h / n,
            ..*self
        }
    }

    /// `true` for directions strictly inside the cone (finite curvature).
    pub fn is_interior(&self) -> bool {
        self.xi1 > T::zero() && self.k.is_finite()
    }
}

/// Inverse Gauss map: the contact point where the exterior normal is parallel to `xi`.
pub fn gauss_inverse<T: Real>(xi1: T, xi2: T) -> Result<ConeDirection<T>> {
    if !(xi1.is_finite() && xi2.is_finite()) || xi1 < T::zero() || xi2 <= T::zero() || xi1 >= xi2 {
        return Err(WeylError::Domain(format!(
            "direction ({xi1}, {xi2}) outside the cone 0 <= xi1 < xi2"
        )));
    }
    let theta = T::PI() * xi1 / xi2;
    let p = profile_at_angle(theta);
    Ok(ConeDirection {
        xi1,
        xi2,
        t_contact: p.t,
        x_contact: [p.t, p.g],
        k: p.kappa,
        h: xi1 * p.t + xi2 * p.g,
    })
}

/// Eigenvalues of the Hessian of `H` at a unit direction, sorted by magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianEigen<T> {
    pub lambda_small: T,
    pub lambda_big: T,
    /// Largest Richardson disagreement over the three Hessian entries.
    pub disagreement: T,
    /// Set when `disagreement > 1e-6`.
    pub accuracy_warning: bool,
}

/// Hessian eigenvalues of `H` at `xi / |xi|` by finite differences.
///
/// Base step `1e-4` with two Richardson levels. `H` is concave on the cone
/// (the upper boundary of `Omega` is convex), so `lambda_big = -1/(|xi| K)`.
pub fn hessian_h<T: Real>(dir: &ConeDirection<T>) -> Result<HessianEigen<T>> {
    if !dir.is_interior() {
        return Err(WeylError::Domain("Hessian of H needs a direction inside the open cone".into()));
    }
    let u = dir.unit();
    let h = lit::<T>(1e-4) * T::one().max(u.norm());
    let reach = h * lit(1.5);
    if !in_open_cone([u.xi1 - reach, u.xi2 + reach]) || !in_open_cone([u.xi1 + reach, u.xi2 - reach]) {
        return Err(WeylError::Domain("finite-difference stencil leaves the cone".into()));
    }
    let f = |a: T, b: T| support_value([u.xi1 + a, u.xi2 + b]);
    let hxx = fd::mixed_partial(&f, 2, 0, h);
    let hxy = fd::mixed_partial(&f, 1, 1, h);
    let hyy = fd::mixed_partial(&f, 0, 2, h);
    let two = lit::<T>(2.0);
    let mean = (hxx.value + hyy.value) / two;
    let radius = ((hxx.value - hyy.value) / two).hypot(hxy.value);
    let (l1, l2) = (mean - radius, mean + radius);
    let (lambda_small, lambda_big) = if l1.abs() <= l2.abs() { (l1, l2) } else { (l2, l1) };
    let disagreement = hxx.disagreement.max(hxy.disagreement).max(hyy.disagreement);
    Ok(HessianEigen {
        lambda_small,
        lambda_big,
        disagreement,
        accuracy_warning: disagreement > lit(1e-6),
    })
}

/// A point of the cone `S = { s >= max(0, -t) }` with its scale `F(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint<T> {
    pub t: T,
    pub s: T,
    pub f: T,
}

/// `l g(t/l) - s`, increasing and convex in `l >= |t|`.
#[inline]
fn scale_gap<T: Real>(t: T, s: T, l: T) -> T {
    let r = (t / l).max(-T::one()).min(T::one());
    let root = ((l - t.abs()) * (l + t.abs())).max(T::zero()).sqrt();
    (root - t * r.acos()) / T::PI() - s
}

/// Derivative of [`scale_gap`] in `l`: `sqrt(1 - (t/l)^2) / pi`.
#[inline]
fn scale_gap_slope<T: Real>(t: T, l: T) -> T {
    let r = t / l;
    ((T::one() - r) * (T::one() + r)).max(T::zero()).sqrt() / T::PI()
}

fn check_cone_point<T: Real>(t: T, s: T) -> Result<()> {
    if !(t.is_finite() && s.is_finite()) || s < T::zero().max(-t) || (t == T::zero() && s == T::zero()) {
        return Err(WeylError::Domain(format!("({t}, {s}) outside the cone s >= max(0, -t)")));
    }
    Ok(())
}

/// The degree-one homogeneous function with `F = 1` on the graph of `g`:
/// the unique `l > 0` with `g(t/l) = s/l`.
///
/// Bisection on the crude bracket `[|t|, pi s + (1 + pi)|t|]` down to a
/// relative width of `1e-14`, then two Newton polishing steps.
pub fn cone_f<T: Real>(t: T, s: T) -> Result<T> {
    check_cone_point(t, s)?;
    let mut lo = t.abs();
    if scale_gap(t, s, lo) >= T::zero() {
        // on one of the two boundary rays
        return Ok(lo);
    }
    let mut hi = T::PI() * s + (T::one() + T::PI()) * t.abs();
    let mut widen = 0;
    while scale_gap(t, s, hi) < T::zero() {
        hi = hi + hi;
        widen += 1;
        if widen > 64 {
            return Err(WeylError::Convergence(format!("no bracket for F({t}, {s})")));
        }
    }
    let tol = lit::<T>(1e-14).max(lit::<T>(8.0) * T::epsilon());
    let mut iterations = 0;
    while hi - lo > tol * hi {
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if scale_gap(t, s, mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 400 {
            return Err(WeylError::Convergence(format!("bisection stalled for F({t}, {s})")));
        }
    }
    let mut l = (lo + hi) / lit(2.0);
    for _ in 0..2 {
        let slope = scale_gap_slope(t, l);
        if slope <= T::zero() {
            break;
        }
        let next = l - scale_gap(t, s, l) / slope;
        if next >= lo && next <= hi {
            l = next;
        }
    }
    Ok(l)
}

/// Newton iteration for `F(t, s)` started above the root.
///
/// Because the gap is convex and increasing, Newton from the right decreases
/// monotonically onto the root; used for bulk enumeration where a good upper
/// guess is available. Falls back to [`cone_f`] if the guess is not above the root.
pub fn cone_f_from_above<T: Real>(t: T, s: T, upper: T) -> Result<T> {
    check_cone_point(t, s)?;
    let mut l = upper.max(t.abs());
    if scale_gap(t, s, l) < T::zero() {
        return cone_f(t, s);
    }
    for _ in 0..60 {
        let slope = scale_gap_slope(t, l);
        let gap = scale_gap(t, s, l);
        if slope <= T::zero() || gap <= T::zero() {
            return Ok(l);
        }
        let next = (l - gap / slope).max(t.abs());
        if next >= l || l - next <= lit::<T>(2.0) * T::epsilon() * l {
            return Ok(next.min(l));
        }
        l = next;
    }
    cone_f(t, s)
}

/// `F(x, y - x - 1/4) - F(-x, y - 1/4)`; vanishes identically on the valid set.
pub fn involution_gap<T: Real>(x: T, y: T) -> Result<T> {
    let quarter = lit::<T>(0.25);
    let a = cone_f(x, y - x - quarter)?;
    let b = cone_f(-x, y - quarter)?;
    Ok(a - b)
}

/// Cone point with its scale.
pub fn cone_point<T: Real>(t: T, s: T) -> Result<ConePoint<T>> {
    Ok(ConePoint { t, s, f: cone_f(t, s)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn profile_special_points() {
        let p = profile(0.0f64).unwrap();
        assert!((p.g - 1.0 / PI).abs() < 1e-15);
        assert!((p.gp + 0.5).abs() < 1e-15);
        assert!((p.gpp - 1.0 / PI).abs() < 1e-15);
        let p = profile(1.0f64).unwrap();
        assert_eq!(p.g, 0.0);
        assert_eq!(p.gp, 0.0);
        assert!(p.gpp.is_infinite());
        let p = profile(-1.0f64).unwrap();
        assert!((p.g - 1.0).abs() < 1e-15);
        assert!((p.gp + 1.0).abs() < 1e-15);
        assert!(profile(1.0000001f64).is_err());
        assert!(profile(f64::NAN).is_err());
    }

    #[test]
    fn curvature_at_center_and_endpoints() {
        let k = curvature(0.0f64).unwrap();
        assert!((k - (0.8f64).powf(1.5) / PI).abs() < 1e-15);
        assert!((k - 0.2277640).abs() < 1e-7);
        assert!(curvature(1.0f64).is_err());
        assert!(curvature(-1.0f64).is_err());
    }

    #[test]
    fn gauss_inverse_examples() {
        let s5 = 5f64.sqrt();
        let d = gauss_inverse(1.0 / s5, 2.0 / s5).unwrap();
        assert!(d.t_contact.abs() < 1e-15);
        assert!((d.x_contact[1] - 1.0 / PI).abs() < 1e-15);
        assert!((d.h - 2.0 / (s5 * PI)).abs() < 1e-15);
        assert!((d.h - 0.2847050).abs() < 1e-7);
        let r = 1.0 / 2f64.sqrt();
        assert!(gauss_inverse(r, r).is_err());
        assert!(gauss_inverse(-0.1, 1.0).is_err());
        assert!(gauss_inverse(0.1, 0.0).is_err());
        let edge = gauss_inverse(0.0f64, 1.0).unwrap();
        assert_eq!(edge.t_contact, 1.0);
        assert!(edge.k.is_infinite());
    }

    #[test]
    fn support_value_matches_inner_product() {
        for &(a, b) in &[(0.1f64, 1.0f64), (0.5, 0.7), (0.3, 0.31), (2.0, 5.0)] {
            let d = gauss_inverse(a, b).unwrap();
            assert!((support_value([a, b]) - d.h).abs() < 1e-15 * b.max(1.0));
        }
    }

    #[test]
    fn cone_f_examples() {
        assert!((cone_f(0.0f64, 1.0 / PI).unwrap() - 1.0).abs() < 1e-14);
        assert!((cone_f(0.0f64, 2.0 / PI).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(cone_f(-1.0f64, 1.0).unwrap(), 1.0);
        assert_eq!(cone_f(1.0f64, 0.0).unwrap(), 1.0);
        assert!(cone_f(1.0f64, -0.1).is_err());
        assert!(cone_f(-1.0f64, 0.5).is_err());
        assert!(cone_f(0.0f64, 0.0).is_err());
    }

    #[test]
    fn cone_f_residual_contract() {
        for &(t, s) in &[(0.3f64, 0.2f64), (-2.0, 2.5), (5.0, 0.01), (-7.0, 7.000001), (1e-9, 3.0), (40.0, 13.75)] {
            let l = cone_f(t, s).unwrap();
            let resid = (g_unchecked(t / l) - s / l).abs();
            assert!(resid <= 1e-13, "F({t},{s}) = {l}, residual {resid}");
        }
    }

    #[test]
    fn newton_from_above_agrees_with_bisection() {
        for &(t, s) in &[(3.0f64, 0.75f64), (-3.0, 4.75), (0.0, 2.75), (120.0, 17.75)] {
            let a = cone_f(t, s).unwrap();
            let b = cone_f_from_above(t, s, a * 1.3 + 1.0).unwrap();
            assert!((a - b).abs() <= 1e-13 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn involution_gap_trivial_and_sample() {
        assert_eq!(involution_gap(0.0f64, 1.0).unwrap(), 0.0);
        assert!(involution_gap(0.3f64, 1.0).unwrap().abs() <= 1e-10);
        assert!(involution_gap(-0.3f64, 1.0).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn hessian_at_reference_direction() {
        let s5 = 5f64.sqrt();
        let d = gauss_inverse(1.0 / s5, 2.0 / s5).unwrap();
        let e = hessian_h(&d).unwrap();
        assert!(e.lambda_small.abs() < 1e-6, "{e:?}");
        // H is concave on the cone, so the non-zero eigenvalue is -1/K
        assert!((e.lambda_big + 1.0 / d.k).abs() < 1e-6, "{e:?}");
        assert!((e.lambda_big.abs() - 4.390509).abs() < 1e-6);
        assert!(!e.accuracy_warning);
        // rescaling the direction leaves the unit-normalised Hessian unchanged
        let d3 = gauss_inverse(3.0 / s5, 6.0 / s5).unwrap();
        let e3 = hessian_h(&d3).unwrap();
        assert!((e3.lambda_big - e.lambda_big).abs() < 1e-9);
    }

    #[test]
    fn generic_over_f32() {
        let p = profile(0.25f32).unwrap();
        let q = profile(0.25f64).unwrap();
        assert!((f64::from(p.g) - q.g).abs() < 1e-6);
        let l = cone_f(0.5f32, 0.25f32).unwrap();
        assert!((f64::from(l) - cone_f(0.5f64, 0.25).unwrap()).abs() < 1e-5);
    }
}
