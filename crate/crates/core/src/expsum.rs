//! Two-dimensional exponential sums `S(T, M; G, F) = sum_m G(m/M) e(T F(m/M))`,
//! Weyl-Van der Corput differencing, and the determinants `h_q` built from
//! high mixed derivatives of `H`.

use crate::error::{Result, WeylError};
use crate::fd;
use crate::geometry::{support_value, ConeDirection};
use crate::scalar::{lit, Real};
use num_complex::Complex;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

/// Largest `M` accepted by [`s_eval`].
pub const MAX_M: f64 = 1e4;
/// Largest `M` accepted by [`wvdc_check`].
pub const MAX_M_WVDC: f64 = 200.0;
/// Frozen bound on the Weyl-Van der Corput ratio for `q = 1`, `M = 50`,
/// `H = 8` and the reference pair (largest measured value 0.155, at `T = 1`).
pub const WVDC_RATIO_FIXTURE: f64 = 0.5;
/// Frozen lower constant in `|h_1(xi, v1, v2)| >= c K^10` for the
/// [`basis_choice`] frame with `A = 3` (smallest measured value 722 for
/// `xi1/xi2` in `[0.03, 0.975]`).
pub const HQ_LOWER_FIXTURE: f64 = 700.0;

pub type Handle<T> = Arc<dyn Fn([T; 2]) -> T + Send + Sync>;

/// Open disk `|x - center| < radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball<T> {
    pub center: [T; 2],
    pub radius: T,
}

impl<T: Real> Ball<T> {
    pub fn new(center: [T; 2], radius: T) -> Self {
        Ball { center, radius }
    }

    pub fn contains(&self, x: [T; 2]) -> bool {
        (x[0] - self.center[0]).hypot(x[1] - self.center[1]) < self.radius
    }

    /// `c0` with `ball ⊂ c0 B(0, 1)`.
    pub fn c0(&self) -> T {
        self.center[0].hypot(self.center[1]) + self.radius
    }

    fn within(&self, outer: &Ball<T>) -> bool {
        (self.center[0] - outer.center[0]).hypot(self.center[1] - outer.center[1]) + self.radius <= outer.radius
    }
}

/// Domain `{x : x + o in base for every offset o}`, an intersection of
/// translated copies of a disk (the plain disk when the only offset is 0).
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDescriptor<T> {
    pub base: Ball<T>,
    pub offsets: Vec<[T; 2]>,
}

impl<T: Real> DomainDescriptor<T> {
    pub fn ball(base: Ball<T>) -> Self {
        DomainDescriptor { base, offsets: vec![[T::zero(), T::zero()]] }
    }

    pub fn contains(&self, x: [T; 2]) -> bool {
        self.offsets.iter().all(|o| self.base.contains([x[0] + o[0], x[1] + o[1]]))
    }

    pub fn c0(&self) -> T {
        self.base.c0()
    }

    /// Empty when two offsets are a diameter or more apart.
    pub fn is_empty(&self) -> bool {
        let two_r = self.base.radius + self.base.radius;
        self.offsets
            .iter()
            .any(|a| self.offsets.iter().any(|b| (a[0] - b[0]).hypot(a[1] - b[1]) >= two_r))
    }
}

/// Amplitude `G` supported in `support`, and phase `F` defined on `domain`.
#[derive(Clone)]
pub struct PhasePair<T> {
    pub g: Handle<T>,
    pub f: Handle<T>,
    /// A disk containing `supp G` (the sum only visits lattice points inside it).
    pub support: Ball<T>,
    pub domain: DomainDescriptor<T>,
}

impl<T: Real> fmt::Debug for PhasePair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhasePair").field("support", &self.support).field("domain", &self.domain).finish()
    }
}

impl<T: Real> PhasePair<T> {
    pub fn new(g: Handle<T>, f: Handle<T>, support: Ball<T>, domain: Ball<T>) -> Result<Self> {
        if !support.within(&domain) {
            return Err(WeylError::Domain("support of G must lie inside the phase domain".into()));
        }
        Ok(PhasePair { g, f, support, domain: DomainDescriptor::ball(domain) })
    }
}

/// `e * exp(-1 / (1 - |x - c|^2 / r^2))` on the disk, so the value at the centre is 1.
pub fn bump<T: Real>(ball: Ball<T>) -> Handle<T> {
    Arc::new(move |x: [T; 2]| {
        let rho2 = ((x[0] - ball.center[0]).powi(2) + (x[1] - ball.center[1]).powi(2)) / (ball.radius * ball.radius);
        if rho2 >= T::one() {
            T::zero()
        } else {
            (T::one() - T::one() / (T::one() - rho2)).exp()
        }
    })
}

/// Phase `H(xi0 + y)` with `xi0 = 2 (1, 2)/sqrt 5`, bump amplitude on
/// `B(0, 0.4)` and domain `B(0, 0.45)`, which stays inside the open cone.
pub fn reference_pair<T: Real>() -> PhasePair<T> {
    let s5 = lit::<T>(5.0).sqrt();
    let xi0 = [lit::<T>(2.0) / s5, lit::<T>(4.0) / s5];
    let support = Ball::new([T::zero(), T::zero()], lit(0.4));
    let domain = Ball::new([T::zero(), T::zero()], lit(0.45));
    let f: Handle<T> = Arc::new(move |y: [T; 2]| support_value([xi0[0] + y[0], xi0[1] + y[1]]));
    PhasePair::new(bump(support), f, support, domain).expect("reference support inside domain")
}

fn e<T: Real>(x: T) -> Complex<T> {
    let (s, c) = (lit::<T>(2.0) * T::PI() * x).sin_cos();
    Complex::new(c, s)
}

fn check_m<T: Real>(m: T, limit: f64) -> Result<f64> {
    let mf = m.to_f64().unwrap_or(f64::NAN);
    if !(mf > 1.0) {
        return Err(WeylError::Domain(format!("M = {mf} must exceed 1")));
    }
    if mf > limit {
        return Err(WeylError::guard("M", mf, limit));
    }
    Ok(mf)
}

/// Direct sum over the lattice points `m` with `m/M` in the support disk,
/// lexicographic in `(m1, m2)`. Rows are summed in parallel and combined in
/// row order, so the result does not depend on the thread count.
pub fn s_eval<T: Real>(t: T, m: T, pair: &PhasePair<T>) -> Result<Complex<T>> {
    check_m(m, MAX_M)?;
    let (lo1, hi1, lo2, hi2) = lattice_box(m, &pair.support);
    let rows: Vec<Complex<T>> = (0..(hi1 - lo1 + 1).max(0) as usize)
        .into_par_iter()
        .map(|i| {
            let m1 = lo1 + i as i64;
            let x1 = lit::<T>(m1 as f64) / m;
            let mut acc = Complex::new(T::zero(), T::zero());
            for m2 in lo2..=hi2 {
                let x = [x1, lit::<T>(m2 as f64) / m];
                let g = (pair.g)(x);
                if g != T::zero() {
                    acc = acc + e(t * (pair.f)(x)) * g;
                }
            }
            acc
        })
        .collect();
    Ok(rows.into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b))
}

/// Integer box covering `M * support`.
pub fn lattice_box<T: Real>(m: T, support: &Ball<T>) -> (i64, i64, i64, i64) {
    let r = support.radius * m;
    let c = [support.center[0] * m, support.center[1] * m];
    let f = |v: T| v.to_f64().unwrap_or(0.0);
    (
        f(c[0] - r).floor() as i64,
        f(c[0] + r).ceil() as i64,
        f(c[1] - r).floor() as i64,
        f(c[1] + r).ceil() as i64,
    )
}

/// One differencing step `(h_l, r_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shift {
    pub h: u32,
    pub r: [i32; 2],
}

/// Output of [`difference_transform`].
#[derive(Clone)]
pub struct DifferencedPair<T> {
    pub q: usize,
    pub shifts: Vec<Shift>,
    pub m: T,
    /// `G_q(x) = prod_u G(x + sum_l u_l (h_l/M) r_l)`
    pub gq: Handle<T>,
    /// `F_q(x) = prod_l (M/h_l) * (iterated difference of F)`
    pub fq: Handle<T>,
    /// `D_q`
    pub domain: DomainDescriptor<T>,
    /// Same as the input support (a superset of `supp G_q`).
    pub support: Ball<T>,
}

impl<T: Real> fmt::Debug for DifferencedPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferencedPair")
            .field("q", &self.q)
            .field("shifts", &self.shifts)
            .field("domain", &self.domain)
            .finish()
    }
}

impl<T: Real> DifferencedPair<T> {
    pub fn as_pair(&self) -> PhasePair<T> {
        PhasePair { g: self.gq.clone(), f: self.fq.clone(), support: self.support, domain: self.domain.clone() }
    }

    /// `F_q(x) prod(h_l / M)`, i.e. the plain iterated difference.
    pub fn scaled_fq(&self, x: [T; 2]) -> T {
        let scale = self.shifts.iter().fold(T::one(), |a, s| a * lit::<T>(f64::from(s.h)) / self.m);
        (self.fq)(x) * scale
    }
}

/// Vertex offsets `sum_l u_l v_l` over `u in {0,1}^q` and their signs `(-1)^{q - |u|}`.
fn vertices<T: Real>(vs: &[[T; 2]]) -> Vec<([T; 2], T)> {
    let q = vs.len();
    (0..1usize << q)
        .map(|mask| {
            let mut o = [T::zero(), T::zero()];
            let mut ones = 0;
            for (l, v) in vs.iter().enumerate() {
                if mask >> l & 1 == 1 {
                    o[0] = o[0] + v[0];
                    o[1] = o[1] + v[1];
                    ones += 1;
                }
            }
            let sign = if (q - ones).is_multiple_of(2) { T::one() } else { -T::one() };
            (o, sign)
        })
        .collect()
}

/// `Delta_{v_q} ... Delta_{v_1} F (x)` by recursion on the steps.
pub fn iterated_difference<T: Real>(f: &dyn Fn([T; 2]) -> T, x: [T; 2], vs: &[[T; 2]]) -> T {
    match vs.split_last() {
        None => f(x),
        Some((v, rest)) => {
            iterated_difference(f, [x[0] + v[0], x[1] + v[1]], rest) - iterated_difference(f, x, rest)
        }
    }
}

/// The `q`-fold differenced pair of the A-process.
pub fn difference_transform<T: Real>(pair: &PhasePair<T>, shifts: &[Shift], m: T) -> Result<DifferencedPair<T>> {
    check_m(m, f64::INFINITY)?;
    if shifts.is_empty() {
        return Err(WeylError::Domain("at least one differencing step is required".into()));
    }
    for s in shifts {
        if s.h < 1 {
            return Err(WeylError::Domain("differencing steps need h >= 1".into()));
        }
        if s.r == [0, 0] || s.r.iter().any(|c| c.abs() > 1) {
            return Err(WeylError::Domain(format!("direction {:?} must be non-zero with entries in {{-1, 0, 1}}", s.r)));
        }
    }
    let vs: Vec<[T; 2]> = shifts
        .iter()
        .map(|s| {
            let k = lit::<T>(f64::from(s.h)) / m;
            [k * lit(f64::from(s.r[0])), k * lit(f64::from(s.r[1]))]
        })
        .collect();
    let verts = vertices(&vs);
    let domain = DomainDescriptor { base: pair.domain.base, offsets: verts.iter().map(|v| v.0).collect() };
    if domain.is_empty() {
        return Err(WeylError::Domain("translated supports leave the phase domain: D_q is empty".into()));
    }
    let scale = shifts.iter().fold(T::one(), |a, s| a * m / lit::<T>(f64::from(s.h)));
    let g = pair.g.clone();
    let offsets: Vec<[T; 2]> = domain.offsets.clone();
    let gq: Handle<T> = Arc::new(move |x: [T; 2]| {
        let mut p = T::one();
        for o in &offsets {
            p = p * g([x[0] + o[0], x[1] + o[1]]);
            if p == T::zero() {
                break;
            }
        }
        p
    });
    let f = pair.f.clone();
    let fq: Handle<T> = Arc::new(move |x: [T; 2]| {
        let mut acc = T::zero();
        for (o, sign) in &verts {
            acc = acc + *sign * f([x[0] + o[0], x[1] + o[1]]);
        }
        acc * scale
    });
    Ok(DifferencedPair {
        q: shifts.len(),
        shifts: shifts.to_vec(),
        m,
        gq,
        fq,
        domain,
        support: pair.support,
    })
}

/// Both sides of the Weyl-Van der Corput inequality (without its constant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WvdcResult {
    pub lhs: f64,
    pub rhs_no_const: f64,
    pub ratio: f64,
    /// Number of `(h_1, ..., h_q)` tuples summed.
    pub terms: usize,
}

/// `|S|^Q` against `M^{2Q}/H + M^{2(Q-1)}/(H_1...H_q) sum_h |S(h1..hq T M^{-q}, M; G_q, F_q)|`
/// with `H_l = H^{2^{l-q}}` and the directions `rs[l]`.
pub fn wvdc_check(pair: &PhasePair<f64>, rs: &[[i32; 2]], h_param: f64, t: f64, m: f64) -> Result<WvdcResult> {
    check_m(m, MAX_M_WVDC)?;
    let q = rs.len();
    if !(1..=2).contains(&q) {
        return Err(WeylError::Domain(format!("q = {q} must be 1 or 2")));
    }
    if !(h_param > 1.0 && h_param <= m) {
        return Err(WeylError::Domain(format!("H = {h_param} must satisfy 1 < H <= M")));
    }
    let big_q = 1i32 << q;
    let hs: Vec<f64> = (1..=q).map(|l| h_param.powf(2f64.powi(l as i32 - q as i32))).collect();
    // integer tuples 1 <= h_l < H_l
    let ranges: Vec<u32> = hs.iter().map(|&hl| (hl.ceil() as u32).saturating_sub(1)).collect();
    let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
    for &top in &ranges {
        tuples = tuples
            .into_iter()
            .flat_map(|t| (1..=top).map(move |h| {
                let mut t = t.clone();
                t.push(h);
                t
            }))
            .collect();
    }
    let lhs = s_eval(t, m, pair)?.norm().powi(big_q);
    let sums: Vec<f64> = tuples
        .par_iter()
        .map(|hvec| {
            let shifts: Vec<Shift> = hvec.iter().zip(rs).map(|(&h, &r)| Shift { h, r }).collect();
            let d = difference_transform(pair, &shifts, m)?;
            let prod_h: f64 = hvec.iter().map(|&h| f64::from(h)).product();
            Ok(s_eval(prod_h * t * m.powi(-(q as i32)), m, &d.as_pair())?.norm())
        })
        .collect::<Result<_>>()?;
    let h_prod: f64 = hs.iter().product();
    let rhs = m.powi(2 * big_q) / h_param + m.powi(2 * (big_q - 1)) / h_prod * sums.iter().sum::<f64>();
    Ok(WvdcResult { lhs, rhs_no_const: rhs, ratio: lhs / rhs, terms: tuples.len() })
}

/// `h_q(xi, v1, v2) = det(g_ij)` with
/// `g_ij = d^{q+2} F / du1 du_i du_j du2^{q-1}` at 0, `F(u) = H(xi + u1 v1 + u2 v2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HqResult<T> {
    pub q: u32,
    pub xi: [T; 2],
    pub v1: [T; 2],
    pub v2: [T; 2],
    pub value: T,
    pub est_error: T,
    /// `[g11, g12, g22]`
    pub g: [T; 3],
}

/// Base step of the finite-difference stencil by derivative order.
fn base_step(order: u32) -> f64 {
    match order {
        0..=3 => 1e-3,
        4 => 5e-3,
        _ => 1e-2,
    }
}

/// `h_q` without the accuracy contract (for degenerate frames, where the
/// determinant is legitimately close to zero).
pub fn hq_det_unchecked<T: Real>(q: u32, dir: &ConeDirection<T>, v1: [T; 2], v2: [T; 2]) -> Result<HqResult<T>> {
    if !(1..=3).contains(&q) {
        return Err(WeylError::Domain(format!("q = {q} must be 1, 2 or 3")));
    }
    if !dir.is_interior() {
        return Err(WeylError::Domain("h_q needs a direction strictly inside the cone".into()));
    }
    let xi = dir.xi();
    let vnorm = v1[0].hypot(v1[1]).max(v2[0].hypot(v2[1]));
    if !(vnorm > T::zero()) {
        return Err(WeylError::Domain("frame vectors must be non-zero".into()));
    }
    let order = q + 2;
    let h = lit::<T>(base_step(order)) / (vnorm * dir.k.max(T::one()));
    // stencil offsets are at most order/2 * h along each vector, so every
    // node lies in the ball of radius order * h * |v| around xi
    let reach = lit::<T>(f64::from(order)) * h * vnorm;
    let to_boundary = xi[0].min((xi[1] - xi[0]) / lit::<T>(2.0).sqrt());
    if !(reach < to_boundary) {
        return Err(WeylError::Domain("finite-difference stencil leaves the cone".into()));
    }
    let f = |a: T, b: T| support_value([xi[0] + a * v1[0] + b * v2[0], xi[1] + a * v1[1] + b * v2[1]]);
    let g11 = fd::mixed_partial(&f, 3, q - 1, h);
    let g12 = fd::mixed_partial(&f, 2, q, h);
    let g22 = fd::mixed_partial(&f, 1, q + 1, h);
    let value = g11.value * g22.value - g12.value * g12.value;
    let est_error = g11.value.abs() * g22.error
        + g22.value.abs() * g11.error
        + g11.error * g22.error
        + lit::<T>(2.0) * g12.value.abs() * g12.error
        + g12.error * g12.error;
    Ok(HqResult { q, xi, v1, v2, value, est_error, g: [g11.value, g12.value, g22.value] })
}

/// `h_q`; fails with an accuracy error if `est_error > 0.1 |value|`.
pub fn hq_det<T: Real>(q: u32, dir: &ConeDirection<T>, v1: [T; 2], v2: [T; 2]) -> Result<HqResult<T>> {
    let r = hq_det_unchecked(q, dir, v1, v2)?;
    if !(r.est_error <= lit::<T>(0.1) * r.value.abs()) {
        return Err(WeylError::Accuracy(format!(
            "h_{q} = {} with estimated error {}",
            r.value, r.est_error
        )));
    }
    Ok(r)
}

/// The orthonormal frame `v1* = (-xi2, xi1)`, `v2* = (xi1, xi2)` of a unit direction.
pub fn reference_frame<T: Real>(dir: &ConeDirection<T>) -> ([T; 2], [T; 2]) {
    let u = dir.unit();
    ([-u.xi2, u.xi1], [u.xi1, u.xi2])
}

/// Integer frame of the non-vanishing determinant construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegerFrame {
    pub v1: [i64; 2],
    pub v2: [i64; 2],
    pub n: i64,
}

/// `N = max(ceil(A K^{q+1}), 3)`, `N_l = round(N xi_l)`, `v1 = (-N2, N1)`, `v2 = (N1, N2)`.
///
/// The floor of 3 keeps `N >= 2 sqrt 2`, which gives `N/2 <= |v_l| <= 3N/2`
/// also for flat directions where `A K^{q+1}` is small.
pub fn basis_choice<T: Real>(dir: &ConeDirection<T>, q: u32, a: T) -> Result<IntegerFrame> {
    if !dir.is_interior() {
        return Err(WeylError::Domain("basis choice needs a direction strictly inside the cone".into()));
    }
    if !(a >= lit::<T>(2.0 * std::f64::consts::SQRT_2)) {
        return Err(WeylError::Domain(format!("A = {a} must be at least 2 sqrt 2")));
    }
    let u = dir.unit();
    let target = (a * dir.k.powi(q as i32 + 1)).ceil();
    let n = target.to_f64().filter(|v| *v < 1e15).ok_or_else(|| WeylError::guard("N", f64::INFINITY, 1e15))?;
    let n = (n as i64).max(3);
    let nf = lit::<T>(n as f64);
    let n1 = (nf * u.xi1).round().to_i64().unwrap_or(0);
    let n2 = (nf * u.xi2).round().to_i64().unwrap_or(0);
    Ok(IntegerFrame { v1: [-n2, n1], v2: [n1, n2], n })
}
