//! Central finite differences with Richardson extrapolation.

use crate::scalar::{lit, Real};

/// A derivative estimate together with its extrapolation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// |last extrapolant - previous level|, plus a rounding allowance.
    pub error: T,
    /// Plain Richardson disagreement, without the rounding allowance.
    pub disagreement: T,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Raw central difference of mixed order `(a, b)` at the origin with step `h`:
/// `delta_h^a delta_h^b f / h^(a+b)`. Truncation error is O(h^2).
fn central<T: Real, F: Fn(T, T) -> T>(f: &F, a: u32, b: u32, h: T) -> (T, T) {
    let mut acc = T::zero();
    let mut fmax = T::zero();
    for i in 0..=a {
        let ci = binomial(a, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
        let x = h * lit::<T>(f64::from(a) / 2.0 - f64::from(i));
        for j in 0..=b {
            let cj = binomial(b, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
            let y = h * lit::<T>(f64::from(b) / 2.0 - f64::from(j));
            let v = f(x, y);
            fmax = fmax.max(v.abs());
            acc = acc + lit::<T>(ci * cj) * v;
        }
    }
    (acc / h.powi((a + b) as i32), fmax)
}

/// Mixed partial `d^(a+b) f / dx^a dy^b` at `(0, 0)`.
///
/// Evaluates the central stencil at `h`, `h/2`, `h/4` and applies two
/// Richardson levels (error expansion in even powers of `h`).
pub fn mixed_partial<T: Real, F: Fn(T, T) -> T>(f: &F, a: u32, b: u32, h: T) -> Estimate<T> {
    let two = lit::<T>(2.0);
    let (d0, m0) = central(f, a, b, h);
    let (d1, m1) = central(f, a, b, h / two);
    let (d2, m2) = central(f, a, b, h / (two * two));
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let r1a = (four * d1 - d0) / three;
    let r1b = (four * d2 - d1) / three;
    let r2 = (lit::<T>(16.0) * r1b - r1a) / lit::<T>(15.0);
    let disagreement = (r2 - r1b).abs();
    let order = (a + b) as i32;
    let fmax = m0.max(m1).max(m2);
    let rounding = lit::<T>(4.0) * T::epsilon() * fmax * two.powi(order)
        / (h / (two * two)).powi(order);
    Estimate {
        value: r2,
        error: disagreement + rounding,
        disagreement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_mixed_partials_are_exact() {
        // f = x^3 y^2 + 2 x y: d^3/dx^2 dy = 12 x y + 0 -> 0 at origin; d^2/dxdy = 2
        let f = |x: f64, y: f64| x.powi(3) * y.powi(2) + 2.0 * x * y + x * x;
        let e = mixed_partial(&f, 1, 1, 1e-2);
        assert!((e.value - 2.0).abs() < 1e-9, "{e:?}");
        let e = mixed_partial(&f, 3, 2, 1e-1);
        assert!((e.value - 12.0).abs() < 1e-6, "{e:?}");
        let e = mixed_partial(&f, 2, 0, 1e-2);
        assert!((e.value - 2.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn transcendental_derivative() {
        let e = mixed_partial(&|x: f64, _| (0.3 + x).sin(), 1, 0, 1e-3);
        assert!((e.value - 0.3f64.cos()).abs() < 1e-12);
        assert!(e.error < 1e-9);
        let e = mixed_partial(&|x: f64, _| x.exp(), 2, 0, 1e-2);
        assert!((e.value - 1.0).abs() < 1e-9);
    }
}
