//! Small numerical kernels shared across modules.

use num_complex::Complex64;
use std::f64::consts::PI;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Roots of `a z^2 + b z + c`, computed without cancellation.
///
/// The larger-magnitude root is taken first and the second recovered from
/// the product of roots. Returns `None` when `a` and `b` both vanish.
/// With `a == 0` the single root of the linear equation is returned twice.
pub fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> Option<(Complex64, Complex64)> {
    if a == ZERO {
        if b == ZERO {
            return None;
        }
        let r = -c / b;
        return Some((r, r));
    }
    let sq = (b * b - 4.0 * a * c).sqrt();
    let plus = -b + sq;
    let minus = -b - sq;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    if big == ZERO {
        // b = 0 and c = 0: double root at the origin.
        return Some((ZERO, ZERO));
    }
    let r1 = big / (2.0 * a);
    let r2 = (2.0 * c) / big;
    Some((r1, r2))
}

/// Point on the unit circle at angle `t`.
#[inline]
pub fn unit(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

/// Reduce an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle(t: f64) -> f64 {
    t.rem_euclid(2.0 * PI)
}

/// Shortest angular distance between two angles.
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(2.0 * PI - d)
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `width`. Returns `(t, f(t))`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any bracket far below f64 resolution.
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for a sign change of `g` on `[lo, hi]`, assuming `g(lo) >= 0 >= g(hi)`.
pub fn bisect_decreasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Second derivative by the 5-point central stencil, Richardson-extrapolated once
/// (steps `h` and `h/2`).
pub fn second_derivative(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    let stencil = |h: f64| {
        let f0 = f(t);
        (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f0 + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h)
    };
    let coarse = stencil(h);
    let fine = stencil(0.5 * h);
    (16.0 * fine - coarse) / 15.0
}
