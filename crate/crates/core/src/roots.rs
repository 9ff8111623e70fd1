//! Scalar root finding on a sign-changing bracket.

use crate::error::{Error, Result};
use crate::math;

/// Brent's method on `[a, b]` with `f(a)·f(b) ≤ 0`. Errors from `f` are
/// propagated; a bracket without a sign change is rejected.
pub fn brent(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo: a, hi: b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if math::abs(fc) < math::abs(fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * math::abs(b) + 0.5 * xtol;
        let mid = 0.5 * (c - b);
        if math::abs(mid) <= tol || fb == 0.0 {
            return Ok(b);
        }
        if math::abs(e) >= tol && math::abs(fa) > math::abs(fb) {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * mid * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * mid * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = math::abs(p);
            if 2.0 * p < (3.0 * mid * q - math::abs(tol * q)).min(math::abs(e * q)) {
                e = d;
                d = p / q;
            } else {
                d = mid;
                e = d;
            }
        } else {
            d = mid;
            e = d;
        }
        a = b;
        fa = fb;
        b += if math::abs(d) > tol { d } else { tol.copysign(mid) };
        fb = f(b)?;
    }
    Ok(b)
}
