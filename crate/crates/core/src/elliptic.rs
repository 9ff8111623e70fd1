//! Jacobi elliptic functions `sn`, `cn`, `dn` and the complete elliptic
//! integral `K(m)`, in the parameter convention `m = k²`.
//!
//! Evaluation follows the descending Landen scheme: the arithmetic-geometric
//! mean ladder `a_n, b_n, c_n` is built once per modulus, the argument is
//! reduced modulo `4K`, and the amplitude is recovered by the backward
//! recurrence `φ_{n-1} = (φ_n + asin(c_n / a_n · sin φ_n)) / 2`.

use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::math;

/// Upper bound on the AGM ladder length; convergence is quadratic so the
/// ladder terminates after at most seven rungs for `m ≤ 1 − 1e−15`.
const MAX_LADDER: usize = 16;

/// Residual modulus at which the ladder is cut.
const LADDER_TOL: f64 = 1e-16;

/// Elliptic modulus parameter `m ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && (0.0..1.0).contains(&m) {
            Ok(Modulus(m))
        } else {
            Err(Error::InvalidModulus(m))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary parameter `1 − m`.
    #[inline]
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Modulus::new(m)
    }
}

/// Values of `(sn, cn, dn)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_LADDER {
        if math::abs(a - b) <= LADDER_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = math::sqrt(a * b);
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(m) = π / (2·AGM(1, √(1−m)))`.
pub fn complete_k(m: Modulus) -> f64 {
    if m.value() == 0.0 {
        return FRAC_PI_2;
    }
    PI / (2.0 * agm(1.0, math::sqrt(m.complement())))
}

/// Evaluate `(sn, cn, dn)` at `x` for modulus `m`.
///
/// Convenience wrapper around [`JacobiEvaluator`]; callers evaluating many
/// points at one modulus should build the evaluator once.
pub fn jacobi(x: f64, m: Modulus) -> Result<JacobiTriple> {
    JacobiEvaluator::new(m).try_eval(x)
}

/// Precomputed AGM ladder for one modulus.
#[derive(Debug, Clone)]
pub struct JacobiEvaluator {
    m: Modulus,
    quarter_period: f64,
    rungs: usize,
    a: [f64; MAX_LADDER + 1],
    c: [f64; MAX_LADDER + 1],
}

impl JacobiEvaluator {
    pub fn new(m: Modulus) -> Self {
        let mut a = [0.0; MAX_LADDER + 1];
        let mut c = [0.0; MAX_LADDER + 1];
        a[0] = 1.0;
        c[0] = math::sqrt(m.value());
        let mut b = math::sqrt(m.complement());
        let mut rungs = 0;
        while rungs < MAX_LADDER && math::abs(c[rungs]) > LADDER_TOL * a[rungs] {
            let (an, bn) = (a[rungs], b);
            a[rungs + 1] = 0.5 * (an + bn);
            c[rungs + 1] = 0.5 * (an - bn);
            b = math::sqrt(an * bn);
            rungs += 1;
        }
        let quarter_period = if rungs == 0 {
            FRAC_PI_2
        } else {
            PI / (2.0 * 0.5 * (a[rungs] + b))
        };
        JacobiEvaluator {
            m,
            quarter_period,
            rungs,
            a,
            c,
        }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.m
    }

    /// `K(m)`.
    #[inline]
    pub fn quarter_period(&self) -> f64 {
        self.quarter_period
    }

    /// Like [`eval`](Self::eval) but rejects non-finite arguments.
    pub fn try_eval(&self, x: f64) -> Result<JacobiTriple> {
        if !x.is_finite() {
            return Err(Error::NonFiniteArgument(x));
        }
        Ok(self.eval(x))
    }

    /// Evaluate at a finite `x`. Non-finite input yields NaNs.
    pub fn eval(&self, x: f64) -> JacobiTriple {
        let period = 4.0 * self.quarter_period;
        let u = x - period * math::round(x / period);
        if self.rungs == 0 {
            return JacobiTriple {
                sn: math::sin(u),
                cn: math::cos(u),
                dn: 1.0,
            };
        }
        let n = self.rungs;
        let mut phi = ((1u64 << n) as f64) * self.a[n] * u;
        for i in (1..=n).rev() {
            phi = 0.5 * (phi + math::asin(self.c[i] / self.a[i] * math::sin(phi)));
        }
        let sn = math::sin(phi);
        let cn = math::cos(phi);
        // dn² = (1 − m) + m·cn² keeps relative accuracy when dn is small.
        let m = self.m.value();
        let dn = math::sqrt(self.m.complement() + m * cn * cn);
        JacobiTriple { sn, cn, dn }
    }

    /// Analytic branch of `√(dn x + cn x)`, continued through the zeros of
    /// `dn + cn` at `x ≡ 2K (mod 4K)`. The result is `4K`-antiperiodic.
    pub fn sqrt_dn_plus_cn(&self, x: f64) -> f64 {
        let period = 4.0 * self.quarter_period;
        let cells = math::floor(x / period);
        let xr = x - period * cells;
        let t = self.eval(xr);
        let value = if t.cn >= 0.0 {
            let s = math::sqrt(t.dn + t.cn);
            if xr < 2.0 * self.quarter_period {
                s
            } else {
                -s
            }
        } else {
            math::sqrt(self.m.complement()) * t.sn / math::sqrt(t.dn - t.cn)
        };
        if (cells as i64).rem_euclid(2) == 0 {
            value
        } else {
            -value
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(m: f64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    #[test]
    fn k_limits() {
        assert_eq!(complete_k(modulus(0.0)), FRAC_PI_2);
        // mpmath ellipk(0.5), 30 digits
        let k = complete_k(modulus(0.5));
        assert!((k - 1.854_074_677_301_371_918_433_850_347_2).abs() < 1e-14 * k);
        assert!(complete_k(modulus(1.0 - 1e-12)) > 14.0);
        assert!(Modulus::new(1.0).is_err());
        assert!(Modulus::new(-0.1).is_err());
        assert!(Modulus::new(f64::NAN).is_err());
    }

    #[test]
    fn mpmath_reference_values() {
        // (x, m, sn, cn, dn) from mpmath.ellipfun at 30 digits
        let cases = [
            (0.7, 0.3, 0.632_304_776_310_864_5, 0.774_719_736_326_929_7, 0.938_113_639_681_430_2),
            (2.5, 0.99, 0.988_813_808_425_184_3, 0.149_155_128_197_735_36, 0.178_954_686_289_591_3),
            (-13.1, 0.75, 0.159_701_780_359_291_1, -0.987_165_305_989_869_5, 0.990_389_572_851_286_9),
        ];
        for (x, m, sn, cn, dn) in cases {
            let t = jacobi(x, modulus(m)).unwrap();
            assert!((t.sn - sn).abs() < 1e-13, "sn({x},{m})");
            assert!((t.cn - cn).abs() < 1e-13, "cn({x},{m})");
            assert!((t.dn - dn).abs() < 1e-13, "dn({x},{m})");
        }
    }

    #[test]
    fn origin_and_quarter_period() {
        for m in [0.0, 0.2, 0.5, 0.9, 0.999] {
            let md = modulus(m);
            let t = jacobi(0.0, md).unwrap();
            assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
            let k = complete_k(md);
            let t = jacobi(k, md).unwrap();
            assert!((t.sn - 1.0).abs() < 1e-12);
            assert!(t.cn.abs() < 1e-12);
            assert!((t.dn - (1.0 - m).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn trigonometric_and_hyperbolic_limits() {
        for x in [-3.0, -0.4, 0.3, 1.1, 2.9, 10.0] {
            let t = jacobi(x, modulus(0.0)).unwrap();
            assert!((t.sn - x.sin()).abs() < 1e-14);
            assert!((t.cn - x.cos()).abs() < 1e-14);
            assert_eq!(t.dn, 1.0);
            let t = jacobi(x, modulus(1.0 - 1e-15)).unwrap();
            let sech = 1.0 / x.cosh();
            assert!((t.sn - x.tanh()).abs() < 1e-6);
            assert!((t.cn - sech).abs() < 1e-6);
            assert!((t.dn - sech).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_non_finite_argument() {
        assert!(jacobi(f64::INFINITY, modulus(0.5)).is_err());
        assert!(jacobi(f64::NAN, modulus(0.5)).is_err());
    }

    #[test]
    fn sqrt_branch_is_smooth_and_antiperiodic() {
        let ev = JacobiEvaluator::new(modulus(0.7));
        let k = ev.quarter_period();
        for x in [0.1, 1.0, k, 1.9 * k, 2.0 * k - 1e-3, 2.0 * k + 1e-3, 3.0 * k, 3.99 * k] {
            let v = ev.sqrt_dn_plus_cn(x);
            let t = ev.eval(x);
            assert!((v * v - (t.dn + t.cn)).abs() < 1e-12);
            assert!((ev.sqrt_dn_plus_cn(x + 4.0 * k) + v).abs() < 1e-12);
        }
        // no jump through x = 2K, x = 3K, x = 4K
        for x0 in [2.0 * k, 3.0 * k, 4.0 * k] {
            let h = 1e-7;
            let jump = ev.sqrt_dn_plus_cn(x0 + h) - ev.sqrt_dn_plus_cn(x0 - h);
            assert!(jump.abs() < 1e-6, "jump at {x0}: {jump}");
        }
    }
}
