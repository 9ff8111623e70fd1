//! The two transformed Schrödinger operators acting on elliptic combinations.

use core::fmt;

use num_rational::Rational64;

use super::monomial::{Coeff, EllipticCombination, EllipticMonomial, Sector};
use crate::model::Period;
use crate::poly::{q, q_from_r64, MPoly, RatFn, Ring, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `y″ + 2bm(sn·cn/dn)y′ + [λ − (a+b)(a+1−b)m·sn²]y` with `ψ = dn^{−b}·y`.
    BandEdge,
    /// The equation for `z` after `y = √(dn + cn)·z`, eigenvalue `λ₁ = λ − (1+m)/4`.
    MidBand,
}

/// An operator together with its parameters.
///
/// `reflected` selects the image under `x → 2K − x` (equivalently
/// `cn → −cn`), whose eigenfunctions are the partners `ψ(2K − x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub a: Rational64,
    pub b: Rational64,
    pub reflected: bool,
}

impl OperatorSpec {
    pub fn band_edge(a: Rational64, b: Rational64) -> Self {
        OperatorSpec {
            kind: OperatorKind::BandEdge,
            a,
            b,
            reflected: false,
        }
    }

    pub fn mid_band(a: Rational64, b: Rational64) -> Self {
        OperatorSpec {
            kind: OperatorKind::MidBand,
            a,
            b,
            reflected: false,
        }
    }

    pub fn reflect(self) -> Self {
        OperatorSpec {
            reflected: !self.reflected,
            ..self
        }
    }

    /// `E − λ` (band edge) or `E − λ₁` (mid-band) as a polynomial in `m`.
    pub fn energy_shift(&self) -> MPoly {
        let b2 = q_from_r64(self.b * self.b);
        let mb2 = MPoly::monomial(b2, 1);
        match self.kind {
            OperatorKind::BandEdge => mb2,
            OperatorKind::MidBand => mb2.plus(&MPoly::new(alloc::vec![q(1, 4), q(1, 4)])),
        }
    }

    /// Coefficients in polynomial form, multiplied through so that none
    /// carries a negative power of `dn`.
    pub fn linear_op(&self) -> LinearOp {
        let a = q_from_r64(self.a);
        let b = q_from_r64(self.b);
        let one = Q::from_int(1);
        let m = MPoly::x();
        let mono = |bits: u8, k: u32| EllipticCombination::monomial(EllipticMonomial::new(Sector::from_bits(bits), k));
        let sn = || mono(0b100, 0);
        let cn = || mono(0b010, 0);
        let dn = || mono(0b001, 0);
        let s = || mono(0b000, 1);
        let (p2, p1, p0, w) = match self.kind {
            OperatorKind::BandEdge => {
                let lead = (&a + &b) * (&a + &one - &b);
                let two_bm = m.scale(&(&b * Q::from_int(2)));
                (
                    dn(),
                    sn().times(&cn()).scale(&two_bm),
                    s().times(&dn()).scale(&m.scale(&-lead)),
                    dn(),
                )
            }
            OperatorKind::MidBand => {
                let r = (&a + &one - &b) * (&a + &b) - q(3, 4);
                let bm = m.scale(&b);
                let p1 = s()
                    .times(&cn())
                    .scale(&bm.scale(&Q::from_int(2)))
                    .minus(&dn())
                    .plus(&cn().times(&dn()).times(&dn()));
                let p0 = sn()
                    .times(&s())
                    .times(&dn())
                    .scale(&m.scale(&-r))
                    .minus(&cn().times(&sn()).scale(&bm))
                    .plus(&cn().times(&cn()).times(&sn()).times(&dn()).scale(&bm));
                (sn().times(&dn()), p1, p0, sn().times(&dn()))
            }
        };
        let op = LinearOp { p2, p1, p0, w };
        if self.reflected {
            LinearOp {
                p2: op.p2.reflect(),
                p1: op.p1.reflect().scale(&MPoly::from_ints(&[-1])),
                p0: op.p0.reflect(),
                w: op.w.reflect(),
            }
        } else {
            op
        }
    }

    /// Period of eigenfunctions built on `sector`, under `x → x + 2K`.
    pub fn period_for(&self, sector: Sector) -> Period {
        match self.kind {
            OperatorKind::MidBand => Period::EightK,
            OperatorKind::BandEdge if sector.is_antiperiodic() => Period::FourK,
            OperatorKind::BandEdge => Period::TwoK,
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            OperatorKind::BandEdge => "band-edge",
            OperatorKind::MidBand => "mid-band",
        };
        write!(f, "{kind}(a={}, b={})", self.a, self.b)?;
        if self.reflected {
            f.write_str(" reflected")?;
        }
        Ok(())
    }
}

/// `A f = p₂·f″ + p₁·f′ + p₀·f`; eigen-equation `A f + Λ·w·f = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp<T: Coeff = MPoly> {
    pub p2: EllipticCombination<T>,
    pub p1: EllipticCombination<T>,
    pub p0: EllipticCombination<T>,
    pub w: EllipticCombination<T>,
}

impl<T: Coeff> LinearOp<T> {
    /// The `Λ`-free part of the image.
    pub fn apply(&self, f: &EllipticCombination<T>) -> EllipticCombination<T> {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        self.p2
            .times(&d2)
            .plus(&self.p1.times(&d1))
            .plus(&self.p0.times(f))
    }
}

impl LinearOp {
    pub fn to_ratfn(&self) -> LinearOp<RatFn> {
        LinearOp {
            p2: self.p2.to_ratfn(),
            p1: self.p1.to_ratfn(),
            p0: self.p0.to_ratfn(),
            w: self.w.to_ratfn(),
        }
    }
}

/// Image of a combination: `constant + Λ·lambda`, where `Λ` is `λ` for the
/// band-edge operator and `λ₁` for the mid-band operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorImage {
    pub constant: EllipticCombination,
    pub lambda: EllipticCombination,
}

/// Apply an operator exactly. The band-edge operator is returned in its
/// natural form when `f` has no `dn` factor, and multiplied by `dn`
/// otherwise (the natural form then has a `1/dn` term).
pub fn apply_operator(op: &OperatorSpec, f: &EllipticCombination) -> OperatorImage {
    let lin = op.linear_op();
    let constant = lin.apply(f);
    let lambda = lin.w.times(f);
    if op.kind == OperatorKind::BandEdge {
        if let (Some(c), Some(l)) = (constant.divide_by_dn(), lambda.divide_by_dn()) {
            return OperatorImage {
                constant: c,
                lambda: l,
            };
        }
    }
    OperatorImage { constant, lambda }
}
