//! The associated Lamé potential `V(x) = p·m·sn²x + q·m·cn²x/dn²x` with
//! `p = a(a+1)`, `q = b(b+1)`, its arithmetic case split, the reduction to
//! Ince's equation and the band-gap bounds that follow from it.

use alloc::format;
use core::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::elliptic::{complete_k, JacobiEvaluator, Modulus};
use crate::error::{Error, Result};

/// Parameters of one associated Lamé potential.
///
/// `a` and `b` are kept as exact rationals: the whole case analysis rests on
/// whether `a`, `b`, `a ± b` are integers or half-integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    a: Rational64,
    b: Rational64,
    m: Modulus,
}

impl PotentialParams {
    pub fn new(a: Rational64, b: Rational64, m: Modulus) -> Result<Self> {
        // p and q are computed in i64 arithmetic; keep headroom.
        for (name, v) in [("a", a), ("b", b)] {
            if v.numer().abs() > 1 << 20 || *v.denom() > 1 << 20 {
                return Err(Error::InvalidParameters(format!(
                    "{name} = {v} has an unreasonably large numerator or denominator"
                )));
            }
        }
        Ok(PotentialParams { a, b, m })
    }

    /// Shorthand for integer or fractional parameters given as `(num, den)`.
    pub fn from_fractions(a: (i64, i64), b: (i64, i64), m: f64) -> Result<Self> {
        if a.1 == 0 || b.1 == 0 {
            return Err(Error::InvalidParameters("zero denominator".into()));
        }
        Self::new(
            Rational64::new(a.0, a.1),
            Rational64::new(b.0, b.1),
            Modulus::new(m)?,
        )
    }

    pub fn with_modulus(self, m: Modulus) -> Self {
        PotentialParams { m, ..self }
    }

    #[inline]
    pub fn a(&self) -> Rational64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> Rational64 {
        self.b
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.m
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m.value()
    }

    /// `p = a(a+1)` exactly.
    pub fn p_exact(&self) -> Rational64 {
        self.a * (self.a + 1)
    }

    /// `q = b(b+1)` exactly.
    pub fn q_exact(&self) -> Rational64 {
        self.b * (self.b + 1)
    }

    pub fn p(&self) -> f64 {
        to_f64(self.p_exact())
    }

    pub fn q(&self) -> f64 {
        to_f64(self.q_exact())
    }

    /// `p ≥ q`, the ordering used throughout the gap analysis. The reversed
    /// ordering describes the same potential shifted by `K`.
    pub fn is_conventional(&self) -> bool {
        self.p_exact() >= self.q_exact()
    }

    /// `p = q`: the potential then has period `K` instead of `2K`.
    pub fn has_half_period(&self) -> bool {
        self.p_exact() == self.q_exact()
    }

    /// The other branch `b → −b−1`, which leaves `q` unchanged.
    pub fn reflected_b(&self) -> Rational64 {
        -self.b - 1
    }

    /// Fundamental period `L` of the potential: `2K`, or `K` when `p = q`.
    pub fn period(&self) -> f64 {
        let k = complete_k(self.m);
        if self.has_half_period() {
            k
        } else {
            2.0 * k
        }
    }

    /// Lower bound on `V` over the real line.
    pub fn potential_floor(&self) -> f64 {
        self.m() * (self.p().min(0.0) + self.q().min(0.0))
    }

    /// Upper bound on `V` over the real line.
    pub fn potential_ceiling(&self) -> f64 {
        self.m() * (self.p().max(0.0) + self.q().max(0.0))
    }

    pub fn case(&self) -> CaseTag {
        classify(self.a, self.b)
    }
}

impl fmt::Display for PotentialParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} b={} m={}", self.a, self.b, self.m.value())
    }
}

pub(crate) fn to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Evaluator for `V(x)` at fixed parameters.
#[derive(Debug, Clone)]
pub struct Potential {
    params: PotentialParams,
    jac: JacobiEvaluator,
    pm: f64,
    qm: f64,
}

impl Potential {
    pub fn new(params: PotentialParams) -> Self {
        let m = params.m();
        Potential {
            jac: JacobiEvaluator::new(params.modulus()),
            pm: params.p() * m,
            qm: params.q() * m,
            params,
        }
    }

    #[inline]
    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    #[inline]
    pub fn jacobi(&self) -> &JacobiEvaluator {
        &self.jac
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let t = self.jac.eval(x);
        let cd = t.cn / t.dn;
        self.pm * t.sn * t.sn + self.qm * cd * cd
    }
}

/// `V(x)` for the given parameters.
pub fn potential_value(x: f64, params: &PotentialParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFiniteArgument(x));
    }
    Ok(Potential::new(*params).value(x))
}

/// Parity of `a − b` when both are integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Arithmetic classification of `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// Both integers: finitely many bands.
    BothInteger(Parity),
    /// Both half-odd-integers, with the parity of `a − b`.
    BothHalfInteger(Parity),
    /// `a` half-odd-integer, `b` integer: exact mid-band states exist.
    MixedHalfIntegerA,
    /// Neither of the above, but `a + b` or `a − b` is an integer.
    SumOrDiffInteger,
    /// Nothing integral; the gap theorems say nothing.
    Generic,
}

/// Case label plus the counts that the case analysis predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseTag {
    pub kind: CaseKind,
    /// Zero-width gaps among the bound bands (`b` for unequal integers,
    /// `b + 1/2` for unequal half-integers), when predicted.
    pub zero_width_gaps: Option<u32>,
    /// Which period those zero-width gaps have.
    pub zero_gap_period: Option<Period>,
    /// Number of finite open gaps (bound bands) when finite.
    pub bound_bands: Option<u32>,
    /// Doubly degenerate mid-band levels for half-integer `a = k + 1/2`,
    /// integer `b`: `k + 1`.
    pub midband_pairs: Option<u32>,
}

/// Period of a band-edge or QES state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Period {
    TwoK,
    FourK,
    EightK,
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Period::TwoK => "2K",
            Period::FourK => "4K",
            Period::EightK => "8K",
        })
    }
}

fn is_integer(r: Rational64) -> bool {
    r.is_integer()
}

fn is_half_odd(r: Rational64) -> bool {
    (r * 2).is_integer() && !r.is_integer()
}

fn parity(r: Rational64) -> Parity {
    if r.to_integer().is_even() {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Classify `(a, b)`; the order of the checks makes the variants exclusive.
pub fn classify(a: Rational64, b: Rational64) -> CaseTag {
    let diff = a - b;
    let mut tag = CaseTag {
        kind: CaseKind::Generic,
        zero_width_gaps: None,
        zero_gap_period: None,
        bound_bands: None,
        midband_pairs: None,
    };
    let unequal = a != b && a > b;
    if is_integer(a) && is_integer(b) {
        let par = parity(diff);
        tag.kind = CaseKind::BothInteger(par);
        if a >= Rational64::zero() && b >= Rational64::zero() {
            tag.bound_bands = Some(a.to_integer() as u32);
            if unequal {
                tag.zero_width_gaps = Some(b.to_integer() as u32);
                tag.zero_gap_period = Some(match par {
                    Parity::Odd => Period::TwoK,
                    Parity::Even => Period::FourK,
                });
            } else {
                tag.zero_width_gaps = Some(0);
            }
        }
    } else if is_half_odd(a) && is_half_odd(b) {
        let par = parity(diff);
        tag.kind = CaseKind::BothHalfInteger(par);
        if unequal && b > Rational64::zero() {
            tag.zero_width_gaps = None;
            tag.zero_gap_period = Some(match par {
                Parity::Odd => Period::TwoK,
                Parity::Even => Period::FourK,
            });
        }
    } else if is_half_odd(a) && is_integer(b) {
        tag.kind = CaseKind::MixedHalfIntegerA;
        if a > Rational64::zero() {
            tag.midband_pairs = Some((a - Rational64::new(1, 2)).to_integer() as u32 + 1);
        }
    } else if is_integer(a + b) || is_integer(diff) {
        tag.kind = CaseKind::SumOrDiffInteger;
    }
    tag
}

/// Coefficients of Ince's equation
/// `(1 + A cos 2t) z'' + B sin 2t z' + (C + D cos 2t) z = 0`
/// obtained with `ψ = dn^{-b} y` and `sn x = sin t`.
///
/// `C` is affine in `λ = E − m b²` and is stored as `C(λ) = (λ − c0) / (2 − m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InceCoefficients {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    /// `λ`-independent offset inside `C`.
    pub c_offset: f64,
    /// `2 − m`.
    pub c_denominator: f64,
    /// `m·b²`, so that `E = λ + energy_shift`.
    pub energy_shift: f64,
    pub substitution: SubstitutionChain,
}

impl InceCoefficients {
    /// `C` at a given `λ`.
    pub fn c(&self, lambda: f64) -> f64 {
        (lambda - self.c_offset) / self.c_denominator
    }

    pub fn lambda_from_energy(&self, energy: f64) -> f64 {
        energy - self.energy_shift
    }

    pub fn energy_from_lambda(&self, lambda: f64) -> f64 {
        lambda + self.energy_shift
    }
}

/// The substitutions connecting the Schrödinger and Ince pictures:
/// `ψ(x) = dn(x)^{dn_power} · y(x)` and `sn x = sin t`, `y(x) = z(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstitutionChain {
    pub dn_power: Rational64,
}

impl SubstitutionChain {
    /// Map `y(x)` to `ψ(x)` given `dn(x)`.
    pub fn psi_from_y(&self, y: f64, dn: f64) -> f64 {
        y * crate::math::pow(dn, to_f64(self.dn_power))
    }

    /// The angle `t` with `sin t = sn x`, continued monotonically in `x`
    /// (`t = am(x)`, the Jacobi amplitude).
    pub fn t_from_x(&self, jac: &JacobiEvaluator, x: f64) -> f64 {
        let k = jac.quarter_period();
        let cells = crate::math::round(x / (2.0 * k));
        let xr = x - 2.0 * k * cells;
        let t = jac.eval(xr);
        crate::math::atan2(t.sn, t.cn) + core::f64::consts::PI * cells
    }
}

/// Reduce the associated Lamé equation to Ince's equation.
pub fn ince_reduce(params: &PotentialParams) -> InceCoefficients {
    let m = params.m();
    let a = params.a();
    let b = params.b();
    let den = 2.0 - m;
    let lead = to_f64((a + b) * (a + 1 - b));
    InceCoefficients {
        a: m / den,
        b: to_f64(b * 2 - 1) * m / den,
        d: lead * m / den,
        c_offset: lead * m,
        c_denominator: den,
        energy_shift: m * to_f64(b * b),
        substitution: SubstitutionChain { dn_power: -b },
    }
}

/// Roots `(μ₁, μ₂)` of `Q(μ) = 2Aμ² − Bμ − D/2`.
pub fn q_roots(a: Rational64, b: Rational64) -> (Rational64, Rational64) {
    ((a + b) / 2, (b - a - 1) / 2)
}

/// Roots `(μ₁*, μ₂*)` of `Q*(μ) = Q(μ − 1/2)`.
pub fn qstar_roots(a: Rational64, b: Rational64) -> (Rational64, Rational64) {
    ((a + b + 1) / 2, (b - a) / 2)
}

/// A bound on a number of band gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GapCount {
    Finite(u32),
    Unbounded,
}

impl GapCount {
    fn min(self, other: GapCount) -> GapCount {
        core::cmp::min(self, other)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            GapCount::Finite(n) => Some(n),
            GapCount::Unbounded => None,
        }
    }
}

impl fmt::Display for GapCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapCount::Finite(n) => write!(f, "{n}"),
            GapCount::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Gap bounds for one period class. Counts include the semi-infinite gap
/// below the spectrum, which is of period `2K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapBound {
    /// From the roots of `Q` (or `Q*`) with `b` as given.
    pub raw: GapCount,
    /// Minimum over both branches `b` and `−b−1`; still a theorem.
    pub bound: GapCount,
    /// The count observed in explicit cases, where the case analysis gives
    /// one; not theorem-backed. Falls back to `bound`.
    pub sharpened: GapCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapBounds {
    pub period_2k: GapBound,
    pub period_4k: GapBound,
    /// Set when the Ince theorems were left open (`a, b` with no integral
    /// root), or when `p = q` and the potential has period `K`.
    pub note: Option<BoundNote>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundNote {
    /// Generic `a, b`: nothing is known beyond "unbounded".
    LeftOpen,
    /// `p = q`: the Ince bounds refer to period `2K`, not the true period.
    HalfPeriod,
}

/// Bound from one pair of roots: nonnegative integral roots with largest `j`
/// give `j + 1`; negative integral roots with smallest `−j₀ − 1` give `j₀ + 1`.
fn bound_from_roots(roots: [Rational64; 2]) -> GapCount {
    let mut best = GapCount::Unbounded;
    let nonneg = roots
        .iter()
        .filter(|r| r.is_integer() && !r.is_negative())
        .map(|r| r.to_integer())
        .max();
    if let Some(j) = nonneg {
        best = best.min(GapCount::Finite(j as u32 + 1));
    }
    let neg = roots
        .iter()
        .filter(|r| r.is_integer() && r.is_negative())
        .map(|r| r.to_integer())
        .min();
    if let Some(s) = neg {
        best = best.min(GapCount::Finite((-s - 1) as u32 + 1));
    }
    best
}

/// Bounds on the number of band gaps of period `2K` and `4K`.
pub fn gap_bounds(a: Rational64, b: Rational64) -> GapBounds {
    let b_ref = -b - 1;
    let q = |bb| {
        let (x, y) = q_roots(a, bb);
        bound_from_roots([x, y])
    };
    let qs = |bb| {
        let (x, y) = qstar_roots(a, bb);
        bound_from_roots([x, y])
    };
    let raw2 = q(b);
    let raw4 = qs(b);
    let bound2 = raw2.min(q(b_ref));
    let bound4 = raw4.min(qs(b_ref));

    let (mut sharp2, mut sharp4) = (bound2, bound4);
    let tag = classify(a, b);
    let half = Rational64::new(1, 2);
    let count = |r: Rational64| GapCount::Finite(r.to_integer() as u32);
    if a > b && b >= Rational64::zero() {
        match tag.kind {
            CaseKind::BothInteger(Parity::Odd) => {
                sharp2 = count((a - b + 1) * half);
                sharp4 = count((a + b + 1) * half);
            }
            CaseKind::BothInteger(Parity::Even) => {
                sharp2 = count((a + b + 2) * half);
                sharp4 = count((a - b) * half);
            }
            CaseKind::BothHalfInteger(Parity::Odd) => {
                sharp2 = count((a - b + 1) * half);
            }
            CaseKind::BothHalfInteger(Parity::Even) => {
                sharp4 = count((a - b) * half);
            }
            _ => {}
        }
    }
    let note = if a == b || a == -b - 1 {
        Some(BoundNote::HalfPeriod)
    } else if bound2 == GapCount::Unbounded && bound4 == GapCount::Unbounded {
        Some(BoundNote::LeftOpen)
    } else {
        None
    };
    GapBounds {
        period_2k: GapBound {
            raw: raw2,
            bound: bound2,
            sharpened: sharp2.min(bound2),
        },
        period_4k: GapBound {
            raw: raw4,
            bound: bound4,
            sharpened: sharp4.min(bound4),
        },
        note,
    }
}
