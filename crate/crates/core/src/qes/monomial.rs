//! Canonical elliptic monomials `sn^{εs}·cn^{εc}·dn^{εd}·(sn²)^k` and their
//! finite linear combinations, with exact coefficients in `Q[m]` or `Q(m)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::poly::{MPoly, RatFn, Ring, Q};

/// Which of `sn`, `cn`, `dn` appear to the first power.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Sector(u8);

impl Sector {
    const S: u8 = 0b100;
    const C: u8 = 0b010;
    const D: u8 = 0b001;

    pub const fn new(eps_s: bool, eps_c: bool, eps_d: bool) -> Self {
        Sector(((eps_s as u8) << 2) | ((eps_c as u8) << 1) | eps_d as u8)
    }

    /// From the three bits written as a number `εs εc εd`, e.g. `0b011`.
    pub const fn from_bits(bits: u8) -> Self {
        Sector(bits & 0b111)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub const fn eps_s(self) -> bool {
        self.0 & Self::S != 0
    }

    pub const fn eps_c(self) -> bool {
        self.0 & Self::C != 0
    }

    pub const fn eps_d(self) -> bool {
        self.0 & Self::D != 0
    }

    /// All eight sectors in lexicographic order.
    pub fn all() -> impl Iterator<Item = Sector> {
        (0..8).map(Sector)
    }

    /// Parity of `εs + εc`: odd sectors flip sign under `x → x + 2K`.
    pub fn is_antiperiodic(self) -> bool {
        self.eps_s() ^ self.eps_c()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [(self.eps_s(), "sn"), (self.eps_c(), "cn"), (self.eps_d(), "dn")];
        let mut first = true;
        for (on, name) in names {
            if on {
                if !first {
                    f.write_str("·")?;
                }
                f.write_str(name)?;
                first = false;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:03b}", self.0)
    }
}

/// One canonical basis monomial `sn^{εs}·cn^{εc}·dn^{εd}·sn^{2k}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EllipticMonomial {
    pub sector: Sector,
    pub k: u32,
}

impl EllipticMonomial {
    pub const fn new(sector: Sector, k: u32) -> Self {
        EllipticMonomial { sector, k }
    }

    /// Value given `(sn, cn, dn)` at a point.
    #[inline]
    pub fn eval(&self, sn: f64, cn: f64, dn: f64) -> f64 {
        let mut v = 1.0;
        let s = sn * sn;
        for _ in 0..self.k {
            v *= s;
        }
        if self.sector.eps_s() {
            v *= sn;
        }
        if self.sector.eps_c() {
            v *= cn;
        }
        if self.sector.eps_d() {
            v *= dn;
        }
        v
    }
}

impl fmt::Display for EllipticMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sector.bits(), self.k) {
            (0, 0) => f.write_str("1"),
            (0, k) => write!(f, "sn^{}", 2 * k),
            (_, 0) => write!(f, "{}", self.sector),
            (_, k) => write!(f, "{}·sn^{}", self.sector, 2 * k),
        }
    }
}

impl fmt::Debug for EllipticMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coefficient rings usable in combinations: they must contain `m`.
pub trait Coeff: Ring {
    fn m() -> Self;
    fn from_q(c: Q) -> Self;
}

impl Coeff for MPoly {
    fn m() -> Self {
        MPoly::x()
    }
    fn from_q(c: Q) -> Self {
        MPoly::constant(c)
    }
}

impl Coeff for RatFn {
    fn m() -> Self {
        RatFn::poly(MPoly::x())
    }
    fn from_q(c: Q) -> Self {
        RatFn::poly(MPoly::constant(c))
    }
}

/// Canonical finite sum of elliptic monomials: one coefficient per monomial,
/// zero coefficients dropped, ordered by `(sector, k)`.
#[derive(Clone, PartialEq, Eq)]
pub struct EllipticCombination<T = MPoly> {
    terms: BTreeMap<EllipticMonomial, T>,
}

impl<T: Coeff> Default for EllipticCombination<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coeff> EllipticCombination<T> {
    pub fn zero() -> Self {
        EllipticCombination {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(mono: EllipticMonomial, c: T) -> Self {
        let mut out = Self::zero();
        out.add_term(mono, c);
        out
    }

    pub fn monomial(mono: EllipticMonomial) -> Self {
        Self::term(mono, T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::term(EllipticMonomial::new(Sector::default(), 0), c)
    }

    /// `c · sn^j · cn^c · dn^d`, reduced with `cn² = 1 − sn²`, `dn² = 1 − m·sn²`.
    pub fn raw(j: u32, c: u32, d: u32, coeff: T) -> Self {
        let mut out = Self::zero();
        if coeff.is_zero() {
            return out;
        }
        let sector = Sector::new(j % 2 == 1, c % 2 == 1, d % 2 == 1);
        // expansion in powers of s = sn²
        let mut poly: Vec<T> = vec![T::one()];
        let mul_lin = |p: &Vec<T>, a: T| {
            let mut next = vec![T::zero(); p.len() + 1];
            for (i, v) in p.iter().enumerate() {
                next[i] = next[i].plus(v);
                next[i + 1] = next[i + 1].plus(&v.times(&a));
            }
            next
        };
        for _ in 0..c / 2 {
            poly = mul_lin(&poly, T::from_int(-1));
        }
        for _ in 0..d / 2 {
            poly = mul_lin(&poly, T::m().negate());
        }
        let base = j / 2;
        for (i, p) in poly.into_iter().enumerate() {
            out.add_term(EllipticMonomial::new(sector, base + i as u32), p.times(&coeff));
        }
        out
    }

    pub fn add_term(&mut self, mono: EllipticMonomial, c: T) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.get(&mono) {
            Some(old) => old.plus(&c),
            None => c,
        };
        if next.is_zero() {
            self.terms.remove(&mono);
        } else {
            self.terms.insert(mono, next);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&EllipticMonomial, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &EllipticMonomial) -> Option<&T> {
        self.terms.get(mono)
    }

    /// Lowest monomial in `(sector, k)` order.
    pub fn first(&self) -> Option<(&EllipticMonomial, &T)> {
        self.terms.iter().next()
    }

    pub fn remove(&mut self, mono: &EllipticMonomial) -> Option<T> {
        self.terms.remove(mono)
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&T::from_int(-1)))
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.add_term(*k, v.times(c));
        }
        out
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let s = a.sector;
                let t = b.sector;
                let j = 2 * (a.k + b.k) + s.eps_s() as u32 + t.eps_s() as u32;
                let c = s.eps_c() as u32 + t.eps_c() as u32;
                let d = s.eps_d() as u32 + t.eps_d() as u32;
                out = out.plus(&Self::raw(j, c, d, ca.times(cb)));
            }
        }
        out
    }

    /// `d/dx` via `sn′ = cn·dn`, `cn′ = −sn·dn`, `dn′ = −m·sn·cn`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (mono, coef) in &self.terms {
            let j = 2 * mono.k + mono.sector.eps_s() as u32;
            let c = mono.sector.eps_c() as u32;
            let d = mono.sector.eps_d() as u32;
            if j > 0 {
                out = out.plus(&Self::raw(j - 1, c + 1, d + 1, coef.times(&T::from_int(j as i64))));
            }
            if c > 0 {
                out = out.plus(&Self::raw(j + 1, c - 1, d + 1, coef.negate()));
            }
            if d > 0 {
                out = out.plus(&Self::raw(j + 1, c + 1, d - 1, coef.times(&T::m()).negate()));
            }
        }
        out
    }

    /// Image under `cn → −cn`, i.e. `f(x) ↦ f(2K − x)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            let c = if k.sector.eps_c() { v.negate() } else { v.clone() };
            out.add_term(*k, c);
        }
        out
    }

    /// Exact division by `dn`, defined when every term carries `dn`.
    pub fn divide_by_dn(&self) -> Option<Self> {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            if !k.sector.eps_d() {
                return None;
            }
            let s = Sector::from_bits(k.sector.bits() & !Sector::D);
            out.add_term(EllipticMonomial::new(s, k.k), v.clone());
        }
        Some(out)
    }

    /// Value with coefficients evaluated at `m` by `coef_at`.
    pub fn eval_with(&self, coef_at: impl Fn(&T) -> f64, sn: f64, cn: f64, dn: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| coef_at(c) * k.eval(sn, cn, dn))
            .sum()
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> EllipticCombination<U> {
        let mut out = EllipticCombination::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, f(v));
        }
        out
    }
}

impl EllipticCombination<MPoly> {
    pub fn eval(&self, m: f64, sn: f64, cn: f64, dn: f64) -> f64 {
        self.eval_with(|c| c.eval_f64(m), sn, cn, dn)
    }

    pub fn to_ratfn(&self) -> EllipticCombination<RatFn> {
        self.map(|c| RatFn::poly(c.clone()))
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for EllipticCombination<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({v})·{k}")?;
        }
        Ok(())
    }
}

impl<T: Coeff + fmt::Debug> fmt::Debug for EllipticCombination<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Shorthand for building combinations from `(sector bits, k, coefficient)`.
pub fn combination(terms: &[(u8, u32, MPoly)]) -> EllipticCombination {
    let mut out = EllipticCombination::zero();
    for (bits, k, c) in terms {
        out.add_term(EllipticMonomial::new(Sector::from_bits(*bits), *k), c.clone());
    }
    out
}

/// `Σ cₖ·(sector)·sn^{2k}`.
pub fn poly_in_s(sector: Sector, coeffs: &[MPoly]) -> EllipticCombination {
    let mut out = EllipticCombination::zero();
    for (k, c) in coeffs.iter().enumerate() {
        out.add_term(EllipticMonomial::new(sector, k as u32), c.clone());
    }
    out
}
