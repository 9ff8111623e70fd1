//! Exact polynomial and rational-function arithmetic over `Q`, used by the
//! closure engine. Polynomials are dense, lowest degree first, with trailing
//! zeros trimmed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Commutative ring operations needed by the generic algorithms below.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn from_int(n: i64) -> Self;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }
}

pub trait Field: Ring {
    fn inverse(&self) -> Self;

    fn over(&self, other: &Self) -> Self {
        self.times(&other.inverse())
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_int(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
}

impl Field for Q {
    fn inverse(&self) -> Self {
        self.recip()
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_from_r64(r: Rational64) -> Q {
    Q::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Exact rational value of a finite `f64`.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(<Q as Ring>::zero)
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dense univariate polynomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// Polynomial in `m` with rational coefficients.
pub type MPoly = Poly<Q>;

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·xⁿ`.
    pub fn monomial(c: T, n: usize) -> Self {
        let mut v = vec![T::zero(); n + 1];
        v[n] = c;
        Self::new(v)
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc.times(x).plus(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.times(&T::from_int(i as i64)))
                .collect(),
        )
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &T) -> Self {
        let lin = Self::new(vec![c.clone(), T::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, a| acc.times(&lin).plus(&Self::constant(a.clone())))
    }

    /// Apply `f` to every coefficient.
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Ring> Ring for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).plus(&other.coeff(i))).collect())
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out)
    }
    fn negate(&self) -> Self {
        Self::new(self.coeffs.iter().map(Ring::negate).collect())
    }
    fn from_int(n: i64) -> Self {
        Self::constant(T::from_int(n))
    }
}

impl<T: Field> Poly<T> {
    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv = divisor.lead().inverse();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = rem[top].times(&inv);
            let shift = top - dd;
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = rem[shift + i].minus(&c.times(d));
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inverse())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree decomposition (Yun): `p = c · Π fᵢ^{i}`, returned as
    /// `(fᵢ, i)` pairs with monic, pairwise coprime `fᵢ` of positive degree.
    pub fn squarefree(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let mut c = d.div_rem(&a0).0;
        let mut dpart = c.minus(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&dpart);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.monic(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = dpart.div_rem(&a).0;
            dpart = c.minus(&b.derivative());
            i += 1;
        }
        out
    }
}

impl MPoly {
    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Q::from_int(c)).collect())
    }

    pub fn from_r64(r: Rational64) -> Self {
        Self::constant(q_from_r64(r))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + q_to_f64(c))
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, c: &Q, i: usize, first: bool, var: &str) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    let unit = mag.is_one();
    if i == 0 || !unit {
        write!(f, "{mag}")?;
    }
    match i {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{i}"),
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if Ring::is_zero(c) {
                continue;
            }
            fmt_term(f, c, i, first, "m")?;
            first = false;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

/// Element of `Q(m)`, kept reduced with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: MPoly,
    den: MPoly,
}

impl RatFn {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Q(m)");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let l = den.lead().recip();
        RatFn {
            num: num.scale(&l),
            den: den.scale(&l),
        }
    }

    pub fn poly(p: MPoly) -> Self {
        RatFn {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    /// `Some` when the denominator is 1.
    pub fn as_poly(&self) -> Option<&MPoly> {
        (self.den.degree() == Some(0)).then_some(&self.num)
    }

    /// Exact value at `m`; `None` at a pole.
    pub fn eval(&self, m: &Q) -> Option<Q> {
        let d = self.den.eval(m);
        (!Ring::is_zero(&d)).then(|| self.num.eval(m) / d)
    }

    pub fn eval_f64(&self, m: f64) -> f64 {
        self.num.eval_f64(m) / self.den.eval_f64(m)
    }
}

impl Ring for RatFn {
    fn zero() -> Self {
        RatFn {
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }
    fn one() -> Self {
        Self::poly(MPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(self.num.plus(&other.num), self.den.clone());
        }
        Self::new(
            self.num.times(&other.den).plus(&other.num.times(&self.den)),
            self.den.times(&other.den),
        )
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.times(&other.num), self.den.times(&other.den))
    }
    fn negate(&self) -> Self {
        RatFn {
            num: self.num.negate(),
            den: self.den.clone(),
        }
    }
    fn from_int(n: i64) -> Self {
        Self::poly(MPoly::from_int(n))
    }
}

impl Field for RatFn {
    fn inverse(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Characteristic polynomial `det(xI − A)` by Berkowitz' division-free
/// recurrence; valid over any commutative ring.
pub fn charpoly<T: Ring>(a: &[Vec<T>]) -> Poly<T> {
    let n = a.len();
    // Coefficients of det(xI − A_k), highest degree first.
    let mut p = vec![T::one()];
    for k in 0..n {
        let mut col = Vec::with_capacity(k + 2);
        col.push(T::one());
        col.push(a[k][k].negate());
        // v = A_k^j · C, starting from C = a[0..k][k]
        let mut v: Vec<T> = (0..k).map(|i| a[i][k].clone()).collect();
        for _ in 0..k {
            let rc = (0..k).fold(T::zero(), |s, i| s.plus(&a[k][i].times(&v[i])));
            col.push(rc.negate());
            v = (0..k)
                .map(|i| (0..k).fold(T::zero(), |s, j| s.plus(&a[i][j].times(&v[j]))))
                .collect();
        }
        let mut next = vec![T::zero(); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for j in 0..=k.min(i) {
                if i - j < col.len() {
                    *slot = slot.plus(&col[i - j].times(&p[j]));
                }
            }
        }
        p = next;
    }
    p.reverse();
    Poly::new(p)
}

/// Basis of the right null space of `a` (rows × cols), in reduced echelon
/// form: each vector is 1 at its own free column and 0 at the others.
/// Returns the vectors and their free columns.
pub fn null_space<T: Field>(a: &[Vec<T>], cols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let (rref, pivots) = rref(a, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let vectors = free
        .iter()
        .map(|&f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = rref[row][f].negate();
            }
            v
        })
        .collect();
    (vectors, free)
}

/// Reduced row echelon form and pivot columns.
pub fn rref<T: Field>(a: &[Vec<T>], cols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inverse();
        m[row] = m[row].iter().map(|x| x.times(&inv)).collect();
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, pv) in m[r].iter_mut().zip(&pivot_row) {
                    *x = x.minus(&f.times(pv));
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    (m, pivots)
}

/// Failure of real root isolation: the polynomial has non-real roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonRealRoots {
    pub real: usize,
    pub degree: usize,
}

fn sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

struct Sturm {
    chain: Vec<MPoly>,
}

impl Sturm {
    fn new(p: &MPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(r.negate());
        }
        Sturm { chain }
    }

    fn variations(&self, x: &Q) -> usize {
        let mut last = 0;
        let mut count = 0;
        for p in &self.chain {
            let s = sign(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }
}

/// Power of two bounding all roots (Cauchy).
fn root_bound(p: &MPoly) -> Q {
    let lead = p.lead().abs();
    let mut max = <Q as Ring>::zero();
    for c in &p.coeffs()[..p.coeffs().len() - 1] {
        let r = c.abs() / &lead;
        if r > max {
            max = r;
        }
    }
    let bound = max + <Q as Ring>::one();
    let mut b = <Q as Ring>::one();
    while b < bound {
        b *= Q::from_int(2);
    }
    b
}

/// All real roots of `p` with multiplicity, ascending, each refined to
/// relative width `rel_tol` by exact bisection. Fails if any root is non-real.
pub fn real_roots(p: &MPoly, rel_tol: f64) -> Result<Vec<f64>, NonRealRoots> {
    let degree = p.degree().unwrap_or(0);
    let mut roots = Vec::with_capacity(degree);
    if degree == 0 {
        return Ok(roots);
    }
    let tol = q_from_f64(rel_tol);
    for (f, mult) in p.squarefree() {
        let sturm = Sturm::new(&f);
        let b = root_bound(&f);
        let lo = -b.clone();
        let total = sturm.variations(&lo) - sturm.variations(&b);
        let d = f.degree().unwrap_or(0);
        if total < d {
            return Err(NonRealRoots {
                real: roots.len() + total * mult,
                degree,
            });
        }
        let mut stack = vec![(lo, b)];
        while let Some((a, c)) = stack.pop() {
            let va = sturm.variations(&a);
            let vc = sturm.variations(&c);
            match va - vc {
                0 => {}
                1 => {
                    let r = refine(&f, a, c, &tol);
                    roots.extend(core::iter::repeat_n(r, mult));
                }
                _ => {
                    let mut mid = (&a + &c) / Q::from_int(2);
                    let mut nudge = (&c - &a) / Q::from_int(1024);
                    while Ring::is_zero(&f.eval(&mid)) {
                        mid += &nudge;
                        nudge /= Q::from_int(2);
                    }
                    stack.push((a, mid.clone()));
                    stack.push((mid, c));
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Bisect `(lo, hi]` holding exactly one simple root of `f`, `f(lo) ≠ 0`.
fn refine(f: &MPoly, mut lo: Q, mut hi: Q, rel_tol: &Q) -> f64 {
    let s_lo = sign(&f.eval(&lo));
    if sign(&f.eval(&hi)) == 0 {
        return q_to_f64(&hi);
    }
    let two = Q::from_int(2);
    loop {
        let one = <Q as Ring>::one();
        let scale = if lo.abs() > one { lo.abs() } else { one };
        if &hi - &lo <= rel_tol * scale {
            break;
        }
        let mid = (&lo + &hi) / &two;
        match sign(&f.eval(&mid)) {
            0 => return q_to_f64(&mid),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    q_to_f64(&((lo + hi) / two))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn mp(cs: &[i64]) -> MPoly {
        MPoly::from_ints(cs)
    }

    #[test]
    fn arithmetic_and_division() {
        let a = mp(&[1, 2, 1]);
        let b = mp(&[1, 1]);
        assert_eq!(a, b.times(&b));
        let (qt, r) = a.div_rem(&b);
        assert_eq!(qt, b);
        assert!(r.is_zero());
        let (qt, r) = mp(&[2, 0, 1]).div_rem(&b);
        assert_eq!(qt, mp(&[-1, 1]));
        assert_eq!(r, mp(&[3]));
        assert_eq!(mp(&[0, 1]).shift(&q(3, 1)), mp(&[3, 1]));
        assert_eq!(a.gcd(&mp(&[-1, 0, 1])), b);
    }

    #[test]
    fn display() {
        assert_eq!(mp(&[1, 4]).to_string(), "1 + 4m");
        assert_eq!(mp(&[0, -576]).to_string(), "-576m");
        assert_eq!(mp(&[5, 0, -1]).to_string(), "5 - m^2");
        assert_eq!(MPoly::new(vec![q(1, 4)]).to_string(), "1/4");
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^2 (x+2)^3 x
        let p = mp(&[-1, 1])
            .times(&mp(&[-1, 1]))
            .times(&mp(&[2, 1]).times(&mp(&[2, 1])).times(&mp(&[2, 1])))
            .times(&mp(&[0, 1]));
        let sf = p.squarefree();
        assert_eq!(sf.len(), 3);
        assert!(sf.contains(&(mp(&[0, 1]), 1)));
        assert!(sf.contains(&(mp(&[-1, 1]), 2)));
        assert!(sf.contains(&(mp(&[2, 1]), 3)));
    }

    #[test]
    fn berkowitz_matches_hand_expansion() {
        let a = vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(3, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(4, 1)],
        ];
        // x^3 - 9x^2 + 24x - 18
        assert_eq!(charpoly(&a), mp(&[-18, 24, -9, 1]));
        assert_eq!(charpoly::<Q>(&[]), mp(&[1]));
    }

    #[test]
    fn real_roots_with_multiplicity() {
        // x (x-8)(x-24) = x^3 - 32x^2 + 192x
        let r = real_roots(&mp(&[0, 192, -32, 1]), 1e-15).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r[0].abs() < 1e-14 && (r[1] - 8.0).abs() < 1e-13 && (r[2] - 24.0).abs() < 1e-13);
        let r = real_roots(&mp(&[1, -2, 1]), 1e-15).unwrap();
        assert_eq!(r, vec![1.0, 1.0]);
        let r = real_roots(&mp(&[-2, 0, 1]), 1e-15).unwrap();
        assert!((r[1] - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(real_roots(&mp(&[1, 0, 1]), 1e-15).is_err());
    }

    #[test]
    fn rational_functions_reduce() {
        let f = RatFn::new(mp(&[-1, 0, 1]), mp(&[2, 2]));
        assert_eq!(f.num(), &MPoly::new(vec![q(-1, 2), q(1, 2)]));
        assert_eq!(f.den(), &mp(&[1]));
        let g = RatFn::new(mp(&[1]), mp(&[0, 1]));
        assert_eq!(g.times(&RatFn::poly(mp(&[0, 1]))), RatFn::one());
        assert_eq!(g.eval(&<Q as Ring>::zero()), None);
    }

    #[test]
    fn null_space_echelon() {
        let a = vec![vec![q(1, 1), q(2, 1), q(3, 1)]];
        let (ns, free) = null_space(&a, 3);
        assert_eq!(free, vec![1, 2]);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = v.iter().zip(&a[0]).fold(<Q as Ring>::zero(), |s, (x, y)| s + x * y);
            assert!(Ring::is_zero(&dot));
        }
        assert_eq!(ns[0][1], q(1, 1));
        assert_eq!(ns[0][2], q(0, 1));
    }
}
