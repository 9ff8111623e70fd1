//! Detection of finite invariant subspaces (quasi-exact solvability).
//!
//! For a family of basis monomials `bᵢ` the operator images are reduced
//! against `w·bⱼ`. The leading term of each `w·bⱼ` is a distinct monomial with
//! unit coefficient, so the reduction is division-free in `Q[m]` and yields
//! `A bᵢ = Σ Cᵢⱼ·w·bⱼ + rᵢ`. Eigenvectors `v` of `H = −Cᵀ` solve the problem
//! exactly when `Σ vᵢ rᵢ = 0`; the admissible part is the largest
//! `H`-invariant subspace inside the kernel of that overflow map.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::monomial::{EllipticCombination, EllipticMonomial, Sector};
use super::operator::{LinearOp, OperatorSpec};
use crate::error::{Error, Result};
use crate::model::Period;
use crate::poly::{charpoly, null_space, MPoly, Poly, RatFn, Ring, Q};

/// Upper limit on the degree searched by [`detect_closure`].
pub const MAX_DEGREE: u32 = 64;

/// Seed family: sectors with a degree offset. At degree `n` member
/// `(σ, off)` contributes `σ·sn^{2k}` for `k = 0..=n−off`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family {
    members: Vec<(Sector, u32)>,
}

impl Family {
    pub fn new(members: Vec<(Sector, u32)>) -> Self {
        Family { members }
    }

    pub fn single(sector: Sector) -> Self {
        Family::new(vec![(sector, 0)])
    }

    /// `Σ Aₖ sn^{2k} + Σ Bₖ cn·dn·sn^{2k}` with one fewer `B` term.
    pub fn even_midband() -> Self {
        Family::new(vec![(Sector::from_bits(0b000), 0), (Sector::from_bits(0b011), 1)])
    }

    /// `dn·Σ Aₖ sn^{2k} + cn·Σ Bₖ sn^{2k}`.
    pub fn odd_midband() -> Self {
        Family::new(vec![(Sector::from_bits(0b001), 0), (Sector::from_bits(0b010), 0)])
    }

    /// The eight single sectors followed by the two mixed unions.
    pub fn standard() -> Vec<Family> {
        let mut out: Vec<Family> = Sector::all().map(Family::single).collect();
        out.push(Family::even_midband());
        out.push(Family::odd_midband());
        out
    }

    pub fn members(&self) -> &[(Sector, u32)] {
        &self.members
    }

    pub fn basis(&self, degree: u32) -> Vec<EllipticMonomial> {
        let mut out = Vec::new();
        for &(sector, off) in &self.members {
            if degree >= off {
                out.extend((0..=degree - off).map(|k| EllipticMonomial::new(sector, k)));
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, off)) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{{{s}·sn^2k}}")?;
            if *off > 0 {
                write!(f, "−{off}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A closed finite eigenproblem `R w = Λ w` with `Λ` mapped to energy by
/// `E = Λ + energy_shift(m)`.
#[derive(Debug, Clone)]
pub struct QesEigenproblem {
    op: OperatorSpec,
    family: Family,
    degree: u32,
    basis: Vec<EllipticMonomial>,
    subspace: Vec<Vec<RatFn>>,
    matrix: Vec<Vec<RatFn>>,
    energy_shift: MPoly,
    period: Period,
    charpoly: Poly<MPoly>,
}

impl QesEigenproblem {
    pub fn op(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Monomials spanning the ambient ansatz space.
    pub fn basis(&self) -> &[EllipticMonomial] {
        &self.basis
    }

    /// Coordinates (over `basis`) of the vectors spanning the invariant
    /// subspace; the identity when the whole ansatz space is invariant.
    pub fn subspace(&self) -> &[Vec<RatFn>] {
        &self.subspace
    }

    /// Restricted operator: `H·uₐ = Σ_b matrix[b][a]·u_b`.
    pub fn matrix(&self) -> &[Vec<RatFn>] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.basis.len()
    }

    pub fn energy_shift(&self) -> &MPoly {
        &self.energy_shift
    }

    pub fn period(&self) -> Period {
        self.period
    }

    /// `det(Λ − R)` with coefficients in `Q[m]`.
    pub fn charpoly(&self) -> &Poly<MPoly> {
        &self.charpoly
    }

    /// Characteristic polynomial in the energy variable `E`.
    pub fn charpoly_in_energy(&self) -> Poly<MPoly> {
        self.charpoly.shift(&self.energy_shift.negate())
    }

    /// Subspace vector `a` as a combination with `Q(m)` coefficients.
    pub fn subspace_vector(&self, a: usize) -> EllipticCombination<RatFn> {
        let mut out = EllipticCombination::zero();
        for (mono, c) in self.basis.iter().zip(&self.subspace[a]) {
            out.add_term(*mono, c.clone());
        }
        out
    }

    /// Re-apply the operator to every subspace vector and check exact
    /// membership: `A uₐ + Σ_b R[b][a]·w·u_b = 0`.
    pub fn verify_certificate(&self) -> bool {
        let lin = self.op.linear_op().to_ratfn();
        let vectors: Vec<_> = (0..self.dim()).map(|a| self.subspace_vector(a)).collect();
        vectors.iter().enumerate().all(|(a, u)| {
            let mut total = lin.apply(u);
            for (b, ub) in vectors.iter().enumerate() {
                total = total.plus(&lin.w.times(ub).scale(&self.matrix[b][a]));
            }
            total.is_zero()
        })
    }
}

fn images(lin: &LinearOp, basis: &[EllipticMonomial], cache: &mut BTreeMap<EllipticMonomial, EllipticCombination>) {
    for b in basis {
        cache
            .entry(*b)
            .or_insert_with(|| lin.apply(&EllipticCombination::monomial(*b)));
    }
}

/// Try one degree. `None` when no nonzero invariant subspace exists.
fn closure_with(
    op: &OperatorSpec,
    lin: &LinearOp,
    family: &Family,
    degree: u32,
    cache: &mut BTreeMap<EllipticMonomial, EllipticCombination>,
) -> Option<QesEigenproblem> {
    let basis = family.basis(degree);
    let n = basis.len();
    if n == 0 {
        return None;
    }
    images(lin, &basis, cache);
    let weighted: Vec<EllipticCombination> = basis
        .iter()
        .map(|b| lin.w.times(&EllipticCombination::monomial(*b)))
        .collect();
    let mut pivots = BTreeMap::new();
    for (j, wb) in weighted.iter().enumerate() {
        let (lead, c) = wb.first().expect("weight times monomial is nonzero");
        debug_assert!(*c == MPoly::one(), "pivot coefficient must be 1");
        let clash = pivots.insert(*lead, j);
        debug_assert!(clash.is_none(), "pivots must be distinct");
    }

    if modp::excludes_closure(&basis, cache, &weighted, &pivots) {
        return None;
    }

    // A bᵢ = Σ C[i][j]·w·bⱼ + rᵢ
    let mut c = vec![vec![MPoly::zero(); n]; n];
    let mut rem: Vec<EllipticCombination> = Vec::with_capacity(n);
    for (i, b) in basis.iter().enumerate() {
        let mut t = cache[b].clone();
        let mut r = EllipticCombination::zero();
        while let Some((mono, coef)) = t.first().map(|(m, c)| (*m, c.clone())) {
            match pivots.get(&mono) {
                Some(&j) => {
                    c[i][j] = c[i][j].plus(&coef);
                    t = t.minus(&weighted[j].scale(&coef));
                }
                None => {
                    t.remove(&mono);
                    r.add_term(mono, coef);
                }
            }
        }
        rem.push(r);
    }
    let h: Vec<Vec<MPoly>> = (0..n)
        .map(|j| (0..n).map(|i| c[i][j].negate()).collect())
        .collect();

    let overflow: BTreeSet<EllipticMonomial> = rem.iter().flat_map(|r| r.terms().map(|(m, _)| *m)).collect();
    let period = op.period_for(family.members()[0].0);
    if overflow.is_empty() {
        let charpoly = charpoly(&h);
        let matrix = h.iter().map(|row| row.iter().map(|x| RatFn::poly(x.clone())).collect()).collect();
        let subspace = (0..n)
            .map(|a| (0..n).map(|i| if i == a { RatFn::one() } else { RatFn::zero() }).collect())
            .collect();
        return Some(QesEigenproblem {
            op: *op,
            family: family.clone(),
            degree,
            basis,
            subspace,
            matrix,
            energy_shift: op.energy_shift(),
            period,
            charpoly,
        });
    }
    let g: Vec<Vec<MPoly>> = overflow
        .iter()
        .map(|mono| {
            rem.iter()
                .map(|r| r.coeff(mono).cloned().unwrap_or_else(MPoly::zero))
                .collect()
        })
        .collect();
    // Largest invariant subspace in ker G: kernel of [G; GH; GH²; …].
    let mut rows: Vec<Vec<MPoly>> = Vec::new();
    let mut block = g;
    for _ in 0..n {
        rows.extend(block.iter().cloned());
        block = block
            .iter()
            .map(|row| {
                (0..n)
                    .map(|j| (0..n).fold(MPoly::zero(), |s, i| s.plus(&row[i].times(&h[i][j]))))
                    .collect()
            })
            .collect();
    }
    let rows_q: Vec<Vec<RatFn>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(RatFn::poly).collect())
        .collect();
    let (subspace, free) = null_space(&rows_q, n);
    if subspace.is_empty() {
        return None;
    }
    let h_q: Vec<Vec<RatFn>> = h
        .iter()
        .map(|row| row.iter().map(|x| RatFn::poly(x.clone())).collect())
        .collect();
    let hu: Vec<Vec<RatFn>> = subspace
        .iter()
        .map(|u| {
            (0..n)
                .map(|i| (0..n).fold(RatFn::zero(), |s, j| s.plus(&h_q[i][j].times(&u[j]))))
                .collect()
        })
        .collect();
    let d = subspace.len();
    let matrix: Vec<Vec<RatFn>> = (0..d).map(|b| (0..d).map(|a| hu[a][free[b]].clone()).collect()).collect();
    let cp = charpoly(&matrix);
    let charpoly = Poly::new(
        cp.coeffs()
            .iter()
            .map(|c| c.as_poly().cloned().expect("monic factor of a Q[m] polynomial"))
            .collect(),
    );
    Some(QesEigenproblem {
        op: *op,
        family: family.clone(),
        degree,
        basis,
        subspace,
        matrix,
        energy_shift: op.energy_shift(),
        period,
        charpoly,
    })
}

/// Closure at one fixed degree.
pub fn closure_at(op: &OperatorSpec, family: &Family, degree: u32) -> Option<QesEigenproblem> {
    let lin = op.linear_op();
    closure_with(op, &lin, family, degree, &mut BTreeMap::new())
}

/// Smallest degree `≤ max_k` at which `family` carries a nonzero invariant
/// subspace.
pub fn detect_closure(op: &OperatorSpec, family: &Family, max_k: u32) -> Result<QesEigenproblem> {
    if max_k > MAX_DEGREE {
        return Err(Error::InvalidParameters(alloc::format!(
            "closure search limited to degree {MAX_DEGREE}"
        )));
    }
    let lin = op.linear_op();
    let mut cache = BTreeMap::new();
    (0..=max_k)
        .find_map(|n| closure_with(op, &lin, family, n, &mut cache))
        .ok_or(Error::NotClosed { max_k: max_k as usize })
}

/// Every standard family that closes within `max_k`, smallest first; ties
/// broken by family order.
pub fn find_closures(op: &OperatorSpec, max_k: u32) -> Vec<QesEigenproblem> {
    let mut found: Vec<(usize, usize, QesEigenproblem)> = Family::standard()
        .iter()
        .enumerate()
        .filter_map(|(i, f)| detect_closure(op, f, max_k).ok().map(|p| (p.dim(), i, p)))
        .collect();
    found.sort_by_key(|(d, i, _)| (*d, *i));
    found.into_iter().map(|(_, _, p)| p).collect()
}

/// Rank test modulo a large prime at a fixed value of `m`. Full rank there
/// implies full rank over `Q(m)`, so no invariant subspace can exist.
mod modp {
    use super::*;

    const P: u64 = (1 << 61) - 1;
    const M0: u64 = 982_451_653;

    fn fold(x: u64) -> u64 {
        if x >= P {
            x - P
        } else {
            x
        }
    }

    fn mul(a: u64, b: u64) -> u64 {
        let x = a as u128 * b as u128;
        fold((x as u64 & P) + (x >> 61) as u64)
    }

    fn add(a: u64, b: u64) -> u64 {
        fold(a + b)
    }

    fn sub(a: u64, b: u64) -> u64 {
        fold(a + P - b)
    }

    fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(a: u64) -> u64 {
        pow(a, P - 2)
    }

    fn reduce_int(x: &BigInt) -> Option<u64> {
        x.mod_floor(&BigInt::from(P)).to_u64()
    }

    fn reduce(q: &Q) -> Option<u64> {
        let d = reduce_int(q.denom())?;
        if d == 0 {
            return None;
        }
        Some(mul(reduce_int(q.numer())?, inv(d)))
    }

    fn eval(p: &MPoly) -> Option<u64> {
        let mut acc = 0;
        for c in p.coeffs().iter().rev() {
            acc = add(mul(acc, M0), reduce(c)?);
        }
        Some(acc)
    }

    /// Row-echelon basis grown one row at a time.
    struct Echelon {
        rows: Vec<(usize, Vec<u64>)>,
    }

    impl Echelon {
        /// Insert a row; returns whether it raised the rank.
        fn push(&mut self, mut row: Vec<u64>) -> bool {
            for (col, piv) in &self.rows {
                let f = row[*col];
                if f != 0 {
                    for (x, p) in row.iter_mut().zip(piv) {
                        *x = sub(*x, mul(f, *p));
                    }
                }
            }
            let Some(col) = row.iter().position(|&x| x != 0) else {
                return false;
            };
            let iv = inv(row[col]);
            for x in row.iter_mut() {
                *x = mul(*x, iv);
            }
            self.rows.push((col, row));
            true
        }
    }

    type Sparse = BTreeMap<EllipticMonomial, u64>;

    fn sparse(f: &EllipticCombination) -> Option<Sparse> {
        let mut out = Sparse::new();
        for (mono, c) in f.terms() {
            let v = eval(c)?;
            if v != 0 {
                out.insert(*mono, v);
            }
        }
        Some(out)
    }

    /// Run the reduction at `m = M0` modulo `P`; `true` when the overflow
    /// map is observable, so no nonzero invariant subspace exists.
    pub(super) fn excludes_closure(
        basis: &[EllipticMonomial],
        images: &BTreeMap<EllipticMonomial, EllipticCombination>,
        weighted: &[EllipticCombination],
        pivots: &BTreeMap<EllipticMonomial, usize>,
    ) -> bool {
        let n = basis.len();
        let Some(wp) = weighted.iter().map(sparse).collect::<Option<Vec<_>>>() else {
            return false;
        };
        let mut h = vec![vec![0u64; n]; n];
        let mut rem: Vec<Sparse> = Vec::with_capacity(n);
        for (i, b) in basis.iter().enumerate() {
            let Some(mut t) = sparse(&images[b]) else {
                return false;
            };
            let mut r = Sparse::new();
            while let Some((mono, coef)) = t.pop_first() {
                match pivots.get(&mono) {
                    Some(&j) => {
                        h[j][i] = sub(h[j][i], coef);
                        for (m2, c2) in wp[j].iter().skip(1) {
                            let e = t.entry(*m2).or_insert(0);
                            *e = sub(*e, mul(coef, *c2));
                            if *e == 0 {
                                t.remove(m2);
                            }
                        }
                    }
                    None => {
                        r.insert(mono, coef);
                    }
                }
            }
            rem.push(r);
        }
        let overflow: BTreeSet<EllipticMonomial> = rem.iter().flat_map(|r| r.keys().copied()).collect();
        if overflow.is_empty() {
            return false;
        }
        let g: Vec<Vec<u64>> = overflow
            .iter()
            .map(|mono| rem.iter().map(|r| r.get(mono).copied().unwrap_or(0)).collect())
            .collect();
        let mut ech = Echelon { rows: Vec::new() };
        let mut block = g;
        for _ in 0..n {
            let mut grew = false;
            for row in &block {
                grew |= ech.push(row.clone());
                if ech.rows.len() == n {
                    return true;
                }
            }
            if !grew {
                return false;
            }
            block = block
                .iter()
                .map(|row| {
                    (0..n)
                        .map(|j| (0..n).fold(0, |s, i| add(s, mul(row[i], h[i][j]))))
                        .collect()
                })
                .collect();
        }
        false
    }
}
