//! Registry of closed-form eigenvalues and eigenfunctions, each with the
//! exact closure that reproduces it and a cross-check against the kernel and
//! the Floquet solver.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::floquet::{find_band_edges, find_midband};
use crate::math;
use crate::model::{Period, PotentialParams};
use crate::poly::{q, q_from_f64, real_roots, MPoly, Poly, Ring};
use crate::qes::{
    closure_at, combination, qes_energies, residual, wavefunction_at, EllipticCombination, Family, OperatorSpec,
    Prefactor, QesEigenproblem, Sector, Wavefunction,
};

/// Closed-form energy as a function of `m`.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyForm {
    /// `E = c(m)`.
    Linear(MPoly),
    /// `E = c(m) ± √d(m)`.
    SurdPair { center: MPoly, radicand: MPoly },
    /// Roots `λ` of a polynomial, with `E = λ + shift(m)`.
    CharPoly { lambda: Poly<MPoly>, shift: MPoly },
}

impl EnergyForm {
    /// Monic polynomial in `E` whose roots are the listed energies.
    pub fn energy_poly(&self) -> Poly<MPoly> {
        match self {
            EnergyForm::Linear(c) => Poly::new(vec![c.negate(), MPoly::one()]),
            EnergyForm::SurdPair { center, radicand } => Poly::new(vec![
                center.times(center).minus(radicand),
                center.scale(&q(-2, 1)),
                MPoly::one(),
            ]),
            EnergyForm::CharPoly { lambda, shift } => lambda.shift(&shift.negate()),
        }
    }

    /// Energies at `m`, ascending.
    pub fn energies(&self, m: f64) -> Result<Vec<f64>> {
        match self {
            EnergyForm::Linear(c) => Ok(vec![c.eval_f64(m)]),
            EnergyForm::SurdPair { center, radicand } => {
                let (c, d) = (center.eval_f64(m), radicand.eval_f64(m));
                if d < 0.0 {
                    return Err(Error::ComplexEigenvalue { re: c, im: math::sqrt(-d) });
                }
                let s = math::sqrt(d);
                Ok(vec![c - s, c + s])
            }
            EnergyForm::CharPoly { lambda, shift } => {
                let mq = q_from_f64(m);
                let at = MPoly::new(lambda.coeffs().iter().map(|c| c.eval(&mq)).collect());
                let s = shift.eval_f64(m);
                real_roots(&at, 1e-16)
                    .map(|r| r.into_iter().map(|l| l + s).collect())
                    .map_err(|_| Error::ComplexEigenvalue { re: f64::NAN, im: f64::NAN })
            }
        }
    }
}

impl fmt::Display for EnergyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyForm::Linear(c) => write!(f, "{c}"),
            EnergyForm::SurdPair { center, radicand } => write!(f, "{center} ± √({radicand})"),
            EnergyForm::CharPoly { lambda, shift } => {
                write!(f, "λ + {shift}, λ a root of a degree-{} polynomial", lambda.degree().unwrap_or(0))
            }
        }
    }
}

/// A closed problem whose spectrum contains the entry's energies.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRef {
    pub op: OperatorSpec,
    pub family: Family,
    pub degree: u32,
}

impl KernelRef {
    pub fn closure(&self) -> Option<QesEigenproblem> {
        closure_at(&self.op, &self.family, self.degree)
    }
}

/// A printed eigenfunction `dn^{power}·[√(dn + cn)]·Σ cᵢ(m)·monoᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedForm {
    pub dn_power: Rational64,
    pub root: bool,
    pub body: EllipticCombination,
}

impl PrintedForm {
    pub fn wavefunction(&self, m: Modulus, energy: f64) -> Wavefunction {
        let mv = m.value();
        let terms = self.body.terms().map(|(mono, c)| (*mono, c.eval_f64(mv))).collect();
        let prefactor = if self.root { Prefactor::DnPowerSqrt } else { Prefactor::DnPower };
        let power = *self.dn_power.numer() as f64 / *self.dn_power.denom() as f64;
        Wavefunction::new(m, -power, prefactor, terms, energy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub a: Rational64,
    pub b: Rational64,
    pub ladder: Option<u32>,
    /// State subscripts in energy order, e.g. `psi_8,3`.
    pub label: Option<&'static str>,
    pub period: Period,
    pub energy: EnergyForm,
    /// Each energy carries two independent eigenfunctions.
    pub degenerate: bool,
    pub kernels: Vec<KernelRef>,
    /// Printed eigenfunctions, one per energy (or per partner if degenerate).
    pub printed: Vec<PrintedForm>,
}

impl CatalogEntry {
    pub fn params(&self, m: f64) -> Result<PotentialParams> {
        PotentialParams::new(self.a, self.b, Modulus::new(m)?)
    }

    /// The same entry with every listed energy moved by `delta`. The
    /// cross-check must then fail; used to exercise the failure path.
    pub fn with_energy_shift(mut self, delta: Rational64) -> Self {
        let d = MPoly::from_r64(delta);
        self.energy = match self.energy {
            EnergyForm::Linear(c) => EnergyForm::Linear(c.plus(&d)),
            EnergyForm::SurdPair { center, radicand } => EnergyForm::SurdPair {
                center: center.plus(&d),
                radicand,
            },
            EnergyForm::CharPoly { lambda, shift } => EnergyForm::CharPoly {
                lambda,
                shift: shift.plus(&d),
            },
        };
        self
    }

    /// Subscripts of the label, ascending.
    pub fn label_indices(&self) -> Option<Vec<usize>> {
        let rest = self.label?.strip_prefix("psi_")?;
        let mut out: Vec<usize> = rest.split(',').map(|s| s.parse().ok()).collect::<Option<_>>()?;
        out.sort_unstable();
        Some(out)
    }

    /// Number of periods `L` of the potential in one period of the state.
    fn cells(&self, params: &PotentialParams) -> u32 {
        let k = match self.period {
            Period::TwoK => 2,
            Period::FourK => 4,
            Period::EightK => 8,
        };
        if params.has_half_period() {
            k
        } else {
            k / 2
        }
    }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn ints(cs: &[i64]) -> MPoly {
    MPoly::from_ints(cs)
}

fn frac(cs: &[(i64, i64)]) -> MPoly {
    MPoly::new(cs.iter().map(|&(n, d)| q(n, d)).collect())
}

fn lambda_poly(cs: &[&[i64]]) -> Poly<MPoly> {
    Poly::new(cs.iter().map(|c| ints(c)).collect())
}

fn kernel(op: OperatorSpec, bits: u8, degree: u32) -> KernelRef {
    KernelRef {
        op,
        family: Family::single(Sector::from_bits(bits)),
        degree,
    }
}

fn edge(a: Rational64, b: Rational64) -> OperatorSpec {
    OperatorSpec::band_edge(a, b)
}

fn mid(a: Rational64, b: Rational64, family: Family, degree: u32) -> KernelRef {
    KernelRef {
        op: OperatorSpec::mid_band(a, b),
        family,
        degree,
    }
}

fn form(dn_power: Rational64, root: bool, terms: &[(u8, u32, MPoly)]) -> PrintedForm {
    PrintedForm {
        dn_power,
        root,
        body: combination(terms),
    }
}

fn one() -> MPoly {
    MPoly::one()
}

struct Builder {
    id: String,
    a: Rational64,
    b: Rational64,
    period: Period,
    energy: EnergyForm,
}

impl Builder {
    fn new(id: impl Into<String>, a: Rational64, b: Rational64, period: Period, energy: EnergyForm) -> Self {
        Builder {
            id: id.into(),
            a,
            b,
            period,
            energy,
        }
    }

    fn done(self, label: Option<&'static str>, degenerate: bool, kernels: Vec<KernelRef>, printed: Vec<PrintedForm>) -> CatalogEntry {
        CatalogEntry {
            id: self.id,
            a: self.a,
            b: self.b,
            ladder: None,
            label,
            period: self.period,
            energy: self.energy,
            degenerate,
            kernels,
            printed,
        }
    }
}

fn integer_entries() -> Vec<CatalogEntry> {
    use EnergyForm::*;
    let (a3, b2, b1) = (r(3, 1), r(2, 1), r(1, 1));
    vec![
        Builder::new("ALP-12-6-ground", a3, b2, Period::TwoK, Linear(ints(&[0, 9]))).done(
            Some("psi_0"),
            false,
            vec![kernel(edge(a3, r(-3, 1)), 0b000, 0)],
            vec![form(r(3, 1), false, &[(0b000, 0, one())])],
        ),
        Builder::new(
            "ALP-12-6-cn",
            a3,
            b2,
            Period::FourK,
            CharPoly {
                lambda: lambda_poly(&[&[0, -576], &[192, 48], &[-32, 4], &[1]]),
                shift: ints(&[1, 4]),
            },
        )
        .done(Some("psi_1,6,9"), false, vec![kernel(edge(a3, b2), 0b010, 2)], vec![]),
        Builder::new(
            "ALP-12-6-sn",
            a3,
            b2,
            Period::FourK,
            CharPoly {
                lambda: lambda_poly(&[&[0, -1728, -576], &[192, 336], &[-32, -8], &[1]]),
                shift: ints(&[1, 1]),
            },
        )
        .done(Some("psi_2,5,10"), false, vec![kernel(edge(a3, b2), 0b100, 2)], vec![]),
        Builder::new("ALP-12-2-E1", a3, b1, Period::FourK, Linear(ints(&[1, 4]))).done(
            Some("psi_1"),
            false,
            vec![kernel(edge(a3, r(-2, 1)), 0b010, 0)],
            vec![form(r(2, 1), false, &[(0b010, 0, one())])],
        ),
        Builder::new("ALP-12-2-E2", a3, b1, Period::FourK, Linear(ints(&[1, 9]))).done(
            Some("psi_2"),
            false,
            vec![kernel(edge(a3, r(-2, 1)), 0b100, 0)],
            vec![form(r(2, 1), false, &[(0b100, 0, one())])],
        ),
        Builder::new(
            "ALP-12-2-pair",
            a3,
            b1,
            Period::TwoK,
            SurdPair {
                center: ints(&[10, 2]),
                radicand: ints(&[36, -36, 4]),
            },
        )
        .done(Some("psi_8,3"), false, vec![kernel(edge(a3, b1), 0b110, 1)], vec![]),
        Builder::new(
            "ALP-12-2-cubic",
            a3,
            b1,
            Period::TwoK,
            CharPoly {
                lambda: lambda_poly(&[&[0, -384, -192], &[64, 176], &[-20, -8], &[1]]),
                shift: ints(&[0, 1]),
            },
        )
        .done(Some("psi_0,4,7"), false, vec![kernel(edge(a3, b1), 0b000, 2)], vec![]),
    ]
}

fn half_integer_entries() -> Vec<CatalogEntry> {
    use EnergyForm::*;
    let (a32, a52, b12) = (r(3, 2), r(5, 2), r(1, 2));
    let dn_m12 = r(-1, 2);
    vec![
        Builder::new("ALP-3/2-1/2-ground", a32, b12, Period::TwoK, Linear(frac(&[(0, 1), (9, 4)]))).done(
            Some("psi_0"),
            false,
            vec![kernel(edge(a32, r(-3, 2)), 0b000, 0)],
            vec![form(r(3, 2), false, &[(0b000, 0, one())])],
        ),
        Builder::new("ALP-3/2-1/2-pair", a32, b12, Period::TwoK, Linear(frac(&[(4, 1), (1, 4)]))).done(
            Some("psi_3,4"),
            true,
            vec![kernel(edge(a32, b12), 0b110, 0), kernel(edge(a32, b12), 0b000, 1)],
            vec![
                form(dn_m12, false, &[(0b110, 0, one())]),
                form(dn_m12, false, &[(0b000, 0, ints(&[-1])), (0b000, 1, ints(&[2]))]),
            ],
        ),
        Builder::new("ALP-5/2-1/2-E1", a52, b12, Period::FourK, Linear(frac(&[(1, 1), (9, 4)]))).done(
            Some("psi_1"),
            false,
            vec![kernel(edge(a52, r(-3, 2)), 0b010, 0)],
            vec![form(r(3, 2), false, &[(0b010, 0, one())])],
        ),
        Builder::new("ALP-5/2-1/2-E2", a52, b12, Period::FourK, Linear(frac(&[(1, 1), (25, 4)]))).done(
            Some("psi_2"),
            false,
            vec![kernel(edge(a52, r(-3, 2)), 0b100, 0)],
            vec![form(r(3, 2), false, &[(0b100, 0, one())])],
        ),
        Builder::new("ALP-5/2-1/2-pair", a52, b12, Period::FourK, Linear(frac(&[(9, 1), (1, 4)]))).done(
            Some("psi_5,6"),
            true,
            vec![kernel(edge(a52, b12), 0b010, 1), kernel(edge(a52, b12), 0b100, 1)],
            vec![
                form(dn_m12, false, &[(0b010, 0, ints(&[-1])), (0b010, 1, ints(&[4]))]),
                form(dn_m12, false, &[(0b100, 0, ints(&[-3])), (0b100, 1, ints(&[4]))]),
            ],
        ),
    ]
}

/// Degenerate ladders for `b = 1/2` and `b = 3/2`, `N = 0..=4`.
fn ladder_entries() -> Vec<CatalogEntry> {
    use EnergyForm::*;
    let mut out = Vec::new();
    let b12 = r(1, 2);
    let b32 = r(3, 2);
    for n in 0..=4i64 {
        let nu = n as u32;
        let ladder = |mut e: CatalogEntry| {
            e.ladder = Some(nu);
            e
        };

        let a = r(4 * n + 3, 2);
        let e = Linear(frac(&[((2 * n + 2).pow(2), 1), (1, 4)]));
        out.push(ladder(Builder::new(format!("LADDER-1/2-even-N{n}"), a, b12, Period::TwoK, e).done(
            None,
            true,
            vec![kernel(edge(a, b12), 0b000, nu + 1), kernel(edge(a, b12), 0b110, nu)],
            vec![],
        )));

        let a = r(4 * n + 5, 2);
        let e = Linear(frac(&[((2 * n + 3).pow(2), 1), (1, 4)]));
        out.push(ladder(Builder::new(format!("LADDER-1/2-odd-N{n}"), a, b12, Period::FourK, e).done(
            None,
            true,
            vec![kernel(edge(a, b12), 0b100, nu + 1), kernel(edge(a, b12), 0b010, nu + 1)],
            vec![],
        )));

        let a = r(4 * n + 5, 2);
        let k = 4 * n + 6;
        let e = SurdPair {
            center: frac(&[(4 * n * n + 12 * n + 10, 1), (5, 4)]),
            radicand: ints(&[k * k, -k * k, 1]),
        };
        out.push(ladder(Builder::new(format!("LADDER-3/2-even-N{n}"), a, b32, Period::TwoK, e).done(
            None,
            true,
            vec![kernel(edge(a, b32), 0b000, nu + 2), kernel(edge(a, b32), 0b110, nu + 1)],
            vec![],
        )));

        let a = r(4 * n + 7, 2);
        let k = 4 * (n + 2);
        let e = SurdPair {
            center: frac(&[(4 * n * n + 16 * n + 17, 1), (5, 4)]),
            radicand: ints(&[k * k, -k * k, 1]),
        };
        out.push(ladder(Builder::new(format!("LADDER-3/2-odd-N{n}"), a, b32, Period::FourK, e).done(
            None,
            true,
            vec![kernel(edge(a, b32), 0b100, nu + 2), kernel(edge(a, b32), 0b010, nu + 2)],
            vec![],
        )));
    }
    out
}

fn midband_entries() -> Vec<CatalogEntry> {
    use EnergyForm::*;
    let (odd, even) = (Family::odd_midband(), Family::even_midband());
    let h = |n: i64| r(n, 2);
    let z = r(0, 1);
    let single = Family::single(Sector::from_bits(0));
    let t = |n: i64| frac(&[(n, 3)]);
    vec![
        Builder::new("MB-1/2-0", h(1), z, Period::EightK, Linear(frac(&[(1, 4), (1, 4)]))).done(
            None,
            false,
            vec![mid(h(1), z, single, 0)],
            vec![form(z, true, &[(0b000, 0, one())])],
        ),
        Builder::new(
            "MB-3/2-0",
            h(3),
            z,
            Period::EightK,
            SurdPair {
                center: frac(&[(5, 4), (5, 4)]),
                radicand: ints(&[1, -1, 1]),
            },
        )
        .done(None, false, vec![mid(h(3), z, odd.clone(), 0)], vec![]),
        Builder::new("MB-1/2-1", h(1), r(1, 1), Period::EightK, Linear(frac(&[(9, 4), (1, 4)]))).done(
            None,
            false,
            vec![mid(h(1), r(1, 1), odd.clone(), 0)],
            vec![form(r(-1, 1), true, &[(0b001, 0, one()), (0b010, 0, ints(&[-2]))])],
        ),
        Builder::new(
            "MB-7/2-0",
            h(7),
            z,
            Period::EightK,
            CharPoly {
                lambda: lambda_poly(&[
                    &[0, 1080, 3105, 1080],
                    &[-144, -1404, -1404, -144],
                    &[108, 342, 108],
                    &[-20, -20],
                    &[1],
                ]),
                shift: frac(&[(1, 4), (1, 4)]),
            },
        )
        .done(None, false, vec![mid(h(7), z, odd.clone(), 1)], vec![]),
        Builder::new(
            "MB-5/2-1",
            h(5),
            r(1, 1),
            Period::EightK,
            CharPoly {
                lambda: lambda_poly(&[&[0, -96, -98, 5], &[24, 88, -1], &[-14, -5], &[1]]),
                shift: frac(&[(1, 4), (5, 4)]),
            },
        )
        .done(None, false, vec![mid(h(5), r(1, 1), odd.clone(), 1)], vec![]),
        Builder::new(
            "MB-3/2-2",
            h(3),
            r(2, 1),
            Period::EightK,
            SurdPair {
                center: frac(&[(29, 4), (5, 4)]),
                radicand: ints(&[25, -25, 1]),
            },
        )
        .done(None, false, vec![mid(h(3), r(2, 1), odd.clone(), 1)], vec![]),
        Builder::new("MB-1/2-3", h(1), r(3, 1), Period::EightK, Linear(frac(&[(49, 4), (1, 4)]))).done(
            None,
            false,
            vec![mid(h(1), r(3, 1), odd, 1)],
            vec![form(
                r(-3, 1),
                true,
                &[
                    (0b001, 0, one()),
                    (0b001, 1, frac(&[(-4, 3), (1, 3)])),
                    (0b010, 0, t(-4)),
                    (0b010, 1, frac(&[(8, 3), (-4, 3)])),
                ],
            )],
        ),
        Builder::new(
            "MB-5/2-0",
            h(5),
            z,
            Period::EightK,
            CharPoly {
                lambda: lambda_poly(&[&[0, -48, -48], &[12, 52, 12], &[-8, -8], &[1]]),
                shift: frac(&[(1, 4), (1, 4)]),
            },
        )
        .done(None, false, vec![mid(h(5), z, even.clone(), 1)], vec![]),
        Builder::new(
            "MB-3/2-1",
            h(3),
            r(1, 1),
            Period::EightK,
            SurdPair {
                center: frac(&[(13, 4), (5, 4)]),
                radicand: ints(&[9, -9, 1]),
            },
        )
        .done(None, false, vec![mid(h(3), r(1, 1), even.clone(), 1)], vec![]),
        Builder::new("MB-1/2-2", h(1), r(2, 1), Period::EightK, Linear(frac(&[(25, 4), (1, 4)]))).done(
            None,
            false,
            vec![mid(h(1), r(2, 1), even, 1)],
            vec![form(
                r(-2, 1),
                true,
                &[(0b000, 0, one()), (0b000, 1, frac(&[(-4, 3), (1, 3)])), (0b011, 0, t(-2))],
            )],
        ),
    ]
}

/// Mid-band states of the period-`K` potentials with `a = b`.
fn equal_index_entries() -> Vec<CatalogEntry> {
    use EnergyForm::*;
    let (h1, h3) = (r(1, 2), r(3, 2));
    vec![
        Builder::new("MB-1/2-1/2", h1, h1, Period::FourK, Linear(frac(&[(1, 1), (1, 4)]))).done(
            None,
            true,
            vec![kernel(edge(h1, h1), 0b010, 0), kernel(edge(h1, h1), 0b100, 0)],
            vec![form(r(-1, 2), false, &[(0b010, 0, one())]), form(r(-1, 2), false, &[(0b100, 0, one())])],
        ),
        Builder::new(
            "MB-3/2-3/2",
            h3,
            h3,
            Period::FourK,
            SurdPair {
                center: frac(&[(5, 1), (5, 4)]),
                radicand: ints(&[16, -16, 1]),
            },
        )
        .done(
            None,
            true,
            vec![kernel(edge(h3, h3), 0b010, 1), kernel(edge(h3, h3), 0b100, 1)],
            vec![],
        ),
    ]
}

/// Every catalogued state, in a fixed order.
pub fn entries() -> Vec<CatalogEntry> {
    let mut out = integer_entries();
    out.extend(half_integer_entries());
    out.extend(ladder_entries());
    out.extend(midband_entries());
    out.extend(equal_index_entries());
    out
}

pub fn lookup(id: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.id == id)
}

/// Outcome of checking one entry at one `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub id: String,
    pub m: f64,
    pub energies: Vec<f64>,
    /// Worst Schrödinger residual over the kernel eigenfunctions.
    pub residual: f64,
    /// Worst residual of the printed eigenfunctions, when there are any.
    pub printed_residual: Option<f64>,
    /// Largest distance from a listed energy to the nearest Floquet root.
    pub floquet_error: f64,
    /// The closures reproduce the energy polynomial exactly.
    pub qes_match: bool,
    /// The Floquet edges matched by the energies carry the label's indices.
    pub labels_match: Option<bool>,
    /// Each energy has the claimed number of independent eigenfunctions.
    pub multiplicity_ok: bool,
    /// Description of the worst failing leg, if any.
    pub worst: Option<String>,
}

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const FLOQUET_TOL: f64 = 1e-7;
pub const RESIDUAL_GRID: usize = 512;

impl CrossCheck {
    pub fn passes(&self) -> bool {
        self.worst.is_none()
    }
}

fn rem_by_monic(p: &Poly<MPoly>, f: &Poly<MPoly>) -> Poly<MPoly> {
    let Some(df) = f.degree() else {
        return p.clone();
    };
    let mut c = p.coeffs().to_vec();
    while c.len() > df && !c.is_empty() {
        let lead = c[c.len() - 1].clone();
        let shift = c.len() - 1 - df;
        for (i, fi) in f.coeffs().iter().enumerate() {
            c[shift + i] = c[shift + i].minus(&lead.times(fi));
        }
        c.pop();
    }
    Poly::new(c)
}

fn qes_match(entry: &CatalogEntry, problems: &[Option<QesEigenproblem>]) -> bool {
    let target = entry.energy.energy_poly();
    problems.iter().all(|p| match p {
        None => false,
        Some(p) => {
            let cp = p.charpoly_in_energy();
            match entry.energy {
                EnergyForm::CharPoly { .. } => cp == target,
                _ => rem_by_monic(&cp, &target).coeffs().iter().all(|c| c.is_zero()),
            }
        }
    })
}

/// Cross-check an entry at each modulus of `ms`; the closures are built once.
pub fn crosscheck_many(entry: &CatalogEntry, ms: &[f64]) -> Result<Vec<CrossCheck>> {
    let problems: Vec<Option<QesEigenproblem>> = entry.kernels.iter().map(KernelRef::closure).collect();
    let exact = qes_match(entry, &problems);
    ms.iter().map(|&m| check_at(entry, &problems, exact, m)).collect()
}

pub fn crosscheck(entry: &CatalogEntry, m: f64) -> Result<CrossCheck> {
    crosscheck_many(entry, &[m]).map(|mut v| v.remove(0))
}

fn check_at(entry: &CatalogEntry, problems: &[Option<QesEigenproblem>], exact: bool, m: f64) -> Result<CrossCheck> {
    let mk = Modulus::new(m)?;
    let params = entry.params(m)?;
    let energies = entry.energy.energies(m)?;
    let mut worst: Option<(f64, String)> = None;
    let mut flag = |score: f64, msg: String| {
        if worst.as_ref().is_none_or(|w| score > w.0) {
            worst = Some((score, msg));
        }
    };
    let tol = |e: f64| 1e-8 * e.abs().max(1.0);

    let mut res = 0.0f64;
    let mut multiplicity_ok = true;
    let kernel_levels: Vec<Vec<f64>> = problems
        .iter()
        .map(|p| p.as_ref().map_or(Ok(Vec::new()), |p| qes_energies(p, mk)))
        .collect::<Result<_>>()?;
    for &e in &energies {
        let mut count = 0;
        for (p, levels) in problems.iter().zip(&kernel_levels) {
            let (Some(p), Some(&ek)) = (p, levels.iter().find(|l| (*l - e).abs() <= tol(e))) else {
                continue;
            };
            count += 1;
            let psi = wavefunction_at(p, ek, mk);
            let r = residual(|x| psi.eval(x), e, &params, RESIDUAL_GRID);
            res = res.max(r);
            if !(r <= RESIDUAL_TOL) {
                flag(r / RESIDUAL_TOL, format!("residual {r:.2e} at E = {e}"));
            }
        }
        let want = if entry.degenerate { 2 } else { 1 };
        if count < want {
            multiplicity_ok = false;
            flag(f64::INFINITY, format!("{count} of {want} eigenfunctions found at E = {e}"));
        }
    }

    let printed_residual = if entry.printed.is_empty() {
        None
    } else {
        let mut worst_printed = 0.0f64;
        for (i, form) in entry.printed.iter().enumerate() {
            let e = energies[if entry.degenerate { 0 } else { i.min(energies.len() - 1) }];
            let psi = form.wavefunction(mk, e);
            let r = residual(|x| psi.eval(x), e, &params, RESIDUAL_GRID);
            worst_printed = worst_printed.max(r);
            if !(r <= RESIDUAL_TOL) {
                flag(r / RESIDUAL_TOL, format!("printed eigenfunction {i} has residual {r:.2e}"));
            }
        }
        Some(worst_printed)
    };

    let emax = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let cells = entry.cells(&params);
    let mut floquet_error = 0.0f64;
    let mut labels_match = None;
    if cells <= 2 {
        let edges = find_band_edges(&params, emax)?;
        let mut matched = Vec::new();
        for &e in &energies {
            // A gap narrower than the tolerance can put a second edge within
            // reach; the state sits on the nearest ones.
            let want = if entry.degenerate { 2 } else { 1 };
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.sort_by(|&i, &j| (edges[i].energy - e).abs().total_cmp(&(edges[j].energy - e).abs()));
            order.truncate(want);
            let dist = order
                .iter()
                .map(|&i| (edges[i].energy - e).abs())
                .fold(if order.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
            floquet_error = floquet_error.max(dist);
            let near: Vec<usize> = order
                .into_iter()
                .filter(|&i| (edges[i].energy - e).abs() <= FLOQUET_TOL)
                .collect();
            if near.len() != want {
                multiplicity_ok = false;
                flag(f64::INFINITY, format!("{} Floquet edges at E = {e}, expected {want}", near.len()));
            }
            matched.extend(near);
        }
        if let Some(want) = entry.label_indices() {
            matched.sort_unstable();
            let ok = matched == want;
            if !ok {
                flag(f64::INFINITY, format!("edge indices {matched:?}, label says {want:?}"));
            }
            labels_match = Some(ok);
        }
    } else {
        let roots = find_midband(&params, params.potential_floor() - 1.0, emax)?;
        for &e in &energies {
            let dist = roots.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
            floquet_error = floquet_error.max(dist);
        }
    }
    if !(floquet_error <= FLOQUET_TOL) {
        flag(floquet_error / FLOQUET_TOL, format!("Floquet root off by {floquet_error:.2e}"));
    }
    if !exact {
        flag(f64::INFINITY, String::from("closure does not reproduce the energy polynomial"));
    }

    Ok(CrossCheck {
        id: entry.id.clone(),
        m,
        energies,
        residual: res,
        printed_residual,
        floquet_error,
        qes_match: exact,
        labels_match,
        multiplicity_ok,
        worst: worst.map(|w| w.1),
    })
}
