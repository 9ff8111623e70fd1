//! Energies, eigenvectors and reconstructed wavefunctions of closed problems.

use alloc::vec::Vec;

use super::closure::QesEigenproblem;
use super::monomial::EllipticMonomial;
use super::operator::OperatorKind;
use crate::elliptic::{JacobiEvaluator, Modulus};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::model::{to_f64, Potential, PotentialParams};
use crate::poly::{q_from_f64, real_roots, MPoly};

/// Problems up to this size are solved through exact root isolation.
pub const EXACT_DIM: usize = 8;

const IMAG_TOL: f64 = 1e-10;

fn restricted_matrix(problem: &QesEigenproblem, m: f64) -> Matrix {
    problem
        .matrix()
        .iter()
        .map(|row| row.iter().map(|e| e.eval_f64(m)).collect())
        .collect()
}

fn numeric_eigenvalues(problem: &QesEigenproblem, m: f64) -> Result<Vec<f64>> {
    let r = restricted_matrix(problem, m);
    if let Some(s) = linalg::symmetrize_tridiagonal(&r) {
        return Ok(linalg::symmetric_eigenvalues(s));
    }
    let ev = linalg::general_eigenvalues(r).ok_or(Error::ComplexEigenvalue { re: f64::NAN, im: f64::NAN })?;
    let mut out = Vec::with_capacity(ev.len());
    for (re, im) in ev {
        if math::abs(im) > IMAG_TOL * re.abs().max(1.0) {
            return Err(Error::ComplexEigenvalue { re, im });
        }
        out.push(re);
    }
    Ok(out)
}

/// Energies of a closed problem at modulus `m`, ascending.
pub fn qes_energies(problem: &QesEigenproblem, m: Modulus) -> Result<Vec<f64>> {
    let mv = m.value();
    if problem.dim() <= EXACT_DIM {
        let mq = q_from_f64(mv);
        let poly = MPoly::new(problem.charpoly_in_energy().coeffs().iter().map(|c| c.eval(&mq)).collect());
        return match real_roots(&poly, 1e-16) {
            Ok(roots) => Ok(roots),
            // Report the offending pair from a floating-point solve.
            Err(_) => {
                let shift = problem.energy_shift().eval_f64(mv);
                let r = restricted_matrix(problem, mv);
                let ev = linalg::general_eigenvalues(r).unwrap_or_default();
                let worst = ev
                    .iter()
                    .copied()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .unwrap_or((f64::NAN, f64::NAN));
                Err(Error::ComplexEigenvalue {
                    re: worst.0 + shift,
                    im: worst.1,
                })
            }
        };
    }
    let shift = problem.energy_shift().eval_f64(mv);
    let mut ev: Vec<f64> = numeric_eigenvalues(problem, mv)?.into_iter().map(|l| l + shift).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Coefficients over the ambient basis of the eigenfunction with energy `energy`.
pub fn eigen_coefficients(problem: &QesEigenproblem, energy: f64, m: Modulus) -> Vec<f64> {
    let mv = m.value();
    let lambda = energy - problem.energy_shift().eval_f64(mv);
    let r = restricted_matrix(problem, mv);
    let v = linalg::eigenvector(&r, lambda);
    let n = problem.basis().len();
    (0..n)
        .map(|i| {
            problem
                .subspace()
                .iter()
                .zip(&v)
                .map(|(u, w)| u[i].eval_f64(mv) * w)
                .sum()
        })
        .collect()
}

/// Prefactor multiplying the elliptic combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefactor {
    /// `dn^{−b}`.
    DnPower,
    /// `dn^{−b}·√(dn + cn)`.
    DnPowerSqrt,
    /// `dn^{−b}·√(dn − cn)`, continued analytically.
    DnPowerSqrtReflected,
}

/// A reconstructed eigenfunction `ψ(x)`, normalised to unit peak on `[0, 8K)`.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    jac: JacobiEvaluator,
    b: f64,
    prefactor: Prefactor,
    terms: Vec<(EllipticMonomial, f64)>,
    energy: f64,
    scale: f64,
}

impl Wavefunction {
    /// Build from explicit terms and normalise.
    pub fn new(
        m: Modulus,
        b: f64,
        prefactor: Prefactor,
        terms: Vec<(EllipticMonomial, f64)>,
        energy: f64,
    ) -> Self {
        let mut psi = Wavefunction {
            jac: JacobiEvaluator::new(m),
            b,
            prefactor,
            terms,
            energy,
            scale: 1.0,
        };
        let span = 8.0 * psi.jac.quarter_period();
        let n = 4096;
        let mut peak = 0.0f64;
        for i in 0..n {
            let v = psi.eval(span * i as f64 / n as f64);
            if v.abs() > peak.abs() {
                peak = v;
            }
        }
        if peak != 0.0 && peak.is_finite() {
            psi.scale = 1.0 / peak;
        }
        psi
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn prefactor(&self) -> Prefactor {
        self.prefactor
    }

    pub fn terms(&self) -> &[(EllipticMonomial, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.jac.eval(x);
        let body: f64 = self.terms.iter().map(|(mono, c)| c * mono.eval(t.sn, t.cn, t.dn)).sum();
        let dn_part = if self.b == 0.0 { 1.0 } else { math::pow(t.dn, -self.b) };
        let root = match self.prefactor {
            Prefactor::DnPower => 1.0,
            Prefactor::DnPowerSqrt => self.jac.sqrt_dn_plus_cn(x),
            Prefactor::DnPowerSqrtReflected => self.jac.sqrt_dn_plus_cn(2.0 * self.jac.quarter_period() - x),
        };
        self.scale * dn_part * root * body
    }
}

/// Eigenfunction number `index` (ascending energy) of a closed problem.
pub fn wavefunction(problem: &QesEigenproblem, index: usize, m: Modulus) -> Result<Wavefunction> {
    let energies = qes_energies(problem, m)?;
    let energy = *energies.get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: energies.len(),
    })?;
    Ok(wavefunction_at(problem, energy, m))
}

/// Eigenfunction of a closed problem at a known eigenvalue `energy`.
pub fn wavefunction_at(problem: &QesEigenproblem, energy: f64, m: Modulus) -> Wavefunction {
    let coeffs = eigen_coefficients(problem, energy, m);
    let op = problem.op();
    let prefactor = match (op.kind, op.reflected) {
        (OperatorKind::BandEdge, _) => Prefactor::DnPower,
        (OperatorKind::MidBand, false) => Prefactor::DnPowerSqrt,
        (OperatorKind::MidBand, true) => Prefactor::DnPowerSqrtReflected,
    };
    let terms = problem.basis().iter().copied().zip(coeffs).filter(|(_, c)| *c != 0.0).collect();
    Wavefunction::new(m, to_f64(op.b), prefactor, terms, energy)
}

/// Eighth-order central weights for `ψ″`, offsets `0..=4`.
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

/// `max |−ψ″ + (V − E)ψ| / max |ψ|` on `grid_n` points of `[0, 8K)`.
///
/// The step keeps `h·k ≈ 0.1` for a state oscillating on the scale `1/k`:
/// small enough for the stencil's `h⁸` error and large enough that rounding
/// in `ψ` is not amplified past `1e−7`.
pub fn residual(psi: impl Fn(f64) -> f64, energy: f64, params: &PotentialParams, grid_n: usize) -> f64 {
    let pot = Potential::new(*params);
    let span = 8.0 * pot.jacobi().quarter_period();
    let k = math::sqrt(energy.abs().max(params.potential_ceiling()).max(params.potential_floor().abs()).max(1.0));
    let h = (0.1 / k).clamp(1e-3, 0.05);
    let n = grid_n.max(64);
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for i in 0..n {
        let x = span * i as f64 / n as f64;
        let f0 = psi(x);
        let mut d2 = D2[0] * f0;
        for (j, w) in D2.iter().enumerate().skip(1) {
            let dx = j as f64 * h;
            d2 += w * (psi(x + dx) + psi(x - dx));
        }
        let r = -d2 / (h * h) + (pot.value(x) - energy) * f0;
        worst = worst.max(r.abs());
        peak = peak.max(f0.abs());
    }
    if peak == 0.0 {
        return f64::INFINITY;
    }
    worst / peak
}
