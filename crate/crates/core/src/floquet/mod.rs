//! Hill/Floquet analysis of `−ψ″ + V(x)ψ = Eψ`: monodromy, discriminant,
//! band edges, node counts and mid-band points.

mod chart;
mod edges;

pub use chart::{
    chart_row, extrapolate_linear, gap_count_check, oscillation_ordering_holds, scan_m, track_level, BandChart,
    ChartRow, GapCheck, Gap, TrackWarning,
};
pub use edges::{
    count_nodes, find_band_edges, find_band_edges_with, find_midband, find_midband_with, labelled_edge, BandEdge,
    Boundary, EdgeLabel, EdgeType,
};

use crate::error::{Error, Result};
use crate::math;
use crate::model::{Potential, PotentialParams};
use crate::ode::{self, Tolerance};

/// Numerical settings shared by the Floquet routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetConfig {
    pub tol: Tolerance,
    /// Two same-type edges closer than this form a closed gap.
    pub gap_tol: f64,
    /// Absolute tolerance on located energies.
    pub energy_tol: f64,
    /// Gate on `|det M − 1|`, relative to the size of the products in `det M`.
    pub wronskian_tol: f64,
}

impl Default for FloquetConfig {
    fn default() -> Self {
        FloquetConfig {
            tol: Tolerance { abs: 1e-12, rel: 1e-12 },
            gap_tol: 1e-6,
            energy_tol: 1e-12,
            wronskian_tol: 1e-10,
        }
    }
}

/// Transfer matrix of `(ψ, ψ′)` across one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub matrix: [[f64; 2]; 2],
    pub energy: f64,
    pub period: f64,
}

impl Monodromy {
    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn det(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// `|det M − 1|` divided by the scale of the cancelling products.
    pub fn wronskian_defect(&self) -> f64 {
        let [[a, b], [c, d]] = self.matrix;
        let scale = math::abs(a * d).max(math::abs(b * c)).max(1.0);
        math::abs(self.det() - 1.0) / scale
    }
}

/// The Schrödinger system at one energy.
pub(crate) struct Hill {
    pub pot: Potential,
    pub energy: f64,
    pub cfg: FloquetConfig,
}

impl Hill {
    pub fn new(params: &PotentialParams, energy: f64, cfg: FloquetConfig) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::NonFiniteArgument(energy));
        }
        Ok(Hill {
            pot: Potential::new(*params),
            energy,
            cfg,
        })
    }

    pub fn underflow(&self, x: f64) -> Error {
        Error::StepUnderflow {
            energy: self.energy,
            m: self.pot.params().m(),
            x,
        }
    }

    /// Both fundamental solutions `[y₁, y₁′, y₂, y₂′]` carried from `x0` to `x1`.
    pub fn propagate(&self, x0: f64, y0: [f64; 4], x1: f64, h: &mut f64) -> Result<[f64; 4]> {
        let e = self.energy;
        ode::integrate(
            |x, y: &[f64; 4]| {
                let g = self.pot.value(x) - e;
                [y[1], g * y[0], y[3], g * y[2]]
            },
            x0,
            y0,
            x1,
            h,
            self.cfg.tol,
        )
        .map_err(|f| self.underflow(f.x))
    }

    /// One solution `[y, y′]` carried from `x0` to `x1`.
    pub fn propagate_one(&self, x0: f64, y0: [f64; 2], x1: f64, h: &mut f64) -> Result<[f64; 2]> {
        let e = self.energy;
        ode::integrate(
            |x, y: &[f64; 2]| [y[1], (self.pot.value(x) - e) * y[0]],
            x0,
            y0,
            x1,
            h,
            self.cfg.tol,
        )
        .map_err(|f| self.underflow(f.x))
    }

    /// Prüfer angle at `x1` for `ψ = ρ sin θ`, `ψ′ = Sρ cos θ`.
    pub fn prufer(&self, theta0: f64, x1: f64) -> Result<f64> {
        let e = self.energy;
        let s = math::sqrt((e - self.pot.params().potential_floor()).max(1.0));
        let mut h = 0.0;
        ode::integrate(
            |x, th: &[f64; 1]| {
                let (sn, cs) = (math::sin(th[0]), math::cos(th[0]));
                [s * cs * cs + (e - self.pot.value(x)) / s * sn * sn]
            },
            0.0,
            [theta0],
            x1,
            &mut h,
            self.cfg.tol,
        )
        .map(|t| t[0])
        .map_err(|f| self.underflow(f.x))
    }

    /// Fundamental solutions at the half period `h = L/2`.
    pub fn half_period(&self) -> Result<[f64; 4]> {
        let half = 0.5 * self.pot.params().period();
        self.propagate(0.0, [1.0, 0.0, 0.0, 1.0], half, &mut 0.0)
    }
}

/// `D(E)` from the half-period solutions, using the reflection symmetry of
/// `V` about `0` and `L/2`: `D = 2 + 4·y₁′(h)·y₂(h)`.
pub(crate) fn discriminant_half(hill: &Hill) -> Result<f64> {
    let y = hill.half_period()?;
    Ok(2.0 + 4.0 * y[1] * y[2])
}

/// Monodromy over one full period `L` with default settings.
pub fn monodromy(energy: f64, params: &PotentialParams) -> Result<Monodromy> {
    monodromy_with(energy, params, FloquetConfig::default())
}

pub fn monodromy_with(energy: f64, params: &PotentialParams, cfg: FloquetConfig) -> Result<Monodromy> {
    let hill = Hill::new(params, energy, cfg)?;
    let period = params.period();
    let y = hill.propagate(0.0, [1.0, 0.0, 0.0, 1.0], period, &mut 0.0)?;
    let mono = Monodromy {
        matrix: [[y[0], y[2]], [y[1], y[3]]],
        energy,
        period,
    };
    if !(mono.wronskian_defect() <= cfg.wronskian_tol) {
        return Err(hill.underflow(period));
    }
    Ok(mono)
}

/// `D(E) = tr M(E)`.
pub fn discriminant(energy: f64, params: &PotentialParams) -> Result<f64> {
    monodromy(energy, params).map(|m| m.trace())
}
