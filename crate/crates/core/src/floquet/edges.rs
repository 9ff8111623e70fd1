use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use super::{discriminant_half, monodromy_with, FloquetConfig, Hill};
use crate::error::{Error, Result};
use crate::math;
use crate::model::PotentialParams;
use crate::roots::brent;

/// Sign of the discriminant at a band edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeType {
    /// `D = +2`, eigenfunction of period `L`.
    Periodic,
    /// `D = −2`, eigenfunction of period `2L`.
    Antiperiodic,
}

impl EdgeType {
    pub fn sign(self) -> i8 {
        match self {
            EdgeType::Periodic => 1,
            EdgeType::Antiperiodic => -1,
        }
    }

    pub fn discriminant(self) -> f64 {
        2.0 * self.sign() as f64
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeType::Periodic => "+2",
            EdgeType::Antiperiodic => "-2",
        })
    }
}

/// Boundary conditions at `x = 0` and `x = L/2` of the half-period problem
/// an edge eigenfunction solves. `V` is even about both points, so every
/// edge eigenfunction is even or odd about each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    NeumannNeumann,
    DirichletDirichlet,
    NeumannDirichlet,
    DirichletNeumann,
}

impl Boundary {
    pub const ALL: [Boundary; 4] = [
        Boundary::NeumannNeumann,
        Boundary::DirichletDirichlet,
        Boundary::NeumannDirichlet,
        Boundary::DirichletNeumann,
    ];

    fn start(self) -> f64 {
        match self {
            Boundary::NeumannNeumann | Boundary::NeumannDirichlet => FRAC_PI_2,
            _ => 0.0,
        }
    }

    /// Prüfer angle at `L/2` of the `k`-th eigenfunction.
    fn target(self, k: u32) -> f64 {
        let base = match self {
            Boundary::NeumannNeumann | Boundary::DirichletNeumann => FRAC_PI_2,
            _ => PI,
        };
        base + k as f64 * PI
    }

    pub fn edge_type(self) -> EdgeType {
        match self {
            Boundary::NeumannNeumann | Boundary::DirichletDirichlet => EdgeType::Periodic,
            _ => EdgeType::Antiperiodic,
        }
    }

    /// Zeros in one period `[0, L)` of the `k`-th eigenfunction.
    pub fn nodes_per_period(self, k: u32) -> u32 {
        match self {
            Boundary::NeumannNeumann => 2 * k,
            Boundary::DirichletDirichlet => 2 * k + 2,
            _ => 2 * k + 1,
        }
    }
}

/// Identity of an edge that is stable under changes of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub boundary: Boundary,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdge {
    pub energy: f64,
    pub edge_type: EdgeType,
    /// Zeros of the eigenfunction in `[0, 2K)`.
    pub nodes: u32,
    pub label: EdgeLabel,
    /// Index of the coincident same-type edge across a closed gap.
    pub degenerate_with: Option<usize>,
}

/// All band edges with `E ≤ emax`, ascending, with default settings.
pub fn find_band_edges(params: &PotentialParams, emax: f64) -> Result<Vec<BandEdge>> {
    find_band_edges_with(params, emax, FloquetConfig::default())
}

/// Each half-period problem is a Sturm–Liouville problem whose `k`-th
/// eigenvalue is where the Prüfer angle at `L/2` reaches its `k`-th target;
/// the angle counts zeros, so no edge can be skipped and coincident edges of
/// a closed gap are found as two separate simple roots.
pub fn find_band_edges_with(params: &PotentialParams, emax: f64, cfg: FloquetConfig) -> Result<Vec<BandEdge>> {
    if !emax.is_finite() {
        return Err(Error::NonFiniteArgument(emax));
    }
    let floor = params.potential_floor() - 1.0;
    let mut edges = Vec::new();
    if emax <= floor {
        return Ok(edges);
    }
    let half = 0.5 * params.period();
    let cells = if params.has_half_period() { 2 } else { 1 };
    for bc in Boundary::ALL {
        let theta = |e: f64| Hill::new(params, e, cfg)?.prufer(bc.start(), half);
        let top = theta(emax)?;
        let mut lo = floor;
        for k in 0.. {
            let target = bc.target(k);
            if target > top {
                break;
            }
            let energy = brent(|e| Ok(theta(e)? - target), lo, emax, cfg.energy_tol)?;
            edges.push(BandEdge {
                energy,
                edge_type: bc.edge_type(),
                nodes: bc.nodes_per_period(k) * cells,
                label: EdgeLabel { boundary: bc, k },
                degenerate_with: None,
            });
            lo = energy;
        }
    }
    edges.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.nodes.cmp(&b.nodes)));
    for i in 1..edges.len() {
        let (a, b) = (&edges[i - 1], &edges[i]);
        if a.edge_type == b.edge_type && b.energy - a.energy < cfg.gap_tol {
            edges[i - 1].degenerate_with = Some(i);
            edges[i].degenerate_with = Some(i - 1);
        }
    }
    Ok(edges)
}

fn sign_changes(samples: &[f64], wrap: f64) -> u32 {
    let n = samples.len();
    let start = (0..n)
        .max_by(|&i, &j| math::abs(samples[i]).total_cmp(&math::abs(samples[j])))
        .unwrap_or(0);
    let mut last = samples[start].signum();
    let mut count = 0;
    for step in 1..=n {
        let i = start + step;
        let v = if i >= n { wrap * samples[i - n] } else { samples[i] };
        if v == 0.0 {
            continue;
        }
        let s = v.signum();
        if s != last {
            count += 1;
            last = s;
        }
    }
    count
}

fn solution_nodes(hill: &Hill, v: [f64; 2], wrap: f64, span: f64, n: usize) -> Result<u32> {
    let mut samples = Vec::with_capacity(n);
    let mut y = v;
    let mut h = 0.0;
    let dx = span / n as f64;
    for i in 0..n {
        samples.push(y[0]);
        y = hill.propagate_one(i as f64 * dx, y, (i + 1) as f64 * dx, &mut h)?;
    }
    Ok(sign_changes(&samples, wrap))
}

/// Zeros in `[0, 2K)` of the edge eigenfunction at `energy`, built from the
/// monodromy eigenvector for eigenvalue `±1`. At a closed gap both
/// independent solutions are counted and must agree.
pub fn count_nodes(energy: f64, params: &PotentialParams, edge_type: EdgeType) -> Result<u32> {
    let cfg = FloquetConfig::default();
    let mono = monodromy_with(energy, params, cfg)?;
    let hill = Hill::new(params, energy, cfg)?;
    let lam = edge_type.sign() as f64;
    let [[a, b], [c, d]] = mono.matrix;
    let v1 = [b, lam - a];
    let v2 = [lam - d, c];
    let n1 = math::abs(v1[0]) + math::abs(v1[1]);
    let n2 = math::abs(v2[0]) + math::abs(v2[1]);
    let scale = (math::abs(a) + math::abs(b) + math::abs(c) + math::abs(d)).max(1.0);
    let vectors = if n1.max(n2) < 1e-6 * scale {
        vec![[1.0, 0.0], [0.0, 1.0]]
    } else if n1 >= n2 {
        vec![v1]
    } else {
        vec![v2]
    };
    let span = 2.0 * hill.pot.jacobi().quarter_period();
    let wrap = if params.has_half_period() { 1.0 } else { lam };
    let mut counts = Vec::new();
    for v in vectors {
        let mut n = 256;
        let mut prev = solution_nodes(&hill, v, wrap, span, n)?;
        loop {
            n *= 2;
            let next = solution_nodes(&hill, v, wrap, span, n)?;
            if next == prev {
                break;
            }
            if n >= 8192 {
                return Err(Error::AmbiguousNode { energy, x: span });
            }
            prev = next;
        }
        counts.push(prev);
    }
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(Error::AmbiguousNode { energy, x: 0.0 });
    }
    Ok(counts[0])
}

/// Energies in `[elo, ehi]` where `D(E) = 0`, with default settings.
pub fn find_midband(params: &PotentialParams, elo: f64, ehi: f64) -> Result<Vec<f64>> {
    find_midband_with(params, elo, ehi, FloquetConfig::default())
}

/// Inside each band `D` runs monotonically between `±2`, so every band
/// bounded by edges of opposite type holds exactly one zero.
pub fn find_midband_with(params: &PotentialParams, elo: f64, ehi: f64, cfg: FloquetConfig) -> Result<Vec<f64>> {
    let edges = find_band_edges_with(params, ehi, cfg)?;
    midband_between(params, &edges, elo, ehi, cfg)
}

/// Mid-band zeros given the edges below `ehi`.
pub(super) fn midband_between(
    params: &PotentialParams,
    edges: &[BandEdge],
    elo: f64,
    ehi: f64,
    cfg: FloquetConfig,
) -> Result<Vec<f64>> {
    let d = |e: f64| discriminant_half(&Hill::new(params, e, cfg)?);
    let mut brackets: Vec<(f64, f64)> = edges
        .windows(2)
        .filter(|w| w[0].edge_type != w[1].edge_type)
        .map(|w| (w[0].energy, w[1].energy))
        .collect();
    if let Some(last) = edges.last() {
        if last.energy < ehi && d(ehi)? * last.edge_type.discriminant() < 0.0 {
            brackets.push((last.energy, ehi));
        }
    }
    let mut out = Vec::new();
    for (lo, hi) in brackets {
        if hi < elo {
            continue;
        }
        let root = brent(d, lo, hi, cfg.energy_tol)?;
        if root >= elo && root <= ehi {
            out.push(root);
        }
    }
    Ok(out)
}

/// Energy of one labelled edge, found without computing the others.
pub fn labelled_edge(params: &PotentialParams, label: EdgeLabel, cfg: FloquetConfig) -> Result<f64> {
    let half = 0.5 * params.period();
    let bc = label.boundary;
    let target = bc.target(label.k);
    let theta = |e: f64| Hill::new(params, e, cfg)?.prufer(bc.start(), half);
    let lo = params.potential_floor() - 1.0;
    let mut width = 4.0f64.max(params.potential_ceiling() - lo);
    let mut hi = lo + width;
    while theta(hi)? < target {
        width *= 2.0;
        hi = lo + width;
        if width > 1e8 {
            return Err(Error::NoBracket { lo, hi });
        }
    }
    brent(|e| Ok(theta(e)? - target), lo, hi, cfg.energy_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: i64, b: i64, m: f64) -> PotentialParams {
        PotentialParams::from_fractions((a, 1), (b, 1), m).unwrap()
    }

    #[test]
    fn sign_changes_wrap_with_antiperiodic_factor() {
        // cos x on [0, 2π) has two zeros; cos(x/2) on [0, 2π) with wrap −1 has one.
        let n = 64;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * 2.0 * PI / n as f64).cos()).collect();
        assert_eq!(sign_changes(&s, 1.0), 2);
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * PI / n as f64).cos()).collect();
        assert_eq!(sign_changes(&s, -1.0), 1);
    }

    #[test]
    fn free_particle_edges() {
        let edges = find_band_edges(&params(1, 0, 0.0), 26.0).unwrap();
        let want = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0, 16.0, 25.0, 25.0];
        assert_eq!(edges.len(), want.len());
        for (e, w) in edges.iter().zip(want) {
            assert!((e.energy - w).abs() < 1e-9, "{e:?}");
        }
    }

    #[test]
    fn twelve_six_ground_state() {
        let edges = find_band_edges(&params(3, 2, 0.5), 10.0).unwrap();
        assert!((edges[0].energy - 4.5).abs() < 1e-9);
        assert_eq!(edges[0].nodes, 0);
        assert_eq!(count_nodes(edges[0].energy, &params(3, 2, 0.5), EdgeType::Periodic).unwrap(), 0);
    }
}
