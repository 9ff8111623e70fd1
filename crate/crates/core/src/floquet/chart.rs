//! Band charts over a grid of `m`, level tracking and gap bookkeeping.

use alloc::vec::Vec;

use super::edges::{find_band_edges_with, labelled_edge, midband_between, BandEdge, EdgeLabel, EdgeType};
use super::FloquetConfig;
use crate::elliptic::Modulus;
use crate::error::Result;
use crate::math;
use crate::model::{gap_bounds, BoundNote, GapBounds, GapCount, PotentialParams};

/// A band gap between two consecutive edges of the same type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    /// Index of the lower edge in the row.
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub edge_type: EdgeType,
}

impl Gap {
    pub fn is_open(&self, gap_tol: f64) -> bool {
        self.width >= gap_tol
    }
}

/// Edges and mid-band points at a single `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartRow {
    pub m: f64,
    pub edges: Vec<BandEdge>,
    pub midband: Vec<f64>,
}

impl ChartRow {
    /// Finite gaps whose both edges lie below the chart's `emax`.
    pub fn gaps(&self) -> Vec<Gap> {
        (1..self.edges.len().saturating_sub(1))
            .step_by(2)
            .map(|i| {
                let (lo, hi) = (&self.edges[i], &self.edges[i + 1]);
                Gap {
                    index: i,
                    lower: lo.energy,
                    upper: hi.energy,
                    width: hi.energy - lo.energy,
                    edge_type: lo.edge_type,
                }
            })
            .collect()
    }

    /// Width of the gap above edge `i`, when `i` is the lower edge of one.
    pub fn gap_to_next(&self, i: usize) -> Option<f64> {
        if i % 2 == 1 && i + 1 < self.edges.len() {
            Some(self.edges[i + 1].energy - self.edges[i].energy)
        } else {
            None
        }
    }

    pub fn open_gaps(&self, gap_tol: f64) -> usize {
        self.gaps().iter().filter(|g| g.is_open(gap_tol)).count()
    }

    /// Zero-width gaps below the continuum; above it every gap is closed.
    pub fn closed_gaps(&self, gap_tol: f64) -> Vec<Gap> {
        let top = self.continuum_threshold(gap_tol).unwrap_or(f64::NEG_INFINITY);
        self.gaps()
            .into_iter()
            .filter(|g| !g.is_open(gap_tol) && g.upper < top)
            .collect()
    }

    /// Upper edge of the highest open gap: the bottom of the continuum band
    /// when the chart reaches past it.
    pub fn continuum_threshold(&self, gap_tol: f64) -> Option<f64> {
        self.gaps().iter().rev().find(|g| g.is_open(gap_tol)).map(|g| g.upper)
    }
}

/// Edges and mid-band points with `E ≤ emax` at the modulus of `params`.
pub fn chart_row(params: &PotentialParams, emax: f64, cfg: FloquetConfig) -> Result<ChartRow> {
    let edges = find_band_edges_with(params, emax, cfg)?;
    let midband = midband_between(params, &edges, params.potential_floor() - 1.0, emax, cfg)?;
    Ok(ChartRow {
        m: params.m(),
        edges,
        midband,
    })
}

/// Something a scan could not follow from one `m` to the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackWarning {
    /// The edge was present at `from` and below the top of the next row, but
    /// is missing at `to`.
    Lost { label: EdgeLabel, from: f64, to: f64 },
    /// The edge moved much further than the slope over the previous step
    /// predicts.
    Jump {
        label: EdgeLabel,
        m: f64,
        delta: f64,
        predicted: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandChart {
    pub rows: Vec<ChartRow>,
    pub warnings: Vec<TrackWarning>,
}

fn energy_of(row: &ChartRow, label: EdgeLabel) -> Option<f64> {
    row.edges.iter().find(|e| e.label == label).map(|e| e.energy)
}

impl BandChart {
    /// Sorts rows by `m` and checks continuity of every labelled edge.
    pub fn from_rows(mut rows: Vec<ChartRow>) -> Self {
        rows.sort_by(|a, b| a.m.total_cmp(&b.m));
        let mut warnings = Vec::new();
        for i in 1..rows.len() {
            let (prev, cur) = (&rows[i - 1], &rows[i]);
            let top = cur.edges.last().map_or(f64::NEG_INFINITY, |e| e.energy);
            for edge in &prev.edges {
                let label = edge.label;
                let Some(e1) = energy_of(cur, label) else {
                    if edge.energy <= top {
                        warnings.push(TrackWarning::Lost {
                            label,
                            from: prev.m,
                            to: cur.m,
                        });
                    }
                    continue;
                };
                if i < 2 {
                    continue;
                }
                let before = &rows[i - 2];
                if let Some(em) = energy_of(before, label) {
                    let slope = (edge.energy - em) / (prev.m - before.m);
                    let predicted = slope * (cur.m - prev.m);
                    let delta = e1 - edge.energy;
                    if math::abs(delta) > 4.0 * math::abs(predicted) + 1e-3 * (1.0 + math::abs(e1)) {
                        warnings.push(TrackWarning::Jump {
                            label,
                            m: cur.m,
                            delta,
                            predicted,
                        });
                    }
                }
            }
        }
        BandChart { rows, warnings }
    }
}

/// Charts `template` at every `m` of the grid. The modulus of `template`
/// itself is ignored.
pub fn scan_m(template: &PotentialParams, m_grid: &[f64], emax: f64, cfg: FloquetConfig) -> Result<BandChart> {
    let rows = m_grid
        .iter()
        .map(|&m| chart_row(&template.with_modulus(Modulus::new(m)?), emax, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(BandChart::from_rows(rows))
}

/// Energy of one labelled edge along a list of moduli.
pub fn track_level(template: &PotentialParams, label: EdgeLabel, ms: &[f64], cfg: FloquetConfig) -> Result<Vec<f64>> {
    ms.iter()
        .map(|&m| labelled_edge(&template.with_modulus(Modulus::new(m)?), label, cfg))
        .collect()
}

/// Value at `x0` of the least-squares line through `(xs, ys)`.
pub fn extrapolate_linear(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return my;
    }
    my + sxy / sxx * (x0 - mx)
}

/// Edge types run `+2, −2, −2, +2, +2, −2, −2, …` in ascending order.
pub fn oscillation_ordering_holds(edges: &[BandEdge]) -> bool {
    edges.iter().enumerate().all(|(i, e)| {
        let expected = if i.div_ceil(2) % 2 == 0 {
            EdgeType::Periodic
        } else {
            EdgeType::Antiperiodic
        };
        e.edge_type == expected
    })
}

/// Observed gap counts of a chart row against the exact bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCheck {
    /// Open gaps between periodic edges, plus the one below the spectrum.
    pub observed_2k: u32,
    /// Open gaps between antiperiodic edges.
    pub observed_4k: u32,
    pub bounds: GapBounds,
}

impl GapCheck {
    /// Whether the bounds are about the true period of the potential.
    pub fn applies(&self) -> bool {
        self.bounds.note != Some(BoundNote::HalfPeriod)
    }

    pub fn within_bounds(&self) -> bool {
        let ok = |seen: u32, bound: GapCount| bound.finite().is_none_or(|b| seen <= b);
        !self.applies()
            || (ok(self.observed_2k, self.bounds.period_2k.bound) && ok(self.observed_4k, self.bounds.period_4k.bound))
    }

    /// Whether the counts equal the sharpened values, where both are finite.
    pub fn matches_sharpened(&self) -> bool {
        let eq = |seen: u32, c: GapCount| c.finite().is_none_or(|b| seen == b);
        !self.applies()
            || (eq(self.observed_2k, self.bounds.period_2k.sharpened)
                && eq(self.observed_4k, self.bounds.period_4k.sharpened))
    }
}

pub fn gap_count_check(params: &PotentialParams, row: &ChartRow, gap_tol: f64) -> GapCheck {
    let gaps = row.gaps();
    let count = |t: EdgeType| gaps.iter().filter(|g| g.edge_type == t && g.is_open(gap_tol)).count() as u32;
    GapCheck {
        observed_2k: count(EdgeType::Periodic) + 1,
        observed_4k: count(EdgeType::Antiperiodic),
        bounds: gap_bounds(params.a(), params.b()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: i64, b: i64, m: f64) -> PotentialParams {
        PotentialParams::from_fractions((a, 1), (b, 1), m).unwrap()
    }

    #[test]
    fn least_squares_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [3.0, 5.0, 7.0];
        assert!((extrapolate_linear(&xs, &ys, 0.0) - 1.0).abs() < 1e-14);
        assert_eq!(extrapolate_linear(&[2.0, 2.0], &[1.0, 3.0], 5.0), 2.0);
    }

    #[test]
    fn twelve_six_row() {
        let p = params(3, 2, 0.5);
        let row = chart_row(&p, 40.0, FloquetConfig::default()).unwrap();
        assert!(oscillation_ordering_holds(&row.edges));
        let closed = row.closed_gaps(1e-6);
        assert_eq!(closed.len(), 2, "{:?}", row.gaps());
        assert!(closed.iter().all(|g| g.edge_type == EdgeType::Periodic));
        assert_eq!(row.open_gaps(1e-6), 3);
        let check = gap_count_check(&p, &row, 1e-6);
        assert!(check.within_bounds(), "{check:?}");
        assert!(check.matches_sharpened(), "{check:?}");
    }

    #[test]
    fn scan_rows_sorted_without_warnings() {
        let chart = scan_m(&params(3, 1, 0.0), &[0.6, 0.2, 0.4], 30.0, FloquetConfig::default()).unwrap();
        let ms: Vec<f64> = chart.rows.iter().map(|r| r.m).collect();
        assert_eq!(ms, [0.2, 0.4, 0.6]);
        assert!(chart.warnings.is_empty(), "{:?}", chart.warnings);
    }
}
