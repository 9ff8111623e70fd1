//! Table formats. Every float goes through [`round12`], so CSV and JSON are
//! byte-stable across runs and platforms.

use std::io::Write;

use alp_core::floquet::ChartRow;
use serde::Serialize;

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal that reads back as `round12(x)`, in exponent form when
/// `|x| < 1e-5` or `|x| ≥ 1e16`.
pub fn fmt_num(x: f64) -> String {
    let y = round12(x);
    if y != 0.0 && y.is_finite() && !(1e-5..1e16).contains(&y.abs()) {
        format!("{y:?}")
    } else {
        format!("{y}")
    }
}

/// One band edge with the mid-band points of the band that starts at it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeRecord {
    pub m: f64,
    pub edge_index: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "D_sign")]
    pub d_sign: i8,
    pub nodes: u32,
    pub gap_to_next: Option<f64>,
    pub degenerate_flag: bool,
    pub midband_energies: Vec<f64>,
}

pub const CSV_HEADER: [&str; 8] = [
    "m",
    "edge_index",
    "E",
    "D_sign",
    "nodes",
    "gap_to_next",
    "degenerate_flag",
    "midband_energies",
];

/// Records of a chart row in edge order. Bands run from an even-indexed
/// edge to the next; the last edge opens the band that runs past `emax`.
pub fn records(row: &ChartRow) -> Vec<EdgeRecord> {
    let n = row.edges.len();
    row.edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let midband = if i % 2 == 0 || i + 1 == n {
                let top = row.edges.get(i + 1).map_or(f64::INFINITY, |x| x.energy);
                row.midband
                    .iter()
                    .copied()
                    .filter(|&x| x > e.energy && x < top)
                    .map(round12)
                    .collect()
            } else {
                Vec::new()
            };
            EdgeRecord {
                m: round12(row.m),
                edge_index: i,
                energy: round12(e.energy),
                d_sign: e.edge_type.sign(),
                nodes: e.nodes,
                gap_to_next: row.gap_to_next(i).map(round12),
                degenerate_flag: e.degenerate_with.is_some(),
                midband_energies: midband,
            }
        })
        .collect()
}

/// A row the computation could not produce at modulus `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedRow {
    pub m: f64,
    pub error: String,
}

/// A CSV line: an edge, or a modulus where the computation failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Edge(EdgeRecord),
    Failed(FailedRow),
}

/// Writes the header and `lines` in the given order. A failed modulus keeps
/// its place in the file with an empty edge index and `E = NaN`.
pub fn write_csv(out: impl Write, lines: &[Line]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for line in lines {
        let record = match line {
            Line::Edge(r) => {
                let midband: Vec<String> = r.midband_energies.iter().map(|&x| fmt_num(x)).collect();
                [
                    fmt_num(r.m),
                    r.edge_index.to_string(),
                    fmt_num(r.energy),
                    r.d_sign.to_string(),
                    r.nodes.to_string(),
                    r.gap_to_next.map(fmt_num).unwrap_or_default(),
                    u8::from(r.degenerate_flag).to_string(),
                    midband.join(";"),
                ]
            }
            Line::Failed(f) => {
                let mut rec: [String; 8] = Default::default();
                rec[0] = fmt_num(f.m);
                rec[2] = "NaN".into();
                rec
            }
        };
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
