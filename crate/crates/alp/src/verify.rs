//! Catalog verification across moduli.

use std::fmt::Write as _;

use alp_core::catalog::{crosscheck_many, CatalogEntry, CrossCheck};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::round12;

pub const DEFAULT_MS: [f64; 3] = [0.1, 0.5, 0.9];

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub m: f64,
    pub energies: Vec<f64>,
    pub residual: f64,
    pub printed_residual: Option<f64>,
    pub floquet_error: f64,
    pub qes_match: bool,
    pub labels_match: Option<bool>,
    pub pass: bool,
    pub worst: Option<String>,
}

impl From<&CrossCheck> for CheckRecord {
    fn from(c: &CrossCheck) -> Self {
        CheckRecord {
            m: c.m,
            energies: c.energies.iter().copied().map(round12).collect(),
            residual: c.residual,
            printed_residual: c.printed_residual,
            floquet_error: c.floquet_error,
            qes_match: c.qes_match,
            labels_match: c.labels_match,
            pass: c.passes(),
            worst: c.worst.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub energy: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

/// Cross-checks every entry at every modulus, in parallel over entries.
/// Reports keep the order of `entries`.
pub fn verify(entries: &[CatalogEntry], ms: &[f64]) -> alp_core::Result<Vec<EntryReport>> {
    entries
        .par_iter()
        .map(|e| {
            let checks: Vec<CheckRecord> = crosscheck_many(e, ms)?.iter().map(CheckRecord::from).collect();
            Ok(EntryReport {
                id: e.id.clone(),
                energy: e.energy.to_string(),
                pass: checks.iter().all(|c| c.pass),
                checks,
            })
        })
        .collect()
}

/// One line per entry, per-modulus detail when `detail` is set, failures
/// spelled out, and a closing `n/N entries PASS`.
pub fn render(reports: &[EntryReport], detail: bool) -> String {
    let mut s = String::new();
    for r in reports {
        let res = r.checks.iter().map(|c| c.residual.max(c.printed_residual.unwrap_or(0.0))).fold(0.0, f64::max);
        let fl = r.checks.iter().map(|c| c.floquet_error).fold(0.0, f64::max);
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict} {}  E = {}  residual {res:.1e}  floquet {fl:.1e}", r.id, r.energy);
        for c in &r.checks {
            if detail {
                let es: Vec<String> = c.energies.iter().map(|e| format!("{e}")).collect();
                let _ = writeln!(
                    s,
                    "  m = {}: E = {}  residual {:.2e}  floquet {:.2e}  kernel {}",
                    c.m,
                    es.join(", "),
                    c.residual,
                    c.floquet_error,
                    if c.qes_match { "exact" } else { "mismatch" }
                );
            }
            if let Some(w) = c.worst.as_ref().filter(|_| !c.pass) {
                let _ = writeln!(s, "  m = {}: {w}", c.m);
            }
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(s, "{passed}/{} entries PASS", reports.len());
    s
}
