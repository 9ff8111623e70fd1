//! Argument definitions and command dispatch.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use alp_core::catalog::{entries, lookup, CatalogEntry};
use alp_core::floquet::{chart_row, find_midband_with, BandChart, ChartRow, FloquetConfig};
use alp_core::model::PotentialParams;
use alp_core::Modulus;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{parse_exact, parse_index, parse_m, parse_m_range};
use crate::output::{fmt_num, records, round12, write_csv, EdgeRecord, FailedRow, Line};
use crate::verify::{render, verify, DEFAULT_MS};
use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "alp", version, about = "Band edges, mid-band states and closed forms of the associated Lamé potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Solver tolerances; each can also come from the environment.
#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Gaps narrower than this count as closed.
    #[arg(long, env = "ALP_GAP_TOL", global = true)]
    pub gap_tol: Option<f64>,
    /// Absolute accuracy of located energies.
    #[arg(long, env = "ALP_ENERGY_TOL", global = true)]
    pub energy_tol: Option<f64>,
    #[arg(long, env = "ALP_ODE_ABS_TOL", global = true)]
    pub ode_abs_tol: Option<f64>,
    #[arg(long, env = "ALP_ODE_REL_TOL", global = true)]
    pub ode_rel_tol: Option<f64>,
}

impl TolArgs {
    pub fn config(&self) -> Result<FloquetConfig, Failure> {
        let mut cfg = FloquetConfig::default();
        let slots = [
            (self.gap_tol, &mut cfg.gap_tol, "gap tolerance"),
            (self.energy_tol, &mut cfg.energy_tol, "energy tolerance"),
            (self.ode_abs_tol, &mut cfg.tol.abs, "ODE absolute tolerance"),
            (self.ode_rel_tol, &mut cfg.tol.rel, "ODE relative tolerance"),
        ];
        for (v, slot, name) in slots {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Failure::Usage(format!("{name} must be positive, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct Indices {
    /// First index, integer or fraction (e.g. 7/2).
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Second index, integer or fraction.
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band edges at one modulus.
    Edges {
        #[command(flatten)]
        idx: Indices,
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 40.0)]
        emax: f64,
    },
    /// Band chart over a grid of moduli.
    Scan {
        #[command(flatten)]
        idx: Indices,
        /// start:stop:step, e.g. 0.01:0.99:0.01.
        #[arg(long, default_value = "0.01:0.99:0.01")]
        m_range: String,
        #[arg(long, default_value_t = 40.0)]
        emax: f64,
    },
    /// Zeros of the discriminant inside the bands.
    Midband {
        #[command(flatten)]
        idx: Indices,
        #[arg(long)]
        m: String,
        /// Defaults to just below the minimum of the potential.
        #[arg(long, allow_hyphen_values = true)]
        emin: Option<f64>,
        #[arg(long, default_value_t = 40.0)]
        emax: f64,
    },
    /// Cross-check catalog entries against the kernel and the Floquet solver.
    Verify {
        /// A single catalog id.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, value_delimiter = ',')]
        m: Vec<String>,
        /// Shift the energies of one entry, ID=DELTA, to exercise the failure path.
        #[arg(long, hide = true)]
        perturb: Option<String>,
    },
    /// List the catalog.
    Catalog,
}

/// Runs the parsed command, writing its table to `stdout` unless `--out`
/// is given. Notes for humans go to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let cfg = cli.tol.config()?;
    let mut buf = Vec::new();
    let outcome = match &cli.command {
        Command::Edges { idx, m, emax } => edges(idx, m, *emax, cfg, cli.format, &mut buf, stderr),
        Command::Scan { idx, m_range, emax } => scan(idx, m_range, *emax, cfg, cli.format, &mut buf, stderr),
        Command::Midband { idx, m, emin, emax } => midband(idx, m, *emin, *emax, cfg, cli.format, &mut buf),
        Command::Verify { only, m, perturb } => run_verify(only.as_deref(), m, perturb.as_deref(), cli.format, &mut buf),
        Command::Catalog => catalog(cli.format, &mut buf),
    };
    // Partial and verification failures still produce their table.
    if matches!(outcome, Ok(()) | Err(Failure::Partial(_)) | Err(Failure::Verification(_))) {
        match &cli.out {
            Some(path) => File::create(path)?.write_all(&buf)?,
            None => stdout.write_all(&buf)?,
        }
    }
    outcome
}

fn params(idx: &Indices, m: f64) -> Result<PotentialParams, Failure> {
    let (a, b) = (parse_index(&idx.a)?, parse_index(&idx.b)?);
    let p = PotentialParams::new(a, b, Modulus::new(m)?).map_err(|e| Failure::Usage(e.to_string()))?;
    if !p.is_conventional() {
        return Err(Failure::Usage(format!(
            "a = {a}, b = {b} gives a(a+1) < b(b+1); swap a and b (the potential shifts by half a period)"
        )));
    }
    Ok(p)
}

fn check_emax(emax: f64) -> Result<(), Failure> {
    if emax.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("emax = {emax} must be finite")))
    }
}

fn period_name(p: &PotentialParams) -> &'static str {
    if p.has_half_period() {
        "K"
    } else {
        "2K"
    }
}

#[derive(Serialize)]
struct EdgesReport {
    a: String,
    b: String,
    m: f64,
    period: &'static str,
    open_gaps: usize,
    closed_gaps: usize,
    edges: Vec<EdgeRecord>,
}

fn edges(
    idx: &Indices,
    m: &str,
    emax: f64,
    cfg: FloquetConfig,
    format: Format,
    out: &mut Vec<u8>,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    check_emax(emax)?;
    let p = params(idx, parse_m(m)?)?;
    let row = chart_row(&p, emax, cfg)?;
    let (open, closed) = (row.open_gaps(cfg.gap_tol), row.closed_gaps(cfg.gap_tol).len());
    writeln!(
        stderr,
        "a = {}, b = {}, m = {}: period {}; below E = {emax}: {open} open gaps, {closed} closed gaps under the highest open one",
        p.a(),
        p.b(),
        fmt_num(p.m()),
        period_name(&p)
    )?;
    let recs = records(&row);
    match format {
        Format::Csv => write_csv(out, &recs.into_iter().map(Line::Edge).collect::<Vec<_>>())?,
        Format::Json => {
            let report = EdgesReport {
                a: p.a().to_string(),
                b: p.b().to_string(),
                m: round12(p.m()),
                period: period_name(&p),
                open_gaps: open,
                closed_gaps: closed,
                edges: recs,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            out.push(b'\n');
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanReport {
    a: String,
    b: String,
    period: &'static str,
    rows: Vec<EdgeRecord>,
    failures: Vec<FailedRow>,
    warnings: Vec<String>,
}

fn scan(
    idx: &Indices,
    m_range: &str,
    emax: f64,
    cfg: FloquetConfig,
    format: Format,
    out: &mut Vec<u8>,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    check_emax(emax)?;
    let grid = parse_m_range(m_range)?;
    let template = params(idx, grid[0])?;
    let results: Vec<Result<ChartRow, FailedRow>> = grid
        .par_iter()
        .map(|&m| {
            Modulus::new(m)
                .and_then(|mk| chart_row(&template.with_modulus(mk), emax, cfg))
                .map_err(|e| FailedRow {
                    m: round12(m),
                    error: e.to_string(),
                })
        })
        .collect();

    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => {
                lines.extend(records(&row).into_iter().map(Line::Edge));
                rows.push(row);
            }
            Err(f) => {
                writeln!(stderr, "m = {}: {}", fmt_num(f.m), f.error)?;
                lines.push(Line::Failed(f.clone()));
                failures.push(f);
            }
        }
    }
    let chart = BandChart::from_rows(rows);
    let warnings: Vec<String> = chart.warnings.iter().map(|w| format!("{w:?}")).collect();
    for w in &warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    match format {
        Format::Csv => write_csv(out, &lines)?,
        Format::Json => {
            let report = ScanReport {
                a: template.a().to_string(),
                b: template.b().to_string(),
                period: period_name(&template),
                rows: lines
                    .into_iter()
                    .filter_map(|l| match l {
                        Line::Edge(r) => Some(r),
                        Line::Failed(_) => None,
                    })
                    .collect(),
                failures: failures.clone(),
                warnings,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            out.push(b'\n');
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial(format!("{} of {} moduli failed", failures.len(), grid.len())))
    }
}

#[derive(Serialize)]
struct MidbandReport {
    a: String,
    b: String,
    m: f64,
    energies: Vec<f64>,
}

fn midband(
    idx: &Indices,
    m: &str,
    emin: Option<f64>,
    emax: f64,
    cfg: FloquetConfig,
    format: Format,
    out: &mut Vec<u8>,
) -> Result<(), Failure> {
    check_emax(emax)?;
    let p = params(idx, parse_m(m)?)?;
    let elo = emin.unwrap_or(p.potential_floor() - 1.0);
    if !(elo < emax) {
        return Err(Failure::Usage(format!("emin = {elo} must lie below emax = {emax}")));
    }
    let roots: Vec<f64> = find_midband_with(&p, elo, emax, cfg)?.into_iter().map(round12).collect();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["m", "E"])?;
            for e in &roots {
                w.write_record([fmt_num(p.m()), fmt_num(*e)])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let report = MidbandReport {
                a: p.a().to_string(),
                b: p.b().to_string(),
                m: round12(p.m()),
                energies: roots,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            out.push(b'\n');
        }
    }
    Ok(())
}

fn selected_entries(only: Option<&str>, perturb: Option<&str>) -> Result<Vec<CatalogEntry>, Failure> {
    let unknown = |id: &str| Failure::Usage(format!("no catalog entry {id:?}; `alp catalog` lists them"));
    let mut list = match only {
        Some(id) => vec![lookup(id).ok_or_else(|| unknown(id))?],
        None => entries(),
    };
    if let Some(spec) = perturb {
        let (id, delta) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--perturb takes ID=DELTA, got {spec:?}")))?;
        let delta: Rational64 = parse_exact(delta, true)?;
        let i = list.iter().position(|e| e.id == id).ok_or_else(|| unknown(id))?;
        list[i] = list[i].clone().with_energy_shift(delta);
    }
    Ok(list)
}

fn run_verify(
    only: Option<&str>,
    ms: &[String],
    perturb: Option<&str>,
    format: Format,
    out: &mut Vec<u8>,
) -> Result<(), Failure> {
    let list = selected_entries(only, perturb)?;
    let ms: Vec<f64> = if ms.is_empty() {
        DEFAULT_MS.to_vec()
    } else {
        ms.iter().map(|s| parse_m(s)).collect::<Result<_, _>>()?
    };
    if let Some(&m) = ms.iter().find(|&&m| m == 0.0) {
        return Err(Failure::Usage(format!("verification needs 0 < m < 1, got {m}")));
    }
    let reports = verify(&list, &ms)?;
    match format {
        Format::Csv => out.extend_from_slice(render(&reports, only.is_some()).as_bytes()),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &reports)?;
            out.push(b'\n');
        }
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("verification failed: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct CatalogRow {
    id: String,
    a: String,
    b: String,
    ladder: Option<u32>,
    label: Option<&'static str>,
    period: String,
    degenerate: bool,
    energy: String,
}

fn catalog(format: Format, out: &mut Vec<u8>) -> Result<(), Failure> {
    let rows: Vec<CatalogRow> = entries()
        .into_iter()
        .map(|e| CatalogRow {
            id: e.id.clone(),
            a: e.a.to_string(),
            b: e.b.to_string(),
            ladder: e.ladder,
            label: e.label,
            period: e.period.to_string(),
            degenerate: e.degenerate,
            energy: e.energy.to_string(),
        })
        .collect();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            out.push(b'\n');
        }
    }
    Ok(())
}

/// Parses `argv` and runs it. Help and version requests exit 0; any other
/// parse error is a usage error.
pub fn main_with(argv: impl IntoIterator<Item = String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
