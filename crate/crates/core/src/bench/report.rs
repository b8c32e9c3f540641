use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BenchConfig, BenchError};
use crate::krylov::SolveStats;
use crate::smoothers::{CoarseSolver, CycleKind, SmootherKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format `{s}` (expected json or csv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub n_unknowns: usize,
    pub nnz: usize,
    pub levels: usize,
    pub level_sizes: Vec<usize>,
    pub level_nnz: Vec<usize>,
    pub operator_complexity: f64,
    pub hierarchy_truncated: bool,
    /// ‖b − Ax‖₂/‖b‖₂ recomputed from the returned solution.
    pub true_relative_residual: f64,
    pub stats: SolveStats,
    pub version: String,
}

pub(super) fn version_stamp() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// Column order of the CSV report.
pub const CSV_COLUMNS: [&str; 32] = [
    "version",
    "nx",
    "ny",
    "nz",
    "preset",
    "aggregation",
    "theta",
    "match_sweeps",
    "smooth_prolongator",
    "smoother",
    "smoother_sweeps",
    "cycle",
    "coarse",
    "coarse_size_target",
    "tol",
    "max_iterations",
    "shards",
    "format",
    "hack_size",
    "n_unknowns",
    "nnz",
    "levels",
    "level_sizes",
    "level_nnz",
    "operator_complexity",
    "iterations",
    "final_relative_residual",
    "true_relative_residual",
    "converged",
    "setup_time_hierarchy",
    "setup_time_smoothers",
    "solve_time",
];

/// Flat CSV record; per-level lists are `;`-separated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub version: String,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub preset: String,
    pub aggregation: String,
    pub theta: f64,
    pub match_sweeps: usize,
    pub smooth_prolongator: bool,
    pub smoother: String,
    pub smoother_sweeps: usize,
    pub cycle: String,
    pub coarse: String,
    pub coarse_size_target: usize,
    pub tol: f64,
    pub max_iterations: usize,
    pub shards: usize,
    pub format: String,
    pub hack_size: usize,
    pub n_unknowns: usize,
    pub nnz: usize,
    pub levels: usize,
    pub level_sizes: String,
    pub level_nnz: String,
    pub operator_complexity: f64,
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub true_relative_residual: f64,
    pub converged: bool,
    pub setup_time_hierarchy: f64,
    pub setup_time_smoothers: f64,
    pub solve_time: f64,
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

impl From<&BenchReport> for CsvRow {
    fn from(r: &BenchReport) -> Self {
        let c = &r.config;
        Self {
            version: r.version.clone(),
            nx: c.nx,
            ny: c.ny,
            nz: c.nz,
            preset: c.preset.to_string(),
            aggregation: format!("{:?}", c.aggregation).to_lowercase(),
            theta: c.theta,
            match_sweeps: c.match_sweeps,
            smooth_prolongator: c.smooth_prolongator,
            smoother: match c.smoother {
                SmootherKind::L1Jacobi => "l1jacobi".into(),
                SmootherKind::Ainv { drop_tol } => format!("ainv:{drop_tol}"),
            },
            smoother_sweeps: c.smoother_sweeps,
            cycle: match c.cycle {
                CycleKind::V => "v".into(),
                CycleKind::VariableV => "varv".into(),
            },
            coarse: match c.coarse {
                CoarseSolver::Pcg(n) => format!("pcg:{n}"),
                CoarseSolver::Sweeps(n) => format!("sweeps:{n}"),
            },
            coarse_size_target: c.coarse_size_target,
            tol: c.tol,
            max_iterations: c.max_iterations,
            shards: c.shards,
            format: c.format.to_string(),
            hack_size: c.hack_size,
            n_unknowns: r.n_unknowns,
            nnz: r.nnz,
            levels: r.levels,
            level_sizes: join(&r.level_sizes),
            level_nnz: join(&r.level_nnz),
            operator_complexity: r.operator_complexity,
            iterations: r.stats.iterations,
            final_relative_residual: r.stats.final_relative_residual,
            true_relative_residual: r.true_relative_residual,
            converged: r.stats.converged,
            setup_time_hierarchy: r.stats.setup_time_hierarchy,
            setup_time_smoothers: r.stats.setup_time_smoothers,
            solve_time: r.stats.solve_time,
        }
    }
}

/// Writes the report to `path`, or stdout when `None`. JSON overwrites the
/// file; CSV appends one row and writes the header only to an empty file.
pub fn emit_report(report: &BenchReport, format: ReportFormat, path: Option<&Path>) -> Result<(), BenchError> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| BenchError::Io { path: p, source }
    };
    match (format, path) {
        (ReportFormat::Json, Some(p)) => {
            let text = serde_json::to_string_pretty(report)?;
            std::fs::write(p, text + "\n").map_err(io_err(p))
        }
        (ReportFormat::Json, None) => {
            let text = serde_json::to_string_pretty(report)?;
            writeln!(std::io::stdout(), "{text}").map_err(io_err(Path::new("<stdout>")))
        }
        (ReportFormat::Csv, Some(p)) => {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(io_err(p))?;
            let empty = file.metadata().map_err(io_err(p))?.len() == 0;
            write_csv(report, file, empty).map_err(|source| BenchError::Csv {
                path: p.to_path_buf(),
                source,
            })
        }
        (ReportFormat::Csv, None) => write_csv(report, std::io::stdout(), true).map_err(|source| BenchError::Csv {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn write_csv<W: Write>(report: &BenchReport, out: W, header: bool) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    w.serialize(CsvRow::from(report))?;
    w.flush()?;
    Ok(())
}
