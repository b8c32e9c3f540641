//! Poisson benchmark harness behind the `amgbench` binary.

mod poisson;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use poisson::gen_poisson_7pt;
pub use report::{emit_report, BenchReport, CsvRow, ReportFormat, CSV_COLUMNS};

use crate::amg::{build_hierarchy, AggregationConfig, AggregationKind, AmgError, Hierarchy, DEFAULT_THETA};
use crate::krylov::{fcg_solve, relative_residual, KrylovMethod, SolveError, SolverConfig};
use crate::partition::{
    build_descriptor, DistMatrix, DistVector, GatheredPreconditioner, PartitionError, PartitionScheme,
};
use crate::smoothers::{
    build_smoothers, AmgPreconditioner, CoarseSolver, CycleConfig, CycleKind, SmootherError, SmootherKind,
};
use crate::sparse::{Format, SparseError, SparseMatrix, DEFAULT_HACK_SIZE};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("JSON encoding: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Amg(#[from] AmgError),
    #[error(transparent)]
    Smoother(#[from] SmootherError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Vbm,
    Smatch,
    Vmatch,
    Custom,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Vbm => "vbm",
            Preset::Smatch => "smatch",
            Preset::Vmatch => "vmatch",
            Preset::Custom => "custom",
        })
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vbm" => Ok(Preset::Vbm),
            "smatch" => Ok(Preset::Smatch),
            "vmatch" => Ok(Preset::Vmatch),
            "custom" => Ok(Preset::Custom),
            _ => Err(format!("unknown preset `{s}` (expected vbm, smatch, vmatch or custom)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub preset: Preset,
    pub aggregation: AggregationKind,
    pub theta: f64,
    pub match_sweeps: usize,
    pub smooth_prolongator: bool,
    pub smoother: SmootherKind,
    /// Pre- and post-sweeps; the level-0 count for the variable V-cycle.
    pub smoother_sweeps: usize,
    pub cycle: CycleKind,
    pub coarse: CoarseSolver,
    pub coarse_size_target: usize,
    pub tol: f64,
    pub max_iterations: usize,
    pub shards: usize,
    pub format: Format,
    pub hack_size: usize,
}

impl BenchConfig {
    /// Named configuration on an `nx × ny × nz` grid. `Custom` starts from
    /// the VBM choices.
    pub fn preset(preset: Preset, nx: usize, ny: usize, nz: usize) -> Self {
        let base = Self {
            nx,
            ny,
            nz,
            preset,
            aggregation: AggregationKind::Vmb,
            theta: DEFAULT_THETA,
            match_sweeps: 3,
            smooth_prolongator: true,
            smoother: SmootherKind::L1Jacobi,
            smoother_sweeps: 4,
            cycle: CycleKind::V,
            coarse: CoarseSolver::Pcg(40),
            coarse_size_target: AggregationConfig::default().coarse_size_target,
            tol: 1e-6,
            max_iterations: 500,
            shards: 1,
            format: Format::Csr,
            hack_size: DEFAULT_HACK_SIZE,
        };
        match preset {
            Preset::Vbm | Preset::Custom => base,
            Preset::Smatch => Self {
                aggregation: AggregationKind::Matching,
                ..base
            },
            Preset::Vmatch => Self {
                aggregation: AggregationKind::Matching,
                smooth_prolongator: false,
                cycle: CycleKind::VariableV,
                smoother_sweeps: 2,
                ..base
            },
        }
    }

    pub fn n_unknowns(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.nx < 2 || self.ny < 2 || self.nz < 2 {
            return Err(BenchError::InvalidConfig("grid dimensions must be at least 2".into()));
        }
        if self.shards == 0 {
            return Err(BenchError::InvalidConfig("shard count must be at least 1".into()));
        }
        if self.hack_size == 0 {
            return Err(BenchError::InvalidConfig("hack size must be at least 1".into()));
        }
        self.aggregation_config().validate()?;
        self.cycle_config().validate()?;
        self.solver_config().validate()?;
        Ok(())
    }

    pub fn aggregation_config(&self) -> AggregationConfig {
        AggregationConfig {
            kind: self.aggregation,
            theta: self.theta,
            sweeps: self.match_sweeps,
            smooth_prolongator: self.smooth_prolongator,
            coarse_size_target: self.coarse_size_target,
            ..Default::default()
        }
    }

    pub fn cycle_config(&self) -> CycleConfig {
        CycleConfig {
            cycle: self.cycle,
            pre_sweeps: self.smoother_sweeps,
            post_sweeps: self.smoother_sweeps,
            smoother: self.smoother,
            coarse: self.coarse,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            method: KrylovMethod::Fcg,
            tol: self.tol,
            max_iterations: self.max_iterations,
            restart_depth: 1,
        }
    }
}

/// Result of [`run_benchmark`] with the solution and the hierarchy used.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub report: BenchReport,
    pub solution: Vec<f64>,
    pub hierarchy: Hierarchy,
}

/// Assembles the Poisson system, builds the hierarchy and smoothers, and
/// solves with FCG on `cfg.shards` logical shards from a zero guess.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchRun, BenchError> {
    cfg.validate()?;
    let (coo, rhs) = gen_poisson_7pt(cfg.nx, cfg.ny, cfg.nz);
    let a = coo.assemble()?;
    let n = a.n_rows();
    let nnz = a.nnz();

    let descs: Vec<_> = build_descriptor(n, cfg.shards, &PartitionScheme::Block, &a)?
        .into_iter()
        .map(Arc::new)
        .collect();
    let dist_a = DistMatrix::from_global(&a, &descs, cfg.format, cfg.hack_size)?;
    let global_a = SparseMatrix::with_symmetry(a, true);

    let t = Instant::now();
    let mut h = build_hierarchy(&global_a, &cfg.aggregation_config())?;
    h.convert_format(cfg.format, cfg.hack_size);
    let setup_time_hierarchy = t.elapsed().as_secs_f64();

    let t = Instant::now();
    build_smoothers(&mut h, &cfg.cycle_config())?;
    let setup_time_smoothers = t.elapsed().as_secs_f64();

    let b = DistVector::scatter(&descs, &rhs)?;
    let mut x = DistVector::zeros(&descs)?;
    let mut stats = {
        let precond = GatheredPreconditioner::new(AmgPreconditioner::new(&h)?);
        fcg_solve(&dist_a, &b, &precond, &cfg.solver_config(), &mut x)?
    };
    stats.setup_time_hierarchy = setup_time_hierarchy;
    stats.setup_time_smoothers = setup_time_smoothers;

    let solution = x.gather();
    let true_relative_residual = relative_residual(&global_a, &solution, &rhs)?;
    log::info!(
        "{} on {}x{}x{}: {} iterations, complexity {:.3}",
        cfg.preset,
        cfg.nx,
        cfg.ny,
        cfg.nz,
        stats.iterations,
        h.operator_complexity()
    );

    let report = BenchReport {
        config: cfg.clone(),
        n_unknowns: n,
        nnz,
        levels: h.n_levels(),
        level_sizes: h.level_sizes(),
        level_nnz: h.level_nnz(),
        operator_complexity: h.operator_complexity(),
        hierarchy_truncated: h.truncated(),
        true_relative_residual,
        stats,
        version: report::version_stamp(),
    };
    Ok(BenchRun {
        report,
        solution,
        hierarchy: h,
    })
}
