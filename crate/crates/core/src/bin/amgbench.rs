use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};

use amgkit::amg::AggregationKind;
use amgkit::bench::{emit_report, run_benchmark, BenchConfig, Preset, ReportFormat};
use amgkit::smoothers::{CoarseSolver, CycleKind, SmootherKind, DEFAULT_AINV_DROP_TOL};
use amgkit::sparse::Format;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    Vbm,
    Smatch,
    Vmatch,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SmootherArg {
    L1jacobi,
    Ainv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CycleArg {
    V,
    Varv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggregationArg {
    Vmb,
    Matching,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csr,
    Ell,
    Hll,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportArg {
    Json,
    Csv,
}

/// AMG-preconditioned FCG on the 7-point Poisson problem.
///
/// A preset fixes every algorithmic choice; any flag given explicitly
/// overrides the preset value.
#[derive(Debug, Parser)]
#[command(name = "amgbench", version)]
struct Cli {
    #[arg(long, default_value_t = 32)]
    nx: usize,
    #[arg(long, default_value_t = 32)]
    ny: usize,
    #[arg(long, default_value_t = 32)]
    nz: usize,
    #[arg(long, value_enum, default_value = "vbm")]
    preset: PresetArg,
    /// Coarsening strategy (overrides the preset).
    #[arg(long, value_enum)]
    aggregation: Option<AggregationArg>,
    /// Strength threshold for VMB aggregation.
    #[arg(long)]
    theta: Option<f64>,
    /// Matching sweeps per level; aggregates hold at most 2^k nodes.
    #[arg(long)]
    match_sweeps: Option<usize>,
    /// Use the tentative prolongator without smoothing.
    #[arg(long)]
    unsmoothed: bool,
    #[arg(long, value_enum)]
    smoother: Option<SmootherArg>,
    /// AINV drop tolerance.
    #[arg(long, default_value_t = DEFAULT_AINV_DROP_TOL)]
    ainv_drop: f64,
    /// Pre- and post-smoothing sweeps (level 0 for the variable V-cycle).
    #[arg(long)]
    smoother_sweeps: Option<usize>,
    #[arg(long, value_enum)]
    cycle: Option<CycleArg>,
    /// Coarsest-level solver: `pcg:<maxit>` or `sweeps:<n>`.
    #[arg(long, value_parser = parse_coarse)]
    coarse: Option<CoarseSolver>,
    /// Stop coarsening once a level has at most this many unknowns.
    #[arg(long)]
    coarse_size: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    maxit: usize,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[arg(long, value_enum, default_value = "csr")]
    format: FormatArg,
    #[arg(long, default_value_t = amgkit::sparse::DEFAULT_HACK_SIZE)]
    hack_size: usize,
    /// Report destination; stdout when omitted. CSV reports are appended.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportArg,
}

fn parse_coarse(s: &str) -> Result<CoarseSolver, String> {
    let (kind, n) = s
        .split_once(':')
        .ok_or_else(|| format!("expected pcg:<maxit> or sweeps:<n>, got `{s}`"))?;
    let n: usize = n.parse().map_err(|_| format!("invalid count `{n}`"))?;
    match kind {
        "pcg" => Ok(CoarseSolver::Pcg(n)),
        "sweeps" => Ok(CoarseSolver::Sweeps(n)),
        _ => Err(format!("unknown coarse solver `{kind}`")),
    }
}

fn config_from(cli: &Cli) -> anyhow::Result<BenchConfig> {
    let preset = match cli.preset {
        PresetArg::Vbm => Preset::Vbm,
        PresetArg::Smatch => Preset::Smatch,
        PresetArg::Vmatch => Preset::Vmatch,
        PresetArg::Custom => Preset::Custom,
    };
    let mut cfg = BenchConfig::preset(preset, cli.nx, cli.ny, cli.nz);
    if let Some(a) = cli.aggregation {
        cfg.aggregation = match a {
            AggregationArg::Vmb => AggregationKind::Vmb,
            AggregationArg::Matching => AggregationKind::Matching,
        };
    }
    if let Some(t) = cli.theta {
        cfg.theta = t;
    }
    if let Some(k) = cli.match_sweeps {
        cfg.match_sweeps = k;
    }
    if cli.unsmoothed {
        cfg.smooth_prolongator = false;
    }
    if let Some(s) = cli.smoother {
        cfg.smoother = match s {
            SmootherArg::L1jacobi => SmootherKind::L1Jacobi,
            SmootherArg::Ainv => SmootherKind::Ainv {
                drop_tol: cli.ainv_drop,
            },
        };
    }
    if let Some(s) = cli.smoother_sweeps {
        cfg.smoother_sweeps = s;
    }
    if let Some(c) = cli.cycle {
        cfg.cycle = match c {
            CycleArg::V => CycleKind::V,
            CycleArg::Varv => CycleKind::VariableV,
        };
    }
    if let Some(c) = cli.coarse {
        cfg.coarse = c;
    }
    if let Some(c) = cli.coarse_size {
        cfg.coarse_size_target = c;
    }
    cfg.tol = cli.tol;
    cfg.max_iterations = cli.maxit;
    cfg.shards = cli.shards;
    cfg.format = match cli.format {
        FormatArg::Csr => Format::Csr,
        FormatArg::Ell => Format::Ell,
        FormatArg::Hll => Format::Hll,
    };
    cfg.hack_size = cli.hack_size;
    if cfg.nx < 2 || cfg.ny < 2 || cfg.nz < 2 {
        bail!("grid dimensions must be at least 2");
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = config_from(cli)?;
    let run = run_benchmark(&cfg).context("benchmark failed")?;
    let format = match cli.report {
        ReportArg::Json => ReportFormat::Json,
        ReportArg::Csv => ReportFormat::Csv,
    };
    emit_report(&run.report, format, cli.out.as_deref())?;
    let s = &run.report.stats;
    eprintln!(
        "{}: n = {}, levels = {}, complexity = {:.3}, iterations = {}, relres = {:.3e}, {}",
        cfg.preset,
        run.report.n_unknowns,
        run.report.levels,
        run.report.operator_complexity,
        s.iterations,
        s.final_relative_residual,
        if s.converged { "converged" } else { "NOT converged" }
    );
    Ok(s.converged)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
