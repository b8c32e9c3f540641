//! Level smoothers and multigrid cycles.
//!
//! Every smoother here is applied through SpMV, vector updates and either a
//! diagonal scaling (ℓ1-Jacobi) or two sparse triangular products (AINV), so
//! no sparse triangular solve is ever needed.

mod ainv;
mod cycle;
mod l1jacobi;

use serde::{Deserialize, Serialize};

pub use ainv::{ainv_build, AinvSmoother};
pub use cycle::{coarse_solve, variable_sweeps, vcycle_apply, AmgPreconditioner};
pub use l1jacobi::{l1_jacobi_build, L1JacobiSmoother};

use crate::amg::Hierarchy;
use crate::sparse::{SparseError, SparseMatrix};

#[derive(Debug, thiserror::Error)]
pub enum SmootherError {
    #[error("hierarchy has no smoothers; call build_smoothers after build_hierarchy")]
    MissingSmoothers,
    #[error("AINV breakdown at column {column}: pivot {pivot} is not positive")]
    AinvBreakdown { column: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid cycle config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

pub const DEFAULT_AINV_DROP_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SmootherKind {
    L1Jacobi,
    Ainv { drop_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    V,
    /// Sweeps double on every coarser level.
    VariableV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "count")]
pub enum CoarseSolver {
    /// Fixed number of ℓ1-Jacobi sweeps from a zero guess.
    Sweeps(usize),
    /// ℓ1-Jacobi preconditioned CG with an iteration cap.
    Pcg(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub cycle: CycleKind,
    /// For [`CycleKind::VariableV`] these are the level-0 counts.
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub smoother: SmootherKind,
    pub coarse: CoarseSolver,
}

impl Default for CycleConfig {
    fn default() -> Self {
        Self {
            cycle: CycleKind::V,
            pre_sweeps: 4,
            post_sweeps: 4,
            smoother: SmootherKind::L1Jacobi,
            coarse: CoarseSolver::Pcg(40),
        }
    }
}

impl CycleConfig {
    pub fn validate(&self) -> Result<(), SmootherError> {
        if self.pre_sweeps == 0 || self.post_sweeps == 0 {
            return Err(SmootherError::InvalidConfig("sweep counts must be at least 1".into()));
        }
        match self.coarse {
            CoarseSolver::Sweeps(0) | CoarseSolver::Pcg(0) => {
                return Err(SmootherError::InvalidConfig(
                    "coarse solver needs at least one iteration".into(),
                ))
            }
            _ => {}
        }
        if let SmootherKind::Ainv { drop_tol } = self.smoother {
            if !(drop_tol >= 0.0) {
                return Err(SmootherError::InvalidConfig(format!(
                    "AINV drop tolerance must be non-negative, got {drop_tol}"
                )));
            }
        }
        Ok(())
    }

    /// Pre- and post-smoothing sweeps on level `l`.
    pub fn sweeps_at(&self, l: usize) -> (usize, usize) {
        match self.cycle {
            CycleKind::V => (self.pre_sweeps, self.post_sweeps),
            CycleKind::VariableV => (
                variable_sweeps(l, self.pre_sweeps),
                variable_sweeps(l, self.post_sweeps),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Smoother {
    L1Jacobi(L1JacobiSmoother),
    Ainv(AinvSmoother),
}

impl Smoother {
    /// z = M⁻¹ r.
    pub fn apply_inverse(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Smoother::L1Jacobi(s) => s.apply_inverse(r, z),
            Smoother::Ainv(s) => s.apply_inverse(r, z),
        }
    }
}

/// Smoothers for levels `0..ℓ` and the ℓ1-Jacobi data used by the coarse
/// solver on level `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherSet {
    pub(crate) levels: Vec<Smoother>,
    pub(crate) coarse: L1JacobiSmoother,
    pub(crate) config: CycleConfig,
}

impl SmootherSet {
    pub fn level(&self, l: usize) -> &Smoother {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[Smoother] {
        &self.levels
    }

    pub fn coarse(&self) -> &L1JacobiSmoother {
        &self.coarse
    }

    pub fn config(&self) -> &CycleConfig {
        &self.config
    }
}

/// Attaches smoothers to every level, replacing any existing ones. The level
/// matrices and prolongators are not touched.
pub fn build_smoothers(h: &mut Hierarchy, cfg: &CycleConfig) -> Result<(), SmootherError> {
    cfg.validate()?;
    let n_levels = h.n_levels();
    let mut levels = Vec::with_capacity(n_levels - 1);
    for l in 0..n_levels - 1 {
        let a = h.level(l).matrix().to_csr();
        levels.push(match cfg.smoother {
            SmootherKind::L1Jacobi => Smoother::L1Jacobi(l1_jacobi_build(&a)),
            SmootherKind::Ainv { drop_tol } => Smoother::Ainv(ainv_build(&a, drop_tol)?),
        });
    }
    let coarse = l1_jacobi_build(&h.level(n_levels - 1).matrix().to_csr());
    h.smoothers = Some(SmootherSet {
        levels,
        coarse,
        config: *cfg,
    });
    Ok(())
}

/// `sweeps` steps of x ← x + M⁻¹(b − Ax).
pub fn smoother_apply(
    m: &Smoother,
    a: &SparseMatrix,
    x: &mut [f64],
    b: &[f64],
    sweeps: usize,
) -> Result<(), SmootherError> {
    let n = a.n_rows();
    if x.len() != n || b.len() != n {
        return Err(SmootherError::DimensionMismatch {
            expected: n,
            found: if x.len() != n { x.len() } else { b.len() },
        });
    }
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    for _ in 0..sweeps {
        r.copy_from_slice(b);
        a.spmv(-1.0, x, 1.0, &mut r)?;
        m.apply_inverse(&r, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
    }
    Ok(())
}
