//! Conjugate gradient drivers.
//!
//! [`cg_solve`] is textbook preconditioned CG for a fixed SPD preconditioner;
//! [`fcg_solve`] is flexible CG, which explicitly A-orthogonalises each new
//! direction against the last few and therefore tolerates a preconditioner
//! that changes between applications (e.g. an AMG cycle with an inexact
//! iterative coarse solver).
//!
//! Both are generic over [`KrylovVector`], so the same code runs on plain
//! vectors and on sharded vector families. Each iteration performs two
//! collective reductions: a fused one after preconditioning that yields the
//! residual norm together with every inner product the new direction needs,
//! and the curvature `pᵀAp`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::partition::PartitionError;
use crate::smoothers::SmootherError;
use crate::sparse::{CsrMatrix, SparseError, SparseMatrix};

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("breakdown at iteration {iteration}: pᵀAp = {curvature} is not positive")]
    Breakdown { iteration: usize, curvature: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Smoother(#[from] SmootherError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Vector operations a Krylov method needs. Reductions are collective and
/// must be evaluated in a fixed, deterministic order.
pub trait KrylovVector: Clone {
    fn zeros_like(&self) -> Self;
    /// self += α x
    fn axpy(&mut self, alpha: f64, x: &Self);
    /// self = x + β self
    fn xpay(&mut self, x: &Self, beta: f64);
    fn assign(&mut self, x: &Self);
    fn set_zero(&mut self);
    /// Several inner products in one collective reduction.
    fn fused_dots(pairs: &[(&Self, &Self)]) -> Vec<f64>;

    fn dot(&self, other: &Self) -> f64 {
        Self::fused_dots(&[(self, other)])[0]
    }

    fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl KrylovVector for Vec<f64> {
    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn axpy(&mut self, alpha: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x) {
            *y += alpha * x;
        }
    }

    fn xpay(&mut self, x: &Self, beta: f64) {
        for (y, x) in self.iter_mut().zip(x) {
            *y = x + beta * *y;
        }
    }

    fn assign(&mut self, x: &Self) {
        self.copy_from_slice(x);
    }

    fn set_zero(&mut self) {
        self.fill(0.0);
    }

    fn fused_dots(pairs: &[(&Self, &Self)]) -> Vec<f64> {
        pairs.iter().map(|(a, b)| dot(a, b)).collect()
    }
}

/// Sequential inner product in index order.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub trait LinearOperator<V> {
    /// y = A x. `x` is mutable so distributed operators can refresh halos.
    fn apply(&self, x: &mut V, y: &mut V) -> Result<(), SolveError>;
}

impl LinearOperator<Vec<f64>> for SparseMatrix {
    fn apply(&self, x: &mut Vec<f64>, y: &mut Vec<f64>) -> Result<(), SolveError> {
        Ok(self.spmv(1.0, x, 0.0, y)?)
    }
}

impl LinearOperator<Vec<f64>> for CsrMatrix {
    fn apply(&self, x: &mut Vec<f64>, y: &mut Vec<f64>) -> Result<(), SolveError> {
        if x.len() != self.n_cols() || y.len() != self.n_rows() {
            return Err(SolveError::DimensionMismatch {
                expected: self.n_cols(),
                found: x.len(),
            });
        }
        self.spmv_unchecked(1.0, x, 0.0, y);
        Ok(())
    }
}

pub trait Preconditioner<V> {
    /// z = B r.
    fn apply(&self, r: &V, z: &mut V) -> Result<(), SolveError>;
}

/// B = I.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl<V: KrylovVector> Preconditioner<V> for IdentityPreconditioner {
    fn apply(&self, r: &V, z: &mut V) -> Result<(), SolveError> {
        z.assign(r);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KrylovMethod {
    Cg,
    Fcg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: KrylovMethod,
    /// Relative residual target ‖b − Ax‖₂/‖b‖₂.
    pub tol: f64,
    pub max_iterations: usize,
    /// Number of previous directions FCG orthogonalises against.
    pub restart_depth: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: KrylovMethod::Fcg,
            tol: 1e-6,
            max_iterations: 500,
            restart_depth: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tol > 0.0) {
            return Err(SolveError::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.method == KrylovMethod::Fcg && self.restart_depth == 0 {
            return Err(SolveError::InvalidConfig("FCG restart depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// Recurrence residual at exit, relative to ‖b‖₂.
    pub final_relative_residual: f64,
    pub converged: bool,
    pub setup_time_hierarchy: f64,
    pub setup_time_smoothers: f64,
    pub solve_time: f64,
    pub time_per_iteration: f64,
    /// Relative residual after each iteration, starting with the initial one.
    pub residual_history: Vec<f64>,
}

/// ‖b − Ax‖₂/‖b‖₂, or the absolute norm when b = 0.
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Result<f64, SolveError> {
    let mut r = b.to_vec();
    a.spmv(-1.0, x, 1.0, &mut r)?;
    let rn = dot(&r, &r).sqrt();
    let bn = dot(b, b).sqrt();
    Ok(if bn == 0.0 { rn } else { rn / bn })
}

/// Observer called with `(iteration, x, relative residual)` each time a new
/// residual norm is known, starting with iteration 0.
pub type Monitor<'m, V> = &'m mut dyn FnMut(usize, &V, f64);

pub fn cg_solve<V, A>(
    a: &A,
    b: &V,
    precond: &dyn Preconditioner<V>,
    cfg: &SolverConfig,
    x: &mut V,
) -> Result<SolveStats, SolveError>
where
    V: KrylovVector,
    A: LinearOperator<V> + ?Sized,
{
    cg_solve_monitored(a, b, precond, cfg, x, &mut |_, _, _| {})
}

/// Preconditioned CG from the initial guess held in `x`.
pub fn cg_solve_monitored<V, A>(
    a: &A,
    b: &V,
    precond: &dyn Preconditioner<V>,
    cfg: &SolverConfig,
    x: &mut V,
    monitor: Monitor<'_, V>,
) -> Result<SolveStats, SolveError>
where
    V: KrylovVector,
    A: LinearOperator<V> + ?Sized,
{
    cfg.validate()?;
    let start = Instant::now();
    let bnorm = b.norm2();
    if bnorm == 0.0 {
        x.set_zero();
        monitor(0, x, 0.0);
        return Ok(finish(start, 0, 0.0, true, vec![0.0]));
    }

    let mut r = b.zeros_like();
    a.apply(x, &mut r)?;
    r.xpay(b, -1.0);
    let mut z = r.zeros_like();
    precond.apply(&r, &mut z)?;
    let d = V::fused_dots(&[(&r, &r), (&r, &z)]);
    let mut rel = d[0].sqrt() / bnorm;
    let mut rz = d[1];
    let mut history = vec![rel];
    monitor(0, x, rel);

    let mut p = z.clone();
    let mut q = r.zeros_like();
    let mut it = 0;
    while rel > cfg.tol && it < cfg.max_iterations {
        a.apply(&mut p, &mut q)?;
        let pq = p.dot(&q);
        if !(pq > 0.0) {
            return Err(SolveError::Breakdown {
                iteration: it,
                curvature: pq,
            });
        }
        let alpha = rz / pq;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &q);
        it += 1;

        precond.apply(&r, &mut z)?;
        let d = V::fused_dots(&[(&r, &r), (&r, &z)]);
        rel = d[0].sqrt() / bnorm;
        history.push(rel);
        monitor(it, x, rel);
        let beta = d[1] / rz;
        rz = d[1];
        p.xpay(&z, beta);
    }
    Ok(finish(start, it, rel, rel <= cfg.tol, history))
}

pub fn fcg_solve<V, A>(
    a: &A,
    b: &V,
    precond: &dyn Preconditioner<V>,
    cfg: &SolverConfig,
    x: &mut V,
) -> Result<SolveStats, SolveError>
where
    V: KrylovVector,
    A: LinearOperator<V> + ?Sized,
{
    fcg_solve_monitored(a, b, precond, cfg, x, &mut |_, _, _| {})
}

/// Flexible CG with truncated direction memory `cfg.restart_depth`.
pub fn fcg_solve_monitored<V, A>(
    a: &A,
    b: &V,
    precond: &dyn Preconditioner<V>,
    cfg: &SolverConfig,
    x: &mut V,
    monitor: Monitor<'_, V>,
) -> Result<SolveStats, SolveError>
where
    V: KrylovVector,
    A: LinearOperator<V> + ?Sized,
{
    cfg.validate()?;
    let start = Instant::now();
    let bnorm = b.norm2();
    if bnorm == 0.0 {
        x.set_zero();
        monitor(0, x, 0.0);
        return Ok(finish(start, 0, 0.0, true, vec![0.0]));
    }
    let depth = cfg.restart_depth.max(1);

    let mut r = b.zeros_like();
    a.apply(x, &mut r)?;
    r.xpay(b, -1.0);
    let mut z = r.zeros_like();
    // (p_k, q_k = A p_k, p_kᵀ q_k), most recent last
    let mut memory: Vec<(V, V, f64)> = Vec::with_capacity(depth);
    let mut history = Vec::new();
    let mut it = 0;
    let mut rel;

    loop {
        precond.apply(&r, &mut z)?;
        let mut pairs: Vec<(&V, &V)> = vec![(&r, &r), (&z, &r)];
        pairs.extend(memory.iter().map(|(_, q, _)| (&z, q)));
        let d = V::fused_dots(&pairs);
        rel = d[0].sqrt() / bnorm;
        history.push(rel);
        monitor(it, x, rel);
        if rel <= cfg.tol || it >= cfg.max_iterations {
            break;
        }
        let zr = d[1];

        let mut p = z.clone();
        for (k, (pk, _, pqk)) in memory.iter().enumerate() {
            p.axpy(-d[2 + k] / pqk, pk);
        }
        let mut q = if memory.len() == depth {
            memory.remove(0).1
        } else {
            r.zeros_like()
        };
        a.apply(&mut p, &mut q)?;
        let pq = p.dot(&q);
        if !(pq > 0.0) {
            return Err(SolveError::Breakdown {
                iteration: it,
                curvature: pq,
            });
        }
        let alpha = zr / pq;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &q);
        memory.push((p, q, pq));
        it += 1;
    }
    Ok(finish(start, it, rel, rel <= cfg.tol, history))
}

fn finish(start: Instant, iterations: usize, rel: f64, converged: bool, history: Vec<f64>) -> SolveStats {
    let solve_time = start.elapsed().as_secs_f64();
    SolveStats {
        iterations,
        final_relative_residual: rel,
        converged,
        solve_time,
        time_per_iteration: if iterations > 0 {
            solve_time / iterations as f64
        } else {
            0.0
        },
        residual_history: history,
        ..Default::default()
    }
}
