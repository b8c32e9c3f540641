use super::{l1_jacobi_build, smoother_apply, CoarseSolver, CycleConfig, L1JacobiSmoother, SmootherError, SmootherSet};
use crate::amg::Hierarchy;
use crate::krylov::{cg_solve, KrylovMethod, Preconditioner, SolveError, SolverConfig};
use crate::sparse::SparseMatrix;

/// Relative residual target of the coarse PCG.
pub const COARSE_PCG_TOL: f64 = 1e-10;

/// base · 2^level.
pub fn variable_sweeps(level: usize, base: usize) -> usize {
    base << level
}

/// Approximate solve on the coarsest level from a zero initial guess.
pub fn coarse_solve(a: &SparseMatrix, b: &[f64], solver: CoarseSolver) -> Result<Vec<f64>, SmootherError> {
    let m = l1_jacobi_build(&a.to_csr());
    coarse_solve_with(a, &m, b, solver)
}

fn coarse_solve_with(
    a: &SparseMatrix,
    m: &L1JacobiSmoother,
    b: &[f64],
    solver: CoarseSolver,
) -> Result<Vec<f64>, SmootherError> {
    let n = a.n_rows();
    if b.len() != n {
        return Err(SmootherError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut x = vec![0.0; n];
    match solver {
        CoarseSolver::Sweeps(s) => {
            let m = super::Smoother::L1Jacobi(m.clone());
            smoother_apply(&m, a, &mut x, b, s)?;
        }
        CoarseSolver::Pcg(max_iterations) => {
            let cfg = SolverConfig {
                method: KrylovMethod::Cg,
                tol: COARSE_PCG_TOL,
                max_iterations: max_iterations.min(n).max(1),
                restart_depth: 1,
            };
            match cg_solve(a, &b.to_vec(), m, &cfg, &mut x) {
                Ok(_) | Err(SolveError::Breakdown { .. }) => {}
                Err(SolveError::Sparse(e)) => return Err(e.into()),
                Err(SolveError::Smoother(e)) => return Err(e),
                Err(e) => return Err(SmootherError::InvalidConfig(e.to_string())),
            }
        }
    }
    Ok(x)
}

impl Preconditioner<Vec<f64>> for L1JacobiSmoother {
    fn apply(&self, r: &Vec<f64>, z: &mut Vec<f64>) -> Result<(), SolveError> {
        self.apply_inverse(r, z);
        Ok(())
    }
}

/// One multigrid cycle applied to `r` from a zero initial guess. The
/// smoother payloads come from the hierarchy; `cfg` chooses the cycle shape,
/// sweep counts and coarse solver.
pub fn vcycle_apply(h: &Hierarchy, cfg: &CycleConfig, r: &[f64]) -> Result<Vec<f64>, SmootherError> {
    let set = h.smoothers().ok_or(SmootherError::MissingSmoothers)?;
    let n0 = h.level(0).size();
    if r.len() != n0 {
        return Err(SmootherError::DimensionMismatch {
            expected: n0,
            found: r.len(),
        });
    }
    cycle_level(h, set, cfg, 0, r)
}

fn cycle_level(
    h: &Hierarchy,
    set: &SmootherSet,
    cfg: &CycleConfig,
    l: usize,
    b: &[f64],
) -> Result<Vec<f64>, SmootherError> {
    let a = h.level(l).matrix();
    if l + 1 == h.n_levels() {
        return coarse_solve_with(a, &set.coarse, b, cfg.coarse);
    }
    let (pre, post) = cfg.sweeps_at(l);
    let m = set.level(l);
    let p = h.level(l).prolongator().expect("non-coarsest level has a prolongator");

    let mut x = vec![0.0; b.len()];
    smoother_apply(m, a, &mut x, b, pre)?;

    let mut r = b.to_vec();
    a.spmv(-1.0, &x, 1.0, &mut r)?;
    let mut rc = vec![0.0; p.n_coarse()];
    p.transpose().spmv_unchecked(1.0, &r, 0.0, &mut rc);

    let xc = cycle_level(h, set, cfg, l + 1, &rc)?;
    p.matrix().spmv_unchecked(1.0, &xc, 1.0, &mut x);

    smoother_apply(m, a, &mut x, b, post)?;
    Ok(x)
}

/// The AMG cycle as a Krylov preconditioner, using the cycle configuration
/// the smoothers were built with.
#[derive(Debug, Clone, Copy)]
pub struct AmgPreconditioner<'h> {
    h: &'h Hierarchy,
    cfg: CycleConfig,
}

impl<'h> AmgPreconditioner<'h> {
    pub fn new(h: &'h Hierarchy) -> Result<Self, SmootherError> {
        let cfg = *h.smoothers().ok_or(SmootherError::MissingSmoothers)?.config();
        Ok(Self { h, cfg })
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        self.h
    }

    pub fn apply_slice(&self, r: &[f64], z: &mut [f64]) -> Result<(), SmootherError> {
        let out = vcycle_apply(self.h, &self.cfg, r)?;
        z.copy_from_slice(&out);
        Ok(())
    }
}

impl Preconditioner<Vec<f64>> for AmgPreconditioner<'_> {
    fn apply(&self, r: &Vec<f64>, z: &mut Vec<f64>) -> Result<(), SolveError> {
        Ok(self.apply_slice(r, z)?)
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::amg::test_util::path_laplacian;
    use crate::amg::{build_hierarchy, AggregationConfig};
    use crate::krylov::dot;
    use crate::smoothers::{build_smoothers, CycleKind, SmootherKind};
    use crate::sparse::CsrMatrix;

    fn two_level(n: usize, cycle: &CycleConfig) -> (SparseMatrix, Hierarchy) {
        let a = SparseMatrix::new(path_laplacian(n));
        let mut cfg = AggregationConfig::matching(1);
        cfg.coarse_size_target = 1;
        cfg.max_levels = 2;
        let mut h = build_hierarchy(&a, &cfg).unwrap();
        assert_eq!(h.n_levels(), 2);
        build_smoothers(&mut h, cycle).unwrap();
        (a, h)
    }

    fn a_norm(a: &SparseMatrix, e: &[f64]) -> f64 {
        dot(e, &a.apply(e).unwrap()).sqrt()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn variable_sweeps_formula() {
        assert_eq!(variable_sweeps(0, 2), 2);
        assert_eq!(variable_sweeps(3, 2), 16);
        assert_eq!(variable_sweeps(0, 1), 1);
    }

    #[test]
    fn coarse_one_by_one() {
        let a = SparseMatrix::new(CsrMatrix::from_diagonal(&[2.0]));
        assert_eq!(coarse_solve(&a, &[4.0], CoarseSolver::Pcg(40)).unwrap(), vec![2.0]);
    }

    #[test]
    fn coarse_pcg_on_diagonal_is_exact() {
        let d: Vec<f64> = (1..=5).map(f64::from).collect();
        let a = SparseMatrix::new(CsrMatrix::from_diagonal(&d));
        let x = coarse_solve(&a, &[1.0; 5], CoarseSolver::Pcg(40)).unwrap();
        for (xi, di) in x.iter().zip(&d) {
            assert!((xi - 1.0 / di).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_sweeps_zero_rhs() {
        let a = SparseMatrix::new(path_laplacian(4));
        assert_eq!(
            coarse_solve(&a, &[0.0; 4], CoarseSolver::Sweeps(30)).unwrap(),
            vec![0.0; 4]
        );
    }

    #[test]
    fn zero_residual_gives_zero_correction() {
        let (_, h) = two_level(8, &CycleConfig::default());
        assert_eq!(
            vcycle_apply(&h, &CycleConfig::default(), &[0.0; 8]).unwrap(),
            vec![0.0; 8]
        );
    }

    #[test]
    fn missing_smoothers() {
        let a = SparseMatrix::new(path_laplacian(8));
        let h = build_hierarchy(&a, &AggregationConfig::matching(1)).unwrap();
        assert!(matches!(
            vcycle_apply(&h, &CycleConfig::default(), &[1.0; 8]),
            Err(SmootherError::MissingSmoothers)
        ));
        assert!(AmgPreconditioner::new(&h).is_err());
    }

    #[test]
    fn single_level_is_coarse_solve() {
        let a = SparseMatrix::new(path_laplacian(6));
        let mut h = build_hierarchy(&a, &AggregationConfig::default()).unwrap();
        assert_eq!(h.n_levels(), 1);
        let cfg = CycleConfig {
            coarse: CoarseSolver::Sweeps(3),
            ..Default::default()
        };
        build_smoothers(&mut h, &cfg).unwrap();
        let r = [1.0, 0.0, -2.0, 0.5, 0.0, 1.0];
        assert_eq!(
            vcycle_apply(&h, &cfg, &r).unwrap(),
            coarse_solve(&a, &r, cfg.coarse).unwrap()
        );
    }

    #[test]
    fn two_level_error_propagation_contracts() {
        let cfg = CycleConfig {
            pre_sweeps: 1,
            post_sweeps: 1,
            ..Default::default()
        };
        let (a, h) = two_level(8, &cfg);
        // power iteration on E = I − BA in the A-norm
        let mut e: Vec<f64> = (0..8).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
        let mut rho = 0.0;
        for _ in 0..50 {
            let nrm = a_norm(&a, &e);
            e.iter_mut().for_each(|v| *v /= nrm);
            let c = vcycle_apply(&h, &cfg, &a.apply(&e).unwrap()).unwrap();
            for (ei, ci) in e.iter_mut().zip(&c) {
                *ei -= ci;
            }
            rho = a_norm(&a, &e);
        }
        assert!(rho < 1.0, "‖I − BA‖_A estimate {rho}");
    }

    #[test]
    fn cycle_is_linear_and_symmetric() {
        for smoother in [SmootherKind::L1Jacobi, SmootherKind::Ainv { drop_tol: 0.05 }] {
            for cycle in [CycleKind::V, CycleKind::VariableV] {
                let cfg = CycleConfig {
                    cycle,
                    pre_sweeps: 2,
                    post_sweeps: 2,
                    smoother,
                    coarse: CoarseSolver::Sweeps(5),
                };
                let a = SparseMatrix::new(path_laplacian(50));
                let mut acfg = AggregationConfig::matching(2);
                acfg.coarse_size_target = 4;
                let mut h = build_hierarchy(&a, &acfg).unwrap();
                assert!(h.n_levels() >= 3);
                build_smoothers(&mut h, &cfg).unwrap();

                let mut rng = ChaCha8Rng::seed_from_u64(7);
                let u = random_vec(&mut rng, 50);
                let v = random_vec(&mut rng, 50);
                let bu = vcycle_apply(&h, &cfg, &u).unwrap();
                let bv = vcycle_apply(&h, &cfg, &v).unwrap();
                let lhs = dot(&bu, &v);
                let rhs = dot(&u, &bv);
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));

                let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
                let bw = vcycle_apply(&h, &cfg, &w).unwrap();
                for i in 0..50 {
                    assert!((bw[i] - (2.0 * bu[i] - 3.0 * bv[i])).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn exact_coarse_two_level_reduces_error() {
        let cfg = CycleConfig {
            pre_sweeps: 1,
            post_sweeps: 1,
            coarse: CoarseSolver::Pcg(1000),
            ..Default::default()
        };
        let (a, h) = two_level(30, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let e = random_vec(&mut rng, 30);
            let c = vcycle_apply(&h, &cfg, &a.apply(&e).unwrap()).unwrap();
            let after: Vec<f64> = e.iter().zip(&c).map(|(x, y)| x - y).collect();
            assert!(a_norm(&a, &after) < a_norm(&a, &e));
        }
    }
}
