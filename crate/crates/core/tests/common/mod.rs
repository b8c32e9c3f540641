//! Test oracles and random problem generators shared by the integration
//! tests and the acceptance harness.

#![allow(dead_code)]

use amgkit::amg::WeightGraph;
use amgkit::sparse::{CooBuilder, CsrMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(a: &CsrMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.n_rows(), a.n_cols(), &a.to_dense())
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random rectangular sparse matrix; some rows are left empty and a few are
/// much longer than the rest so ELL/HLL padding is exercised.
pub fn random_sparse(rng: &mut ChaCha8Rng, n_rows: usize, n_cols: usize) -> CsrMatrix {
    let mut b = CooBuilder::new(n_rows, n_cols);
    for i in 0..n_rows {
        let len = match rng.gen_range(0..10) {
            0 => 0,
            1 => rng.gen_range(0..=n_cols.min(40)),
            _ => rng.gen_range(0..=n_cols.min(6)),
        };
        for _ in 0..len {
            b.push(i, rng.gen_range(0..n_cols), rng.gen_range(-10.0..10.0));
        }
    }
    b.assemble().unwrap()
}

/// Sparse symmetric, strictly diagonally dominant with positive diagonal.
/// Off-diagonal couplings are mostly negative, like a discretised diffusion
/// operator, with a few positive ones mixed in.
pub fn random_sparse_spd(rng: &mut ChaCha8Rng, n: usize) -> CsrMatrix {
    let mut b = CooBuilder::new(n, n);
    let mut rowsum = vec![0.0; n];
    for i in 0..n {
        // a chain keeps the graph connected
        if i + 1 < n {
            let v = -rng.gen_range(0.2..1.0);
            b.push(i, i + 1, v);
            b.push(i + 1, i, v);
            rowsum[i] += v.abs();
            rowsum[i + 1] += v.abs();
        }
        for _ in 0..rng.gen_range(0..4) {
            let j = rng.gen_range(0..n);
            if j.abs_diff(i) <= 1 {
                continue;
            }
            let v = if rng.gen_bool(0.85) {
                -rng.gen_range(0.05..1.0)
            } else {
                rng.gen_range(0.05..0.3)
            };
            b.push(i, j, v);
            b.push(j, i, v);
            rowsum[i] += v.abs();
            rowsum[j] += v.abs();
        }
    }
    for (i, s) in rowsum.iter().enumerate() {
        b.push(i, i, s + rng.gen_range(0.01..1.0));
    }
    b.assemble().unwrap()
}

/// Dense SPD matrix GᵀG + δI, generally not diagonally dominant.
pub fn random_dense_spd(rng: &mut ChaCha8Rng, n: usize) -> CsrMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let a = g.transpose() * &g + DMatrix::identity(n, n) * rng.gen_range(0.05..1.0);
    let a = (&a + a.transpose()) * 0.5;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(a[(i, j)]);
        }
    }
    CsrMatrix::from_dense(n, n, &data)
}

/// Random weighted graph with weights in (−0.5, 2).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightGraph {
    let p = rng.gen_range(0.2..0.9);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(-0.5..2.0)));
            }
        }
    }
    WeightGraph::from_edges(n, edges)
}

/// Maximum total weight over all matchings, by exhaustive search.
pub fn brute_force_matching_weight(g: &WeightGraph) -> f64 {
    let n = g.n_vertices();
    assert!(n <= 20);
    let mut w = vec![vec![None; n]; n];
    for e in g.edges() {
        if let Some(x) = e.weight {
            w[e.u][e.v] = Some(x);
            w[e.v][e.u] = Some(x);
        }
    }
    let mut best = vec![0.0f64; 1 << n];
    for mask in 1usize..(1 << n) {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = best[rest];
        for j in 0..n {
            if rest & (1 << j) != 0 {
                if let Some(x) = w[i][j] {
                    b = b.max(x + best[rest & !(1 << j)]);
                }
            }
        }
        best[mask] = b;
    }
    best[(1 << n) - 1]
}

/// Largest eigenvalue magnitude of `e ↦ apply(e)` by power iteration.
pub fn power_iteration(n: usize, iters: usize, mut apply: impl FnMut(&[f64]) -> Vec<f64>) -> f64 {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i * 7919) % 13) as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        let w = apply(&v);
        lambda = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w;
    }
    lambda
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
