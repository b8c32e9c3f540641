//! Coarsening by compatible weighted matching.
//!
//! Each sweep pairs vertices through an approximate maximum weight matching
//! of the edge-weighted adjacency graph; `k` sweeps compose the pairings into
//! aggregates of at most `2^k` fine nodes.

use std::cmp::Ordering;

use super::prolongator::{galerkin_product, tentative_prolongator};
use super::{Aggregation, AggregationKind, AmgError};
use crate::sparse::CsrMatrix;

/// One undirected edge `u < v` of the weight graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    /// `None` when the weight formula is degenerate (zero denominator or
    /// non-finite result).
    pub weight: Option<f64>,
}

/// Edge weights on the off-diagonal pattern of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightGraph {
    n_vertices: usize,
    edges: Vec<WeightedEdge>,
}

impl WeightGraph {
    /// Graph from explicit edges; endpoints are normalised to `u < v`,
    /// self-loops are discarded.
    pub fn from_edges(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut edges: Vec<WeightedEdge> = edges
            .into_iter()
            .filter(|&(u, v, _)| u != v)
            .map(|(u, v, w)| WeightedEdge {
                u: u.min(v),
                v: u.max(v),
                weight: w.is_finite().then_some(w),
            })
            .collect();
        edges.sort_by_key(|e| (e.u, e.v));
        Self { n_vertices, edges }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    /// c_ij for the stored edge (i, j) in either orientation.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .and_then(|k| self.edges[k].weight)
    }
}

/// `c_ij = 1 − 2 a_ij w_i w_j / (a_ii w_i² + a_jj w_j²)` on every off-diagonal
/// position of the (symmetrised) pattern.
pub fn build_weight_graph(a: &CsrMatrix, w: &[f64]) -> WeightGraph {
    let diag = a.diagonal();
    let mut edges = Vec::with_capacity(a.nnz() / 2);
    for i in 0..a.n_rows() {
        for (j, _) in a.row(i) {
            // each unordered pair once: from the row of its smaller endpoint,
            // or from the only row that stores it
            if j == i || (j < i && a.position(j, i).is_some()) {
                continue;
            }
            let (u, v) = (i.min(j), i.max(j));
            let coupling = 0.5 * (a.get(u, v) + a.get(v, u));
            let denom = diag[u] * w[u] * w[u] + diag[v] * w[v] * w[v];
            let weight = if denom == 0.0 {
                None
            } else {
                let c = 1.0 - 2.0 * coupling * w[u] * w[v] / denom;
                c.is_finite().then_some(c)
            };
            edges.push(WeightedEdge { u, v, weight });
        }
    }
    edges.sort_by_key(|e| (e.u, e.v));
    WeightGraph {
        n_vertices: a.n_rows(),
        edges,
    }
}

/// Sorted greedy matching: scan usable positive-weight edges by decreasing
/// weight (ties broken by the smallest `(u, v)`), keeping each edge whose
/// endpoints are both still free. The result weighs at least half the optimum.
pub fn approx_max_weight_matching(g: &WeightGraph) -> Vec<(usize, usize)> {
    let mut order: Vec<(f64, usize, usize)> = g
        .edges
        .iter()
        .filter_map(|e| e.weight.filter(|&w| w > 0.0).map(|w| (w, e.u, e.v)))
        .collect();
    order.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then((a.1, a.2).cmp(&(b.1, b.2)))
    });
    let mut free = vec![true; g.n_vertices];
    let mut matching = Vec::new();
    for (_, u, v) in order {
        if free[u] && free[v] {
            free[u] = false;
            free[v] = false;
            matching.push((u, v));
        }
    }
    matching.sort_unstable();
    matching
}

/// Aggregates from a single matching: every matched pair and every free
/// vertex becomes one coarse node, numbered by smallest member index.
fn pair_aggregation(n: usize, matching: &[(usize, usize)]) -> (Vec<usize>, usize, usize) {
    let mut partner = vec![usize::MAX; n];
    for &(u, v) in matching {
        partner[u] = v;
        partner[v] = u;
    }
    let mut assignment = vec![usize::MAX; n];
    let mut n_c = 0;
    for i in 0..n {
        if assignment[i] != usize::MAX {
            continue;
        }
        assignment[i] = n_c;
        if partner[i] != usize::MAX {
            assignment[partner[i]] = n_c;
        }
        n_c += 1;
    }
    (assignment, n_c, matching.len())
}

/// `k` matching sweeps composed into one aggregation. Sweeps after the first
/// work on the unsmoothed Galerkin operator and the projected near-kernel
/// vector of the previous sweep. Stops early when a sweep finds no pair.
pub fn matching_aggregate(a: &CsrMatrix, w: &[f64], sweeps: usize) -> Result<Aggregation, AmgError> {
    if sweeps == 0 {
        return Err(AmgError::InvalidConfig("matching sweeps must be at least 1".into()));
    }
    if w.len() != a.n_rows() {
        return Err(AmgError::NearKernelLength {
            expected: a.n_rows(),
            found: w.len(),
        });
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(AmgError::ZeroNearKernel);
    }

    let n = a.n_rows();
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut cur_a = a.clone();
    let mut cur_w = w.to_vec();
    let mut counts = (0, n);

    for sweep in 0..sweeps {
        let graph = build_weight_graph(&cur_a, &cur_w);
        let matching = approx_max_weight_matching(&graph);
        if matching.is_empty() && sweep > 0 {
            break;
        }
        let (local, n_c, n_pairs) = pair_aggregation(cur_a.n_rows(), &matching);
        counts = (n_pairs, n_c - n_pairs);
        let step = Aggregation::new(local.clone(), n_c, Vec::new());
        let p = tentative_prolongator(&step, &cur_w, AggregationKind::Matching)?;
        let next_w = p.transpose().mul_vec(&cur_w);
        for agg in assignment.iter_mut() {
            *agg = local[*agg];
        }
        if sweep + 1 < sweeps {
            cur_a = galerkin_product(&cur_a, p.tentative())?;
        }
        cur_w = next_w;
        if matching.is_empty() {
            break;
        }
    }

    let n_c = cur_w.len();
    let mut agg = Aggregation::new(assignment, n_c, cur_w);
    agg.set_matching_counts(counts.0, counts.1);
    Ok(agg)
}
