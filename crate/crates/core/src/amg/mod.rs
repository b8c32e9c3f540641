//! Aggregation-based AMG hierarchy construction.
//!
//! Two coarsening strategies are available: decoupled Vaněk–Mandel–Brezina
//! aggregation driven by a strength-of-connection threshold θ, and coupled
//! aggregation by `k` sweeps of approximate maximum weight matching. Either
//! produces a piecewise tentative prolongator that can optionally be smoothed
//! by one damped Jacobi step before forming the Galerkin coarse operator.
//!
//! The hierarchy is built first; smoothers are attached in a separate step
//! (see [`crate::smoothers::build_smoothers`]) so they can be rebuilt without
//! redoing the coarsening.

mod hierarchy;
mod matching;
mod prolongator;
mod strength;
mod vmb;

use serde::{Deserialize, Serialize};

pub use hierarchy::{build_hierarchy, operator_complexity, Hierarchy, Level};
pub use matching::{approx_max_weight_matching, build_weight_graph, matching_aggregate, WeightGraph, WeightedEdge};
pub use prolongator::{galerkin_product, smooth_prolongator, tentative_prolongator, Prolongator, GALERKIN_DROP};
pub use strength::strength_neighborhood;
pub use vmb::vmb_aggregate;

use crate::sparse::SparseError;

#[derive(Debug, thiserror::Error)]
pub enum AmgError {
    #[error("diagonal entry at row {row} is {value}; a positive diagonal is required")]
    NonPositiveDiagonal { row: usize, value: f64 },
    #[error("invalid aggregation config: {0}")]
    InvalidConfig(String),
    #[error("near-kernel vector has length {found}, expected {expected}")]
    NearKernelLength { expected: usize, found: usize },
    #[error("near-kernel vector is identically zero")]
    ZeroNearKernel,
    #[error("near-kernel vector vanishes on aggregate {aggregate}")]
    ZeroAggregate { aggregate: usize },
    #[error("{what}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch {
        what: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("coarsening stalled on the finest level ({n} unknowns, no reduction)")]
    CoarseningStalled { n: usize },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationKind {
    /// Decoupled Vaněk–Mandel–Brezina aggregation.
    Vmb,
    /// Coupled aggregation by weighted matching.
    Matching,
}

/// Strength threshold used when none is given. Any value below 1/6 keeps
/// every 7-point Laplacian coupling strong.
pub const DEFAULT_THETA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationConfig {
    pub kind: AggregationKind,
    /// Strength threshold θ ∈ (0, 1), VMB only.
    pub theta: f64,
    /// Matching sweeps per level, aggregates hold at most `2^sweeps` nodes.
    pub sweeps: usize,
    pub smooth_prolongator: bool,
    /// Near-kernel sample; all-ones when `None`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub near_kernel: Option<Vec<f64>>,
    pub max_levels: usize,
    pub coarse_size_target: usize,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        Self {
            kind: AggregationKind::Vmb,
            theta: DEFAULT_THETA,
            sweeps: 1,
            smooth_prolongator: true,
            near_kernel: None,
            max_levels: 20,
            coarse_size_target: 200,
        }
    }
}

impl AggregationConfig {
    pub fn vmb(theta: f64) -> Self {
        Self {
            theta,
            ..Default::default()
        }
    }

    pub fn matching(sweeps: usize) -> Self {
        Self {
            kind: AggregationKind::Matching,
            sweeps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), AmgError> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(AmgError::InvalidConfig(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if self.sweeps == 0 {
            return Err(AmgError::InvalidConfig("sweeps must be at least 1".into()));
        }
        if self.coarse_size_target == 0 {
            return Err(AmgError::InvalidConfig("coarse_size_target must be at least 1".into()));
        }
        if self.max_levels == 0 {
            return Err(AmgError::InvalidConfig("max_levels must be at least 1".into()));
        }
        Ok(())
    }
}

/// Map from fine nodes onto coarse aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    assignment: Vec<usize>,
    n_coarse: usize,
    coarse_w: Vec<f64>,
    matching_counts: Option<(usize, usize)>,
}

impl Aggregation {
    pub fn new(assignment: Vec<usize>, n_coarse: usize, coarse_w: Vec<f64>) -> Self {
        debug_assert!(assignment.iter().all(|&a| a < n_coarse));
        Self {
            assignment,
            n_coarse,
            coarse_w,
            matching_counts: None,
        }
    }

    fn set_matching_counts(&mut self, pairs: usize, singletons: usize) {
        self.matching_counts = Some((pairs, singletons));
    }

    pub fn n_fine(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    /// Fine node → aggregate id.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Near-kernel vector carried to the coarse level.
    pub fn coarse_w(&self) -> &[f64] {
        &self.coarse_w
    }

    /// `(n_p, n_s)`: matched pairs and singletons of the last matching sweep.
    pub fn matching_counts(&self) -> Option<(usize, usize)> {
        self.matching_counts
    }

    pub fn aggregate_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_coarse];
        for &a in &self.assignment {
            sizes[a] += 1;
        }
        sizes
    }

    pub fn max_aggregate_size(&self) -> usize {
        self.aggregate_sizes().into_iter().max().unwrap_or(0)
    }
}
