use log::{debug, warn};

use super::matching::matching_aggregate;
use super::prolongator::{galerkin_with_transpose, smooth_prolongator, tentative_prolongator};
use super::vmb::vmb_aggregate;
use super::{Aggregation, AggregationConfig, AggregationKind, AmgError, Prolongator};
use crate::smoothers::SmootherSet;
use crate::sparse::{Format, SparseError, SparseMatrix};

/// One level of the hierarchy. `prolongator` and `aggregation` describe the
/// transfer to the next coarser level and are absent on the coarsest one.
#[derive(Debug, Clone)]
pub struct Level {
    pub(crate) a: SparseMatrix,
    pub(crate) w: Vec<f64>,
    pub(crate) prolongator: Option<Prolongator>,
    pub(crate) aggregation: Option<Aggregation>,
}

impl Level {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn near_kernel(&self) -> &[f64] {
        &self.w
    }

    pub fn prolongator(&self) -> Option<&Prolongator> {
        self.prolongator.as_ref()
    }

    pub fn aggregation(&self) -> Option<&Aggregation> {
        self.aggregation.as_ref()
    }

    pub fn size(&self) -> usize {
        self.a.n_rows()
    }

    pub fn nnz(&self) -> usize {
        self.a.nnz()
    }
}

/// Coarse operators `A_0 … A_ℓ` with their transfer operators.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<Level>,
    config: AggregationConfig,
    truncated: bool,
    pub(crate) smoothers: Option<SmootherSet>,
}

impl Hierarchy {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn config(&self) -> &AggregationConfig {
        &self.config
    }

    /// True when coarsening stalled above the finest level and the hierarchy
    /// was cut short of its size target.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::size).collect()
    }

    pub fn level_nnz(&self) -> Vec<usize> {
        self.levels.iter().map(Level::nnz).collect()
    }

    pub fn operator_complexity(&self) -> f64 {
        operator_complexity(self)
    }

    pub fn smoothers(&self) -> Option<&SmootherSet> {
        self.smoothers.as_ref()
    }

    pub fn has_smoothers(&self) -> bool {
        self.smoothers.is_some()
    }

    /// Changes the storage layout of every level matrix.
    pub fn convert_format(&mut self, format: Format, hack_size: usize) {
        for level in &mut self.levels {
            level.a = level.a.convert(format, hack_size);
        }
    }

    /// Replaces coefficients of `A_0` in place (pattern preserved). Coarse
    /// levels and prolongators are left alone; rebuild the smoothers
    /// afterwards.
    pub fn update_fine_coefficients(&mut self, triples: &[(usize, usize, f64)]) -> Result<(), SparseError> {
        self.levels[0].a.update_coefficients(triples)
    }
}

/// Σ_l nnz(A_l) / nnz(A_0).
pub fn operator_complexity(h: &Hierarchy) -> f64 {
    let nnz0 = h.levels[0].nnz();
    if nnz0 == 0 {
        return 1.0;
    }
    h.levels.iter().map(|l| l.nnz() as f64).sum::<f64>() / nnz0 as f64
}

/// Builds the coarse operators and transfer operators for a symmetric matrix
/// with positive diagonal. Coarsening stops at `coarse_size_target`, at
/// `max_levels`, or when a level fails to shrink.
pub fn build_hierarchy(a: &SparseMatrix, config: &AggregationConfig) -> Result<Hierarchy, AmgError> {
    config.validate()?;
    let fine = a.to_csr().into_owned();
    if fine.n_rows() != fine.n_cols() {
        return Err(AmgError::NotSquare(fine.n_rows(), fine.n_cols()));
    }
    if !(a.is_symmetric() || fine.is_symmetric_within(1e-12)) {
        return Err(AmgError::NotSymmetric);
    }
    if let Some((row, &value)) = fine.diagonal().iter().enumerate().find(|(_, &d)| !(d > 0.0)) {
        return Err(AmgError::NonPositiveDiagonal { row, value });
    }
    let n = fine.n_rows();
    let w = match &config.near_kernel {
        Some(w) if w.len() != n => {
            return Err(AmgError::NearKernelLength {
                expected: n,
                found: w.len(),
            })
        }
        Some(w) => w.clone(),
        None => vec![1.0; n],
    };
    if w.iter().all(|&v| v == 0.0) {
        return Err(AmgError::ZeroNearKernel);
    }

    let mut levels = vec![Level {
        a: SparseMatrix::with_symmetry(fine, true),
        w,
        prolongator: None,
        aggregation: None,
    }];
    let mut truncated = false;

    while levels.len() < config.max_levels {
        let l = levels.len() - 1;
        let n_cur = levels[l].size();
        if n_cur <= config.coarse_size_target {
            break;
        }
        let a_cur = levels[l].a.to_csr().into_owned();
        let w_cur = &levels[l].w;
        let agg = match config.kind {
            AggregationKind::Vmb => vmb_aggregate(&a_cur, config.theta)?,
            AggregationKind::Matching => matching_aggregate(&a_cur, w_cur, config.sweeps)?,
        };
        if agg.n_coarse() >= n_cur || agg.n_coarse() == 0 {
            if l == 0 {
                return Err(AmgError::CoarseningStalled { n: n_cur });
            }
            warn!("coarsening stalled at level {l} ({n_cur} unknowns); hierarchy truncated");
            truncated = true;
            break;
        }
        let p_hat = tentative_prolongator(&agg, w_cur, config.kind)?;
        let p = if config.smooth_prolongator {
            smooth_prolongator(&a_cur, &p_hat)?
        } else {
            p_hat
        };
        let a_next = galerkin_with_transpose(&a_cur, p.matrix(), p.transpose())?;
        debug!(
            "level {l}: {n_cur} -> {} unknowns, coarse nnz {}",
            a_next.n_rows(),
            a_next.nnz()
        );
        let w_next = agg.coarse_w().to_vec();
        levels[l].prolongator = Some(p);
        levels[l].aggregation = Some(agg);
        levels.push(Level {
            a: SparseMatrix::with_symmetry(a_next, true),
            w: w_next,
            prolongator: None,
            aggregation: None,
        });
    }

    Ok(Hierarchy {
        levels,
        config: config.clone(),
        truncated,
        smoothers: None,
    })
}
