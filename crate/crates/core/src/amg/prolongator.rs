use super::{Aggregation, AggregationKind, AmgError};
use crate::sparse::{row_scaled_inf_norm, CsrMatrix};

/// Entries of a Galerkin product smaller than this are dropped.
pub const GALERKIN_DROP: f64 = 1e-300;

/// Transfer operator between two consecutive levels (`n_fine × n_coarse`).
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongator {
    tentative: CsrMatrix,
    smoothed: Option<(CsrMatrix, f64)>,
    transpose: CsrMatrix,
}

impl Prolongator {
    fn unsmoothed(tentative: CsrMatrix) -> Self {
        let transpose = tentative.transpose();
        Self {
            tentative,
            smoothed: None,
            transpose,
        }
    }

    /// The operator actually used for transfer: P if smoothed, else P̂.
    pub fn matrix(&self) -> &CsrMatrix {
        self.smoothed.as_ref().map_or(&self.tentative, |(p, _)| p)
    }

    /// Restriction operator, the transpose of [`Prolongator::matrix`].
    pub fn transpose(&self) -> &CsrMatrix {
        &self.transpose
    }

    /// The piecewise tentative operator P̂.
    pub fn tentative(&self) -> &CsrMatrix {
        &self.tentative
    }

    pub fn is_smoothed(&self) -> bool {
        self.smoothed.is_some()
    }

    /// Damping ω = 1/‖D⁻¹A‖∞ used for smoothing, if any.
    pub fn omega(&self) -> Option<f64> {
        self.smoothed.as_ref().map(|(_, w)| *w)
    }

    pub fn n_fine(&self) -> usize {
        self.tentative.n_rows()
    }

    pub fn n_coarse(&self) -> usize {
        self.tentative.n_cols()
    }
}

/// Piecewise prolongator with one nonzero per row.
///
/// * VMB: `P̂[i, agg(i)] = w_i`.
/// * Matching: column `j` is `w` restricted to aggregate `j`, scaled to unit
///   2-norm, so `P̂ᵀP̂ = I` and a singleton gets `w_s/|w_s|`.
pub fn tentative_prolongator(agg: &Aggregation, w: &[f64], kind: AggregationKind) -> Result<Prolongator, AmgError> {
    let n = agg.n_fine();
    if w.len() != n {
        return Err(AmgError::NearKernelLength {
            expected: n,
            found: w.len(),
        });
    }
    let n_c = agg.n_coarse();
    let mut norm_sq = vec![0.0f64; n_c];
    let mut max_abs = vec![0.0f64; n_c];
    for (i, &j) in agg.assignment().iter().enumerate() {
        norm_sq[j] += w[i] * w[i];
        max_abs[j] = max_abs[j].max(w[i].abs());
    }
    if let Some(j) = max_abs.iter().position(|&m| m == 0.0) {
        return Err(AmgError::ZeroAggregate { aggregate: j });
    }
    let sizes = agg.aggregate_sizes();
    let values: Vec<f64> = agg
        .assignment()
        .iter()
        .enumerate()
        .map(|(i, &j)| match kind {
            AggregationKind::Vmb => w[i],
            AggregationKind::Matching => {
                if sizes[j] == 1 {
                    w[i] / w[i].abs()
                } else {
                    w[i] / norm_sq[j].sqrt()
                }
            }
        })
        .collect();
    let p = CsrMatrix::from_sorted_parts(n, n_c, (0..=n).collect(), agg.assignment().to_vec(), values);
    Ok(Prolongator::unsmoothed(p))
}

/// P = (I − ω D⁻¹ A) P̂ with ω = 1/‖D⁻¹A‖∞.
pub fn smooth_prolongator(a: &CsrMatrix, p_hat: &Prolongator) -> Result<Prolongator, AmgError> {
    let tentative = p_hat.tentative().clone();
    if a.n_cols() != tentative.n_rows() {
        return Err(AmgError::ShapeMismatch {
            what: "smooth_prolongator",
            left: (a.n_rows(), a.n_cols()),
            right: (tentative.n_rows(), tentative.n_cols()),
        });
    }
    let omega = 1.0 / row_scaled_inf_norm(a)?;
    let mut ap = a.matmul(&tentative)?;
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    ap.scale_rows(&inv_diag);
    let p = tentative.add_scaled(1.0, &ap, -omega)?;
    let transpose = p.transpose();
    Ok(Prolongator {
        tentative,
        smoothed: Some((p, omega)),
        transpose,
    })
}

/// Pᵀ A P, dropping entries below [`GALERKIN_DROP`]. A symmetric input
/// yields an exactly symmetric result.
pub fn galerkin_product(a: &CsrMatrix, p: &CsrMatrix) -> Result<CsrMatrix, AmgError> {
    galerkin_with_transpose(a, p, &p.transpose())
}

pub(crate) fn galerkin_with_transpose(a: &CsrMatrix, p: &CsrMatrix, pt: &CsrMatrix) -> Result<CsrMatrix, AmgError> {
    if a.n_rows() != a.n_cols() || a.n_cols() != p.n_rows() {
        return Err(AmgError::ShapeMismatch {
            what: "galerkin_product",
            left: (a.n_rows(), a.n_cols()),
            right: (p.n_rows(), p.n_cols()),
        });
    }
    let ap = a.matmul(p)?;
    let mut c = pt.matmul(&ap)?.drop_below(GALERKIN_DROP);
    if a.is_symmetric() {
        let ct = c.transpose();
        c = c.add_scaled(0.5, &ct, 0.5)?.drop_below(GALERKIN_DROP);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amg::test_util::path_laplacian;

    fn agg(assignment: &[usize], n_c: usize) -> Aggregation {
        Aggregation::new(assignment.to_vec(), n_c, vec![1.0; n_c])
    }

    #[test]
    fn vmb_tentative_by_hand() {
        let p = tentative_prolongator(&agg(&[0, 0, 1], 2), &[1.0; 3], AggregationKind::Vmb).unwrap();
        assert_eq!(p.tentative().to_dense(), vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(!p.is_smoothed());
        assert_eq!(p.omega(), None);
    }

    #[test]
    fn matching_tentative_normalises_pairs() {
        let p = tentative_prolongator(&agg(&[0, 0], 1), &[1.0, 1.0], AggregationKind::Matching).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for v in p.tentative().to_dense() {
            assert!((v - s).abs() < 1e-16);
        }
    }

    #[test]
    fn zero_aggregate_is_an_error() {
        let err = tentative_prolongator(&agg(&[0, 1], 2), &[1.0, 0.0], AggregationKind::Vmb);
        assert!(matches!(err, Err(AmgError::ZeroAggregate { aggregate: 1 })));
    }

    #[test]
    fn smoothing_identity_vanishes() {
        let a = CsrMatrix::identity(3);
        let p_hat = tentative_prolongator(&agg(&[0, 0, 1], 2), &[1.0; 3], AggregationKind::Vmb).unwrap();
        let p = smooth_prolongator(&a, &p_hat).unwrap();
        assert_eq!(p.omega(), Some(1.0));
        assert!(p.matrix().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smoothing_two_by_two_by_hand() {
        let a = path_laplacian(2);
        let p_hat = tentative_prolongator(&agg(&[0, 0], 1), &[1.0; 2], AggregationKind::Vmb).unwrap();
        let p = smooth_prolongator(&a, &p_hat).unwrap();
        let omega = p.omega().unwrap();
        assert_eq!(omega, 1.0 / row_scaled_inf_norm(&a).unwrap());
        assert!((omega - 2.0 / 3.0).abs() < 1e-15);
        for v in p.matrix().to_dense() {
            assert!((v - 2.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(p.tentative(), p_hat.tentative());
    }

    #[test]
    fn galerkin_by_hand() {
        let a = path_laplacian(2);
        let p = CsrMatrix::from_dense(2, 1, &[1.0, 1.0]);
        let c = galerkin_product(&a, &p).unwrap();
        assert_eq!(c.to_dense(), vec![2.0]);
        let i = CsrMatrix::identity(2);
        assert_eq!(galerkin_product(&a, &i).unwrap(), a);
    }

    #[test]
    fn galerkin_shape_mismatch() {
        let a = path_laplacian(3);
        let p = CsrMatrix::identity(2);
        assert!(matches!(galerkin_product(&a, &p), Err(AmgError::ShapeMismatch { .. })));
    }
}
