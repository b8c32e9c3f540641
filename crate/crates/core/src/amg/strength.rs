use super::AmgError;
use crate::sparse::CsrMatrix;

/// Strongly coupled neighbours of each row:
/// `j ∈ S_i  ⇔  j ≠ i  and  |a_ij| ≥ θ √(a_ii a_jj)`.
pub fn strength_neighborhood(a: &CsrMatrix, theta: f64) -> Result<Vec<Vec<usize>>, AmgError> {
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(AmgError::NonPositiveDiagonal { row, value: diag[row] });
    }
    Ok((0..a.n_rows())
        .map(|i| {
            a.row(i)
                .filter(|&(j, v)| j != i && v.abs() >= theta * (diag[i] * diag[j]).sqrt())
                .map(|(j, _)| j)
                .collect()
        })
        .collect())
}
