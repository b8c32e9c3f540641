//! Approximate inverse by incomplete A-orthogonalisation (SPD only, W = Z).
//!
//! Column `i` of Z starts as `e_i` and is made A-orthogonal to the previous
//! columns: `z_i = e_i − Σ_{j<i} ((A z_j)_i / d_j) z_j`, with `d_j = z_jᵀ A z_j`.
//! Only the `j` whose `A z_j` touches row `i` contribute, which keeps the
//! construction sparse. Off-diagonal entries below `drop_tol` in magnitude are
//! discarded after every update. Then `A⁻¹ ≈ Z D⁻¹ Zᵀ`.

use super::SmootherError;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct AinvSmoother {
    /// Row `j` holds column `z_j` of Z.
    z_cols: CsrMatrix,
    d_inv: Vec<f64>,
    drop_tol: f64,
}

impl AinvSmoother {
    /// Factor Z (unit diagonal, entries only at rows `≤` the column index).
    pub fn z(&self) -> CsrMatrix {
        self.z_cols.transpose()
    }

    pub fn d_inv(&self) -> &[f64] {
        &self.d_inv
    }

    pub fn drop_tol(&self) -> f64 {
        self.drop_tol
    }

    pub fn nnz_z(&self) -> usize {
        self.z_cols.nnz()
    }

    /// z = Z D⁻¹ Zᵀ r.
    pub fn apply_inverse(&self, r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for j in 0..self.z_cols.n_rows() {
            let t: f64 = self.z_cols.row(j).map(|(k, v)| v * r[k]).sum::<f64>() * self.d_inv[j];
            if t != 0.0 {
                for (k, v) in self.z_cols.row(j) {
                    out[k] += v * t;
                }
            }
        }
    }
}

pub fn ainv_build(a: &CsrMatrix, drop_tol: f64) -> Result<AinvSmoother, SmootherError> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(SmootherError::DimensionMismatch {
            expected: n,
            found: a.n_cols(),
        });
    }
    // u_rows[i]: (j, (A z_j)_i) for processed columns j < i
    let mut u_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx: Vec<usize> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    row_ptr.push(0);
    let mut d = Vec::with_capacity(n);

    let mut acc = vec![0.0f64; n];
    let mut in_z = vec![false; n];
    let mut support: Vec<usize> = Vec::new();
    let mut u_acc = vec![0.0f64; n];
    let mut in_u = vec![false; n];
    let mut u_support: Vec<usize> = Vec::new();

    for i in 0..n {
        support.clear();
        acc[i] = 1.0;
        in_z[i] = true;
        support.push(i);

        for &(j, u_ji) in &u_rows[i] {
            let coef = u_ji / d[j];
            if coef == 0.0 {
                continue;
            }
            for k in row_ptr[j]..row_ptr[j + 1] {
                let m = col_idx[k];
                if !in_z[m] {
                    in_z[m] = true;
                    acc[m] = 0.0;
                    support.push(m);
                }
                acc[m] -= coef * values[k];
            }
            for &m in &col_idx[row_ptr[j]..row_ptr[j + 1]] {
                if m != i && acc[m].abs() < drop_tol {
                    acc[m] = 0.0;
                }
            }
        }

        support.sort_unstable();
        let start = col_idx.len();
        for &m in &support {
            in_z[m] = false;
            if m == i || (acc[m] != 0.0 && acc[m].abs() >= drop_tol) {
                col_idx.push(m);
                values.push(acc[m]);
            }
        }
        let end = col_idx.len();

        // u = A z_i and d_i = z_iᵀ A z_i
        u_support.clear();
        for k in start..end {
            let m = col_idx[k];
            let zm = values[k];
            for (r, a_rm) in a.row(m) {
                if !in_u[r] {
                    in_u[r] = true;
                    u_acc[r] = 0.0;
                    u_support.push(r);
                }
                u_acc[r] += a_rm * zm;
            }
        }
        let d_i: f64 = (start..end).map(|k| values[k] * u_acc[col_idx[k]]).sum();
        for &r in &u_support {
            in_u[r] = false;
            if r > i && u_acc[r] != 0.0 {
                u_rows[r].push((i, u_acc[r]));
            }
        }
        if !(d_i > 0.0) {
            return Err(SmootherError::AinvBreakdown { column: i, pivot: d_i });
        }
        d.push(d_i);
        row_ptr.push(end);
        u_rows[i] = Vec::new();
    }

    Ok(AinvSmoother {
        z_cols: CsrMatrix::from_sorted_parts(n, n, row_ptr, col_idx, values),
        d_inv: d.iter().map(|v| 1.0 / v).collect(),
        drop_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_exact() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0, 8.0]);
        for tol in [0.0, 0.1, f64::INFINITY] {
            let s = ainv_build(&a, tol).unwrap();
            assert_eq!(s.z(), CsrMatrix::identity(3));
            assert_eq!(s.d_inv(), &[0.5, 0.25, 0.125]);
            let mut out = vec![0.0; 3];
            s.apply_inverse(&[2.0, 4.0, 8.0], &mut out);
            assert_eq!(out, vec![1.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn two_by_two_inverse() {
        let a = CsrMatrix::from_dense(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let s = ainv_build(&a, 0.0).unwrap();
        let want = [2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
        for c in 0..2 {
            let mut e = vec![0.0; 2];
            e[c] = 1.0;
            let mut col = vec![0.0; 2];
            s.apply_inverse(&e, &mut col);
            for r in 0..2 {
                assert!((col[r] - want[r * 2 + c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn infinite_drop_is_diagonal_scaling() {
        let a = CsrMatrix::from_dense(2, 2, &[2.0, -1.0, -1.0, 4.0]);
        let s = ainv_build(&a, f64::INFINITY).unwrap();
        assert_eq!(s.z(), CsrMatrix::identity(2));
        assert_eq!(s.d_inv(), &[0.5, 0.25]);
    }

    #[test]
    fn indefinite_matrix_breaks_down() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match ainv_build(&a, 0.0) {
            Err(SmootherError::AinvBreakdown { column, pivot }) => {
                assert_eq!(column, 1);
                assert!(pivot < 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
