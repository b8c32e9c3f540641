use super::SparseError;

/// Compressed sparse row storage with strictly increasing columns per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub(crate) fn from_sorted_parts(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), n_rows + 1);
        debug_assert_eq!(col_idx.len(), values.len());
        debug_assert_eq!(*row_ptr.last().unwrap(), col_idx.len());
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Validating constructor.
    pub fn try_from_parts(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        let bad = |msg: String| Err(SparseError::InvalidStructure(msg));
        if row_ptr.len() != n_rows + 1 {
            return bad(format!("row_ptr has length {}, expected {}", row_ptr.len(), n_rows + 1));
        }
        if row_ptr[0] != 0 || row_ptr[n_rows] != col_idx.len() {
            return bad("row_ptr must start at 0 and end at nnz".into());
        }
        if col_idx.len() != values.len() {
            return bad("col_idx and values differ in length".into());
        }
        for i in 0..n_rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("columns of row {i} are not strictly increasing"));
            }
            if cols.last().is_some_and(|&c| c >= n_cols) {
                return bad(format!("column index out of range in row {i}"));
            }
        }
        Ok(Self::from_sorted_parts(n_rows, n_cols, row_ptr, col_idx, values))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_sorted_parts(n, n, (0..=n).collect(), (0..n).collect(), d.to_vec())
    }

    /// Builds a matrix from dense row-major data, keeping only nonzeros.
    pub fn from_dense(n_rows: usize, n_cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n_rows * n_cols);
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..n_rows {
            for j in 0..n_cols {
                let v = data[i * n_cols + j];
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_sorted_parts(n_rows, n_cols, row_ptr, col_idx, values)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows * self.n_cols];
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                out[i * self.n_cols + j] = v;
            }
        }
        out
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// Offset of entry (i, j) in `col_idx`/`values`, if stored.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n_rows {
            return None;
        }
        let start = self.row_ptr[i];
        self.col_idx[start..self.row_ptr[i + 1]]
            .binary_search(&j)
            .ok()
            .map(|k| start + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    /// y ← αAx + βy. Caller checks dimensions.
    pub(crate) fn spmv_unchecked(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = if beta == 0.0 {
                alpha * acc
            } else {
                alpha * acc + beta * *yi
            };
        }
    }

    /// Plain y = Ax.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "mul_vec: dimension mismatch");
        let mut y = vec![0.0; self.n_rows];
        self.spmv_unchecked(1.0, x, 0.0, &mut y);
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let dst = next[j];
                col_idx[dst] = i;
                values[dst] = self.values[k];
                next[j] += 1;
            }
        }
        Self::from_sorted_parts(self.n_cols, self.n_rows, row_ptr, col_idx, values)
    }

    /// Sparse product `self * rhs` (row-wise Gustavson with a dense accumulator).
    pub fn matmul(&self, rhs: &CsrMatrix) -> Result<CsrMatrix, SparseError> {
        if self.n_cols != rhs.n_rows {
            return Err(SparseError::DimensionMismatch {
                op: "matmul",
                expected: self.n_cols,
                found: rhs.n_rows,
            });
        }
        let n = rhs.n_cols;
        let mut acc = vec![0.0f64; n];
        let mut marker = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.n_rows {
            touched.clear();
            for (k, a_ik) in self.row(i) {
                for (j, b_kj) in rhs.row(k) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a_ik * b_kj;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_sorted_parts(self.n_rows, n, row_ptr, col_idx, values))
    }

    /// Removes entries with magnitude strictly below `threshold`.
    pub fn drop_below(&self, threshold: f64) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                if v.abs() >= threshold {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_sorted_parts(self.n_rows, self.n_cols, row_ptr, col_idx, values)
    }

    /// `α·self + β·other` over the union pattern.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<CsrMatrix, SparseError> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(SparseError::DimensionMismatch {
                op: "add",
                expected: self.n_rows * self.n_cols,
                found: other.n_rows * other.n_cols,
            });
        }
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        row_ptr.push(0);
        for i in 0..self.n_rows {
            let mut a = self.row(i).peekable();
            let mut b = other.row(i).peekable();
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (Some((ja, va)), Some((jb, vb))) => {
                        if ja == jb {
                            col_idx.push(ja);
                            values.push(alpha * va + beta * vb);
                            a.next();
                            b.next();
                        } else if ja < jb {
                            col_idx.push(ja);
                            values.push(alpha * va);
                            a.next();
                        } else {
                            col_idx.push(jb);
                            values.push(beta * vb);
                            b.next();
                        }
                    }
                    (Some((ja, va)), None) => {
                        col_idx.push(ja);
                        values.push(alpha * va);
                        a.next();
                    }
                    (None, Some((jb, vb))) => {
                        col_idx.push(jb);
                        values.push(beta * vb);
                        b.next();
                    }
                    (None, None) => break,
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_sorted_parts(
            self.n_rows,
            self.n_cols,
            row_ptr,
            col_idx,
            values,
        ))
    }

    /// Scales row i by `s[i]`.
    pub fn scale_rows(&mut self, s: &[f64]) {
        assert_eq!(s.len(), self.n_rows);
        for (i, &si) in s.iter().enumerate() {
            for v in &mut self.values[self.row_ptr[i]..self.row_ptr[i + 1]] {
                *v *= si;
            }
        }
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.n_rows == self.n_cols && *self == self.transpose()
    }

    /// Symmetry up to a relative tolerance on each entry pair.
    pub fn is_symmetric_within(&self, rel_tol: f64) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                if (v - self.get(j, i)).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_row_len(&self) -> usize {
        (0..self.n_rows).map(|i| self.row_len(i)).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            d[i * n + i] = 2.0;
            if i > 0 {
                d[i * n + i - 1] = -1.0;
            }
            if i + 1 < n {
                d[i * n + i + 1] = -1.0;
            }
        }
        CsrMatrix::from_dense(n, n, &d)
    }

    #[test]
    fn transpose_twice_is_identity() {
        let a = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
        let t = a.transpose();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.get(2, 0), 2.0);
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = tridiag(4);
        let c = a.matmul(&a).unwrap();
        let d = a.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                let want: f64 = (0..4).map(|k| d[i * 4 + k] * d[k * 4 + j]).sum();
                assert_eq!(c.get(i, j), want);
            }
        }
    }

    #[test]
    fn invalid_parts_are_rejected() {
        assert!(CsrMatrix::try_from_parts(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::try_from_parts(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::try_from_parts(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::try_from_parts(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn add_scaled_union_pattern() {
        let a = CsrMatrix::identity(2);
        let b = CsrMatrix::from_dense(2, 2, &[0.0, 1.0, 0.0, 1.0]);
        let c = a.add_scaled(2.0, &b, -1.0).unwrap();
        assert_eq!(c.to_dense(), vec![2.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn symmetric_detection() {
        assert!(tridiag(5).is_symmetric());
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(!a.is_symmetric());
    }
}
