use super::{CsrMatrix, SparseError};

/// Column index used for padding slots: the row's last valid column, or 0
/// for an empty row.
pub(crate) fn pad_column(cols: &[usize]) -> usize {
    cols.last().copied().unwrap_or(0)
}

/// ELLPACK storage. Slot `k` of row `i` lives at `k * n_rows + i`
/// (column-major, the layout that coalesces on SIMD hardware).
#[derive(Debug, Clone, PartialEq)]
pub struct EllMatrix {
    n_rows: usize,
    n_cols: usize,
    width: usize,
    row_len: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl EllMatrix {
    pub fn from_csr(a: &CsrMatrix) -> Self {
        let n = a.n_rows();
        let width = a.max_row_len();
        let mut col_idx = vec![0usize; n * width];
        let mut values = vec![0.0; n * width];
        let mut row_len = Vec::with_capacity(n);
        for i in 0..n {
            let r = a.row_ptr()[i]..a.row_ptr()[i + 1];
            let cols = &a.col_idx()[r.clone()];
            let vals = &a.values()[r];
            let pad = pad_column(cols);
            for k in 0..width {
                let dst = k * n + i;
                if k < cols.len() {
                    col_idx[dst] = cols[k];
                    values[dst] = vals[k];
                } else {
                    col_idx[dst] = pad;
                }
            }
            row_len.push(cols.len());
        }
        Self {
            n_rows: n,
            n_cols: a.n_cols(),
            width,
            row_len,
            col_idx,
            values,
        }
    }

    /// Rebuilds from raw arrays, rejecting any padding slot that is not an
    /// exact 0.0 with the conventional column.
    pub fn from_raw_parts(
        n_rows: usize,
        n_cols: usize,
        width: usize,
        row_len: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        if row_len.len() != n_rows || col_idx.len() != n_rows * width || values.len() != n_rows * width {
            return Err(SparseError::InvalidStructure(
                "ELL arrays do not match n_rows x width".into(),
            ));
        }
        for (i, &len) in row_len.iter().enumerate() {
            if len > width {
                return Err(SparseError::InvalidStructure(format!("row {i} longer than ELL width")));
            }
            let cols: Vec<usize> = (0..len).map(|k| col_idx[k * n_rows + i]).collect();
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&c| c >= n_cols) {
                return Err(SparseError::InvalidStructure(format!(
                    "row {i} has unsorted or out-of-range columns"
                )));
            }
            let pad = pad_column(&cols);
            for k in len..width {
                let s = k * n_rows + i;
                if values[s].to_bits() != 0.0f64.to_bits() || col_idx[s] != pad {
                    return Err(SparseError::InvalidPadding { row: i, slot: k });
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            width,
            row_len,
            col_idx,
            values,
        })
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.n_rows;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for i in 0..n {
            for k in 0..self.row_len[i] {
                col_idx.push(self.col_idx[k * n + i]);
                values.push(self.values[k * n + i]);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix::from_sorted_parts(n, self.n_cols, row_ptr, col_idx, values)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn nnz(&self) -> usize {
        self.row_len.iter().sum()
    }

    /// Stored slots including padding.
    pub fn storage_len(&self) -> usize {
        self.values.len()
    }

    pub fn row_len(&self) -> &[usize] {
        &self.row_len
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn position(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n_rows {
            return None;
        }
        (0..self.row_len[i])
            .map(|k| k * self.n_rows + i)
            .find(|&s| self.col_idx[s] == j)
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Traverses every slot including padding, mirroring a branch-free kernel.
    pub(crate) fn spmv_unchecked(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        let n = self.n_rows;
        let mut acc = vec![0.0; n];
        for k in 0..self.width {
            let cols = &self.col_idx[k * n..(k + 1) * n];
            let vals = &self.values[k * n..(k + 1) * n];
            for i in 0..n {
                acc[i] += vals[i] * x[cols[i]];
            }
        }
        for (yi, a) in y.iter_mut().zip(acc) {
            *yi = if beta == 0.0 { alpha * a } else { alpha * a + beta * *yi };
        }
    }
}
