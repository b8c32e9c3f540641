use super::ell::pad_column;
use super::{CsrMatrix, SparseError};

/// Rows per block when none is given; the width of a GPU warp.
pub const DEFAULT_HACK_SIZE: usize = 32;

/// Hacked ELLPACK: consecutive groups of `hack_size` rows, each stored as an
/// independent ELLPACK block so a long row only pads its own block.
///
/// Within block `b` (rows `b*hack_size ..`), slot `k` of local row `r` lives at
/// `hack_offsets[b] + k * block_rows + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HllMatrix {
    n_rows: usize,
    n_cols: usize,
    hack_size: usize,
    row_len: Vec<usize>,
    hack_width: Vec<usize>,
    hack_offsets: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl HllMatrix {
    pub fn from_csr(a: &CsrMatrix, hack_size: usize) -> Self {
        let hack_size = hack_size.max(1);
        let n = a.n_rows();
        let n_blocks = n.div_ceil(hack_size);
        let row_len: Vec<usize> = (0..n).map(|i| a.row_len(i)).collect();
        let mut hack_width = Vec::with_capacity(n_blocks);
        let mut hack_offsets = Vec::with_capacity(n_blocks + 1);
        hack_offsets.push(0);
        for b in 0..n_blocks {
            let rows = b * hack_size..((b + 1) * hack_size).min(n);
            let w = row_len[rows.clone()].iter().copied().max().unwrap_or(0);
            hack_width.push(w);
            hack_offsets.push(hack_offsets[b] + w * rows.len());
        }
        let total = hack_offsets[n_blocks];
        let mut col_idx = vec![0usize; total];
        let mut values = vec![0.0; total];
        for b in 0..n_blocks {
            let first = b * hack_size;
            let block_rows = (n - first).min(hack_size);
            for r in 0..block_rows {
                let i = first + r;
                let range = a.row_ptr()[i]..a.row_ptr()[i + 1];
                let cols = &a.col_idx()[range.clone()];
                let vals = &a.values()[range];
                let pad = pad_column(cols);
                for k in 0..hack_width[b] {
                    let dst = hack_offsets[b] + k * block_rows + r;
                    if k < cols.len() {
                        col_idx[dst] = cols[k];
                        values[dst] = vals[k];
                    } else {
                        col_idx[dst] = pad;
                    }
                }
            }
        }
        Self {
            n_rows: n,
            n_cols: a.n_cols(),
            hack_size,
            row_len,
            hack_width,
            hack_offsets,
            col_idx,
            values,
        }
    }

    /// Rebuilds from raw arrays. Padding slots must hold exactly 0.0 and the
    /// row's last valid column.
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw_parts(
        n_rows: usize,
        n_cols: usize,
        hack_size: usize,
        row_len: Vec<usize>,
        hack_width: Vec<usize>,
        hack_offsets: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, SparseError> {
        let bad = |m: &str| Err(SparseError::InvalidStructure(m.to_string()));
        if hack_size == 0 {
            return bad("hack_size must be positive");
        }
        let n_blocks = n_rows.div_ceil(hack_size);
        if row_len.len() != n_rows
            || hack_width.len() != n_blocks
            || hack_offsets.len() != n_blocks + 1
            || hack_offsets[0] != 0
        {
            return bad("HLL block metadata has the wrong shape");
        }
        for b in 0..n_blocks {
            let block_rows = (n_rows - b * hack_size).min(hack_size);
            if hack_offsets[b + 1] != hack_offsets[b] + block_rows * hack_width[b] {
                return bad("block storage is not block_rows x block_width");
            }
        }
        if col_idx.len() != hack_offsets[n_blocks] || values.len() != col_idx.len() {
            return bad("HLL arrays do not match block offsets");
        }
        for b in 0..n_blocks {
            let first = b * hack_size;
            let block_rows = (n_rows - first).min(hack_size);
            let w = hack_width[b];
            for r in 0..block_rows {
                let i = first + r;
                if row_len[i] > w {
                    return bad("row longer than its block width");
                }
                let slot = |k: usize| hack_offsets[b] + k * block_rows + r;
                let cols: Vec<usize> = (0..row_len[i]).map(|k| col_idx[slot(k)]).collect();
                if cols.windows(2).any(|p| p[0] >= p[1]) || cols.iter().any(|&c| c >= n_cols) {
                    return bad("unsorted or out-of-range columns");
                }
                let pad = pad_column(&cols);
                for k in row_len[i]..w {
                    let s = slot(k);
                    if values[s].to_bits() != 0.0f64.to_bits() || col_idx[s] != pad {
                        return Err(SparseError::InvalidPadding { row: i, slot: k });
                    }
                }
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            hack_size,
            row_len,
            hack_width,
            hack_offsets,
            col_idx,
            values,
        })
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let nnz = self.nnz();
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for i in 0..self.n_rows {
            let (b, r) = (i / self.hack_size, i % self.hack_size);
            let block_rows = self.block_rows(b);
            for k in 0..self.row_len[i] {
                let s = self.hack_offsets[b] + k * block_rows + r;
                col_idx.push(self.col_idx[s]);
                values.push(self.values[s]);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix::from_sorted_parts(self.n_rows, self.n_cols, row_ptr, col_idx, values)
    }

    fn block_rows(&self, b: usize) -> usize {
        (self.n_rows - b * self.hack_size).min(self.hack_size)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn hack_size(&self) -> usize {
        self.hack_size
    }

    pub fn n_blocks(&self) -> usize {
        self.hack_width.len()
    }

    /// Per-block maximum row length.
    pub fn hack_width(&self) -> &[usize] {
        &self.hack_width
    }

    pub fn hack_offsets(&self) -> &[usize] {
        &self.hack_offsets
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

    pub fn nnz(&self) -> usize {
        self.row_len.iter().sum()
    }

    pub fn storage_len(&self) -> usize {
        self.values.len()
    }

    pub fn padded_slots(&self) -> usize {
        self.storage_len() - self.nnz()
    }

    pub(crate) fn position(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n_rows {
            return None;
        }
        let (b, r) = (i / self.hack_size, i % self.hack_size);
        let block_rows = self.block_rows(b);
        (0..self.row_len[i])
            .map(|k| self.hack_offsets[b] + k * block_rows + r)
            .find(|&s| self.col_idx[s] == j)
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn spmv_unchecked(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        let mut acc = vec![0.0; self.hack_size];
        for b in 0..self.n_blocks() {
            let first = b * self.hack_size;
            let block_rows = self.block_rows(b);
            let acc = &mut acc[..block_rows];
            acc.fill(0.0);
            let base = self.hack_offsets[b];
            for k in 0..self.hack_width[b] {
                let s = base + k * block_rows;
                let cols = &self.col_idx[s..s + block_rows];
                let vals = &self.values[s..s + block_rows];
                for r in 0..block_rows {
                    acc[r] += vals[r] * x[cols[r]];
                }
            }
            for (yi, &a) in y[first..first + block_rows].iter_mut().zip(acc.iter()) {
                *yi = if beta == 0.0 { alpha * a } else { alpha * a + beta * *yi };
            }
        }
    }
}
