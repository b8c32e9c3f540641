use super::{CsrMatrix, SparseError};

/// Insert-phase triple list. Duplicates are allowed and get summed by
/// [`CooBuilder::assemble`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CooBuilder {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CooBuilder {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            ..Default::default()
        }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, capacity: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            rows: Vec::with_capacity(capacity),
            cols: Vec::with_capacity(capacity),
            vals: Vec::with_capacity(capacity),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of inserted triples, duplicates included.
    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Range checking is deferred to assembly.
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(value);
    }

    pub fn extend<I: IntoIterator<Item = (usize, usize, f64)>>(&mut self, triples: I) {
        for (r, c, v) in triples {
            self.push(r, c, v);
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&r, &c), &v)| (r, c, v))
    }

    /// Sorts, merges duplicates by summation and produces a CSR matrix.
    ///
    /// Duplicates are summed in ascending value order so the result does not
    /// depend on the order in which triples were inserted.
    pub fn assemble(&self) -> Result<CsrMatrix, SparseError> {
        for (k, (r, c, v)) in self.triples().enumerate() {
            if r >= self.n_rows || c >= self.n_cols {
                return Err(SparseError::IndexOutOfRange {
                    position: k,
                    row: r,
                    col: c,
                    value: v,
                    n_rows: self.n_rows,
                    n_cols: self.n_cols,
                });
            }
        }

        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            self.rows[a]
                .cmp(&self.rows[b])
                .then(self.cols[a].cmp(&self.cols[b]))
                .then(self.vals[a].total_cmp(&self.vals[b]))
        });

        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(order.len());
        let mut values: Vec<f64> = Vec::with_capacity(order.len());
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let key = (self.rows[k], self.cols[k]);
            if last == Some(key) {
                *values.last_mut().expect("merged entry exists") += self.vals[k];
            } else {
                row_ptr[key.0 + 1] += 1;
                col_idx.push(key.1);
                values.push(self.vals[k]);
                last = Some(key);
            }
        }
        for i in 0..self.n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(CsrMatrix::from_sorted_parts(
            self.n_rows,
            self.n_cols,
            row_ptr,
            col_idx,
            values,
        ))
    }
}

impl From<&CsrMatrix> for CooBuilder {
    fn from(a: &CsrMatrix) -> Self {
        let mut b = CooBuilder::with_capacity(a.n_rows(), a.n_cols(), a.nnz());
        for i in 0..a.n_rows() {
            for (j, v) in a.row(i) {
                b.push(i, j, v);
            }
        }
        b
    }
}
