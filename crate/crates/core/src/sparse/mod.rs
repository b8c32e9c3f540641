//! Sparse matrix construction, storage formats and kernels.
//!
//! Matrices are built through [`CooBuilder`], assembled into [`CsrMatrix`],
//! and wrapped in a [`SparseMatrix`] whose physical layout (CSR, ELLPACK or
//! Hacked ELLPACK) can be switched at runtime without changing results.

mod coo;
mod csr;
mod ell;
mod hll;
pub mod mm;

use std::borrow::Cow;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use coo::CooBuilder;
pub use csr::CsrMatrix;
pub use ell::EllMatrix;
pub use hll::{HllMatrix, DEFAULT_HACK_SIZE};

// Global indices are 64-bit.
const _: () = assert!(usize::BITS == 64);

#[derive(Debug, thiserror::Error)]
pub enum SparseError {
    #[error("triple #{position} ({row}, {col}, {value}) lies outside the {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        position: usize,
        row: usize,
        col: usize,
        value: f64,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("position ({row}, {col}) is not in the sparsity pattern")]
    PatternViolation { row: usize, col: usize },
    #[error("zero diagonal entry at row {row}")]
    SingularDiagonal { row: usize },
    #[error("padding slot {slot} of row {row} is not an exact zero with the padding column")]
    InvalidPadding { row: usize, slot: usize },
    #[error("invalid matrix structure: {0}")]
    InvalidStructure(String),
    #[error("{path}:{line}: {msg}")]
    MatrixMarket { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Physical storage layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csr,
    Ell,
    Hll,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csr => "csr",
            Format::Ell => "ell",
            Format::Hll => "hll",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csr" => Ok(Format::Csr),
            "ell" => Ok(Format::Ell),
            "hll" => Ok(Format::Hll),
            other => Err(format!("unknown matrix format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Csr(CsrMatrix),
    Ell(EllMatrix),
    Hll(HllMatrix),
}

/// One logical matrix in any of the supported layouts.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    storage: Storage,
    symmetric: bool,
}

impl From<CsrMatrix> for SparseMatrix {
    fn from(a: CsrMatrix) -> Self {
        Self::new(a)
    }
}

impl SparseMatrix {
    /// Wraps a CSR matrix; the symmetry flag is computed exactly.
    pub fn new(a: CsrMatrix) -> Self {
        let symmetric = a.is_symmetric();
        Self {
            storage: Storage::Csr(a),
            symmetric,
        }
    }

    pub fn with_symmetry(a: CsrMatrix, symmetric: bool) -> Self {
        Self {
            storage: Storage::Csr(a),
            symmetric,
        }
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn format(&self) -> Format {
        match self.storage {
            Storage::Csr(_) => Format::Csr,
            Storage::Ell(_) => Format::Ell,
            Storage::Hll(_) => Format::Hll,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn n_rows(&self) -> usize {
        match &self.storage {
            Storage::Csr(a) => a.n_rows(),
            Storage::Ell(a) => a.n_rows(),
            Storage::Hll(a) => a.n_rows(),
        }
    }

    pub fn n_cols(&self) -> usize {
        match &self.storage {
            Storage::Csr(a) => a.n_cols(),
            Storage::Ell(a) => a.n_cols(),
            Storage::Hll(a) => a.n_cols(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Csr(a) => a.nnz(),
            Storage::Ell(a) => a.nnz(),
            Storage::Hll(a) => a.nnz(),
        }
    }

    /// CSR view; borrows when already CSR.
    pub fn to_csr(&self) -> Cow<'_, CsrMatrix> {
        match &self.storage {
            Storage::Csr(a) => Cow::Borrowed(a),
            Storage::Ell(a) => Cow::Owned(a.to_csr()),
            Storage::Hll(a) => Cow::Owned(a.to_csr()),
        }
    }

    /// Re-lays the matrix out in `target`. `hack_size` only matters for HLL;
    /// converting HLL to HLL with a different hack size re-blocks.
    pub fn convert(&self, target: Format, hack_size: usize) -> SparseMatrix {
        let storage = match (&self.storage, target) {
            (Storage::Csr(_), Format::Csr) | (Storage::Ell(_), Format::Ell) => self.storage.clone(),
            (Storage::Hll(h), Format::Hll) if h.hack_size() == hack_size.max(1) => self.storage.clone(),
            (_, Format::Csr) => Storage::Csr(self.to_csr().into_owned()),
            (_, Format::Ell) => Storage::Ell(EllMatrix::from_csr(&self.to_csr())),
            (_, Format::Hll) => Storage::Hll(HllMatrix::from_csr(&self.to_csr(), hack_size)),
        };
        SparseMatrix {
            storage,
            symmetric: self.symmetric,
        }
    }

    /// y ← αAx + βy. With α = 0 the matrix is not touched; with β = 0 the
    /// previous contents of y are ignored.
    pub fn spmv(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) -> Result<(), SparseError> {
        if x.len() != self.n_cols() {
            return Err(SparseError::DimensionMismatch {
                op: "spmv(x)",
                expected: self.n_cols(),
                found: x.len(),
            });
        }
        if y.len() != self.n_rows() {
            return Err(SparseError::DimensionMismatch {
                op: "spmv(y)",
                expected: self.n_rows(),
                found: y.len(),
            });
        }
        if alpha == 0.0 {
            if beta == 0.0 {
                y.fill(0.0);
            } else if beta != 1.0 {
                y.iter_mut().for_each(|v| *v *= beta);
            }
            return Ok(());
        }
        match &self.storage {
            Storage::Csr(a) => a.spmv_unchecked(alpha, x, beta, y),
            Storage::Ell(a) => a.spmv_unchecked(alpha, x, beta, y),
            Storage::Hll(a) => a.spmv_unchecked(alpha, x, beta, y),
        }
        Ok(())
    }

    /// Convenience y = Ax.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        let mut y = vec![0.0; self.n_rows()];
        self.spmv(1.0, x, 0.0, &mut y)?;
        Ok(y)
    }

    /// Replaces the values at existing pattern positions. Either every triple
    /// is applied or, on a pattern violation, none is.
    pub fn update_coefficients(&mut self, triples: &[(usize, usize, f64)]) -> Result<(), SparseError> {
        let positions = triples
            .iter()
            .map(|&(i, j, _)| {
                let pos = match &self.storage {
                    Storage::Csr(a) => a.position(i, j),
                    Storage::Ell(a) => a.position(i, j),
                    Storage::Hll(a) => a.position(i, j),
                };
                pos.ok_or(SparseError::PatternViolation { row: i, col: j })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let values = match &mut self.storage {
            Storage::Csr(a) => a.values_mut(),
            Storage::Ell(a) => a.values_mut(),
            Storage::Hll(a) => a.values_mut(),
        };
        for (&p, &(_, _, v)) in positions.iter().zip(triples) {
            values[p] = v;
        }
        if self.symmetric {
            self.symmetric = self.to_csr().is_symmetric();
        }
        Ok(())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.to_csr().diagonal()
    }

    /// ‖D⁻¹A‖∞ = max_i Σ_j |a_ij| / |a_ii|.
    pub fn row_scaled_inf_norm(&self) -> Result<f64, SparseError> {
        row_scaled_inf_norm(&self.to_csr())
    }
}

pub fn row_scaled_inf_norm(a: &CsrMatrix) -> Result<f64, SparseError> {
    let mut norm = 0.0f64;
    for i in 0..a.n_rows() {
        let mut sum = 0.0;
        let mut diag = 0.0;
        for (j, v) in a.row(i) {
            sum += v.abs();
            if j == i {
                diag = v;
            }
        }
        if diag == 0.0 {
            return Err(SparseError::SingularDiagonal { row: i });
        }
        norm = norm.max(sum / diag.abs());
    }
    Ok(norm)
}
