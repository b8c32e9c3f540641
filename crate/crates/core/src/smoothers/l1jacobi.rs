use crate::sparse::CsrMatrix;

/// Diagonal smoother `M = diag(a_ii + Σ_{j≠i} |a_ij|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1JacobiSmoother {
    m_diag: Vec<f64>,
    inv_diag: Vec<f64>,
}

impl L1JacobiSmoother {
    pub fn diagonal(&self) -> &[f64] {
        &self.m_diag
    }

    /// z = M⁻¹ r.
    pub fn apply_inverse(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), inv) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * inv;
        }
    }
}

pub fn l1_jacobi_build(a: &CsrMatrix) -> L1JacobiSmoother {
    let m_diag: Vec<f64> = (0..a.n_rows())
        .map(|i| {
            let mut d = 0.0;
            let mut off = 0.0;
            for (j, v) in a.row(i) {
                if j == i {
                    d += v;
                } else {
                    off += v.abs();
                }
            }
            d + off
        })
        .collect();
    let inv_diag = m_diag.iter().map(|m| 1.0 / m).collect();
    L1JacobiSmoother { m_diag, inv_diag }
}
