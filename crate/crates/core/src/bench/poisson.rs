use crate::sparse::CooBuilder;

/// 7-point finite-difference Laplacian of −∇²u = 1 on the unit cube with
/// Dirichlet boundaries eliminated. Unknowns are ordered x fastest; the
/// right-hand side is h² with h = 1/(nx+1).
pub fn gen_poisson_7pt(nx: usize, ny: usize, nz: usize) -> (CooBuilder, Vec<f64>) {
    let n = nx * ny * nz;
    let idx = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut b = CooBuilder::with_capacity(n, n, 7 * n);
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = idx(x, y, z);
                if z > 0 {
                    b.push(i, idx(x, y, z - 1), -1.0);
                }
                if y > 0 {
                    b.push(i, idx(x, y - 1, z), -1.0);
                }
                if x > 0 {
                    b.push(i, idx(x - 1, y, z), -1.0);
                }
                b.push(i, i, 6.0);
                if x + 1 < nx {
                    b.push(i, idx(x + 1, y, z), -1.0);
                }
                if y + 1 < ny {
                    b.push(i, idx(x, y + 1, z), -1.0);
                }
                if z + 1 < nz {
                    b.push(i, idx(x, y, z + 1), -1.0);
                }
            }
        }
    }
    let h = 1.0 / (nx as f64 + 1.0);
    (b, vec![h * h; n])
}
