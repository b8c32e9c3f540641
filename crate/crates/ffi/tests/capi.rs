use std::ffi::CStr;
use std::ptr;

use amgkit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(amg_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

unsafe fn tridiag(n: usize) -> *mut AmgMatrix {
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for i in 0..n {
        rows.push(i);
        cols.push(i);
        vals.push(2.0);
        if i + 1 < n {
            rows.extend([i, i + 1]);
            cols.extend([i + 1, i]);
            vals.extend([-1.0, -1.0]);
        }
    }
    let mut m = ptr::null_mut();
    let st = amg_matrix_from_coo(n, n, rows.len(), rows.as_ptr(), cols.as_ptr(), vals.as_ptr(), &mut m);
    assert_eq!(st, AmgStatus::Ok);
    m
}

#[test]
fn csr_matrix_spmv_in_every_format() {
    unsafe {
        let row_ptr = [0usize, 2, 3];
        let col_idx = [0usize, 1, 1];
        let values = [1.0, 2.0, 3.0];
        let mut m = ptr::null_mut();
        assert_eq!(
            amg_matrix_from_csr(2, 2, row_ptr.as_ptr(), col_idx.as_ptr(), values.as_ptr(), &mut m),
            AmgStatus::Ok
        );
        assert_eq!((amg_matrix_rows(m), amg_matrix_cols(m), amg_matrix_nnz(m)), (2, 2, 3));
        for fmt in [AMG_FORMAT_ELL, AMG_FORMAT_HLL, AMG_FORMAT_CSR] {
            assert_eq!(amg_matrix_convert(m, fmt, 0), AmgStatus::Ok);
            let x = [1.0, 1.0];
            let mut y = [10.0, 10.0];
            assert_eq!(amg_matrix_spmv(m, 2.0, x.as_ptr(), 1.0, y.as_mut_ptr()), AmgStatus::Ok);
            assert_eq!(y, [16.0, 16.0]);
        }
        assert_eq!(amg_matrix_convert(m, 42, 0), AmgStatus::InvalidArgument);
        amg_matrix_free(m);
    }
}

#[test]
fn malformed_csr_is_rejected() {
    unsafe {
        let row_ptr = [0usize, 2, 2];
        let col_idx = [1usize, 0];
        let values = [1.0, 2.0];
        let mut m = ptr::null_mut();
        let st = amg_matrix_from_csr(2, 2, row_ptr.as_ptr(), col_idx.as_ptr(), values.as_ptr(), &mut m);
        assert_eq!(st, AmgStatus::SparseError);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn preconditioned_solve_on_poisson() {
    unsafe {
        let n = 12 * 12 * 12;
        let mut rhs = vec![0.0; n];
        let mut a = ptr::null_mut();
        assert_eq!(amg_matrix_poisson7(12, 12, 12, rhs.as_mut_ptr(), &mut a), AmgStatus::Ok);

        for preset in [AMG_PRESET_VBM, AMG_PRESET_SMATCH, AMG_PRESET_VMATCH] {
            let mut opts = std::mem::zeroed();
            assert_eq!(amg_precond_options_default(preset, &mut opts), AmgStatus::Ok);
            opts.coarse_size_target = 50;
            let mut p = ptr::null_mut();
            assert_eq!(amg_precond_build(a, &opts, &mut p), AmgStatus::Ok);
            assert!(amg_precond_levels(p) >= 2);
            assert_eq!(amg_precond_level_size(p, 0), n);
            assert!(amg_precond_operator_complexity(p) >= 1.0);

            let mut x = vec![0.0; n];
            let mut info = AmgSolveInfo::default();
            let st = amg_solve(
                a,
                p,
                AMG_METHOD_FCG,
                n,
                rhs.as_ptr(),
                x.as_mut_ptr(),
                1e-8,
                100,
                &mut info,
            );
            assert_eq!(st, AmgStatus::Ok, "{}", last_error());
            assert!(info.converged);
            assert!(info.iterations < 30);
            assert!(info.relative_residual <= 1e-8);
            amg_precond_free(p);
        }

        let mut x = vec![0.0; n];
        let mut info = AmgSolveInfo::default();
        let st = amg_solve(
            a,
            ptr::null(),
            AMG_METHOD_CG,
            n,
            rhs.as_ptr(),
            x.as_mut_ptr(),
            1e-8,
            3,
            &mut info,
        );
        assert_eq!(st, AmgStatus::NotConverged);
        assert_eq!(info.iterations, 3);
        assert!(!info.converged);
        amg_matrix_free(a);
    }
}

#[test]
fn precond_apply_and_fine_update() {
    unsafe {
        let n = 64;
        let a = tridiag(n);
        let mut opts = std::mem::zeroed();
        amg_precond_options_default(AMG_PRESET_SMATCH, &mut opts);
        opts.coarse_size_target = 4;
        let mut p = ptr::null_mut();
        assert_eq!(amg_precond_build(a, &opts, &mut p), AmgStatus::Ok);

        let r = vec![1.0; n];
        let mut z1 = vec![0.0; n];
        assert_eq!(amg_precond_apply(p, n, r.as_ptr(), z1.as_mut_ptr()), AmgStatus::Ok);
        assert!(z1.iter().all(|v| v.is_finite() && *v > 0.0));
        assert_eq!(
            amg_precond_apply(p, n - 1, r.as_ptr(), z1.as_mut_ptr()),
            AmgStatus::InvalidArgument
        );

        let levels = amg_precond_levels(p);
        let (row, col, val) = ([0usize], [0usize], [4.0]);
        assert_eq!(
            amg_precond_update_fine(p, 1, row.as_ptr(), col.as_ptr(), val.as_ptr()),
            AmgStatus::Ok
        );
        assert_eq!(amg_precond_levels(p), levels);
        let mut z2 = vec![0.0; n];
        amg_precond_apply(p, n, r.as_ptr(), z2.as_mut_ptr());
        assert_ne!(z1, z2);

        let (row, col) = ([0usize], [5usize]);
        assert_eq!(
            amg_precond_update_fine(p, 1, row.as_ptr(), col.as_ptr(), val.as_ptr()),
            AmgStatus::SparseError
        );
        amg_precond_free(p);
        amg_matrix_free(a);
    }
}

#[test]
fn hierarchy_errors_surface_as_codes() {
    unsafe {
        let rows = [0usize, 1];
        let cols = [0usize, 1];
        let vals = [1.0, -1.0];
        let mut a = ptr::null_mut();
        amg_matrix_from_coo(2, 2, 2, rows.as_ptr(), cols.as_ptr(), vals.as_ptr(), &mut a);
        let mut p = ptr::null_mut();
        assert_eq!(amg_precond_build(a, ptr::null(), &mut p), AmgStatus::HierarchyError);
        assert!(last_error().contains("diagonal"));
        amg_matrix_free(a);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(amg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
