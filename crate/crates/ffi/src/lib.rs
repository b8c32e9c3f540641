//! C ABI over `amgkit`.
//!
//! Objects cross the boundary as opaque handles created by `amg_*_new`/
//! `amg_*_build` style calls and released by the matching `amg_*_free`.
//! Every fallible call returns an [`AmgStatus`] code; the message of the
//! most recent failure on the calling thread is available from
//! [`amg_last_error_message`]. Indices are zero-based.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use amgkit::amg::{build_hierarchy, AggregationConfig, AggregationKind, Hierarchy, DEFAULT_THETA};
use amgkit::bench::gen_poisson_7pt;
use amgkit::krylov::{
    cg_solve, fcg_solve, IdentityPreconditioner, KrylovMethod, Preconditioner, SolveError, SolverConfig,
};
use amgkit::smoothers::{
    build_smoothers, AmgPreconditioner, CoarseSolver, CycleConfig, CycleKind, SmootherKind, DEFAULT_AINV_DROP_TOL,
};
use amgkit::sparse::{CooBuilder, CsrMatrix, Format, SparseMatrix, DEFAULT_HACK_SIZE};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SparseError = 3,
    HierarchyError = 4,
    SmootherError = 5,
    SolveError = 6,
    NotConverged = 7,
    Panic = 8,
}

pub const AMG_AGGREGATION_VMB: u32 = 0;
pub const AMG_AGGREGATION_MATCHING: u32 = 1;

pub const AMG_SMOOTHER_L1JACOBI: u32 = 0;
pub const AMG_SMOOTHER_AINV: u32 = 1;

pub const AMG_CYCLE_V: u32 = 0;
pub const AMG_CYCLE_VARIABLE_V: u32 = 1;

pub const AMG_COARSE_PCG: u32 = 0;
pub const AMG_COARSE_SWEEPS: u32 = 1;

pub const AMG_FORMAT_CSR: u32 = 0;
pub const AMG_FORMAT_ELL: u32 = 1;
pub const AMG_FORMAT_HLL: u32 = 2;

pub const AMG_PRESET_VBM: u32 = 0;
pub const AMG_PRESET_SMATCH: u32 = 1;
pub const AMG_PRESET_VMATCH: u32 = 2;

pub const AMG_METHOD_CG: u32 = 0;
pub const AMG_METHOD_FCG: u32 = 1;

/// Opaque sparse matrix.
pub struct AmgMatrix {
    inner: SparseMatrix,
}

/// Opaque AMG preconditioner: hierarchy with smoothers attached.
pub struct AmgPrecond {
    hierarchy: Hierarchy,
}

/// Preconditioner construction options. Fill with
/// [`amg_precond_options_default`] before changing individual fields.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AmgPrecondOptions {
    /// `AMG_AGGREGATION_*`
    pub aggregation: u32,
    pub theta: f64,
    pub match_sweeps: usize,
    pub smooth_prolongator: bool,
    /// `AMG_SMOOTHER_*`
    pub smoother: u32,
    pub ainv_drop_tol: f64,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    /// `AMG_CYCLE_*`
    pub cycle: u32,
    /// `AMG_COARSE_*`
    pub coarse_solver: u32,
    pub coarse_iterations: usize,
    pub coarse_size_target: usize,
    pub max_levels: usize,
}

/// Outcome of a Krylov solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AmgSolveInfo {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub solve_time: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: AmgStatus, msg: impl std::fmt::Display) -> AmgStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting a panic into [`AmgStatus::Panic`].
fn guard(f: impl FnOnce() -> AmgStatus) -> AmgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AmgStatus::Panic, "internal panic"),
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize) -> Option<&'a mut [T]> {
    if len == 0 {
        Some(&mut [])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts_mut(p, len))
    }
}

fn format_from(code: u32) -> Option<Format> {
    match code {
        AMG_FORMAT_CSR => Some(Format::Csr),
        AMG_FORMAT_ELL => Some(Format::Ell),
        AMG_FORMAT_HLL => Some(Format::Hll),
        _ => None,
    }
}

fn emit_matrix(m: SparseMatrix, out: *mut *mut AmgMatrix) -> AmgStatus {
    unsafe { *out = Box::into_raw(Box::new(AmgMatrix { inner: m })) };
    AmgStatus::Ok
}

/// Message describing the last failure on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn amg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn amg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a matrix from CSR arrays. Column indices in each row must be
/// strictly increasing.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_from_csr(
    n_rows: usize,
    n_cols: usize,
    row_ptr: *const usize,
    col_idx: *const usize,
    values: *const f64,
    out: *mut *mut AmgMatrix,
) -> AmgStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmgStatus::NullPointer, "output handle pointer is null");
        }
        let Some(rp) = slice_in(row_ptr, n_rows + 1) else {
            return fail(AmgStatus::NullPointer, "row_ptr is null");
        };
        let nnz = rp[n_rows];
        let (Some(ci), Some(vs)) = (slice_in(col_idx, nnz), slice_in(values, nnz)) else {
            return fail(AmgStatus::NullPointer, "col_idx or values is null");
        };
        match CsrMatrix::try_from_parts(n_rows, n_cols, rp.to_vec(), ci.to_vec(), vs.to_vec()) {
            Ok(a) => emit_matrix(SparseMatrix::new(a), out),
            Err(e) => fail(AmgStatus::SparseError, e),
        }
    })
}

/// Creates a matrix from coordinate triples; duplicates are summed.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_from_coo(
    n_rows: usize,
    n_cols: usize,
    nnz: usize,
    rows: *const usize,
    cols: *const usize,
    values: *const f64,
    out: *mut *mut AmgMatrix,
) -> AmgStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmgStatus::NullPointer, "output handle pointer is null");
        }
        let (Some(r), Some(c), Some(v)) = (slice_in(rows, nnz), slice_in(cols, nnz), slice_in(values, nnz)) else {
            return fail(AmgStatus::NullPointer, "triple arrays must not be null");
        };
        let mut b = CooBuilder::with_capacity(n_rows, n_cols, nnz);
        for k in 0..nnz {
            b.push(r[k], c[k], v[k]);
        }
        match b.assemble() {
            Ok(a) => emit_matrix(SparseMatrix::new(a), out),
            Err(e) => fail(AmgStatus::SparseError, e),
        }
    })
}

/// 7-point Poisson matrix on an `nx × ny × nz` grid. When `rhs` is not null
/// it receives the matching right-hand side (length `nx·ny·nz`).
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_poisson7(
    nx: usize,
    ny: usize,
    nz: usize,
    rhs: *mut f64,
    out: *mut *mut AmgMatrix,
) -> AmgStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmgStatus::NullPointer, "output handle pointer is null");
        }
        if nx < 2 || ny < 2 || nz < 2 {
            return fail(AmgStatus::InvalidArgument, "grid dimensions must be at least 2");
        }
        let (coo, b) = gen_poisson_7pt(nx, ny, nz);
        if !rhs.is_null() {
            slice::from_raw_parts_mut(rhs, b.len()).copy_from_slice(&b);
        }
        match coo.assemble() {
            Ok(a) => emit_matrix(SparseMatrix::with_symmetry(a, true), out),
            Err(e) => fail(AmgStatus::SparseError, e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn amg_matrix_free(m: *mut AmgMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of rows; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_rows(m: *const AmgMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.n_rows())
}

/// Number of columns; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_cols(m: *const AmgMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.n_cols())
}

/// Stored nonzeros (padding excluded); 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_nnz(m: *const AmgMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.nnz())
}

/// Switches the storage layout (`AMG_FORMAT_*`).
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_convert(m: *mut AmgMatrix, format: u32, hack_size: usize) -> AmgStatus {
    guard(|| {
        let Some(m) = m.as_mut() else {
            return fail(AmgStatus::NullPointer, "matrix handle is null");
        };
        let Some(f) = format_from(format) else {
            return fail(AmgStatus::InvalidArgument, format!("unknown format code {format}"));
        };
        let hack = if hack_size == 0 { DEFAULT_HACK_SIZE } else { hack_size };
        m.inner = m.inner.convert(f, hack);
        AmgStatus::Ok
    })
}

/// y ← αAx + βy.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_spmv(
    m: *const AmgMatrix,
    alpha: f64,
    x: *const f64,
    beta: f64,
    y: *mut f64,
) -> AmgStatus {
    guard(|| {
        let Some(m) = m.as_ref() else {
            return fail(AmgStatus::NullPointer, "matrix handle is null");
        };
        let (Some(x), Some(y)) = (slice_in(x, m.inner.n_cols()), slice_out(y, m.inner.n_rows())) else {
            return fail(AmgStatus::NullPointer, "vector pointer is null");
        };
        match m.inner.spmv(alpha, x, beta, y) {
            Ok(()) => AmgStatus::Ok,
            Err(e) => fail(AmgStatus::SparseError, e),
        }
    })
}

/// Replaces existing coefficients; every `(row, col)` must already be
/// stored. On error the matrix is unchanged.
#[no_mangle]
pub unsafe extern "C" fn amg_matrix_update(
    m: *mut AmgMatrix,
    count: usize,
    rows: *const usize,
    cols: *const usize,
    values: *const f64,
) -> AmgStatus {
    guard(|| {
        let Some(m) = m.as_mut() else {
            return fail(AmgStatus::NullPointer, "matrix handle is null");
        };
        let (Some(r), Some(c), Some(v)) = (slice_in(rows, count), slice_in(cols, count), slice_in(values, count))
        else {
            return fail(AmgStatus::NullPointer, "triple arrays must not be null");
        };
        let triples: Vec<_> = (0..count).map(|k| (r[k], c[k], v[k])).collect();
        match m.inner.update_coefficients(&triples) {
            Ok(()) => AmgStatus::Ok,
            Err(e) => fail(AmgStatus::SparseError, e),
        }
    })
}

fn preset_options(preset: u32) -> Option<AmgPrecondOptions> {
    let agg = AggregationConfig::default();
    let base = AmgPrecondOptions {
        aggregation: AMG_AGGREGATION_VMB,
        theta: DEFAULT_THETA,
        match_sweeps: 3,
        smooth_prolongator: true,
        smoother: AMG_SMOOTHER_L1JACOBI,
        ainv_drop_tol: DEFAULT_AINV_DROP_TOL,
        pre_sweeps: 4,
        post_sweeps: 4,
        cycle: AMG_CYCLE_V,
        coarse_solver: AMG_COARSE_PCG,
        coarse_iterations: 40,
        coarse_size_target: agg.coarse_size_target,
        max_levels: agg.max_levels,
    };
    match preset {
        AMG_PRESET_VBM => Some(base),
        AMG_PRESET_SMATCH => Some(AmgPrecondOptions {
            aggregation: AMG_AGGREGATION_MATCHING,
            ..base
        }),
        AMG_PRESET_VMATCH => Some(AmgPrecondOptions {
            aggregation: AMG_AGGREGATION_MATCHING,
            smooth_prolongator: false,
            cycle: AMG_CYCLE_VARIABLE_V,
            pre_sweeps: 2,
            post_sweeps: 2,
            ..base
        }),
        _ => None,
    }
}

/// Fills `out` with the options of a named configuration (`AMG_PRESET_*`).
#[no_mangle]
pub unsafe extern "C" fn amg_precond_options_default(preset: u32, out: *mut AmgPrecondOptions) -> AmgStatus {
    guard(|| {
        let Some(out) = out.as_mut() else {
            return fail(AmgStatus::NullPointer, "options pointer is null");
        };
        match preset_options(preset) {
            Some(o) => {
                *out = o;
                AmgStatus::Ok
            }
            None => fail(AmgStatus::InvalidArgument, format!("unknown preset code {preset}")),
        }
    })
}

fn decode_options(o: &AmgPrecondOptions) -> Result<(AggregationConfig, CycleConfig), String> {
    let kind = match o.aggregation {
        AMG_AGGREGATION_VMB => AggregationKind::Vmb,
        AMG_AGGREGATION_MATCHING => AggregationKind::Matching,
        c => return Err(format!("unknown aggregation code {c}")),
    };
    let smoother = match o.smoother {
        AMG_SMOOTHER_L1JACOBI => SmootherKind::L1Jacobi,
        AMG_SMOOTHER_AINV => SmootherKind::Ainv {
            drop_tol: o.ainv_drop_tol,
        },
        c => return Err(format!("unknown smoother code {c}")),
    };
    let cycle = match o.cycle {
        AMG_CYCLE_V => CycleKind::V,
        AMG_CYCLE_VARIABLE_V => CycleKind::VariableV,
        c => return Err(format!("unknown cycle code {c}")),
    };
    let coarse = match o.coarse_solver {
        AMG_COARSE_PCG => CoarseSolver::Pcg(o.coarse_iterations),
        AMG_COARSE_SWEEPS => CoarseSolver::Sweeps(o.coarse_iterations),
        c => return Err(format!("unknown coarse solver code {c}")),
    };
    Ok((
        AggregationConfig {
            kind,
            theta: o.theta,
            sweeps: o.match_sweeps,
            smooth_prolongator: o.smooth_prolongator,
            near_kernel: None,
            max_levels: o.max_levels,
            coarse_size_target: o.coarse_size_target,
        },
        CycleConfig {
            cycle,
            pre_sweeps: o.pre_sweeps,
            post_sweeps: o.post_sweeps,
            smoother,
            coarse,
        },
    ))
}

/// Builds the hierarchy and its smoothers for a symmetric matrix with
/// positive diagonal. `opts` may be null for the VBM configuration.
#[no_mangle]
pub unsafe extern "C" fn amg_precond_build(
    a: *const AmgMatrix,
    opts: *const AmgPrecondOptions,
    out: *mut *mut AmgPrecond,
) -> AmgStatus {
    guard(|| {
        if out.is_null() {
            return fail(AmgStatus::NullPointer, "output handle pointer is null");
        }
        let Some(a) = a.as_ref() else {
            return fail(AmgStatus::NullPointer, "matrix handle is null");
        };
        let opts = match opts.as_ref() {
            Some(o) => *o,
            None => preset_options(AMG_PRESET_VBM).expect("VBM preset exists"),
        };
        let (agg, cyc) = match decode_options(&opts) {
            Ok(c) => c,
            Err(e) => return fail(AmgStatus::InvalidArgument, e),
        };
        let mut h = match build_hierarchy(&a.inner, &agg) {
            Ok(h) => h,
            Err(e) => return fail(AmgStatus::HierarchyError, e),
        };
        h.convert_format(a.inner.format(), DEFAULT_HACK_SIZE);
        if let Err(e) = build_smoothers(&mut h, &cyc) {
            return fail(AmgStatus::SmootherError, e);
        }
        *out = Box::into_raw(Box::new(AmgPrecond { hierarchy: h }));
        AmgStatus::Ok
    })
}

/// Replaces coefficients of the finest-level matrix and rebuilds the
/// smoothers, keeping the coarse levels.
#[no_mangle]
pub unsafe extern "C" fn amg_precond_update_fine(
    p: *mut AmgPrecond,
    count: usize,
    rows: *const usize,
    cols: *const usize,
    values: *const f64,
) -> AmgStatus {
    guard(|| {
        let Some(p) = p.as_mut() else {
            return fail(AmgStatus::NullPointer, "preconditioner handle is null");
        };
        let (Some(r), Some(c), Some(v)) = (slice_in(rows, count), slice_in(cols, count), slice_in(values, count))
        else {
            return fail(AmgStatus::NullPointer, "triple arrays must not be null");
        };
        let triples: Vec<_> = (0..count).map(|k| (r[k], c[k], v[k])).collect();
        if let Err(e) = p.hierarchy.update_fine_coefficients(&triples) {
            return fail(AmgStatus::SparseError, e);
        }
        let cfg = *p.hierarchy.smoothers().expect("built with smoothers").config();
        match build_smoothers(&mut p.hierarchy, &cfg) {
            Ok(()) => AmgStatus::Ok,
            Err(e) => fail(AmgStatus::SmootherError, e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn amg_precond_free(p: *mut AmgPrecond) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of levels; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn amg_precond_levels(p: *const AmgPrecond) -> usize {
    p.as_ref().map_or(0, |p| p.hierarchy.n_levels())
}

/// Operator complexity; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn amg_precond_operator_complexity(p: *const AmgPrecond) -> f64 {
    p.as_ref().map_or(0.0, |p| p.hierarchy.operator_complexity())
}

/// Unknowns on level `level`; 0 if out of range or null.
#[no_mangle]
pub unsafe extern "C" fn amg_precond_level_size(p: *const AmgPrecond, level: usize) -> usize {
    p.as_ref()
        .and_then(|p| p.hierarchy.levels().get(level))
        .map_or(0, |l| l.size())
}

/// z ← B r for one multigrid cycle; both vectors have length `n`.
#[no_mangle]
pub unsafe extern "C" fn amg_precond_apply(p: *const AmgPrecond, n: usize, r: *const f64, z: *mut f64) -> AmgStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return fail(AmgStatus::NullPointer, "preconditioner handle is null");
        };
        let size = p.hierarchy.level(0).size();
        if n != size {
            return fail(
                AmgStatus::InvalidArgument,
                format!("vector length {n}, expected {size}"),
            );
        }
        let (Some(r), Some(z)) = (slice_in(r, n), slice_out(z, n)) else {
            return fail(AmgStatus::NullPointer, "vector pointer is null");
        };
        let pc = match AmgPreconditioner::new(&p.hierarchy) {
            Ok(pc) => pc,
            Err(e) => return fail(AmgStatus::SmootherError, e),
        };
        match pc.apply_slice(r, z) {
            Ok(()) => AmgStatus::Ok,
            Err(e) => fail(AmgStatus::SmootherError, e),
        }
    })
}

/// Solves A x = b with CG or FCG (`AMG_METHOD_*`). `x` holds the initial
/// guess on entry and the solution on exit. `p` may be null for no
/// preconditioning. Returns [`AmgStatus::NotConverged`] when the iteration
/// cap is hit; `info` (optional) is filled in either case.
#[no_mangle]
pub unsafe extern "C" fn amg_solve(
    a: *const AmgMatrix,
    p: *const AmgPrecond,
    method: u32,
    n: usize,
    b: *const f64,
    x: *mut f64,
    tol: f64,
    max_iterations: usize,
    info: *mut AmgSolveInfo,
) -> AmgStatus {
    guard(|| {
        let Some(a) = a.as_ref() else {
            return fail(AmgStatus::NullPointer, "matrix handle is null");
        };
        if n != a.inner.n_rows() || n != a.inner.n_cols() {
            return fail(
                AmgStatus::InvalidArgument,
                format!(
                    "vector length {n} does not match a {}x{} matrix",
                    a.inner.n_rows(),
                    a.inner.n_cols()
                ),
            );
        }
        let (Some(b), Some(x)) = (slice_in(b, n), slice_out(x, n)) else {
            return fail(AmgStatus::NullPointer, "vector pointer is null");
        };
        let method = match method {
            AMG_METHOD_CG => KrylovMethod::Cg,
            AMG_METHOD_FCG => KrylovMethod::Fcg,
            c => return fail(AmgStatus::InvalidArgument, format!("unknown method code {c}")),
        };
        let cfg = SolverConfig {
            method,
            tol,
            max_iterations,
            restart_depth: 1,
        };
        let amg;
        let precond: &dyn Preconditioner<Vec<f64>> = match p.as_ref() {
            Some(p) => {
                amg = match AmgPreconditioner::new(&p.hierarchy) {
                    Ok(pc) => pc,
                    Err(e) => return fail(AmgStatus::SmootherError, e),
                };
                &amg
            }
            None => &IdentityPreconditioner,
        };
        let b = b.to_vec();
        let mut xv = x.to_vec();
        let result = match method {
            KrylovMethod::Cg => cg_solve(&a.inner, &b, precond, &cfg, &mut xv),
            KrylovMethod::Fcg => fcg_solve(&a.inner, &b, precond, &cfg, &mut xv),
        };
        x.copy_from_slice(&xv);
        let stats = match result {
            Ok(s) => s,
            Err(e @ SolveError::InvalidConfig(_)) => return fail(AmgStatus::InvalidArgument, e),
            Err(e) => return fail(AmgStatus::SolveError, e),
        };
        if let Some(info) = info.as_mut() {
            *info = AmgSolveInfo {
                iterations: stats.iterations,
                relative_residual: stats.final_relative_residual,
                converged: stats.converged,
                solve_time: stats.solve_time,
            };
        }
        if stats.converged {
            AmgStatus::Ok
        } else {
            fail(
                AmgStatus::NotConverged,
                format!(
                    "no convergence in {} iterations (relative residual {:e})",
                    stats.iterations, stats.final_relative_residual
                ),
            )
        }
    })
}
