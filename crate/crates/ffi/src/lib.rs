//! C ABI over `ompx`.
//!
//! Every fallible call returns an [`OmpxStatus`]; on failure a description is
//! available from [`ompx_last_error`] on the same thread. Objects cross the
//! boundary as opaque handles that the caller releases with the matching
//! `_free` function. Matrices are exchanged as row-major `double` buffers
//! whose capacity the caller passes in elements. Atom indices are 1-based
//! flat indices `n (i - 1) + j`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ompx::linalg::{stretch, DenseMatrix};
use ompx::recovery::{omega_atom_norms, omp1d, omp2d, OmpConfig, Termination};
use ompx::sensing::{build_omega, dct_matrix, Dictionary, RngSeed};
use ompx::signalgen::{make_instance, Instance};
use ompx::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmpxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    /// The selected atoms became linearly dependent; recovery stopped.
    DegenerateAtomSet = 4,
    /// The explicit 1D dictionary would exceed the memory cap.
    MemoryCap = 5,
    BufferTooSmall = 6,
    Io = 7,
    Internal = 8,
}

/// Why a recovery run stopped.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmpxTermination {
    SparsityReached = 0,
    ResidualBelowTolerance = 1,
    AtomsExhausted = 2,
}

/// Multiply-add counts per phase of a recovery run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OmpxFlops {
    pub project: u64,
    pub weights: u64,
    pub residual: u64,
}

/// A generated problem instance: dictionary, sparse truth, and samples.
pub struct OmpxInstance {
    inner: Instance,
}

/// Output of one recovery run.
pub struct OmpxResult {
    n: usize,
    selected: Vec<usize>,
    weights: Vec<f64>,
    residual_norms: Vec<f64>,
    coefficients: Vec<f64>,
    flops: OmpxFlops,
    termination: OmpxTermination,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> OmpxStatus {
    match err {
        Error::Shape { .. } | Error::Dimension(_) => OmpxStatus::ShapeMismatch,
        Error::InvalidArgument(_) | Error::NotSymmetric { .. } | Error::Parse { .. } => {
            OmpxStatus::InvalidArgument
        }
        Error::DegenerateAtomSet { .. } | Error::RecoveryAborted { .. } => {
            OmpxStatus::DegenerateAtomSet
        }
        Error::MemoryCap { .. } => OmpxStatus::MemoryCap,
        Error::Io { .. } | Error::Csv { .. } => OmpxStatus::Io,
    }
}

struct Failure(OmpxStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null_arg(name: &str) -> Failure {
    Failure(OmpxStatus::NullPointer, format!("{name} is NULL"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OmpxStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OmpxStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {msg}"));
            OmpxStatus::Internal
        }
    }
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, capacity: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null_arg("buffer"));
    }
    if capacity < src.len() {
        return Err(Failure(
            OmpxStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize) -> Result<DenseMatrix, Failure> {
    if data.is_null() {
        return Err(null_arg("matrix data"));
    }
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Failure(OmpxStatus::InvalidArgument, "matrix size overflows".into()))?;
    let values = std::slice::from_raw_parts(data, len).to_vec();
    Ok(DenseMatrix::from_vec(rows, cols, values)?)
}

fn config(k: usize, tol: f64) -> OmpConfig {
    OmpConfig::new(k).with_tol(tol)
}

fn termination(t: Termination) -> OmpxTermination {
    match t {
        Termination::SparsityReached => OmpxTermination::SparsityReached,
        Termination::ResidualBelowTolerance => OmpxTermination::ResidualBelowTolerance,
        Termination::AtomsExhausted => OmpxTermination::AtomsExhausted,
    }
}

fn run_2d(dict: &Dictionary, y: &DenseMatrix, k: usize, tol: f64) -> Result<OmpxResult, Failure> {
    let n = dict.n();
    let r = omp2d(dict, y, &config(k, tol))?;
    Ok(OmpxResult {
        n,
        selected: r.selected.iter().map(|a| a.flat(n)).collect(),
        weights: r.weights.into_vec(),
        residual_norms: r.residual_norms,
        coefficients: r.coefficients.into_vec(),
        flops: OmpxFlops {
            project: r.flops.project,
            weights: r.flops.weights,
            residual: r.flops.residual,
        },
        termination: termination(r.termination),
    })
}

fn run_1d(
    dict: &Dictionary,
    y: &DenseMatrix,
    k: usize,
    tol: f64,
    memory_cap_bytes: u64,
) -> Result<OmpxResult, Failure> {
    let cap = (memory_cap_bytes > 0).then_some(memory_cap_bytes);
    let omega = build_omega(dict, cap)?;
    let rho = omega_atom_norms(&omega);
    let r = omp1d(&omega, &rho, &stretch(y), &config(k, tol))?;
    Ok(OmpxResult {
        n: dict.n(),
        selected: r.selected,
        weights: r.weights.into_vec(),
        residual_norms: r.residual_norms,
        coefficients: r.coefficients.into_vec(),
        flops: OmpxFlops {
            project: r.flops.project,
            weights: r.flops.weights,
            residual: r.flops.residual,
        },
        termination: termination(r.termination),
    })
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ompx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL if the last call
/// succeeded. Valid until the next `ompx_` call on the same thread.
#[no_mangle]
pub extern "C" fn ompx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Generates an instance: orthonormal DCT transform, Gaussian sensing matrix,
/// and a `k`-sparse `n × n` signal, all derived from `seed`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_new(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    out: *mut *mut OmpxInstance,
) -> OmpxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let inner = make_instance(n, m, k, RngSeed(seed), false)?;
        store(out, OmpxInstance { inner });
        Ok(())
    })
}

/// # Safety
/// `instance` must be NULL or a handle from [`ompx_instance_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_free(instance: *mut OmpxInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Writes the side length `n`, sample size `m`, and sparsity `k`. Any output
/// pointer may be NULL.
///
/// # Safety
/// `instance` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_dims(
    instance: *const OmpxInstance,
    n: *mut usize,
    m: *mut usize,
    k: *mut usize,
) -> OmpxStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        let c = &inst.inner.config;
        for (p, v) in [(n, c.n), (m, c.m), (k, c.k)] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Copies the `m × m` sample matrix `Y`.
///
/// # Safety
/// `instance` must be a live handle; `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_copy_y(
    instance: *const OmpxInstance,
    buf: *mut f64,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        copy_out(inst.inner.y.as_slice(), buf, capacity)
    })
}

/// Copies the `m × n` effective dictionary `A`.
///
/// # Safety
/// `instance` must be a live handle; `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_copy_a(
    instance: *const OmpxInstance,
    buf: *mut f64,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        copy_out(inst.inner.dict.matrix().as_slice(), buf, capacity)
    })
}

/// Copies the true `n × n` sparse signal `Z`.
///
/// # Safety
/// `instance` must be a live handle; `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_copy_z(
    instance: *const OmpxInstance,
    buf: *mut f64,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        copy_out(inst.inner.z_true.to_dense().as_slice(), buf, capacity)
    })
}

/// Recovers an instance with 2D-OMP.
///
/// # Safety
/// `instance` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_omp2d(
    instance: *const OmpxInstance,
    k: usize,
    tol: f64,
    out: *mut *mut OmpxResult,
) -> OmpxStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        store(out, run_2d(&inst.inner.dict, &inst.inner.y, k, tol)?);
        Ok(())
    })
}

/// Recovers an instance with 1D-OMP over the explicit `m² × n²` dictionary.
/// `memory_cap_bytes == 0` means no cap.
///
/// # Safety
/// `instance` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ompx_instance_omp1d(
    instance: *const OmpxInstance,
    k: usize,
    tol: f64,
    memory_cap_bytes: u64,
    out: *mut *mut OmpxResult,
) -> OmpxStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null_arg("instance"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        store(out, run_1d(&inst.inner.dict, &inst.inner.y, k, tol, memory_cap_bytes)?);
        Ok(())
    })
}

/// 2D-OMP on caller data: `a` is `m × n`, `y` is `m × m`, both row-major.
///
/// # Safety
/// `a` must hold `m * n` doubles, `y` must hold `m * m` doubles, and `out`
/// must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ompx_omp2d(
    a: *const f64,
    m: usize,
    n: usize,
    y: *const f64,
    k: usize,
    tol: f64,
    out: *mut *mut OmpxResult,
) -> OmpxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let dict = Dictionary::from_matrix(read_matrix(a, m, n)?);
        let y = read_matrix(y, m, m)?;
        store(out, run_2d(&dict, &y, k, tol)?);
        Ok(())
    })
}

/// 1D-OMP on caller data; see [`ompx_omp2d`] for the layout and
/// [`ompx_instance_omp1d`] for the cap.
///
/// # Safety
/// As for [`ompx_omp2d`].
#[no_mangle]
pub unsafe extern "C" fn ompx_omp1d(
    a: *const f64,
    m: usize,
    n: usize,
    y: *const f64,
    k: usize,
    tol: f64,
    memory_cap_bytes: u64,
    out: *mut *mut OmpxResult,
) -> OmpxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let dict = Dictionary::from_matrix(read_matrix(a, m, n)?);
        let y = read_matrix(y, m, m)?;
        store(out, run_1d(&dict, &y, k, tol, memory_cap_bytes)?);
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a handle from a recovery call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_free(result: *mut OmpxResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of completed iterations; also the length of the selection, weight,
/// and residual-norm arrays. Returns 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_iterations(result: *const OmpxResult) -> usize {
    result.as_ref().map_or(0, |r| r.selected.len())
}

/// Side length `n`; the coefficient matrix holds `n * n` values. Returns 0
/// for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_n(result: *const OmpxResult) -> usize {
    result.as_ref().map_or(0, |r| r.n)
}

/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_termination(
    result: *const OmpxResult,
    out: *mut OmpxTermination,
) -> OmpxStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null_arg("result"))?;
        let out = out.as_mut().ok_or_else(|| null_arg("out"))?;
        *out = r.termination;
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_flops(
    result: *const OmpxResult,
    out: *mut OmpxFlops,
) -> OmpxStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null_arg("result"))?;
        let out = out.as_mut().ok_or_else(|| null_arg("out"))?;
        *out = r.flops;
        Ok(())
    })
}

/// Copies the selected atoms in selection order as 1-based flat indices.
///
/// # Safety
/// `result` must be a live handle; `buf` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_copy_selected(
    result: *const OmpxResult,
    buf: *mut usize,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null_arg("result"))?;
        if buf.is_null() {
            return Err(null_arg("buffer"));
        }
        if capacity < r.selected.len() {
            return Err(Failure(
                OmpxStatus::BufferTooSmall,
                format!("buffer holds {capacity} values, {} needed", r.selected.len()),
            ));
        }
        ptr::copy_nonoverlapping(r.selected.as_ptr(), buf, r.selected.len());
        Ok(())
    })
}

/// Copies the final weights, aligned with the selection.
///
/// # Safety
/// `result` must be a live handle; `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_copy_weights(
    result: *const OmpxResult,
    buf: *mut f64,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null_arg("result"))?;
        copy_out(&r.weights, buf, capacity)
    })
}

/// Copies the residual norm after each iteration.
///
/// # Safety
/// `result` must be a live handle; `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_copy_residual_norms(
    result: *const OmpxResult,
    buf: *mut f64,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null_arg("result"))?;
        copy_out(&r.residual_norms, buf, capacity)
    })
}

/// Copies the recovered `n × n` coefficient matrix.
///
/// # Safety
/// `result` must be a live handle; `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_result_copy_coefficients(
    result: *const OmpxResult,
    buf: *mut f64,
    capacity: usize,
) -> OmpxStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null_arg("result"))?;
        copy_out(&r.coefficients, buf, capacity)
    })
}

/// Writes the orthonormal `n × n` DCT-II matrix.
///
/// # Safety
/// `buf` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ompx_dct_matrix(n: usize, buf: *mut f64, capacity: usize) -> OmpxStatus {
    guard(|| copy_out(dct_matrix(n)?.as_slice(), buf, capacity))
}
