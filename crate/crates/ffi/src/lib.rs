//! C ABI over `cvqkd_rec`.
//!
//! Handles are opaque and owned by the caller; every `*_new`/`*_build`/
//! `*_load` pairs with a `*_free`. Functions return a [`CvqkdStatus`] and
//! write results through out-pointers. Bit arrays are one byte per bit.
//! Panics are caught at the boundary and reported as `CVQKD_INTERNAL`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::slice;

use cvqkd_rec::decoder::{self, DecodeJob};
use cvqkd_rec::degree_dist::{self, DegreeDistribution};
use cvqkd_rec::matrix::ParityCheckMatrix;
use cvqkd_rec::multidim::{self, Block, OrthogonalFamily, DIM};
use cvqkd_rec::{peg, rate_adapt, Error};

#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvqkdStatus {
    CVQKD_OK = 0,
    CVQKD_NULL_POINTER = 1,
    CVQKD_INVALID_ARGUMENT = 2,
    CVQKD_LENGTH_MISMATCH = 3,
    CVQKD_DOMAIN = 4,
    CVQKD_CONSTRUCTION = 5,
    CVQKD_PARSE = 6,
    CVQKD_IO = 7,
    CVQKD_INTERNAL = 8,
}

use CvqkdStatus::*;

/// Opaque degree distribution.
pub struct CvqkdDistribution(DegreeDistribution);

/// Opaque parity-check matrix.
pub struct CvqkdMatrix(ParityCheckMatrix);

fn status_of(e: &Error) -> CvqkdStatus {
    match e {
        Error::InvalidDistribution(_)
        | Error::UnknownPreset(_)
        | Error::MissingThreshold
        | Error::InvalidMatrix(_)
        | Error::NotUnitNorm(_)
        | Error::Config(_) => CVQKD_INVALID_ARGUMENT,
        Error::LengthMismatch { .. } => CVQKD_LENGTH_MISMATCH,
        Error::Domain(_) | Error::InfeasiblePlan(_) => CVQKD_DOMAIN,
        Error::Construction(_) => CVQKD_CONSTRUCTION,
        Error::Parse(_) => CVQKD_PARSE,
        Error::Io(_) => CVQKD_IO,
    }
}

fn guard<F: FnOnce() -> Result<(), CvqkdStatus>>(f: F) -> CvqkdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CVQKD_OK,
        Ok(Err(s)) => s,
        Err(_) => CVQKD_INTERNAL,
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, CvqkdStatus>;
}

impl<T> OrStatus<T> for cvqkd_rec::Result<T> {
    fn or_status(self) -> Result<T, CvqkdStatus> {
        self.map_err(|e| status_of(&e))
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, CvqkdStatus> {
    if p.is_null() {
        return Err(CVQKD_NULL_POINTER);
    }
    CStr::from_ptr(p).to_str().map_err(|_| CVQKD_INVALID_ARGUMENT)
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize) -> Result<&'a [T], CvqkdStatus> {
    if p.is_null() {
        return if len == 0 { Ok(&[]) } else { Err(CVQKD_NULL_POINTER) };
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], CvqkdStatus> {
    if p.is_null() {
        return if len == 0 { Ok(&mut []) } else { Err(CVQKD_NULL_POINTER) };
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, CvqkdStatus> {
    p.as_ref().ok_or(CVQKD_NULL_POINTER)
}

unsafe fn write_out<T>(p: *mut T, value: T) -> Result<(), CvqkdStatus> {
    if p.is_null() {
        return Err(CVQKD_NULL_POINTER);
    }
    p.write(value);
    Ok(())
}

unsafe fn block_arg(p: *const f64) -> Result<Block, CvqkdStatus> {
    let s = slice_arg(p, DIM)?;
    Ok(s.try_into().expect("DIM elements"))
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn cvqkd_status_message(status: CvqkdStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CVQKD_OK => c"ok",
        CVQKD_NULL_POINTER => c"null pointer argument",
        CVQKD_INVALID_ARGUMENT => c"invalid argument",
        CVQKD_LENGTH_MISMATCH => c"length mismatch",
        CVQKD_DOMAIN => c"argument outside the valid domain",
        CVQKD_CONSTRUCTION => c"matrix construction failed",
        CVQKD_PARSE => c"parse error",
        CVQKD_IO => c"i/o error",
        CVQKD_INTERNAL => c"internal error",
    };
    s.as_ptr()
}

/// Looks up a preset by name (`rate_0_1`, `0.05`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_distribution_preset(
    name: *const c_char,
    out: *mut *mut CvqkdDistribution,
) -> CvqkdStatus {
    guard(|| {
        let d = degree_dist::preset_by_name(str_arg(name)?).or_status()?;
        write_out(out, Box::into_raw(Box::new(CvqkdDistribution(d))))
    })
}

/// Parses the text form of a distribution.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_distribution_parse(
    text: *const c_char,
    out: *mut *mut CvqkdDistribution,
) -> CvqkdStatus {
    guard(|| {
        let d: DegreeDistribution = str_arg(text)?.parse().or_status()?;
        d.validate().or_status()?;
        write_out(out, Box::into_raw(Box::new(CvqkdDistribution(d))))
    })
}

/// Design rate `Σν − Σμ`.
///
/// # Safety
/// `dist` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_distribution_rate(
    dist: *const CvqkdDistribution,
    out: *mut f64,
) -> CvqkdStatus {
    guard(|| {
        let d = ref_arg(dist)?;
        write_out(out, degree_dist::compute_rate(&d.0))
    })
}

/// # Safety
/// `dist` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_distribution_free(dist: *mut CvqkdDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Builds an `n`-column matrix by progressive edge growth.
///
/// # Safety
/// `dist` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_matrix_build(
    dist: *const CvqkdDistribution,
    n: usize,
    seed: u64,
    out: *mut *mut CvqkdMatrix,
) -> CvqkdStatus {
    guard(|| {
        let d = ref_arg(dist)?;
        let h = peg::build_matrix(&d.0, n, seed).or_status()?;
        write_out(out, Box::into_raw(Box::new(CvqkdMatrix(h))))
    })
}

/// Loads an alist file (and its `.meta` sidecar if present).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_matrix_load(
    path: *const c_char,
    out: *mut *mut CvqkdMatrix,
) -> CvqkdStatus {
    guard(|| {
        let h = ParityCheckMatrix::load(Path::new(str_arg(path)?)).or_status()?;
        write_out(out, Box::into_raw(Box::new(CvqkdMatrix(h))))
    })
}

/// Writes the alist file and its `.meta` sidecar.
///
/// # Safety
/// `matrix` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_matrix_save(
    matrix: *const CvqkdMatrix,
    path: *const c_char,
) -> CvqkdStatus {
    guard(|| {
        let h = ref_arg(matrix)?;
        h.0.save(Path::new(str_arg(path)?)).or_status()
    })
}

/// # Safety
/// `matrix` must come from this library; `n` and `m` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_matrix_dims(
    matrix: *const CvqkdMatrix,
    n: *mut usize,
    m: *mut usize,
) -> CvqkdStatus {
    guard(|| {
        let h = ref_arg(matrix)?;
        write_out(n, h.0.n())?;
        write_out(m, h.0.m())
    })
}

/// `H·bits` over GF(2).
///
/// # Safety
/// `bits` must hold `n` bytes and `out` `m` bytes.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_matrix_syndrome(
    matrix: *const CvqkdMatrix,
    bits: *const u8,
    n: usize,
    out: *mut u8,
    m: usize,
) -> CvqkdStatus {
    guard(|| {
        let h = ref_arg(matrix)?;
        if n != h.0.n() {
            return Err(CVQKD_LENGTH_MISMATCH);
        }
        if m != h.0.m() {
            return Err(CVQKD_LENGTH_MISMATCH);
        }
        let s = h.0.syndrome(slice_arg(bits, n)?).or_status()?;
        slice_out(out, m)?.copy_from_slice(&s);
        Ok(())
    })
}

/// Sum-product decoding toward `syndrome`.
///
/// `pinned` may be NULL; otherwise it holds `n` flags and pinned positions
/// must carry LLRs of exactly ±30. On return `bits_out` holds the estimate
/// and `success` is 1 iff it satisfies the syndrome. A failed decode is not
/// an error.
///
/// # Safety
/// Array arguments must hold the stated number of elements; out-pointers
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_decode(
    matrix: *const CvqkdMatrix,
    llrs: *const f64,
    n: usize,
    syndrome: *const u8,
    m: usize,
    pinned: *const u8,
    max_iters: usize,
    bits_out: *mut u8,
    iterations: *mut usize,
    success: *mut u8,
) -> CvqkdStatus {
    guard(|| {
        let h = &ref_arg(matrix)?.0;
        let llrs = slice_arg(llrs, n)?;
        let syndrome = slice_arg(syndrome, m)?;
        let mask: Option<Vec<bool>> = if pinned.is_null() {
            None
        } else {
            Some(slice_arg(pinned, n)?.iter().map(|&b| b != 0).collect())
        };
        let mut job = DecodeJob::new(h, llrs, syndrome).max_iters(max_iters);
        if let Some(mask) = mask.as_deref() {
            job = job.pinned(mask);
        }
        let outcome = decoder::decode(&job).or_status()?;
        slice_out(bits_out, n)?.copy_from_slice(&outcome.bits);
        write_out(iterations, outcome.iterations_used)?;
        write_out(success, u8::from(outcome.success))
    })
}

/// # Safety
/// `matrix` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_matrix_free(matrix: *mut CvqkdMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// `(n − m − s)/(n − p − s)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_adapted_rate(
    n: usize,
    m: usize,
    s: usize,
    p: usize,
    out: *mut f64,
) -> CvqkdStatus {
    guard(|| write_out(out, rate_adapt::adapted_rate(n, m, s, p).or_status()?))
}

/// `beta · ½log₂(1 + snr)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_optimal_rate(snr: f64, beta: f64, out: *mut f64) -> CvqkdStatus {
    guard(|| write_out(out, rate_adapt::optimal_rate(snr, beta).or_status()?))
}

/// Coefficients `α` of the orthogonal map taking the unit vector `y_unit`
/// to `u`.
///
/// # Safety
/// Each pointer must address 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_map_coefficients(
    y_unit: *const f64,
    u: *const f64,
    alpha_out: *mut f64,
) -> CvqkdStatus {
    guard(|| {
        let fam = OrthogonalFamily::octonion();
        let alpha = multidim::map_coefficients(&block_arg(y_unit)?, &block_arg(u)?, &fam).or_status()?;
        slice_out(alpha_out, DIM)?.copy_from_slice(&alpha);
        Ok(())
    })
}

/// `v = M(α)·x_unit`.
///
/// # Safety
/// Each pointer must address 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_apply_mapping(
    x_unit: *const f64,
    alpha: *const f64,
    v_out: *mut f64,
) -> CvqkdStatus {
    guard(|| {
        let fam = OrthogonalFamily::octonion();
        let v = multidim::apply_mapping(&block_arg(x_unit)?, &block_arg(alpha)?, &fam).or_status()?;
        slice_out(v_out, DIM)?.copy_from_slice(&v);
        Ok(())
    })
}

/// Per-coordinate LLRs of a mapped block; positive means bit 0.
///
/// # Safety
/// `v` and `out` must each address 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_block_llrs(
    v: *const f64,
    snr: f64,
    x_norm: f64,
    y_norm: f64,
    out: *mut f64,
) -> CvqkdStatus {
    guard(|| {
        let l = multidim::block_llrs(&block_arg(v)?, snr, x_norm, y_norm);
        slice_out(out, DIM)?.copy_from_slice(&l);
        Ok(())
    })
}
