//! C ABI for `chainring`.
//!
//! Every fallible function returns a [`ChainringStatus`]; on failure a
//! description is available from [`chainring_last_error`] until the next call
//! on the same thread. Strings returned through out-parameters are owned by
//! the caller and must be released with [`chainring_string_free`]; ring
//! handles with [`chainring_ring_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chainring::density::{density_bounds, limit_density_length};
use chainring::modcount::{rect_unimodular_probability, SubmoduleCounter};
use chainring::qseries::ratio_to_f64;
use chainring::{ChainRingSpec, Error, ExactRatio, ModuleTypeCounts, TruncationPolicy};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainringStatus {
    Ok = 0,
    InvalidParameter = 1,
    BudgetExceeded = 2,
    NonConvergent = 3,
    IdentityViolation = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque handle for a finite chain ring with residue field size `q` and
/// nilpotency index `s`.
pub struct ChainringRing {
    spec: ChainRingSpec,
}

/// Limit density of free submodules with its Andrews-Gordon bounds; each
/// `*_error` is a certified absolute error.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChainringDensity {
    pub lower: f64,
    pub lower_error: f64,
    pub value: f64,
    pub value_error: f64,
    pub upper: f64,
    pub upper_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> ChainringStatus {
    match e {
        Error::InvalidParameter(_) => ChainringStatus::InvalidParameter,
        Error::BudgetExceeded { .. } => ChainringStatus::BudgetExceeded,
        Error::NonConvergent(_) => ChainringStatus::NonConvergent,
        Error::IdentityViolation(_) => ChainringStatus::IdentityViolation,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), ChainringStatusError>) -> ChainringStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChainringStatus::Ok,
        Ok(Err(ChainringStatusError::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(ChainringStatusError::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            ChainringStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic");
            ChainringStatus::Panic
        }
    }
}

enum ChainringStatusError {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for ChainringStatusError {
    fn from(e: Error) -> Self {
        ChainringStatusError::Lib(e)
    }
}

/// # Safety
/// `p` must be null or valid for reads of `T` for the returned lifetime.
unsafe fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, ChainringStatusError> {
    p.as_ref().ok_or(ChainringStatusError::Null(what))
}

/// # Safety
/// `out` must be null or valid for writes of `T`.
unsafe fn write_out<T>(
    out: *mut T,
    value: T,
    what: &'static str,
) -> Result<(), ChainringStatusError> {
    if out.is_null() {
        return Err(ChainringStatusError::Null(what));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// As [`write_out`].
unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), ChainringStatusError> {
    let c = CString::new(s).expect("decimal strings contain no nul");
    write_out(out, c.into_raw(), "string out-parameter")
}

/// Creates a ring handle; `q` must be a prime power and `s >= 1`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_ring_new(
    q: u64,
    s: u32,
    out: *mut *mut ChainringRing,
) -> ChainringStatus {
    guard(|| {
        let spec = ChainRingSpec::new(q, s as usize)?;
        write_out(
            out,
            Box::into_raw(Box::new(ChainringRing { spec })),
            "ring out-parameter",
        )
    })
}

/// Releases a ring handle; null is ignored.
///
/// # Safety
/// `ring` must be null or a handle from [`chainring_ring_new`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn chainring_ring_free(ring: *mut ChainringRing) {
    if !ring.is_null() {
        // SAFETY: the pointer came from chainring_ring_new and is freed once
        drop(unsafe { Box::from_raw(ring) });
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn chainring_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the pointer came from CString::into_raw in this library
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn chainring_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn chainring_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains nul"),
        };
    VERSION.as_ptr()
}

/// Number of submodules of `R^n` of type `(counts[0], …, counts[len-1])`,
/// where `len` must equal `s`, written as a decimal string.
///
/// # Safety
/// `ring` must be null or a live handle, `counts` must point to `len`
/// readable values (or be null when `len` is 0), and `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_count_by_type(
    ring: *const ChainringRing,
    n: u64,
    counts: *const u64,
    len: usize,
    out: *mut *mut c_char,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        if counts.is_null() && len > 0 {
            return Err(ChainringStatusError::Null("counts"));
        }
        let slice = if len == 0 {
            &[][..]
        } else {
            // SAFETY: caller guarantees `counts` points to `len` values
            unsafe { std::slice::from_raw_parts(counts, len) }
        };
        if len != ring.spec.s() {
            return Err(Error::InvalidParameter(format!(
                "type has {len} entries but s = {}",
                ring.spec.s()
            ))
            .into());
        }
        let t = ModuleTypeCounts::new(slice.to_vec())?;
        write_string(
            out,
            SubmoduleCounter::new(n, ring.spec)
                .count_by_type(&t)?
                .to_string(),
        )
    })
}

/// Number of free submodules of rank `rank` in `R^n`, as a decimal string.
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_count_free(
    ring: *const ChainringRing,
    n: u64,
    rank: u64,
    out: *mut *mut c_char,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        write_string(
            out,
            SubmoduleCounter::new(n, ring.spec)
                .count_free(rank)?
                .to_string(),
        )
    })
}

/// Number of submodules of length `ell` in `R^n`, as a decimal string.
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_count_by_length(
    ring: *const ChainringRing,
    n: u64,
    ell: u64,
    out: *mut *mut c_char,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        write_string(
            out,
            SubmoduleCounter::new(n, ring.spec)
                .total_by_length(ell)?
                .to_string(),
        )
    })
}

/// # Safety
/// `value` as [`write_out`]; `exact` null or valid for writes.
unsafe fn write_ratio(
    r: &ExactRatio,
    value: *mut f64,
    exact: *mut *mut c_char,
) -> Result<(), ChainringStatusError> {
    write_out(value, ratio_to_f64(r), "value out-parameter")?;
    if !exact.is_null() {
        write_string(exact, r.to_string())?;
    }
    Ok(())
}

/// Fraction of free submodules among submodules of length `ell` in `R^n`.
/// `exact` (optional) receives the fraction as `"num/den"`.
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_prob_free_given_length(
    ring: *const ChainringRing,
    n: u64,
    ell: u64,
    value: *mut f64,
    exact: *mut *mut c_char,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        write_ratio(
            &SubmoduleCounter::new(n, ring.spec).psi_free_given_length(ell)?,
            value,
            exact,
        )
    })
}

/// Fraction of free submodules among submodules of rank `rank` in `R^n`.
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_prob_free_given_rank(
    ring: *const ChainringRing,
    n: u64,
    rank: u64,
    value: *mut f64,
    exact: *mut *mut c_char,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        write_ratio(
            &SubmoduleCounter::new(n, ring.spec).phi_free_given_rank(rank)?,
            value,
            exact,
        )
    })
}

/// Probability that a uniform `k × n` matrix over the ring is rectangular
/// unimodular.
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_prob_unimodular(
    ring: *const ChainringRing,
    k: u64,
    n: u64,
    value: *mut f64,
    exact: *mut *mut c_char,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        write_ratio(&rect_unimodular_probability(k, n, ring.spec)?, value, exact)
    })
}

/// Limit density of free submodules at fixed relative length, with its
/// certified absolute error.
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_limit_density(
    ring: *const ChainringRing,
    value: *mut f64,
    error: *mut f64,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        let d = limit_density_length(ring.spec, &TruncationPolicy::from_env()?)?;
        write_out(value, d.value, "value out-parameter")?;
        write_out(error, d.abs_error, "error out-parameter")
    })
}

/// Limit density with its lower and upper bounds (requires `s >= 2`).
///
/// # Safety
/// `ring` must be null or a live handle from [`chainring_ring_new`], and every
/// out-parameter must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chainring_density_bounds(
    ring: *const ChainringRing,
    out: *mut ChainringDensity,
) -> ChainringStatus {
    guard(|| {
        let ring = non_null(ring, "ring")?;
        let r = density_bounds(ring.spec, &TruncationPolicy::from_env()?)?;
        write_out(
            out,
            ChainringDensity {
                lower: r.lower_bound.value,
                lower_error: r.lower_bound.abs_error,
                value: r.value.value,
                value_error: r.value.abs_error,
                upper: r.upper_bound.value,
                upper_error: r.upper_bound.abs_error,
            },
            "density out-parameter",
        )
    })
}
