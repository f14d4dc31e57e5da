//! C ABI over the twistlat library.
//!
//! Every fallible function returns a [`TwlStatus`] and writes results
//! through out-pointers. Objects are opaque handles released with their
//! `_free` function. After a non-`Ok` status, [`twl_last_error`] returns a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twistlat::hyp::H2Point;
use twistlat::lattice::{lattice_census, LatticeCensus};
use twistlat::torus::{intersection_number, twisted_length, MarkoffStructure, Slope, TwistSpec};
use twistlat::{curves, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotInUpperHalfPlane = 3,
    NotPrimitive = 4,
    InvalidMarkoff = 5,
    NotThick = 6,
    NumericDegradation = 7,
    InsufficientData = 8,
    Parse = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for TwlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotInUpperHalfPlane { .. } => TwlStatus::NotInUpperHalfPlane,
            Error::NotPrimitive { .. } => TwlStatus::NotPrimitive,
            Error::InvalidMarkoff { .. } => TwlStatus::InvalidMarkoff,
            Error::NotThick { .. } => TwlStatus::NotThick,
            Error::NumericDegradation(_) => TwlStatus::NumericDegradation,
            Error::InsufficientData(_) => TwlStatus::InsufficientData,
            Error::Parse(_) => TwlStatus::Parse,
            Error::Io(_) => TwlStatus::Io,
            Error::BadDeterminant(_) | Error::ZeroPower | Error::NonPositiveLength(_) | Error::InvalidArgument(_) => {
                TwlStatus::InvalidArgument
            }
        }
    }
}

/// Marked hyperbolic structure on the once-punctured torus.
pub struct TwlStructure(MarkoffStructure);

/// Twist lattice census at a point of the upper half-plane.
pub struct TwlCensus(LatticeCensus);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(TwlStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(TwlStatus::from(&e))
    }
}

fn null() -> Fail {
    set_error("null pointer argument".into());
    Fail(TwlStatus::NullPointer)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TwlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwlStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic".into());
            TwlStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

/// Message for the last failure on this thread; valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn twl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn twl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Structure from Markoff traces `(x, y, z)` on `(1,0), (0,1), (1,1)` with
/// thick-part bound `eps`.
///
/// # Safety
/// `out_h` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn twl_structure_new(x: f64, y: f64, z: f64, eps: f64, out_h: *mut *mut TwlStructure) -> TwlStatus {
    guard(|| {
        let o = out(out_h)?;
        let s = MarkoffStructure::new(x, y, z, eps)?;
        *o = Box::into_raw(Box::new(TwlStructure(s)));
        Ok(())
    })
}

/// The modular torus `(3, 3, 3)`.
///
/// # Safety
/// `out_h` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn twl_structure_modular(out_h: *mut *mut TwlStructure) -> TwlStatus {
    guard(|| {
        *out(out_h)? = Box::into_raw(Box::new(TwlStructure(MarkoffStructure::modular())));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from `twl_structure_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twl_structure_free(h: *mut TwlStructure) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Geodesic length of the slope `(p, q)`.
///
/// # Safety
/// `h` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn twl_structure_length(h: *const TwlStructure, p: i64, q: i64, len: *mut f64) -> TwlStatus {
    guard(|| {
        let x = get(h)?;
        let o = out(len)?;
        *o = x.0.length(Slope::new(p, q)?);
        Ok(())
    })
}

/// Length of the shortest simple closed geodesic.
///
/// # Safety
/// `h` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn twl_structure_systole(h: *const TwlStructure, len: *mut f64) -> TwlStatus {
    guard(|| {
        let x = get(h)?;
        *out(len)? = x.0.systole();
        Ok(())
    })
}

/// Number of simple closed geodesics of length at most `len`.
///
/// # Safety
/// `h` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn twl_count_scc(h: *const TwlStructure, len: f64, count: *mut u64) -> TwlStatus {
    guard(|| {
        let x = get(h)?;
        let o = out(count)?;
        if !(len > 0.0) {
            return Err(Error::NonPositiveLength(len).into());
        }
        *o = curves::count_scc(&x.0, len);
        Ok(())
    })
}

/// Number of integral multicurves of length at most `len`.
///
/// # Safety
/// `h` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn twl_count_multicurves(h: *const TwlStructure, len: f64, count: *mut u64) -> TwlStatus {
    guard(|| {
        let x = get(h)?;
        let o = out(count)?;
        if !(len > 0.0) {
            return Err(Error::NonPositiveLength(len).into());
        }
        *o = curves::count_multicurves(&x.0, len);
        Ok(())
    })
}

/// Length of `τ = (tp, tq)` after the twist `T_α^power`, `α = (ap, aq)`.
///
/// # Safety
/// `h` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn twl_twisted_length(
    h: *const TwlStructure,
    ap: i64,
    aq: i64,
    power: i64,
    tp: i64,
    tq: i64,
    len: *mut f64,
) -> TwlStatus {
    guard(|| {
        let x = get(h)?;
        let o = out(len)?;
        let t = TwistSpec::new(Slope::new(ap, aq)?, power)?;
        *o = twisted_length(&x.0, t, Slope::new(tp, tq)?);
        Ok(())
    })
}

/// Geometric intersection number of two slopes.
///
/// # Safety
/// `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twl_intersection_number(p1: i64, q1: i64, p2: i64, q2: i64, n: *mut u64) -> TwlStatus {
    guard(|| {
        let o = out(n)?;
        *o = intersection_number(Slope::new(p1, q1)?, Slope::new(p2, q2)?);
        Ok(())
    })
}

/// Exact-model census at `re + im·i` over `n` ascending radii.
///
/// # Safety
/// `radii` must point to `n` readable values and `out_h` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twl_census_new(
    re: f64,
    im: f64,
    radii: *const f64,
    n: usize,
    out_h: *mut *mut TwlCensus,
) -> TwlStatus {
    guard(|| {
        let o = out(out_h)?;
        if radii.is_null() && n > 0 {
            return Err(null());
        }
        let r = if n == 0 { &[][..] } else { std::slice::from_raw_parts(radii, n) };
        let c = lattice_census(H2Point::new(re, im)?, r)?;
        *o = Box::into_raw(Box::new(TwlCensus(c)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from `twl_census_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twl_census_free(h: *mut TwlCensus) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of radii in the census; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twl_census_len(h: *const TwlCensus) -> usize {
    h.as_ref().map_or(0, |c| c.0.radii.len())
}

/// Row `i`: radius, unit-twist count and all-powers count.
///
/// # Safety
/// `h` must be a live handle and the three out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn twl_census_row(
    h: *const TwlCensus,
    i: usize,
    radius: *mut f64,
    count_d: *mut u64,
    count_m: *mut u64,
) -> TwlStatus {
    guard(|| {
        let c = &get(h)?.0;
        let (r, d, m) = (out(radius)?, out(count_d)?, out(count_m)?);
        if i >= c.radii.len() {
            return Err(Error::InvalidArgument(format!("row {i} out of range 0..{}", c.radii.len())).into());
        }
        *r = c.radii[i];
        *d = c.counts_d[i];
        *m = c.counts_m[i];
        Ok(())
    })
}

/// Sets `*h` to null after freeing; convenience for callers that reuse slots.
///
/// # Safety
/// `h` must be null or point to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn twl_structure_release(h: *mut *mut TwlStructure) {
    if let Some(slot) = h.as_mut() {
        twl_structure_free(*slot);
        *slot = ptr::null_mut();
    }
}
