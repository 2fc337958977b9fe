//! C ABI for lch-core.
//!
//! Objects are opaque handles created by `*_from_*` functions and released
//! with the matching `*_free`. Every fallible call returns an [`LchStatus`];
//! on failure [`lch_last_error`] describes what went wrong on the calling
//! thread. Strings returned to the caller are released with
//! [`lch_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lch_core::augment::{enumerate_augmentations, is_augmentation, Augmentation};
use lch_core::diagram::{diagram_to_dga, parse_diagram, DiscSearch};
use lch_core::formula::{surgery_formula, LoadedFixture};
use lch_core::io::{dga_from_json, dga_to_json};
use lch_core::linearized::{bilinearized_complex, homology_f2, Ranks};
use lch_core::{Error, FreeDga};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LchStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The input was rejected (parse error, unknown name, bad shape).
    InvalidInput = 3,
    /// The input was accepted but the computation failed or hit a budget.
    ComputationFailed = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// A DGA over F2.
pub struct LchDga {
    inner: FreeDga,
}

/// An augmentation of a particular DGA.
pub struct LchAugmentation {
    inner: Augmentation,
    generators: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LchRanks {
    pub h0: usize,
    pub h1: usize,
}

impl From<Ranks> for LchRanks {
    fn from(r: Ranks) -> Self {
        LchRanks { h0: r.h0, h1: r.h1 }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LchFormulaReport {
    pub twisted: LchRanks,
    pub quotient: LchRanks,
    /// Only meaningful when `has_resolved` is set.
    pub resolved: LchRanks,
    pub has_resolved: bool,
    pub holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LchStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_input() { LchStatus::InvalidInput } else { LchStatus::ComputationFailed };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LchStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LchStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LchStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(LchStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(LchStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn lch_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lch_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn lch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a DGA from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_from_json(json: *const c_char, out: *mut *mut LchDga) -> LchStatus {
    guard(|| {
        let dga = dga_from_json(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(LchDga { inner: dga })), "out")
    })
}

/// Derives the DGA of a diagram given as JSON. A `disc_budget` of 0 uses
/// the default search budget.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_from_diagram_json(json: *const c_char, disc_budget: u64, out: *mut *mut LchDga) -> LchStatus {
    guard(|| {
        let d = parse_diagram(text(json, "json")?)?;
        let search = if disc_budget == 0 { DiscSearch::default() } else { DiscSearch { budget: disc_budget } };
        let dga = diagram_to_dga(&d, &search)?;
        put(out, Box::into_raw(Box::new(LchDga { inner: dga })), "out")
    })
}

/// # Safety
/// `dga` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_free(dga: *mut LchDga) {
    if !dga.is_null() {
        drop(Box::from_raw(dga));
    }
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `dga` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_generator_count(dga: *const LchDga) -> usize {
    dga.as_ref().map_or(0, |d| d.inner.len())
}

/// Number of link components, or 0 for a null handle.
///
/// # Safety
/// `dga` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_component_count(dga: *const LchDga) -> usize {
    dga.as_ref().map_or(0, |d| d.inner.components().len())
}

/// # Safety
/// `dga` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_check_d_squared(dga: *const LchDga, passed: *mut bool) -> LchStatus {
    guard(|| {
        let dga = get(dga, "dga")?;
        put(passed, dga.inner.check_d_squared().passed(), "passed")
    })
}

/// Serializes the DGA; release the string with `lch_string_free`.
///
/// # Safety
/// `dga` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_dga_to_json(dga: *const LchDga, out: *mut *mut c_char) -> LchStatus {
    guard(|| {
        let dga = get(dga, "dga")?;
        let s = CString::new(dga_to_json(&dga.inner)).expect("JSON has no NUL bytes");
        put(out, s.into_raw(), "out")
    })
}

/// Counts augmentations by exhaustive search over at most `cap` degree-0
/// generators.
///
/// # Safety
/// `dga` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_augmentation_count(dga: *const LchDga, cap: usize, count: *mut usize) -> LchStatus {
    guard(|| {
        let dga = get(dga, "dga")?;
        let all = enumerate_augmentations(&dga.inner, cap)?;
        put(count, all.len(), "count")
    })
}

/// Reads augmentation values (`{"values": {"name": 0|1}}`) for `dga`. The
/// values are not checked; see `lch_augmentation_is_valid`.
///
/// # Safety
/// `dga` must be a live handle, `json` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_augmentation_from_json(
    dga: *const LchDga,
    json: *const c_char,
    out: *mut *mut LchAugmentation,
) -> LchStatus {
    guard(|| {
        let dga = get(dga, "dga")?;
        let aug = Augmentation::from_json(&dga.inner, text(json, "json")?)?;
        let handle = LchAugmentation { inner: aug, generators: dga.inner.len() };
        put(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// # Safety
/// `aug` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lch_augmentation_free(aug: *mut LchAugmentation) {
    if !aug.is_null() {
        drop(Box::from_raw(aug));
    }
}

unsafe fn aug_for<'a>(dga: &FreeDga, aug: *const LchAugmentation, what: &str) -> Result<&'a Augmentation, Failure> {
    let a = get(aug, what)?;
    if a.generators != dga.len() {
        return Err(Failure(LchStatus::InvalidInput, format!("`{what}` belongs to a different DGA")));
    }
    Ok(&a.inner)
}

/// Whether ε ∘ d = 0.
///
/// # Safety
/// Handles must be live and `valid` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_augmentation_is_valid(dga: *const LchDga, aug: *const LchAugmentation, valid: *mut bool) -> LchStatus {
    guard(|| {
        let dga = get(dga, "dga")?;
        let aug = aug_for(&dga.inner, aug, "aug")?;
        put(valid, is_augmentation(&dga.inner, aug)?.holds(), "valid")
    })
}

/// Bilinearized homology between components `comp0` and `comp1`, with
/// `aug0` on the first block and `aug1` on the second.
///
/// # Safety
/// Handles must be live, names NUL-terminated and `ranks` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_bilinearized_homology(
    dga: *const LchDga,
    comp0: *const c_char,
    comp1: *const c_char,
    aug0: *const LchAugmentation,
    aug1: *const LchAugmentation,
    ranks: *mut LchRanks,
) -> LchStatus {
    guard(|| {
        let dga = &get(dga, "dga")?.inner;
        let c0 = dga.component_index(text(comp0, "comp0")?)?;
        let c1 = dga.component_index(text(comp1, "comp1")?)?;
        let (e0, e1) = (aug_for(dga, aug0, "aug0")?, aug_for(dga, aug1, "aug1")?);
        let h = homology_f2(&bilinearized_complex(dga, &[c0], &[c1], e0, e1)?)?;
        put(ranks, h.into(), "ranks")
    })
}

/// Runs the surgery formula check on a fixture file.
///
/// # Safety
/// `path` must be NUL-terminated and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lch_surgery_formula(path: *const c_char, report: *mut LchFormulaReport) -> LchStatus {
    guard(|| {
        let search = DiscSearch::default();
        let fx = LoadedFixture::from_file(Path::new(text(path, "path")?), &search)?;
        let r = surgery_formula(&fx, &search)?;
        let out = LchFormulaReport {
            twisted: r.twisted.into(),
            quotient: r.quotient.into(),
            resolved: r.resolved.map_or_else(LchRanks::default, |(h, _)| h.into()),
            has_resolved: r.resolved.is_some(),
            holds: r.holds(),
        };
        put(report, out, "report")
    })
}
