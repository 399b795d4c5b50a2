//! C ABI over the MMP hypergraph library.
//!
//! Hypergraphs are opaque handles created by `mmp_parse` or
//! `mmp_generate_master` and released with `mmp_hypergraph_free`. Strings
//! returned by the library are owned by the caller and released with
//! `mmp_string_free`. Fallible calls return an `MmpStatus`; a human-readable
//! message for the most recent failure on the calling thread is available
//! via `mmp_last_error`.

use libc::c_char;
use mmp_core::analysis::{analyze, AnalysisOptions};
use mmp_core::assign::{
    classical_indices_exact_budgeted, classical_indices_heuristic, has_parity_proof,
    is_binary_budgeted, is_critical_budgeted, DEFAULT_NODE_BUDGET,
};
use mmp_core::coord::{generate_master, ComponentSet};
use mmp_core::lang::{parse_mmp, serialize_mmp, validate};
use mmp_core::Error;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

/// Status codes returned by fallible calls.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum MmpStatus {
    Ok = 0,
    /// Malformed input text or arguments.
    ParseError = 1,
    /// Structurally invalid hypergraph or out-of-range argument.
    InvalidInput = 2,
    /// A search exceeded its node budget; the answer is undecided.
    BudgetExceeded = 3,
    /// Input too large for the requested exhaustive computation.
    TooLarge = 4,
    InternalError = 5,
}

/// Opaque hypergraph handle.
pub struct MmpHypergraph {
    inner: mmp_core::Hypergraph,
}

/// Exact or sampled classical index values.
#[repr(C)]
pub struct MmpIndices {
    pub hi_c_max: u64,
    pub hi_c_min: u64,
    pub hi_mc_max: u64,
    pub l_c_max: u64,
    pub l_c_min: u64,
    /// 1 when the values come from the exact solver.
    pub exact: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

fn status_of(e: &Error) -> MmpStatus {
    match e {
        Error::Parse { .. } => MmpStatus::ParseError,
        Error::BudgetExceeded(_) => MmpStatus::BudgetExceeded,
        Error::TooLarge(_) => MmpStatus::TooLarge,
        Error::Invalid(_)
        | Error::EdgeIndex { .. }
        | Error::Empty
        | Error::CliqueTooLarge { .. }
        | Error::Infeasible(_)
        | Error::Coord(_)
        | Error::UnknownFixture(_) => MmpStatus::InvalidInput,
        _ => MmpStatus::InternalError,
    }
}

fn fail(e: Error) -> MmpStatus {
    let code = status_of(&e);
    set_error(e.to_string());
    code
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string.
unsafe fn text_arg<'a>(ptr: *const c_char) -> Result<&'a str, MmpStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(MmpStatus::InvalidInput);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        MmpStatus::InvalidInput
    })
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn mmp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Parse one MMP string (`"12,23,34,45,51."`) into a hypergraph handle.
/// `dim` overrides the declared dimension when nonzero.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmp_parse(
    text: *const c_char,
    dim: u32,
    out: *mut *mut MmpHypergraph,
) -> MmpStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return MmpStatus::InvalidInput;
    }
    let text = match text_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match parse_mmp(text) {
        Ok(mut h) => {
            if dim > 0 {
                h = h.with_n(dim as usize);
            }
            *out = Box::into_raw(Box::new(MmpHypergraph { inner: h }));
            MmpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Generate the master hypergraph of a comma-separated component pool
/// (e.g. `"0,1,-1"`) in dimension `dim`.
///
/// # Safety
/// `components` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmp_generate_master(
    components: *const c_char,
    dim: u32,
    out: *mut *mut MmpHypergraph,
) -> MmpStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return MmpStatus::InvalidInput;
    }
    let text = match text_arg(components) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let pool = match ComponentSet::parse(text) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match generate_master(&pool, dim as usize) {
        Ok((h, _)) => {
            *out = Box::into_raw(Box::new(MmpHypergraph { inner: h }));
            MmpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a hypergraph handle.
///
/// # Safety
/// `h` must be a pointer from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn mmp_hypergraph_free(h: *mut MmpHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a string pointer from this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn mmp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of vertices.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mmp_order(h: *const MmpHypergraph) -> u64 {
    (*h).inner.k() as u64
}

/// Number of hyperedges.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mmp_size(h: *const MmpHypergraph) -> u64 {
    (*h).inner.l() as u64
}

/// Declared hypergraph dimension.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mmp_dimension(h: *const MmpHypergraph) -> u32 {
    (*h).inner.n as u32
}

/// Serialize back to the MMP string form.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mmp_serialize(h: *const MmpHypergraph) -> *mut c_char {
    export_string(serialize_mmp(&(*h).inner))
}

/// 1 when the hypergraph satisfies the structural conditions; strict mode
/// additionally demands connectivity, no duplicate hyperedges, and at least
/// two shared vertices per hyperedge.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mmp_is_valid(h: *const MmpHypergraph, strict: u8) -> u8 {
    validate(&(*h).inner, strict != 0).ok() as u8
}

/// Decide binary (noncontextual) vs. non-binary (contextual).
/// `budget` of 0 selects the default search budget.
///
/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mmp_is_binary(
    h: *const MmpHypergraph,
    budget: u64,
    out: *mut u8,
) -> MmpStatus {
    let budget = if budget == 0 { DEFAULT_NODE_BUDGET } else { budget };
    match is_binary_budgeted(&(*h).inner, budget) {
        Ok(v) => {
            *out = v.binary as u8;
            MmpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Decide criticality: non-binary, and every single hyperedge removal is
/// binary.
///
/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mmp_is_critical(
    h: *const MmpHypergraph,
    budget: u64,
    out: *mut u8,
) -> MmpStatus {
    let budget = if budget == 0 { DEFAULT_NODE_BUDGET } else { budget };
    match is_critical_budgeted(&(*h).inner, budget) {
        Ok(v) => {
            *out = v as u8;
            MmpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// 1 when the hyperedge count is odd and every vertex multiplicity is even.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mmp_has_parity_proof(h: *const MmpHypergraph) -> u8 {
    has_parity_proof(&(*h).inner) as u8
}

/// Classical indices. With `exact` nonzero the branch-and-bound solver runs
/// (may return `BudgetExceeded`); otherwise `runs` randomized maximal
/// assignments are sampled with the given seed.
///
/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mmp_classical_indices(
    h: *const MmpHypergraph,
    exact: u8,
    runs: u64,
    seed: u64,
    budget: u64,
    out: *mut MmpIndices,
) -> MmpStatus {
    let budget = if budget == 0 { DEFAULT_NODE_BUDGET } else { budget };
    let report = if exact != 0 {
        match classical_indices_exact_budgeted(&(*h).inner, budget) {
            Ok(r) => r,
            Err(e) => return fail(e),
        }
    } else {
        classical_indices_heuristic(&(*h).inner, runs.max(1), seed)
    };
    *out = MmpIndices {
        hi_c_max: report.hi_c_max as u64,
        hi_c_min: report.hi_c_min as u64,
        hi_mc_max: report.hi_mc_max as u64,
        l_c_max: report.l_c_max as u64,
        l_c_min: report.l_c_min as u64,
        exact: report.exact as u8,
    };
    MmpStatus::Ok
}

/// Full analysis as a JSON document (structure, verdicts, indices,
/// inequality report), matching the CLI's `analyze --json` schema.
///
/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mmp_analyze_json(
    h: *const MmpHypergraph,
    exact: u8,
    runs: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> MmpStatus {
    let opts = AnalysisOptions {
        exact: exact != 0,
        runs: runs.max(1),
        seed,
        ..AnalysisOptions::default()
    };
    match analyze(&(*h).inner, &opts) {
        Ok(rec) => match serde_json::to_string(&rec) {
            Ok(json) => {
                *out = export_string(json);
                MmpStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                MmpStatus::InternalError
            }
        },
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn parse_analyze_roundtrip() {
        let text = CString::new("12,23,34,45,51.").unwrap();
        let mut handle: *mut MmpHypergraph = ptr::null_mut();
        unsafe {
            assert!(matches!(mmp_parse(text.as_ptr(), 0, &mut handle), MmpStatus::Ok));
            assert_eq!(mmp_order(handle), 5);
            assert_eq!(mmp_size(handle), 5);
            assert_eq!(mmp_dimension(handle), 3);
            let mut binary = 2u8;
            assert!(matches!(mmp_is_binary(handle, 0, &mut binary), MmpStatus::Ok));
            assert_eq!(binary, 0);
            let mut crit = 2u8;
            assert!(matches!(mmp_is_critical(handle, 0, &mut crit), MmpStatus::Ok));
            assert_eq!(crit, 1);
            let s = mmp_serialize(handle);
            assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "12,23,34,45,51.");
            mmp_string_free(s);
            let mut idx = MmpIndices {
                hi_c_max: 0,
                hi_c_min: 0,
                hi_mc_max: 0,
                l_c_max: 0,
                l_c_min: 0,
                exact: 0,
            };
            assert!(matches!(
                mmp_classical_indices(handle, 1, 0, 0, 0, &mut idx),
                MmpStatus::Ok
            ));
            assert_eq!((idx.hi_c_max, idx.hi_mc_max, idx.l_c_max), (2, 4, 4));
            let mut json: *mut c_char = ptr::null_mut();
            assert!(matches!(
                mmp_analyze_json(handle, 1, 0, 0, &mut json),
                MmpStatus::Ok
            ));
            let doc: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
            assert_eq!(doc["binary"], false);
            assert_eq!(doc["inequalities"]["HI_q"], "5");
            mmp_string_free(json);
            mmp_hypergraph_free(handle);
        }
    }

    #[test]
    fn error_paths() {
        let bad = CString::new("12,23").unwrap();
        let mut handle: *mut MmpHypergraph = ptr::null_mut();
        unsafe {
            let status = mmp_parse(bad.as_ptr(), 0, &mut handle);
            assert!(matches!(status, MmpStatus::ParseError));
            let msg = mmp_last_error();
            assert!(!msg.is_null());
            assert!(CStr::from_ptr(msg).to_str().unwrap().contains("unterminated"));
        }
    }

    #[test]
    fn generate_master_via_ffi() {
        let comps = CString::new("0,1,-1").unwrap();
        let mut handle: *mut MmpHypergraph = ptr::null_mut();
        unsafe {
            assert!(matches!(
                mmp_generate_master(comps.as_ptr(), 4, &mut handle),
                MmpStatus::Ok
            ));
            assert_eq!(mmp_order(handle), 40);
            assert_eq!(mmp_size(handle), 32);
            mmp_hypergraph_free(handle);
        }
    }
}
