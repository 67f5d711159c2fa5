//! C ABI over `hornopt`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns a [`HornoptStatus`]; on failure a message is
//! available from [`hornopt_last_error_message`] on the same thread until the
//! next failing call. Strings returned through `char **` out-parameters are
//! owned by the caller and released with [`hornopt_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hornopt::report::{run_strategy, Strategy, StrategyParams};
use hornopt::{apply_scheme, build_dag, gen_res, Direction, Error, Polynomial, ResolventSpec, SearchResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HornoptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Limit = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HornoptStrategy {
    Occurrence = 0,
    Exhaustive = 1,
    MctsUct = 2,
    MctsSaUct = 3,
    Nmcs = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HornoptDirection {
    Forward = 0,
    Backward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HornoptSearchConfig {
    pub strategy: HornoptStrategy,
    pub direction: HornoptDirection,
    pub cp: f64,
    pub iterations: u64,
    pub seed: u64,
    /// Nesting level for NMCS.
    pub level: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HornoptOpCount {
    pub muls: u64,
    pub adds: u64,
}

/// Parsed polynomial.
pub struct HornoptPolynomial(Polynomial);

/// Outcome of a search, tied to the polynomial it was run on.
pub struct HornoptResult {
    poly: Polynomial,
    result: SearchResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> HornoptStatus {
    match e {
        Error::Parse(_) => HornoptStatus::Parse,
        Error::ExhaustiveCapExceeded { .. } | Error::ResolventCapExceeded { .. } => HornoptStatus::Limit,
        Error::Io(_) | Error::Csv(_) => HornoptStatus::Internal,
        _ => HornoptStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), (HornoptStatus, String)>) -> HornoptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HornoptStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error (panic)");
            HornoptStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (HornoptStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HornoptStatus, String) {
    (HornoptStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HornoptStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HornoptStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (HornoptStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|_| (HornoptStatus::Internal, "string contains nul".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hornopt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_polynomial_parse(src: *const c_char, out: *mut *mut HornoptPolynomial) -> HornoptStatus {
    guard(|| {
        let text = str_arg(src, "src")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = Polynomial::parse(text).map_err(|e| lib_err(e.into()))?;
        *out = Box::into_raw(Box::new(HornoptPolynomial(p)));
        Ok(())
    })
}

/// Builds `res(m, n)` (subject to the library's degree cap).
#[no_mangle]
pub unsafe extern "C" fn hornopt_gen_res(m: u32, n: u32, out: *mut *mut HornoptPolynomial) -> HornoptStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = ResolventSpec::new(m, n).map_err(lib_err)?;
        let p = gen_res(spec).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(HornoptPolynomial(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_polynomial_free(p: *mut HornoptPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hornopt_polynomial_num_vars(p: *const HornoptPolynomial) -> usize {
    p.as_ref().map_or(0, |p| p.0.num_vars())
}

/// Number of terms, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hornopt_polynomial_num_terms(p: *const HornoptPolynomial) -> usize {
    p.as_ref().map_or(0, |p| p.0.terms().len())
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_polynomial_to_string(p: *const HornoptPolynomial, out: *mut *mut c_char) -> HornoptStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        write_string(out, p.0.to_string())
    })
}

/// Operation count of the polynomial as written out term by term.
#[no_mangle]
pub unsafe extern "C" fn hornopt_polynomial_expanded_ops(
    p: *const HornoptPolynomial,
    out: *mut HornoptOpCount,
) -> HornoptStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let ops = p.0.expanded_op_count();
        *out = HornoptOpCount {
            muls: ops.muls,
            adds: ops.adds,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn hornopt_search_config_default() -> HornoptSearchConfig {
    let d = StrategyParams::default();
    HornoptSearchConfig {
        strategy: HornoptStrategy::Occurrence,
        direction: HornoptDirection::Forward,
        cp: d.cp,
        iterations: d.iterations,
        seed: d.seed,
        level: d.level,
    }
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_simplify(
    p: *const HornoptPolynomial,
    config: *const HornoptSearchConfig,
    out: *mut *mut HornoptResult,
) -> HornoptStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let strategy = match cfg.strategy {
            HornoptStrategy::Occurrence => Strategy::Occurrence,
            HornoptStrategy::Exhaustive => Strategy::Exhaustive,
            HornoptStrategy::MctsUct => Strategy::MctsUct,
            HornoptStrategy::MctsSaUct => Strategy::MctsSaUct,
            HornoptStrategy::Nmcs => Strategy::Nmcs,
        };
        let params = StrategyParams {
            cp: cfg.cp,
            iterations: cfg.iterations,
            direction: match cfg.direction {
                HornoptDirection::Forward => Direction::Forward,
                HornoptDirection::Backward => Direction::Backward,
            },
            seed: cfg.seed,
            level: cfg.level,
        };
        let result = run_strategy(&p.0, strategy, &params).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(HornoptResult {
            poly: p.0.clone(),
            result,
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_result_free(r: *mut HornoptResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

#[no_mangle]
pub unsafe extern "C" fn hornopt_result_ops(r: *const HornoptResult, out: *mut HornoptOpCount) -> HornoptStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = HornoptOpCount {
            muls: r.result.best_ops.muls,
            adds: r.result.best_ops.adds,
        };
        Ok(())
    })
}

/// Number of schemes the search evaluated, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hornopt_result_evaluations(r: *const HornoptResult) -> u64 {
    r.as_ref().map_or(0, |r| r.result.evaluations)
}

/// Best variable order as comma-separated names. For a backward search this
/// is the order as stored, before the reversal applied at evaluation.
#[no_mangle]
pub unsafe extern "C" fn hornopt_result_scheme(r: *const HornoptResult, out: *mut *mut c_char) -> HornoptStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        write_string(out, r.result.best_scheme.names(r.poly.vars()))
    })
}

/// Straight-line code for the best scheme, assigning the value to `target`.
#[no_mangle]
pub unsafe extern "C" fn hornopt_result_emit_code(
    r: *const HornoptResult,
    target: *const c_char,
    out: *mut *mut c_char,
) -> HornoptStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("result"))?;
        let target = str_arg(target, "target")?;
        let expr = apply_scheme(&r.poly, &r.result.best_scheme).map_err(lib_err)?;
        write_string(out, build_dag(&expr).emit_code(r.poly.vars(), target))
    })
}

#[no_mangle]
pub extern "C" fn hornopt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
