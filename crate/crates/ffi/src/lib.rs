//! C interface: parse documents into opaque handles, check structures, and run
//! CLI commands in-process.
//!
//! Every function returns an [`InfalgStatus`]. On failure the message is kept
//! per thread and can be read with [`infalg_last_error`] until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infalg::bracket::check_structure;
use infalg::cli::run_command;
use infalg::document::{parse_document, serialize_document, Document};
use infalg::relations::check_structure_direct;
use infalg::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfalgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or schema-violating document.
    Format = 3,
    /// Well-formed input that the operation cannot accept.
    Invalid = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// A parsed and validated problem document.
pub struct InfalgDocument {
    doc: Document,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> InfalgStatus {
    match e {
        Error::Format(_) | Error::UnknownName(_) | Error::Missing(_) => InfalgStatus::Format,
        _ => InfalgStatus::Invalid,
    }
}

/// Runs `f`, turning panics into [`InfalgStatus::Internal`].
fn guard(f: impl FnOnce() -> Result<(), InfalgStatus>) -> InfalgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InfalgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            InfalgStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, InfalgStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(InfalgStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        InfalgStatus::InvalidUtf8
    })
}

fn fail(e: Error) -> InfalgStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn into_c(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// The message of the last failed call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn infalg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a JSON document. On success `*out` holds a handle to release with [`infalg_document_free`].
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn infalg_document_parse(json: *const c_char, out: *mut *mut InfalgDocument) -> InfalgStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return Err(InfalgStatus::NullPointer);
        }
        *out = ptr::null_mut();
        let text = str_arg(json, "json")?;
        let doc = parse_document(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(InfalgDocument { doc }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `doc` must come from [`infalg_document_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn infalg_document_free(doc: *mut InfalgDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Dimension of the document's graded space.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn infalg_document_dim(doc: *const InfalgDocument, out: *mut usize) -> InfalgStatus {
    guard(|| {
        if doc.is_null() || out.is_null() {
            set_error("null argument");
            return Err(InfalgStatus::NullPointer);
        }
        *out = (*doc).doc.space.dim();
        Ok(())
    })
}

/// Normalized JSON of the document; free it with [`infalg_string_free`].
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn infalg_document_serialize(doc: *const InfalgDocument, out: *mut *mut c_char) -> InfalgStatus {
    guard(|| {
        if doc.is_null() || out.is_null() {
            set_error("null argument");
            return Err(InfalgStatus::NullPointer);
        }
        *out = into_c(serialize_document(&(*doc).doc));
        Ok(())
    })
}

/// Checks the structure equation up to `arity_cap`.
///
/// `*holds` is 1 or 0; `*witness_arity` is the first failing arity, or 0.
///
/// # Safety
/// `doc` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn infalg_check_structure(doc: *const InfalgDocument, arity_cap: usize, holds: *mut i32, witness_arity: *mut usize) -> InfalgStatus {
    guard(|| {
        if doc.is_null() || holds.is_null() || witness_arity.is_null() {
            set_error("null argument");
            return Err(InfalgStatus::NullPointer);
        }
        if arity_cap == 0 {
            set_error("arity cap must be at least 1");
            return Err(InfalgStatus::Invalid);
        }
        let d = (*doc).doc.structure().map_err(fail)?;
        let direct = check_structure_direct(d, arity_cap).map_err(fail)?;
        if (*doc).doc.field.characteristic() != 2 {
            let bracket = check_structure(d, arity_cap).map_err(fail)?;
            if !bracket.agrees_with(&direct) {
                set_error("the bracket and direct checkers disagree");
                return Err(InfalgStatus::Internal);
            }
        }
        *holds = direct.holds() as i32;
        *witness_arity = direct.first_failure().map_or(0, |v| v.arity);
        Ok(())
    })
}

/// Runs a command line (`argv[0]` is the program name) in-process.
///
/// `*exit_code` gets the CLI exit code and `*report` the text it would print on
/// standard output, to be freed with [`infalg_string_free`]. Usage errors are
/// reported through the exit code, not the status.
///
/// # Safety
/// `argv` must point to `argc` nul-terminated strings; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn infalg_run_command(argc: usize, argv: *const *const c_char, exit_code: *mut i32, report: *mut *mut c_char) -> InfalgStatus {
    guard(|| {
        if argv.is_null() || exit_code.is_null() || report.is_null() {
            set_error("null argument");
            return Err(InfalgStatus::NullPointer);
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            args.push(str_arg(*argv.add(i), "argv entry")?.to_string());
        }
        let out = run_command(args);
        if !out.stderr.is_empty() {
            set_error(out.stderr.trim_end());
        }
        *exit_code = out.code;
        *report = into_c(out.stdout);
        Ok(())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn infalg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
