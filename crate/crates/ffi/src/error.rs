use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, UnwindSafe};

use macroplace::Error;

/// Result code returned by every fallible `mp_*` function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8, or an option was out of range.
    InvalidArgument = 2,
    MissingFile = 3,
    Io = 4,
    /// Malformed input text, dangling pin references, or an unusable netlist.
    Malformed = 5,
    /// A node the operation needs has no location.
    MissingLocation = 6,
    InvalidDimension = 7,
    /// No legal macro arrangement could be found.
    Unplaceable = 8,
    LengthMismatch = 9,
    DegenerateInput = 10,
    InvalidConfig = 11,
    /// A Rust panic was caught at the boundary.
    Internal = 12,
}

impl From<&Error> for MpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::MissingFile(_) => MpStatus::MissingFile,
            Error::Io { .. } => MpStatus::Io,
            Error::MalformedLine { .. }
            | Error::DanglingPinReference { .. }
            | Error::UnknownNode(_)
            | Error::DegenerateNet(_)
            | Error::EmptyNetlist => MpStatus::Malformed,
            Error::MissingLocation(_) | Error::MissingInitialLocation(_) => MpStatus::MissingLocation,
            Error::InvalidDimension(_)
            | Error::OutOfRange { .. }
            | Error::PointOutsideCanvas { .. }
            | Error::EmptyCellSet => MpStatus::InvalidDimension,
            Error::Unplaceable(_) | Error::InitFailed(_) | Error::NotMovable(_) => MpStatus::Unplaceable,
            Error::AllWorkersFailed(_, first) => MpStatus::from(first.as_ref()),
            Error::LengthMismatch(..) => MpStatus::LengthMismatch,
            Error::DegenerateInput(_) => MpStatus::DegenerateInput,
            Error::InvalidConfig(_) => MpStatus::InvalidConfig,
        }
    }
}

pub(crate) struct Failure {
    pub status: MpStatus,
    pub message: String,
}

impl Failure {
    pub fn new(status: MpStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(MpStatus::from(&e), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

/// Runs `f`, records any failure message for this thread and turns panics
/// into `MpStatus::Internal`.
pub(crate) fn guard<F>(f: F) -> MpStatus
where
    F: FnOnce() -> Result<(), Failure> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => MpStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal error: {msg}"));
            MpStatus::Internal
        }
    }
}

/// Message for the most recent failure on the calling thread, or null if
/// none. Release it with `mp_string_free`.
#[no_mangle]
pub extern "C" fn mp_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Clears the calling thread's last error.
#[no_mangle]
pub extern "C" fn mp_clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static, NUL-terminated name of a status code; "Unknown" for values
/// outside `MpStatus`.
#[no_mangle]
pub extern "C" fn mp_status_name(status: c_int) -> *const c_char {
    let name: &'static [u8] = match status {
        0 => b"Ok\0",
        1 => b"NullArgument\0",
        2 => b"InvalidArgument\0",
        3 => b"MissingFile\0",
        4 => b"Io\0",
        5 => b"Malformed\0",
        6 => b"MissingLocation\0",
        7 => b"InvalidDimension\0",
        8 => b"Unplaceable\0",
        9 => b"LengthMismatch\0",
        10 => b"DegenerateInput\0",
        11 => b"InvalidConfig\0",
        12 => b"Internal\0",
        _ => b"Unknown\0",
    };
    name.as_ptr().cast()
}
