//! C ABI for the hyperknow model checker.
//!
//! Models live behind the opaque [`HkModel`] handle. Every fallible call
//! returns an [`HkStatus`]; on failure a description is available from
//! [`hk_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperknow::formula::parse as parse_formula;
use hyperknow::laws::{check_law, LawError, LawId};
use hyperknow::semantics::{BoundedSession, SemanticsError, Session, Verdict3};
use hyperknow::state::validate_state;
use hyperknow::{builtin, Knowledge, Mode, ModelFile};

/// Opaque model handle: an interaction model together with its state.
pub struct HkModel {
    file: ModelFile,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidState = 4,
    CapExceeded = 5,
    UnknownLaw = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkVerdict {
    True = 0,
    False = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkKnowledge {
    Common = 0,
    Unknown = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkMode {
    Telling = 0,
    Forwarding = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type Failure = (HkStatus, String);

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

/// Runs `body`, recording its error message and converting panics. The
/// message is cleared first, so a successful call may leave a note.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HkStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HkStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal error");
            HkStatus::Internal
        }
    }
}

fn null() -> Failure {
    (HkStatus::NullPointer, "null pointer argument".into())
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HkStatus::InvalidUtf8, "string is not UTF-8".into()))
}

fn semantics(e: SemanticsError) -> Failure {
    let status = match e {
        SemanticsError::CapExceeded { .. } => HkStatus::CapExceeded,
        SemanticsError::InvalidState | SemanticsError::BoundTooSmall { .. } => {
            HkStatus::InvalidState
        }
        _ => HkStatus::ParseError,
    };
    (status, e.to_string())
}

fn boxed(file: ModelFile, out: *mut *mut HkModel) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(HkModel { file })) };
}

/// Parses a model file. On success `*out` owns a handle to release with
/// [`hk_model_free`].
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_model_parse(text: *const c_char, out: *mut *mut HkModel) -> HkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let src = c_str(text)?;
        let file = ModelFile::parse(src).map_err(|e| (HkStatus::ParseError, e.to_string()))?;
        boxed(file, out);
        Ok(())
    })
}

/// Loads a built-in example (`ex1` … `ex5`, `fig1a`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hk_model_builtin(name: *const c_char, out: *mut *mut HkModel) -> HkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let name = c_str(name)?;
        let file = builtin::load(name)
            .ok_or_else(|| (HkStatus::ParseError, format!("unknown example `{name}`")))?;
        boxed(file, out);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_model_free(model: *mut HkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
unsafe fn handle<'a>(model: *const HkModel) -> Result<&'a HkModel, Failure> {
    model.as_ref().ok_or_else(null)
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_model_set_knowledge(
    model: *mut HkModel,
    knowledge: HkKnowledge,
) -> HkStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(null)?;
        m.file.model = m.file.model.with_knowledge(match knowledge {
            HkKnowledge::Common => Knowledge::Common,
            HkKnowledge::Unknown => Knowledge::Unknown,
        });
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_model_set_mode(model: *mut HkModel, mode: HkMode) -> HkStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(null)?;
        m.file.model = m.file.model.with_mode(match mode {
            HkMode::Telling => Mode::Telling,
            HkMode::Forwarding => Mode::Forwarding,
        });
        Ok(())
    })
}

/// Number of states of the model, enumerating at most `max_states`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_model_state_count(
    model: *const HkModel,
    max_states: usize,
    out: *mut usize,
) -> HkStatus {
    guard(|| {
        let m = handle(model)?;
        let out = out.as_mut().ok_or_else(null)?;
        let space =
            hyperknow::semantics::enumerate_states(&m.file.model, max_states).map_err(semantics)?;
        *out = space.len();
        Ok(())
    })
}

/// Number of legality violations of the handle's state; 0 means legal.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_model_validate(model: *const HkModel, out: *mut usize) -> HkStatus {
    guard(|| {
        let m = handle(model)?;
        let out = out.as_mut().ok_or_else(null)?;
        let violations = validate_state(&m.file.model, &m.file.state);
        if let Some(v) = violations.first() {
            set_error(&v.render(&m.file.model));
        }
        *out = violations.len();
        Ok(())
    })
}

/// Decides `formula` at the handle's state. A negative `bound` selects the
/// exact engine; otherwise only states with at most `bound` messages are
/// considered and the verdict may be unknown.
///
/// # Safety
/// `model` must be a live handle, `formula` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_check(
    model: *const HkModel,
    formula: *const c_char,
    bound: i64,
    max_states: usize,
    out: *mut HkVerdict,
) -> HkStatus {
    guard(|| {
        let m = handle(model)?;
        let out = out.as_mut().ok_or_else(null)?;
        let src = c_str(formula)?;
        let (model, state) = (&m.file.model, &m.file.state);
        let f = parse_formula(src, model).map_err(|e| (HkStatus::ParseError, e.to_string()))?;
        if !validate_state(model, state).is_empty() {
            return Err(semantics(SemanticsError::InvalidState));
        }
        let verdict = if bound < 0 {
            Verdict3::from(
                Session::new(model, max_states)
                    .and_then(|mut s| s.holds(state, &f))
                    .map_err(semantics)?,
            )
        } else {
            BoundedSession::new(model, bound as usize, max_states)
                .and_then(|mut s| s.verdict(state, &f))
                .map_err(semantics)?
        };
        *out = match verdict {
            Verdict3::True => HkVerdict::True,
            Verdict3::False => HkVerdict::False,
            Verdict3::Unknown => HkVerdict::Unknown,
        };
        Ok(())
    })
}

/// Runs one law over the built-ins and `instances` seeded random models.
/// `*out_passed` is true when the law met its expected verdict.
///
/// # Safety
/// `law` must be a NUL-terminated string and `out_passed` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_law_check(
    law: *const c_char,
    seed: u64,
    instances: usize,
    out_passed: *mut bool,
) -> HkStatus {
    guard(|| {
        let out = out_passed.as_mut().ok_or_else(null)?;
        let id: LawId = c_str(law)?
            .parse()
            .map_err(|e: LawError| (HkStatus::UnknownLaw, e.to_string()))?;
        let report = check_law(id, instances, seed).map_err(|e| match e {
            LawError::Semantics(s) => semantics(s),
            other => (HkStatus::Internal, other.to_string()),
        })?;
        if let Some(w) = report.witness.as_ref().filter(|_| !report.passed) {
            set_error(&w.detail);
        }
        *out = report.passed;
        Ok(())
    })
}

/// The handle rendered as a model file; release with [`hk_string_free`].
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_model_to_string(model: *const HkModel) -> *mut c_char {
    match catch_unwind(AssertUnwindSafe(|| {
        let m = handle(model).ok()?;
        CString::new(m.file.write()).ok()
    })) {
        Ok(Some(s)) => s.into_raw(),
        _ => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Description of the last failure on this thread. After a successful
/// `hk_model_validate` or `hk_law_check` it holds the first violation, if any;
/// otherwise it is empty after success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
