use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use hyperknow_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hk_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn builtin(name: &str) -> *mut HkModel {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { hk_model_builtin(cs(name).as_ptr(), &mut h) },
        HkStatus::Ok
    );
    assert!(!h.is_null());
    h
}

fn check(h: *const HkModel, f: &str, bound: i64) -> (HkStatus, HkVerdict) {
    let mut v = HkVerdict::Unknown;
    let status = unsafe { hk_check(h, cs(f).as_ptr(), bound, 1 << 20, &mut v) };
    (status, v)
}

#[test]
fn example_one_through_the_abi() {
    let h = builtin("ex1");
    assert_eq!(
        check(h, "K{i} !K{j} p", -1),
        (HkStatus::Ok, HkVerdict::True)
    );
    assert_eq!(
        unsafe { hk_model_set_knowledge(h, HkKnowledge::Unknown) },
        HkStatus::Ok
    );
    assert_eq!(
        check(h, "K{i} !K{j} p", -1),
        (HkStatus::Ok, HkVerdict::False)
    );
    let mut n = 0usize;
    assert_eq!(
        unsafe { hk_model_state_count(h, 1 << 20, &mut n) },
        HkStatus::Ok
    );
    assert_eq!(n, 17);
    unsafe { hk_model_free(h) };
}

#[test]
fn bounded_and_cap() {
    let h = builtin("ex4");
    unsafe { hk_model_set_knowledge(h, HkKnowledge::Unknown) };
    assert_eq!(check(h, "K{i} K{k} p", 4), (HkStatus::Ok, HkVerdict::False));
    let (status, _) = check(h, "K{i} K{k} p", -1);
    assert_eq!(status, HkStatus::CapExceeded);
    assert!(last_error().contains("too large"));
    unsafe { hk_model_free(h) };
}

#[test]
fn mode_switch_changes_example_three() {
    let h = builtin("ex3");
    assert_eq!(check(h, "K{i} !K{k} p", -1).1, HkVerdict::True);
    assert_eq!(
        unsafe { hk_model_set_mode(h, HkMode::Forwarding) },
        HkStatus::Ok
    );
    assert_eq!(check(h, "K{i} !K{k} p", -1).1, HkVerdict::False);
    unsafe { hk_model_free(h) };
}

#[test]
fn parse_round_trip_and_errors() {
    let text =
        "players: i j\natoms: p@i\nhypergraph: {i,j}\nvaluation: p\nmessage: i -> {i,j} : p\n";
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { hk_model_parse(cs(text).as_ptr(), &mut h) },
        HkStatus::Ok
    );
    let s = unsafe { hk_model_to_string(h) };
    let written = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { hk_string_free(s) };
    assert!(written.contains("message: i -> {i,j} : p"));
    assert_eq!(check(h, "K{j} p", -1), (HkStatus::Ok, HkVerdict::True));
    assert_eq!(check(h, "K{x} p", -1).0, HkStatus::ParseError);
    unsafe { hk_model_free(h) };

    let mut h = ptr::null_mut();
    let bad = "players: i\nbogus: 1\n";
    assert_eq!(
        unsafe { hk_model_parse(cs(bad).as_ptr(), &mut h) },
        HkStatus::ParseError
    );
    assert!(h.is_null());
    assert!(last_error().contains("line 2"));
    assert_eq!(
        unsafe { hk_model_parse(ptr::null(), &mut h) },
        HkStatus::NullPointer
    );
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { hk_model_parse(invalid.as_ptr().cast(), &mut h) },
        HkStatus::InvalidUtf8
    );
}

#[test]
fn validation_reports_violations() {
    let text = "players: i j k l\natoms: p@l\nhypergraph: {l,k} {k,j} {j,i}\nvaluation: p\nmessage: j->{j,i}:p\n";
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { hk_model_parse(cs(text).as_ptr(), &mut h) },
        HkStatus::Ok
    );
    let mut n = 0usize;
    assert_eq!(unsafe { hk_model_validate(h, &mut n) }, HkStatus::Ok);
    assert_eq!(n, 1);
    assert!(last_error().contains("ownership"));
    assert_eq!(check(h, "p", -1).0, HkStatus::InvalidState);
    unsafe { hk_model_free(h) };
}

#[test]
fn laws_through_the_abi() {
    let mut passed = false;
    assert_eq!(
        unsafe { hk_law_check(cs("NEG_EX5").as_ptr(), 0, 0, &mut passed) },
        HkStatus::Ok
    );
    assert!(passed);
    assert_eq!(
        unsafe { hk_law_check(cs("T_CK_DISJ").as_ptr(), 3, 5, &mut passed) },
        HkStatus::Ok
    );
    assert!(passed);
    assert_eq!(
        unsafe { hk_law_check(cs("BOGUS").as_ptr(), 0, 0, &mut passed) },
        HkStatus::UnknownLaw
    );
}

#[test]
fn null_handles_are_rejected() {
    let mut v = HkVerdict::True;
    assert_eq!(
        unsafe { hk_check(ptr::null(), cs("p").as_ptr(), -1, 10, &mut v) },
        HkStatus::NullPointer
    );
    unsafe { hk_model_free(ptr::null_mut()) };
    let version = unsafe { CStr::from_ptr(hk_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(format!("-I{dir}/include"))
        .arg("-")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(
                b"#include \"hyperknow.h\"\nint main(void) { HkModel *m = 0; HkVerdict v; \
                  return hk_check(m, \"p\", -1, 16, &v) == HK_STATUS_NULL_POINTER ? 0 : 1; }\n",
            )?;
            child.wait_with_output()
        })
    else {
        eprintln!("no C compiler available; skipping header check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
