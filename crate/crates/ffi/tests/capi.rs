use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ompx_ffi::*;

fn last_error() -> String {
    let p = ompx_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Inst(*mut OmpxInstance);

impl Drop for Inst {
    fn drop(&mut self) {
        unsafe { ompx_instance_free(self.0) }
    }
}

struct Res(*mut OmpxResult);

impl Drop for Res {
    fn drop(&mut self) {
        unsafe { ompx_result_free(self.0) }
    }
}

fn instance(n: usize, m: usize, k: usize, seed: u64) -> Inst {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ompx_instance_new(n, m, k, seed, &mut p) }, OmpxStatus::Ok);
    Inst(p)
}

fn selected(r: &Res) -> Vec<usize> {
    let it = unsafe { ompx_result_iterations(r.0) };
    let mut v = vec![0; it];
    assert_eq!(
        unsafe { ompx_result_copy_selected(r.0, v.as_mut_ptr(), v.len()) },
        OmpxStatus::Ok
    );
    v
}

fn weights(r: &Res) -> Vec<f64> {
    let mut v = vec![0.0; unsafe { ompx_result_iterations(r.0) }];
    assert_eq!(
        unsafe { ompx_result_copy_weights(r.0, v.as_mut_ptr(), v.len()) },
        OmpxStatus::Ok
    );
    v
}

#[test]
fn one_d_and_two_d_agree_through_the_abi() {
    let inst = instance(16, 8, 4, 9);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(ompx_instance_omp1d(inst.0, 4, 1e-12, 0, &mut a), OmpxStatus::Ok);
        assert_eq!(ompx_instance_omp2d(inst.0, 4, 1e-12, &mut b), OmpxStatus::Ok);
    }
    let (a, b) = (Res(a), Res(b));
    assert_eq!(selected(&a), selected(&b));
    for (x, y) in weights(&a).iter().zip(weights(&b)) {
        assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
    }
    let (mut fa, mut fb) = (OmpxFlops::default(), OmpxFlops::default());
    unsafe {
        assert_eq!(ompx_result_flops(a.0, &mut fa), OmpxStatus::Ok);
        assert_eq!(ompx_result_flops(b.0, &mut fb), OmpxStatus::Ok);
    }
    assert!(fa.project > fb.project);
}

#[test]
fn instance_accessors() {
    let inst = instance(8, 4, 2, 1);
    let (mut n, mut m, mut k) = (0, 0, 0);
    unsafe {
        assert_eq!(ompx_instance_dims(inst.0, &mut n, &mut m, &mut k), OmpxStatus::Ok);
        assert_eq!(ompx_instance_dims(inst.0, ptr::null_mut(), &mut m, ptr::null_mut()), OmpxStatus::Ok);
    }
    assert_eq!((n, m, k), (8, 4, 2));

    let mut a = vec![0.0; 32];
    let mut y = vec![0.0; 16];
    let mut z = vec![0.0; 64];
    unsafe {
        assert_eq!(ompx_instance_copy_a(inst.0, a.as_mut_ptr(), a.len()), OmpxStatus::Ok);
        assert_eq!(ompx_instance_copy_y(inst.0, y.as_mut_ptr(), y.len()), OmpxStatus::Ok);
        assert_eq!(ompx_instance_copy_z(inst.0, z.as_mut_ptr(), z.len()), OmpxStatus::Ok);
    }
    assert_eq!(z.iter().filter(|v| **v != 0.0).count(), 2);

    // Raw-data entry point reproduces the instance run.
    let mut raw = ptr::null_mut();
    let mut via = ptr::null_mut();
    unsafe {
        assert_eq!(ompx_omp2d(a.as_ptr(), 4, 8, y.as_ptr(), 2, 1e-12, &mut raw), OmpxStatus::Ok);
        assert_eq!(ompx_instance_omp2d(inst.0, 2, 1e-12, &mut via), OmpxStatus::Ok);
    }
    let (raw, via) = (Res(raw), Res(via));
    assert_eq!(selected(&raw), selected(&via));
    assert_eq!(weights(&raw), weights(&via));

    let mut coef = vec![0.0; 64];
    unsafe {
        assert_eq!(ompx_result_n(raw.0), 8);
        assert_eq!(
            ompx_result_copy_coefficients(raw.0, coef.as_mut_ptr(), coef.len()),
            OmpxStatus::Ok
        );
    }
    for (&flat, &w) in selected(&raw).iter().zip(&weights(&raw)) {
        assert_eq!(coef[flat - 1], w);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(ompx_instance_new(4, 8, 1, 0, &mut p), OmpxStatus::InvalidArgument);
        assert!(p.is_null());
        assert!(last_error().contains("m=8"), "{}", last_error());

        assert_eq!(ompx_instance_new(4, 2, 1, 0, ptr::null_mut()), OmpxStatus::NullPointer);
        assert_eq!(ompx_instance_dims(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), OmpxStatus::NullPointer);
    }

    let inst = instance(8, 4, 2, 3);
    let mut small = [0.0; 3];
    unsafe {
        assert_eq!(
            ompx_instance_copy_y(inst.0, small.as_mut_ptr(), small.len()),
            OmpxStatus::BufferTooSmall
        );
        assert!(last_error().contains("16"));
        let mut r = ptr::null_mut();
        assert_eq!(ompx_instance_omp1d(inst.0, 2, 1e-12, 100, &mut r), OmpxStatus::MemoryCap);
        assert!(r.is_null());
        assert!(ompx_dct_matrix(4, small.as_mut_ptr(), 3) == OmpxStatus::BufferTooSmall);
        // A successful call clears the message.
        let mut dct = [0.0; 16];
        assert_eq!(ompx_dct_matrix(4, dct.as_mut_ptr(), 16), OmpxStatus::Ok);
        assert!(ompx_last_error().is_null());
        assert!((dct[0] - 0.5).abs() < 1e-15);
    }
}

#[test]
fn degenerate_dictionary_is_reported() {
    // Two identical columns: atoms (1,1) and (1,2) coincide.
    let a = [1.0, 1.0, 0.0, 0.0];
    let y = [1.0, 1.0, 0.0, 0.0];
    let mut r = ptr::null_mut();
    let status = unsafe { ompx_omp2d(a.as_ptr(), 2, 2, y.as_ptr(), 2, 0.0, &mut r) };
    assert_eq!(status, OmpxStatus::DegenerateAtomSet);
    assert!(r.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_result_accessors_are_safe() {
    unsafe {
        assert_eq!(ompx_result_iterations(ptr::null()), 0);
        assert_eq!(ompx_result_n(ptr::null()), 0);
        let mut t = OmpxTermination::AtomsExhausted;
        assert_eq!(ompx_result_termination(ptr::null(), &mut t), OmpxStatus::NullPointer);
        ompx_result_free(ptr::null_mut());
        ompx_instance_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(ompx_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/ompx.h")).unwrap();
    for name in [
        "OMPX_H",
        "typedef struct OmpxInstance OmpxInstance;",
        "typedef struct OmpxResult OmpxResult;",
        "OMPX_STATUS_DEGENERATE_ATOM_SET",
        "OmpxStatus ompx_instance_new(",
        "OmpxStatus ompx_omp2d(",
        "OmpxStatus ompx_result_copy_selected(",
        "const char *ompx_last_error(void);",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Builds the static library into a private target directory; the library
/// target a test links against is only the rlib.
fn static_lib() -> PathBuf {
    let target = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi-static");
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let out = Command::new(cargo)
        .args(["build", "--offline", "--quiet", "-p", "ompx-ffi", "--lib", "--target-dir"])
        .arg(&target)
        .current_dir(crate_dir())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    target.join("debug").join("libompx_ffi.a")
}

fn c_compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        Command::new(c).arg("--version").output().map(|o| o.status.success()).unwrap_or(false)
    })
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = c_compiler() else {
        eprintln!("skipping: no C compiler");
        return;
    };
    let lib = static_lib();
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src: &Path = &crate_dir().join("tests/c/smoke.c");
    let build = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "exit {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("atoms agree"));
}
