use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use twistlat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(twl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn modular_lengths_and_counts() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(twl_structure_modular(&mut h), TwlStatus::Ok);
        let mut len = 0.0;
        assert_eq!(twl_structure_length(h, 1, 0, &mut len), TwlStatus::Ok);
        assert!((len - 2.0 * 1.5f64.acosh()).abs() < 1e-12);
        let mut sys = 0.0;
        assert_eq!(twl_structure_systole(h, &mut sys), TwlStatus::Ok);
        assert!((sys - len).abs() < 1e-12);
        let mut n = 0u64;
        // three slopes of trace 3, three of trace 6
        assert_eq!(twl_count_scc(h, 2.0 * 3.0f64.acosh() + 1e-9, &mut n), TwlStatus::Ok);
        assert_eq!(n, 6);
        let mut m = 0u64;
        assert_eq!(twl_count_multicurves(h, 2.0 * 3.0f64.acosh() + 1e-9, &mut m), TwlStatus::Ok);
        assert!(m >= n);
        let mut tw = 0.0;
        assert_eq!(twl_twisted_length(h, 1, 0, 1, 0, 1, &mut tw), TwlStatus::Ok);
        assert!((tw - 2.0 * 3.0f64.acosh()).abs() < 1e-9);
        twl_structure_free(h);
    }
}

#[test]
fn errors_map_to_codes_with_messages() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(twl_structure_new(3.0, 3.0, 4.0, 0.3, &mut h), TwlStatus::InvalidMarkoff);
        assert!(h.is_null());
        assert!(last_error().contains("Markoff"), "{}", last_error());
        assert_eq!(twl_structure_new(3.0, 3.0, 3.0, 0.3, ptr::null_mut()), TwlStatus::NullPointer);
        let mut n = 0u64;
        assert_eq!(twl_intersection_number(2, 4, 1, 0, &mut n), TwlStatus::NotPrimitive);
        assert_eq!(twl_intersection_number(1, 0, 0, 1, &mut n), TwlStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(twl_structure_modular(&mut h), TwlStatus::Ok);
        assert_eq!(twl_count_scc(h, -1.0, &mut n), TwlStatus::InvalidArgument);
        assert_eq!(twl_twisted_length(h, 1, 0, 0, 0, 1, &mut 0.0), TwlStatus::InvalidArgument);
        assert_eq!(twl_count_scc(ptr::null(), 5.0, &mut n), TwlStatus::NullPointer);
        twl_structure_release(&mut h);
        assert!(h.is_null());
        twl_structure_free(ptr::null_mut());
    }
}

#[test]
fn census_rows_match_library() {
    let radii = [0.4, 1.0, 2.0, 3.0];
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(twl_census_new(0.0, 1.0, radii.as_ptr(), radii.len(), &mut c), TwlStatus::Ok);
        assert_eq!(twl_census_len(c), 4);
        let want = twistlat::lattice::lattice_census(twistlat::hyp::H2Point::I, &radii).unwrap();
        for i in 0..4 {
            let (mut r, mut d, mut m) = (0.0, 0u64, 0u64);
            assert_eq!(twl_census_row(c, i, &mut r, &mut d, &mut m), TwlStatus::Ok);
            assert_eq!((r, d, m), (want.radii[i], want.counts_d[i], want.counts_m[i]));
        }
        let (mut r, mut d, mut m) = (0.0, 0u64, 0u64);
        assert_eq!(twl_census_row(c, 0, &mut r, &mut d, &mut m), TwlStatus::Ok);
        assert_eq!(d, 0, "no unit twist displaces i by at most 0.4");
        assert_eq!(twl_census_row(c, 9, &mut r, &mut d, &mut m), TwlStatus::InvalidArgument);
        twl_census_free(c);
        let desc = [2.0, 1.0];
        assert_eq!(twl_census_new(0.0, 1.0, desc.as_ptr(), 2, &mut c), TwlStatus::InvalidArgument);
        assert_eq!(twl_census_new(0.0, -1.0, radii.as_ptr(), 4, &mut c), TwlStatus::NotInUpperHalfPlane);
        assert_eq!(twl_census_len(ptr::null()), 0);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(twl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/twistlat.h")
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "twl_last_error",
        "twl_version",
        "twl_structure_new",
        "twl_structure_modular",
        "twl_structure_free",
        "twl_structure_release",
        "twl_structure_length",
        "twl_structure_systole",
        "twl_count_scc",
        "twl_count_multicurves",
        "twl_twisted_length",
        "twl_intersection_number",
        "twl_census_new",
        "twl_census_free",
        "twl_census_len",
        "twl_census_row",
        "TWL_STATUS_OK = 0",
        "typedef struct TwlStructure TwlStructure",
    ] {
        assert!(h.contains(f), "header lacks {f}");
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include "twistlat.h"

int main(void) {
    TwlStructure *x = NULL;
    if (twl_structure_modular(&x) != TWL_STATUS_OK) return 10;
    uint64_t n = 0;
    if (twl_count_scc(x, 10.0, &n) != TWL_STATUS_OK) return 11;
    double len = 0.0;
    if (twl_structure_length(x, 2, 4, &len) != TWL_STATUS_NOT_PRIMITIVE) return 12;
    if (twl_last_error()[0] == '\0') return 13;
    twl_structure_free(x);
    printf("%llu\n", (unsigned long long)n);
    return 0;
}
"#;

/// Compiles a C program against the generated header and the static
/// library built alongside this test.
#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libtwistlat_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_smoke");
    std::fs::create_dir_all(&tmp).unwrap();
    let src = tmp.join("smoke.c");
    let bin = tmp.join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status);
    let n: u64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    let x = twistlat::torus::MarkoffStructure::modular();
    assert_eq!(n, twistlat::curves::count_scc(&x, 10.0));
}
