//! Exercises the C ABI through its Rust declarations: handle lifecycle,
//! status codes, error messages, and agreement with the underlying library.

use std::ffi::CStr;
use std::ptr;

use ym2d_ffi::*;

const TORUS_JSON: &str = r#"{
    "vertices": 1,
    "edges": [[0,0],[0,0],[0,0]],
    "faces": [
        {"word": [[0,1],[1,1],[2,-1]], "area": 1.5},
        {"word": [[2,1],[0,-1],[1,-1]], "area": 1.0}
    ],
    "genus": 1,
    "boundary": []
}"#;

fn cstring(s: &str) -> std::ffi::CString {
    std::ffi::CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(ym2d_last_error())
            .to_string_lossy()
            .into_owned()
    }
}

#[test]
fn version_is_a_static_semver_string() {
    let v = unsafe { CStr::from_ptr(ym2d_version()) }.to_str().unwrap();
    assert!(v.split('.').count() >= 2, "version: {v}");
}

#[test]
fn graph_lifecycle_and_counts() {
    let json = cstring(TORUS_JSON);
    let mut handle: *mut Ym2dGraph = ptr::null_mut();
    let status = unsafe { ym2d_graph_from_json(json.as_ptr(), &mut handle) };
    assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());

    let (mut v, mut e, mut f) = (0u32, 0u32, 0u32);
    let status = unsafe { ym2d_graph_counts(handle, &mut v, &mut e, &mut f) };
    assert_eq!(status, Ym2dStatus::Ok);
    assert_eq!((v, e, f), (1, 3, 2));

    unsafe { ym2d_graph_free(handle) };
    // Freeing null is a documented no-op.
    unsafe { ym2d_graph_free(ptr::null_mut()) };
}

#[test]
fn malformed_json_reports_io_failure_with_message() {
    let json = cstring("{\"vertices\": 1");
    let mut handle: *mut Ym2dGraph = ptr::null_mut();
    let status = unsafe { ym2d_graph_from_json(json.as_ptr(), &mut handle) };
    assert_eq!(status, Ym2dStatus::IoFailure);
    assert!(handle.is_null());
    assert!(last_error().contains("json"), "message: {}", last_error());
}

#[test]
fn inconsistent_graph_reports_invalid_graph() {
    // Face word references edge 7, which does not exist.
    let json = cstring(
        r#"{"vertices":1,"edges":[[0,0]],
            "faces":[{"word":[[7,1]],"area":1.0}],"genus":0,"boundary":[]}"#,
    );
    let mut handle: *mut Ym2dGraph = ptr::null_mut();
    let status = unsafe { ym2d_graph_from_json(json.as_ptr(), &mut handle) };
    assert_eq!(status, Ym2dStatus::InvalidGraph);
    assert!(!last_error().is_empty());
}

#[test]
fn null_pointers_are_rejected() {
    let status = unsafe { ym2d_graph_from_json(ptr::null(), ptr::null_mut()) };
    assert_eq!(status, Ym2dStatus::NullPointer);
    let status = unsafe { ym2d_heat_kernel(YM2D_GROUP_U1, 1.0, 0.0, 1e-9, ptr::null_mut()) };
    assert_eq!(status, Ym2dStatus::NullPointer);
}

#[test]
fn heat_kernel_matches_library() {
    let mut out = 0.0;
    let status = unsafe { ym2d_heat_kernel(YM2D_GROUP_SU2, 1.0, 1.0, 1e-12, &mut out) };
    assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
    let expect = ym2d::heat::heat_kernel(
        ym2d::group::Group::Su2,
        1.0,
        &ym2d::group::ConjClass::new(ym2d::group::Group::Su2, 1.0).unwrap(),
        1e-12,
    )
    .unwrap();
    assert!((out - expect).abs() < 1e-14, "{out} vs {expect}");
}

#[test]
fn log_heat_kernel_reaches_deep_tails() {
    let mut out = 0.0;
    let status = unsafe {
        ym2d_log_heat_kernel(
            YM2D_GROUP_SU2,
            0.0125,
            std::f64::consts::PI,
            1e-12,
            &mut out,
        )
    };
    assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
    assert!((out - -1561.5062575587458).abs() < 1e-8, "log p = {out}");
}

#[test]
fn invalid_inputs_map_to_specific_statuses() {
    let mut out = 0.0;
    let status = unsafe { ym2d_heat_kernel(7, 1.0, 0.0, 1e-9, &mut out) };
    assert_eq!(status, Ym2dStatus::InvalidArgument);
    assert!(
        last_error().contains("group code"),
        "message: {}",
        last_error()
    );

    let status = unsafe { ym2d_heat_kernel(YM2D_GROUP_SU2, -1.0, 0.0, 1e-9, &mut out) };
    assert_eq!(status, Ym2dStatus::InvalidTime);

    // Class angle outside [0, π] for a semisimple group.
    let status = unsafe { ym2d_heat_kernel(YM2D_GROUP_SO3, 1.0, 5.0, 1e-9, &mut out) };
    assert_ne!(status, Ym2dStatus::Ok);
}

#[test]
fn partition_value_matches_reference() {
    let mut out = 0.0;
    let status =
        unsafe { ym2d_partition_value(YM2D_GROUP_U1, 0, 0, 2.0, ptr::null(), 0, 1e-10, &mut out) };
    assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
    assert!((out - 1.77263720482665).abs() < 1e-9, "Z = {out}");

    // One-boundary disk with a class argument.
    let angles = [0.7];
    let status = unsafe {
        ym2d_partition_value(
            YM2D_GROUP_SU2,
            1,
            0,
            0.5,
            angles.as_ptr(),
            1,
            1e-10,
            &mut out,
        )
    };
    assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
    let expect = ym2d::heat::heat_kernel(
        ym2d::group::Group::Su2,
        0.5,
        &ym2d::group::ConjClass::new(ym2d::group::Group::Su2, 0.7).unwrap(),
        1e-10,
    )
    .unwrap();
    assert!((out - expect).abs() < 1e-9, "{out} vs {expect}");
}

#[test]
fn sphere_loop_moment_matches_library() {
    let mut out = 0.0;
    let status = unsafe { ym2d_sphere_loop_moment(YM2D_GROUP_SU2, 0.5, 1.0, 1, 1e-10, &mut out) };
    assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
    let expect = ym2d::ym::exact_sphere_loop_moment(
        ym2d::group::Group::Su2,
        0.5,
        1.0,
        &ym2d::group::Irrep::new(ym2d::group::Group::Su2, 1).unwrap(),
        1e-10,
    )
    .unwrap();
    assert!((out - expect).abs() < 1e-12, "{out} vs {expect}");
}

#[test]
fn wilson_estimate_is_deterministic_and_sane() {
    let json = cstring(TORUS_JSON);
    let mut handle: *mut Ym2dGraph = ptr::null_mut();
    assert_eq!(
        unsafe { ym2d_graph_from_json(json.as_ptr(), &mut handle) },
        Ym2dStatus::Ok
    );

    let edges = [0u32];
    let signs = [1i32];
    let run = || {
        let (mut re, mut im, mut se) = (0.0, 0.0, 0.0);
        let status = unsafe {
            ym2d_wilson_estimate(
                YM2D_GROUP_SU2,
                handle,
                edges.as_ptr(),
                signs.as_ptr(),
                1,
                1,
                4000,
                4,
                42,
                &mut re,
                &mut im,
                &mut se,
            )
        };
        assert_eq!(status, Ym2dStatus::Ok, "{}", last_error());
        (re, im, se)
    };
    let (re1, im1, se1) = run();
    let (re2, im2, se2) = run();
    assert_eq!(
        (re1, im1, se1),
        (re2, im2, se2),
        "seeded runs must agree exactly"
    );
    assert!(se1 > 0.0);
    assert!(
        re1.abs() <= 2.0 + 1e-9,
        "character of a 2-dim irrep is bounded by 2"
    );

    unsafe { ym2d_graph_free(handle) };
}

#[test]
fn generated_header_covers_the_surface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ym2d.h"))
        .expect("include/ym2d.h should be generated by the build script");
    for symbol in [
        "ym2d_version",
        "ym2d_last_error",
        "ym2d_graph_from_json",
        "ym2d_graph_free",
        "ym2d_graph_counts",
        "ym2d_heat_kernel",
        "ym2d_log_heat_kernel",
        "ym2d_partition_value",
        "ym2d_sphere_loop_moment",
        "ym2d_wilson_estimate",
        "YM2D_GROUP_SU2",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
