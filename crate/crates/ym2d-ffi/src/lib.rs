//! C ABI for the `ym2d` library.
//!
//! Conventions:
//! * Every fallible function returns a [`Ym2dStatus`] code and writes its
//!   results through out-pointers, touched only on `YM2D_STATUS_OK`.
//! * A failing call stores a human-readable message retrievable with
//!   [`ym2d_last_error`]; the message is thread-local and remains valid
//!   until the next failing call on the same thread.
//! * Groups are passed as the integer codes [`YM2D_GROUP_U1`],
//!   [`YM2D_GROUP_SU2`], [`YM2D_GROUP_SO3`]; invalid codes are rejected.
//! * Graphs are opaque handles created by [`ym2d_graph_from_json`] and
//!   released with [`ym2d_graph_free`]. Handles are not thread-safe to
//!   mutate, but all operations here only read them.
//! * Panics never unwind across the boundary; they surface as
//!   `YM2D_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ym2d::error::Error;
use ym2d::graph::{PathWord, SurfaceGraph};
use ym2d::group::{ConjClass, Group, Irrep};
use ym2d::heat::{heat_kernel, log_heat_kernel};
use ym2d::partition::{z_eval, SurfaceSignature};
use ym2d::rng::stream;
use ym2d::ym::{exact_sphere_loop_moment, metropolis_sample, wilson_estimator, ConditioningSpec};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ym2dStatus {
    /// Success; out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 3,
    /// A time/area parameter was outside its admissible range.
    InvalidTime = 4,
    /// Objects from different groups were combined.
    GroupMismatch = 5,
    /// Malformed or inconsistent graph data.
    InvalidGraph = 6,
    /// A character series could not resolve the requested value.
    SeriesFailure = 7,
    /// A density or conditioning value was degenerate.
    DegenerateDensity = 8,
    /// I/O or (de)serialization failure.
    IoFailure = 9,
    /// An internal panic was caught at the boundary.
    Panic = 10,
}

/// Group code for U(1).
pub const YM2D_GROUP_U1: u32 = 0;
/// Group code for SU(2).
pub const YM2D_GROUP_SU2: u32 = 1;
/// Group code for SO(3).
pub const YM2D_GROUP_SO3: u32 = 2;

/// Opaque surface-graph handle.
pub struct Ym2dGraph(SurfaceGraph);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg
        .chars()
        .map(|c| if c == '\0' { ' ' } else { c })
        .collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn status_of(e: &Error) -> Ym2dStatus {
    match e {
        Error::GroupMismatch(..) => Ym2dStatus::GroupMismatch,
        Error::InvalidTime(..) => Ym2dStatus::InvalidTime,
        Error::SeriesCutoffExceeded | Error::SeriesResolution { .. } => Ym2dStatus::SeriesFailure,
        Error::NonpositiveDensity { .. } | Error::NegligibleConditioning(..) => {
            Ym2dStatus::DegenerateDensity
        }
        Error::InvalidGraph(..) => Ym2dStatus::InvalidGraph,
        Error::InvalidIndex(..)
        | Error::InvalidWord(..)
        | Error::InvalidArgument(..)
        | Error::NoIntegerSolution(..) => Ym2dStatus::InvalidArgument,
        Error::Io(..) | Error::Json(..) => Ym2dStatus::IoFailure,
    }
}

fn fail(e: &Error) -> Ym2dStatus {
    set_error(&e.to_string());
    status_of(e)
}

fn fail_with(status: Ym2dStatus, msg: &str) -> Ym2dStatus {
    set_error(msg);
    status
}

fn group_of(code: u32) -> Result<Group, Ym2dStatus> {
    match code {
        YM2D_GROUP_U1 => Ok(Group::U1),
        YM2D_GROUP_SU2 => Ok(Group::Su2),
        YM2D_GROUP_SO3 => Ok(Group::So3),
        other => Err(fail_with(
            Ym2dStatus::InvalidArgument,
            &format!("unknown group code {other} (expected 0, 1, or 2)"),
        )),
    }
}

/// Run `f` with panics converted to `YM2D_STATUS_PANIC`.
fn guarded(f: impl FnOnce() -> Ym2dStatus) -> Ym2dStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail_with(
            Ym2dStatus::Panic,
            "internal panic caught at the FFI boundary",
        ),
    }
}

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn ym2d_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread (empty if none).
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ym2d_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a surface graph from its JSON description and validate it.
/// On success writes a handle that must be released with `ym2d_graph_free`.
///
/// # Safety
/// `json` must be a null-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ym2d_graph_from_json(
    json: *const c_char,
    out: *mut *mut Ym2dGraph,
) -> Ym2dStatus {
    if json.is_null() || out.is_null() {
        return fail_with(Ym2dStatus::NullPointer, "json and out must be non-null");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return fail_with(Ym2dStatus::InvalidUtf8, "graph JSON is not valid UTF-8"),
    };
    guarded(|| {
        let graph: SurfaceGraph = match serde_json::from_str(text) {
            Ok(g) => g,
            Err(e) => return fail_with(Ym2dStatus::IoFailure, &format!("json error: {e}")),
        };
        let report = graph.validate();
        if !report.is_ok() {
            return fail_with(
                Ym2dStatus::InvalidGraph,
                &format!("invalid graph: {}", report.violations.join("; ")),
            );
        }
        *out = Box::into_raw(Box::new(Ym2dGraph(graph)));
        Ym2dStatus::Ok
    })
}

/// Release a graph handle. A null pointer is a no-op.
///
/// # Safety
/// `graph` must be a handle from `ym2d_graph_from_json`, released once.
#[no_mangle]
pub unsafe extern "C" fn ym2d_graph_free(graph: *mut Ym2dGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Report the vertex, edge, and face counts of a graph.
///
/// # Safety
/// All pointers must be valid; `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ym2d_graph_counts(
    graph: *const Ym2dGraph,
    out_vertices: *mut u32,
    out_edges: *mut u32,
    out_faces: *mut u32,
) -> Ym2dStatus {
    if graph.is_null() || out_vertices.is_null() || out_edges.is_null() || out_faces.is_null() {
        return fail_with(Ym2dStatus::NullPointer, "all pointers must be non-null");
    }
    let g = &(*graph).0;
    *out_vertices = g.n_vertices as u32;
    *out_edges = g.n_edges() as u32;
    *out_faces = g.n_faces() as u32;
    Ym2dStatus::Ok
}

/// Heat-kernel density `p_t` at a conjugacy class angle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ym2d_heat_kernel(
    group: u32,
    t: f64,
    angle: f64,
    tol: f64,
    out: *mut f64,
) -> Ym2dStatus {
    if out.is_null() {
        return fail_with(Ym2dStatus::NullPointer, "out must be non-null");
    }
    guarded(|| {
        let g = match group_of(group) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let class = match ConjClass::new(g, angle) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match heat_kernel(g, t, &class, tol) {
            Ok(v) => {
                *out = v;
                Ym2dStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Natural logarithm of the heat-kernel density, finite even where the
/// value itself underflows double precision.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ym2d_log_heat_kernel(
    group: u32,
    t: f64,
    angle: f64,
    tol: f64,
    out: *mut f64,
) -> Ym2dStatus {
    if out.is_null() {
        return fail_with(Ym2dStatus::NullPointer, "out must be non-null");
    }
    guarded(|| {
        let g = match group_of(group) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let class = match ConjClass::new(g, angle) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        match log_heat_kernel(g, t, &class, tol) {
            Ok(v) => {
                *out = v;
                Ym2dStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Partition function `Z_{p,g,T}(classes)` of a surface with `boundaries`
/// boundary circles, genus `genus`, total area `area`, and the given
/// boundary class angles (`n_classes` must equal `boundaries`; pass null
/// with `n_classes = 0` for a closed surface).
///
/// # Safety
/// `class_angles` must point to `n_classes` doubles (or be null when
/// `n_classes` is 0); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ym2d_partition_value(
    group: u32,
    boundaries: u32,
    genus: u32,
    area: f64,
    class_angles: *const f64,
    n_classes: usize,
    tol: f64,
    out: *mut f64,
) -> Ym2dStatus {
    if out.is_null() || (class_angles.is_null() && n_classes > 0) {
        return fail_with(
            Ym2dStatus::NullPointer,
            "out (and class angles) must be non-null",
        );
    }
    let angles: &[f64] = if n_classes == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(class_angles, n_classes)
    };
    guarded(|| {
        let g = match group_of(group) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let classes: Result<Vec<ConjClass>, Error> =
            angles.iter().map(|&a| ConjClass::new(g, a)).collect();
        let classes = match classes {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        let sig = SurfaceSignature::new(boundaries as usize, genus as usize, area);
        match z_eval(g, &sig, &classes, tol) {
            Ok(z) => {
                *out = z.value;
                Ym2dStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Closed-form sphere Wilson-loop moment: the expected character of the
/// holonomy of a simple loop enclosing `loop_area` on a sphere of total
/// area `total_area`, in the irrep with the given label.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ym2d_sphere_loop_moment(
    group: u32,
    loop_area: f64,
    total_area: f64,
    label: i64,
    tol: f64,
    out: *mut f64,
) -> Ym2dStatus {
    if out.is_null() {
        return fail_with(Ym2dStatus::NullPointer, "out must be non-null");
    }
    guarded(|| {
        let g = match group_of(group) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let beta = match Irrep::new(g, label) {
            Ok(b) => b,
            Err(e) => return fail(&e),
        };
        match exact_sphere_loop_moment(g, loop_area, total_area, &beta, tol) {
            Ok(v) => {
                *out = v;
                Ym2dStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Estimate a Wilson-loop character moment by running a seeded Metropolis
/// chain over the edge measure of `graph` and averaging the character of
/// the loop holonomy (first tenth of the chain discarded as burn-in).
///
/// The loop is given as `word_len` letters; letter `i` traverses edge
/// `word_edges[i]` forward if `word_signs[i] > 0` and backward otherwise.
/// Identical inputs produce identical estimates (the chain is seeded).
///
/// # Safety
/// `graph` must be a live handle; `word_edges`/`word_signs` must point to
/// `word_len` elements; the three out-pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ym2d_wilson_estimate(
    group: u32,
    graph: *const Ym2dGraph,
    word_edges: *const u32,
    word_signs: *const i32,
    word_len: usize,
    label: i64,
    steps: usize,
    stride: usize,
    seed: u64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_stderr: *mut f64,
) -> Ym2dStatus {
    if graph.is_null()
        || word_edges.is_null()
        || word_signs.is_null()
        || out_re.is_null()
        || out_im.is_null()
        || out_stderr.is_null()
    {
        return fail_with(Ym2dStatus::NullPointer, "all pointers must be non-null");
    }
    if word_len == 0 {
        return fail_with(
            Ym2dStatus::InvalidArgument,
            "the loop word must be nonempty",
        );
    }
    let edges = std::slice::from_raw_parts(word_edges, word_len);
    let signs = std::slice::from_raw_parts(word_signs, word_len);
    let g_ref = &(*graph).0;
    guarded(|| {
        let g = match group_of(group) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let word = PathWord::new(
            edges
                .iter()
                .zip(signs)
                .map(|(&e, &s)| (e as usize, if s > 0 { 1i8 } else { -1i8 }))
                .collect(),
        );
        let beta = match Irrep::new(g, label) {
            Ok(b) => b,
            Err(e) => return fail(&e),
        };
        let mut rng = stream(seed, 0);
        let run = metropolis_sample(
            g,
            g_ref,
            &ConditioningSpec::none(),
            steps,
            None,
            stride,
            &mut rng,
        )
        .and_then(|chain| {
            let burn = chain.samples.len() / 10;
            wilson_estimator(&chain, &word, &beta, burn)
        });
        match run {
            Ok((mean, se)) => {
                *out_re = mean.re;
                *out_im = mean.im;
                *out_stderr = se;
                Ym2dStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
