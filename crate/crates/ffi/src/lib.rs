//! C ABI over `mule_gather`.
//!
//! Graphs and solutions are opaque heap handles released with their `_free`
//! function. Every fallible call returns an `MgStatus`; on failure a
//! message for the calling thread is available from
//! `mg_last_error_message`. Strings returned by the library are released
//! with `mg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mule_gather::geom_graph::{generate_random_udg, make_graph, read_graph, GenParams, Point, UnitDiskGraph};
use mule_gather::tour_cost::solution_cost;
use mule_gather::tree_builder::{build_gathering_tree_with, weight_constant, MuleParams, MulePolicy, MuleSolution};
use mule_gather::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Disconnected = 3,
    GenerationFailed = 4,
    RangeOutOfBounds = 5,
    Io = 6,
    Parse = 7,
    BufferTooSmall = 8,
    Internal = 9,
    Panic = 10,
}

/// MULE placement for `mg_solve`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgPolicy {
    FullScan = 0,
    CenterNode = 1,
    /// Uses the `fixed_node` argument.
    FixedNode = 2,
}

/// Opaque unit disk graph.
pub struct MgGraph(UnitDiskGraph);

/// Opaque pipeline result.
pub struct MgSolution(MuleSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MgStatus {
    match e {
        Error::InvalidInput(_) | Error::RootNotInSubset(_) | Error::NotIndependent(..) | Error::NotDominating(_) => {
            MgStatus::InvalidInput
        }
        Error::Disconnected | Error::InducedDisconnected => MgStatus::Disconnected,
        Error::GenerationFailed { .. } | Error::NoNodes { .. } => MgStatus::GenerationFailed,
        Error::RangeOutOfBounds(_) => MgStatus::RangeOutOfBounds,
        Error::Io(_) => MgStatus::Io,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => MgStatus::Parse,
        Error::BudgetExceeded(_) | Error::Internal(_) => MgStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic for `mg_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (MgStatus, String)>) -> MgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside mule_gather".into());
            MgStatus::Panic
        }
    }
}

fn lib(e: Error) -> (MgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MgStatus, String) {
    (MgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const MgGraph) -> Result<&'a UnitDiskGraph, (MgStatus, String)> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn solution_ref<'a>(s: *const MgSolution) -> Result<&'a MuleSolution, (MgStatus, String)> {
    s.as_ref().map(|s| &s.0).ok_or_else(|| null("solution"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (MgStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn mg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or null if none. Free
/// with `mg_string_free`.
#[no_mangle]
pub extern "C" fn mg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a graph from `n` coordinate pairs.
///
/// # Safety
/// `xs` and `ys` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_from_points(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut *mut MgGraph,
) -> MgStatus {
    guard(|| {
        if xs.is_null() || ys.is_null() {
            return Err(null("coordinate array"));
        }
        let xs = std::slice::from_raw_parts(xs, n);
        let ys = std::slice::from_raw_parts(ys, n);
        let g = make_graph(xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect()).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(MgGraph(g))))
    })
}

/// Generates a connected random graph on a square of the given area.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_generate(
    area: f64,
    density: f64,
    seed: u64,
    max_rejections: u32,
    out: *mut *mut MgGraph,
) -> MgStatus {
    guard(|| {
        let params = GenParams { max_rejections, ..GenParams::from_area(area, density, seed) };
        let g = generate_random_udg(&params).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(MgGraph(g))))
    })
}

/// Reads a graph in the text format written by `mule-gather gen`.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_read_file(path: *const c_char, out: *mut *mut MgGraph) -> MgStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|e| (MgStatus::InvalidInput, e.to_string()))?;
        let f = File::open(path).map_err(|e| lib(e.into()))?;
        let g = read_graph(BufReader::new(f)).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(MgGraph(g))))
    })
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_node_count(g: *const MgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Coordinates of node `v`.
///
/// # Safety
/// `g` must be a live graph handle; `x` and `y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_point(g: *const MgGraph, v: usize, x: *mut f64, y: *mut f64) -> MgStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if v >= g.n() {
            return Err((MgStatus::InvalidInput, format!("node {v} out of range")));
        }
        let p = g.point(v);
        write_out(x, p.x)?;
        write_out(y, p.y)
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_graph_free(g: *mut MgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// The constant `C` added to every reduction weight.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_weight_constant(r_m: f64, out: *mut f64) -> MgStatus {
    guard(|| write_out(out, weight_constant(r_m).map_err(lib)?))
}

/// Builds the gathering tree. `fixed_node` is read only with
/// `MG_POLICY_FIXED_NODE`.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_solve(
    g: *const MgGraph,
    r_m: f64,
    policy: MgPolicy,
    fixed_node: usize,
    out: *mut *mut MgSolution,
) -> MgStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let params = MuleParams::new(r_m).map_err(lib)?;
        let policy = match policy {
            MgPolicy::FullScan => MulePolicy::FullScan,
            MgPolicy::CenterNode => MulePolicy::CenterNode,
            MgPolicy::FixedNode => MulePolicy::Fixed(fixed_node),
        };
        let s = build_gathering_tree_with(g, &params, policy).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(MgSolution(s))))
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_solution_free(s: *mut MgSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Scalar summary of a solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgSummary {
    pub mule: usize,
    pub root: usize,
    pub cds_size: usize,
    pub weight_cds: f64,
    pub lower_bound: f64,
    pub alpha: f64,
    pub alpha_valid: bool,
    pub lb_valid: bool,
}

/// # Safety
/// `s` must be a live solution handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_solution_summary(s: *const MgSolution, out: *mut MgSummary) -> MgStatus {
    guard(|| {
        let s = solution_ref(s)?;
        write_out(
            out,
            MgSummary {
                mule: s.mule,
                root: s.root,
                cds_size: s.cds.len(),
                weight_cds: s.weight_cds,
                lower_bound: s.lower_bound,
                alpha: s.alpha,
                alpha_valid: s.alpha_valid,
                lb_valid: s.lb_valid,
            },
        )
    })
}

/// Writes the parent of every node into `parents` (length `cap`), with -1
/// for the root. Returns `MG_STATUS_BUFFER_TOO_SMALL` if `cap` is below the
/// node count.
///
/// # Safety
/// `s` must be a live solution handle; `parents` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn mg_solution_parents(s: *const MgSolution, parents: *mut i64, cap: usize) -> MgStatus {
    guard(|| {
        let s = solution_ref(s)?;
        let n = s.tree.n();
        if parents.is_null() {
            return Err(null("parents"));
        }
        if cap < n {
            return Err((MgStatus::BufferTooSmall, format!("need {n} slots, got {cap}")));
        }
        let buf = std::slice::from_raw_parts_mut(parents, n);
        for (slot, p) in buf.iter_mut().zip(&s.tree.parent) {
            *slot = p.map_or(-1, |p| p as i64);
        }
        Ok(())
    })
}

/// Copies the connected dominating set (ascending) into `nodes` and its
/// size into `len`. With a too-small buffer only `len` is written.
///
/// # Safety
/// `s` must be a live solution handle; `nodes` must hold `cap` values;
/// `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_solution_cds(s: *const MgSolution, nodes: *mut usize, cap: usize, len: *mut usize) -> MgStatus {
    guard(|| {
        let s = solution_ref(s)?;
        write_out(len, s.cds.len())?;
        if cap < s.cds.len() {
            return Err((MgStatus::BufferTooSmall, format!("need {} slots, got {cap}", s.cds.len())));
        }
        if nodes.is_null() {
            return Err(null("nodes"));
        }
        ptr::copy_nonoverlapping(s.cds.as_ptr(), nodes, s.cds.len());
        Ok(())
    })
}

/// Total tour cost of the solution's tree on `g`.
///
/// # Safety
/// Both handles must be live and `s` must come from `g`; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mg_solution_cost(g: *const MgGraph, s: *const MgSolution, out: *mut f64) -> MgStatus {
    guard(|| {
        let (g, s) = (graph_ref(g)?, solution_ref(s)?);
        let cost = solution_cost(g, &s.tree, s.mule).map_err(lib)?;
        write_out(out, cost.total)
    })
}

/// The full solution as JSON. Free with `mg_string_free`.
///
/// # Safety
/// `s` must be a live solution handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mg_solution_to_json(s: *const MgSolution, out: *mut *mut c_char) -> MgStatus {
    guard(|| {
        let s = solution_ref(s)?;
        let json = serde_json::to_string(s).map_err(|e| lib(e.into()))?;
        let c = CString::new(json).map_err(|e| (MgStatus::Internal, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}
