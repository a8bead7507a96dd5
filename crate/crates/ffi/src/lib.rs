//! C interface to `webmaps`.
//!
//! Graphs, maps and evaluated regions are opaque handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns a [`WmStatus`]; on failure [`wm_last_error`] describes the error
//! for the calling thread. Strings returned through out-parameters are
//! allocated here and must be released with [`wm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use webmaps::algebra::{complement, join, leq, meet_from_maps};
use webmaps::navlang::{evaluate, parse, RegionResult, Semantics};
use webmaps::{
    check, fingerprint, good_map, k_map, load_graph_files, load_graph_str, score_nodes, Error,
    LabeledGraph, Map, NodeId, ScoreFn,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Io = 5,
    RegionMismatch = 6,
    UnknownNode = 7,
    Cyclic = 8,
    NotGood = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WmSemantics {
    Visited = 0,
    Successful = 1,
}

/// Predicate verdicts of [`wm_check`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WmVerdict {
    pub is_map: bool,
    pub is_complete: bool,
    pub is_route_complete: bool,
    pub is_non_redundant: bool,
    pub is_good: bool,
}

pub struct WmGraph {
    graph: LabeledGraph,
}

pub struct WmMap {
    map: Map,
}

pub struct WmRegion {
    result: RegionResult,
    selected: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', "\\0")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

struct Failure(WmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } | Error::Syntax { .. } => WmStatus::Parse,
            Error::UnknownNode(_) => WmStatus::UnknownNode,
            Error::Cyclic { .. } => WmStatus::Cyclic,
            Error::RegionMismatch { .. } => WmStatus::RegionMismatch,
            Error::NotGood(_) => WmStatus::NotGood,
            Error::InvalidScores(_) => WmStatus::InvalidArgument,
            Error::Io(_) => WmStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

type Outcome<T = ()> = Result<T, Failure>;

/// Runs `f`, converting errors and panics into a status and the thread's
/// last error message.
fn guard(f: impl FnOnce() -> Outcome) -> WmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WmStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_owned());
            set_error(format!("internal panic: {message}"));
            WmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(WmStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(WmStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Outcome<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let s = CString::new(s).map_err(|e| Failure(WmStatus::InvalidArgument, e.to_string()))?;
    *out = s.into_raw();
    Ok(())
}

unsafe fn node_set(
    nodes: *const *const c_char,
    len: usize,
) -> Outcome<std::collections::BTreeSet<NodeId>> {
    if len == 0 {
        return Ok(Default::default());
    }
    if nodes.is_null() {
        return Err(null("node array"));
    }
    std::slice::from_raw_parts(nodes, len)
        .iter()
        .map(|&p| {
            let s = text(p, "node id")?;
            NodeId::new(s).map_err(|m| Failure(WmStatus::InvalidArgument, m))
        })
        .collect()
}

/// Loads a region from an edge file and an optional (NULL) attribute file.
///
/// # Safety
/// Paths must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_graph_load_files(
    edges_path: *const c_char,
    attrs_path: *const c_char,
    out: *mut *mut WmGraph,
) -> WmStatus {
    guard(|| {
        let edges = text(edges_path, "edge path")?;
        let attrs = optional_text(attrs_path, "attribute path")?;
        let graph = load_graph_files(Path::new(edges), attrs.map(Path::new))?;
        put(out, WmGraph { graph })
    })
}

/// Loads a region from edge text and optional (NULL) attribute text.
///
/// # Safety
/// Texts must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_graph_load_str(
    edges: *const c_char,
    attrs: *const c_char,
    out: *mut *mut WmGraph,
) -> WmStatus {
    guard(|| {
        let edges = text(edges, "edge text")?;
        let attrs = optional_text(attrs, "attribute text")?;
        put(
            out,
            WmGraph {
                graph: load_graph_str(edges, attrs)?,
            },
        )
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wm_graph_free(g: *mut WmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of nodes, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn wm_graph_node_count(g: *const WmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Number of labeled edges, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn wm_graph_edge_count(g: *const WmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Hex region id of the graph.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_graph_fingerprint(
    g: *const WmGraph,
    out: *mut *mut c_char,
) -> WmStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        put_string(out, fingerprint(&g.graph).to_string())
    })
}

/// Good map of `g` over `len` node ids.
///
/// # Safety
/// `nodes` must point to `len` NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_good_map(
    g: *const WmGraph,
    nodes: *const *const c_char,
    len: usize,
    out: *mut *mut WmMap,
) -> WmStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let n = node_set(nodes, len)?;
        put(
            out,
            WmMap {
                map: good_map(&g.graph, &n)?,
            },
        )
    })
}

/// Good map over the nodes scoring at least `k` under `score`
/// (`indegree`, `outdegree` or `pagerank`).
///
/// # Safety
/// `score` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_k_map(
    g: *const WmGraph,
    score: *const c_char,
    k: f64,
    out: *mut *mut WmMap,
) -> WmStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let f: ScoreFn = text(score, "score")?
            .parse()
            .map_err(|m| Failure(WmStatus::InvalidArgument, m))?;
        let table = score_nodes(&g.graph, f);
        put(
            out,
            WmMap {
                map: k_map(&g.graph, &table, k)?,
            },
        )
    })
}

/// Parses a map file. The result is not known to be good until
/// [`wm_map_verify`] succeeds.
///
/// # Safety
/// `map_text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_map_parse(map_text: *const c_char, out: *mut *mut WmMap) -> WmStatus {
    guard(|| {
        let s = text(map_text, "map text")?;
        put(
            out,
            WmMap {
                map: Map::parse(s)?,
            },
        )
    })
}

/// Checks the map against `g` and records the outcome on the map, so that
/// [`wm_meet`] accepts it when good.
///
/// # Safety
/// Both handles must be live; `m` is modified in place.
#[no_mangle]
pub unsafe extern "C" fn wm_map_verify(m: *mut WmMap, g: *const WmGraph) -> WmStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let m = m.as_mut().ok_or_else(|| null("map"))?;
        m.map = m.map.clone().verify(&g.graph)?;
        Ok(())
    })
}

/// Map file text.
///
/// # Safety
/// `m` must be a live map handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_map_to_string(m: *const WmMap, out: *mut *mut c_char) -> WmStatus {
    guard(|| {
        let m = borrow(m, "map")?;
        put_string(out, m.map.to_text())
    })
}

/// # Safety
/// `m` must be NULL or a live map handle.
#[no_mangle]
pub unsafe extern "C" fn wm_map_node_count(m: *const WmMap) -> usize {
    m.as_ref().map_or(0, |m| m.map.nodes().len())
}

/// # Safety
/// `m` must be NULL or a live map handle.
#[no_mangle]
pub unsafe extern "C" fn wm_map_edge_count(m: *const WmMap) -> usize {
    m.as_ref().map_or(0, |m| m.map.edges().len())
}

/// Whether the map has the edge `x -> y`; false on NULL or invalid input.
///
/// # Safety
/// Strings must be NUL-terminated; `m` must be NULL or a live map handle.
#[no_mangle]
pub unsafe extern "C" fn wm_map_has_edge(
    m: *const WmMap,
    x: *const c_char,
    y: *const c_char,
) -> bool {
    let (Some(m), Ok(x), Ok(y)) = (m.as_ref(), text(x, "x"), text(y, "y")) else {
        return false;
    };
    m.map.has_edge(x, y)
}

/// # Safety
/// `m` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wm_map_free(m: *mut WmMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_join(
    m1: *const WmMap,
    m2: *const WmMap,
    g: *const WmGraph,
    out: *mut *mut WmMap,
) -> WmStatus {
    guard(|| {
        let (m1, m2, g) = (
            borrow(m1, "first map")?,
            borrow(m2, "second map")?,
            borrow(g, "graph")?,
        );
        put(
            out,
            WmMap {
                map: join(&m1.map, &m2.map, &g.graph)?,
            },
        )
    })
}

/// Meet computed from the two maps alone. Both must be known good: built by
/// this library or accepted by [`wm_map_verify`].
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_meet(
    m1: *const WmMap,
    m2: *const WmMap,
    out: *mut *mut WmMap,
) -> WmStatus {
    guard(|| {
        let (m1, m2) = (borrow(m1, "first map")?, borrow(m2, "second map")?);
        put(
            out,
            WmMap {
                map: meet_from_maps(&m1.map, &m2.map)?,
            },
        )
    })
}

/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_complement(
    m: *const WmMap,
    g: *const WmGraph,
    out: *mut *mut WmMap,
) -> WmStatus {
    guard(|| {
        let (m, g) = (borrow(m, "map")?, borrow(g, "graph")?);
        put(
            out,
            WmMap {
                map: complement(&m.map, &g.graph)?,
            },
        )
    })
}

/// Writes whether `m1` lies below `m2` in the map order.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_leq(m1: *const WmMap, m2: *const WmMap, out: *mut bool) -> WmStatus {
    guard(|| {
        let (m1, m2) = (borrow(m1, "first map")?, borrow(m2, "second map")?);
        let below = leq(&m1.map, &m2.map)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = below;
        Ok(())
    })
}

/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_check(
    m: *const WmMap,
    g: *const WmGraph,
    out: *mut WmVerdict,
) -> WmStatus {
    guard(|| {
        let (m, g) = (borrow(m, "map")?, borrow(g, "graph")?);
        let v = check(&m.map, &g.graph)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = WmVerdict {
            is_map: v.is_map,
            is_complete: v.is_complete,
            is_route_complete: v.is_route_complete,
            is_non_redundant: v.is_non_redundant,
            is_good: v.is_good(),
        };
        Ok(())
    })
}

/// Evaluates a navigational expression from `seed`.
///
/// # Safety
/// Strings must be NUL-terminated; `g` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_evaluate(
    g: *const WmGraph,
    seed: *const c_char,
    expr: *const c_char,
    semantics: WmSemantics,
    out: *mut *mut WmRegion,
) -> WmStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let seed =
            NodeId::new(text(seed, "seed")?).map_err(|m| Failure(WmStatus::InvalidArgument, m))?;
        let e = parse(text(expr, "expression")?)?;
        let semantics = match semantics {
            WmSemantics::Visited => Semantics::Visited,
            WmSemantics::Successful => Semantics::Successful,
        };
        let result = evaluate(&g.graph, &seed, &e, semantics)?;
        let selected = result
            .selected
            .iter()
            .map(|n| CString::new(n.as_str()).expect("node ids hold no NUL"))
            .collect();
        put(out, WmRegion { result, selected })
    })
}

/// Copies the extracted region into a new graph handle.
///
/// # Safety
/// `r` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_region_graph(r: *const WmRegion, out: *mut *mut WmGraph) -> WmStatus {
    guard(|| {
        let r = borrow(r, "region")?;
        put(
            out,
            WmGraph {
                graph: r.result.region.clone(),
            },
        )
    })
}

/// # Safety
/// `r` must be NULL or a live region handle.
#[no_mangle]
pub unsafe extern "C" fn wm_region_selected_count(r: *const WmRegion) -> usize {
    r.as_ref().map_or(0, |r| r.selected.len())
}

/// The `i`-th selected node in id order, or NULL when out of range. The
/// string is owned by the region handle.
///
/// # Safety
/// `r` must be NULL or a live region handle.
#[no_mangle]
pub unsafe extern "C" fn wm_region_selected(r: *const WmRegion, i: usize) -> *const c_char {
    r.as_ref()
        .and_then(|r| r.selected.get(i))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `r` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wm_region_free(r: *mut WmRegion) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Releases a string returned through an out-parameter. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn wm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
