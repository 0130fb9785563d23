//! C ABI for the verifly analysis engine.
//!
//! Usage from C: create a context, register sources by name, then call
//! `vfly_check` to get diagnostics as a JSON string. The context keeps the
//! last fixpoint, so repeated checks after small edits update incrementally.
//! All functions are safe to call from a single thread per context; separate
//! contexts are independent.

use std::collections::BTreeMap;
use std::ffi::{c_char, c_int, CStr, CString};

use verifly::chc::ChcProgram;
use verifly::diag::FileTable;
use verifly::engine::{AnalysisGraph, CancelToken};
use verifly::server::{run_analysis, wire_diagnostics, DomainChoice};

/// Success.
pub const VFLY_OK: c_int = 0;
/// A required pointer argument was null.
pub const VFLY_ERR_NULL: c_int = 1;
/// A string argument was not valid UTF-8.
pub const VFLY_ERR_UTF8: c_int = 2;
/// The domain name was not one of modes, types, product, auto.
pub const VFLY_ERR_DOMAIN: c_int = 3;
/// The context has no sources to analyze.
pub const VFLY_ERR_EMPTY: c_int = 4;

/// Opaque analysis context. Owns the registered sources and the cached
/// fixpoint used for incremental re-analysis.
pub struct VflyContext {
    sources: BTreeMap<String, String>,
    files: FileTable,
    state: Option<(ChcProgram, AnalysisGraph)>,
    domain: DomainChoice,
}

/// Creates an empty context. Free with `vfly_context_free`.
#[no_mangle]
pub extern "C" fn vfly_context_new() -> *mut VflyContext {
    Box::into_raw(Box::new(VflyContext {
        sources: BTreeMap::new(),
        files: FileTable::new(),
        state: None,
        domain: DomainChoice::Auto,
    }))
}

/// Frees a context. A null pointer is ignored.
#[no_mangle]
pub extern "C" fn vfly_context_free(ctx: *mut VflyContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Selects the abstract domain: "modes", "types", "product", or "auto"
/// (the default; picks based on the properties the program asserts).
#[no_mangle]
pub extern "C" fn vfly_set_domain(ctx: *mut VflyContext, name: *const c_char) -> c_int {
    let (Some(ctx), false) = (unsafe { ctx.as_mut() }, name.is_null()) else {
        return VFLY_ERR_NULL;
    };
    let Ok(name) = unsafe { CStr::from_ptr(name) }.to_str() else {
        return VFLY_ERR_UTF8;
    };
    let Some(choice) = DomainChoice::parse(name) else {
        return VFLY_ERR_DOMAIN;
    };
    if choice != ctx.domain {
        ctx.domain = choice;
        ctx.state = None; // cached fixpoint is for the old domain
    }
    VFLY_OK
}

/// Registers or replaces the source text filed under `name`. Passing a null
/// `text` removes the entry.
#[no_mangle]
pub extern "C" fn vfly_set_source(
    ctx: *mut VflyContext,
    name: *const c_char,
    text: *const c_char,
) -> c_int {
    let (Some(ctx), false) = (unsafe { ctx.as_mut() }, name.is_null()) else {
        return VFLY_ERR_NULL;
    };
    let Ok(name) = unsafe { CStr::from_ptr(name) }.to_str() else {
        return VFLY_ERR_UTF8;
    };
    if text.is_null() {
        ctx.sources.remove(name);
        return VFLY_OK;
    }
    let Ok(text) = unsafe { CStr::from_ptr(text) }.to_str() else {
        return VFLY_ERR_UTF8;
    };
    ctx.sources.insert(name.to_string(), text.to_string());
    VFLY_OK
}

/// Analyzes the registered sources and writes a JSON object
/// `{"diagnostics": [...], "stats": {...}}` to `*out_json` as a heap
/// string. The caller owns the string and must release it with
/// `vfly_string_free`. Reuses the previous fixpoint when only part of the
/// program changed since the last call.
#[no_mangle]
pub extern "C" fn vfly_check(ctx: *mut VflyContext, out_json: *mut *mut c_char) -> c_int {
    let (Some(ctx), false) = (unsafe { ctx.as_mut() }, out_json.is_null()) else {
        return VFLY_ERR_NULL;
    };
    if ctx.sources.is_empty() {
        return VFLY_ERR_EMPTY;
    }
    let sources: Vec<(String, String)> =
        ctx.sources.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let (prev_prog, prev_graph) = match ctx.state.take() {
        Some((p, g)) => (Some(p), Some(g)),
        None => (None, None),
    };
    let outcome = run_analysis(
        &sources,
        &mut ctx.files,
        prev_prog.as_ref().zip(prev_graph),
        None,
        ctx.domain,
        &CancelToken::new(),
        false,
        false,
    )
    .expect("analysis is never cancelled here");
    let body = serde_json::json!({
        "diagnostics": wire_diagnostics(&outcome.diagnostics, &ctx.files),
        "stats": outcome.stats,
    });
    ctx.state = Some((outcome.prog, outcome.graph));
    let rendered = serde_json::to_string(&body).expect("diagnostics serialize");
    let c = CString::new(rendered).expect("JSON has no interior NUL");
    unsafe { *out_json = c.into_raw() };
    VFLY_OK
}

/// Releases a string returned by this library. A null pointer is ignored.
#[no_mangle]
pub extern "C" fn vfly_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn vfly_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
