//! C ABI over the pattern-views repository.
//!
//! Handles are opaque. Every function returns a [`PvStatus`]; on failure the
//! message and error code of the last error on the calling thread are
//! available through [`pv_last_error_message`] and [`pv_last_error_code`].
//! Strings returned through `out` parameters are owned by the caller and must
//! be released with [`pv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::num::NonZeroU32;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pattern_views::corpus;
use pattern_views::graph::{self, ExportFormat, GraphError, ValidationScope};
use pattern_views::model::{ModelError, NewRelation, PatternId, ViewId};
use pattern_views::store::{
    check_version, import_bundle, Bundle, EntityKind, EntityRef, ImportMode, Store, StoreError,
};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    NotFound = 3,
    Conflict = 4,
    Invalid = 5,
    Malformed = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque repository handle.
pub struct PvRepository {
    store: Store,
}

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

struct Failure {
    status: PvStatus,
    code: String,
    message: String,
}

impl Failure {
    fn new(status: PvStatus, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

fn status_for(code: &str) -> PvStatus {
    match code {
        "NotFound" | "UnknownEntity" | "UnknownLanguage" | "NotMember" => PvStatus::NotFound,
        "VersionConflict" | "DuplicateId" | "DuplicateRelation" | "AlreadyMember" | "AlreadyReferenced"
        | "PatternInUse" | "LanguageNotEmpty" | "NonEmptyStore" => PvStatus::Conflict,
        "MalformedBundle" | "MalformedBody" | "UnsupportedFormat" | "MalformedGraph" => PvStatus::Malformed,
        "Io" => PvStatus::Io,
        _ => PvStatus::Invalid,
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::new(status_for(e.code()), e.code(), e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::new(status_for(e.code()), e.code(), e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::new(status_for(e.code()), e.code(), e.to_string())
    }
}

fn set_last_error(code: &str, message: &str) {
    let clean = |s: &str| CString::new(s.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(LastError {
            code: clean(code),
            message: clean(message),
        })
    });
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PvStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PvStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.code, &failure.message);
            failure.status
        }
        Err(_) => {
            set_last_error("Panic", "internal panic");
            PvStatus::Panic
        }
    }
}

unsafe fn repo<'a>(handle: *const PvRepository) -> Result<&'a PvRepository, Failure> {
    handle
        .as_ref()
        .ok_or_else(|| Failure::new(PvStatus::NullArgument, "NullArgument", "repository handle is null"))
}

unsafe fn text<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::new(
            PvStatus::NullArgument,
            "NullArgument",
            format!("`{name}` is null"),
        ));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(PvStatus::InvalidUtf8, "InvalidUtf8", format!("`{name}` is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, bytes: Vec<u8>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(PvStatus::NullArgument, "NullArgument", "`out` is null"));
    }
    let s = CString::new(bytes)
        .map_err(|_| Failure::new(PvStatus::Malformed, "Malformed", "output contains a nul byte"))?;
    *out = s.into_raw();
    Ok(())
}

unsafe fn put<T>(out: *mut T, value: T) {
    if !out.is_null() {
        *out = value;
    }
}

/// Creates an empty in-memory repository. Never returns null.
#[no_mangle]
pub extern "C" fn pv_repository_new() -> *mut PvRepository {
    Box::into_raw(Box::new(PvRepository {
        store: Store::in_memory(),
    }))
}

/// Opens (or creates on first write) the state file at `path`.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pv_repository_open(path: *const c_char, out: *mut *mut PvRepository) -> PvStatus {
    guard(|| {
        let path = text(path, "path")?;
        if out.is_null() {
            return Err(Failure::new(PvStatus::NullArgument, "NullArgument", "`out` is null"));
        }
        let store = Store::open(path)?;
        *out = Box::into_raw(Box::new(PvRepository { store }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pv_repository_free(handle: *mut PvRepository) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Installs the built-in seed corpus into an empty repository.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pv_repository_seed_corpus(handle: *const PvRepository) -> PvStatus {
    guard(|| {
        repo(handle)?.store.import(&corpus::seed_bundle(), ImportMode::Strict)?;
        Ok(())
    })
}

/// Imports a bundle document into an empty repository.
///
/// # Safety
/// `handle` must be live and `bundle_json` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn pv_repository_import_bundle(
    handle: *const PvRepository,
    bundle_json: *const c_char,
    lenient: bool,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?;
        let bundle = Bundle::from_json(text(bundle_json, "bundle_json")?.as_bytes())?;
        let mode = if lenient {
            ImportMode::Lenient
        } else {
            ImportMode::Strict
        };
        repo.store.import(&bundle, mode)?;
        Ok(())
    })
}

/// Writes the repository as a canonical-json bundle to `*out`.
///
/// # Safety
/// `handle` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pv_repository_export_bundle(handle: *const PvRepository, out: *mut *mut c_char) -> PvStatus {
    guard(|| put_string(out, repo(handle)?.store.export().to_canonical_json()))
}

/// Renders a view graph as `dot`, `graphml` or `json`. With `with_layout`
/// the output includes positions computed from `seed` and `iterations`
/// (0 selects the default).
///
/// # Safety
/// `handle` must be live, strings nul-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pv_render_view(
    handle: *const PvRepository,
    view_id: *const c_char,
    format: *const c_char,
    with_layout: bool,
    seed: u64,
    iterations: u32,
    out: *mut *mut c_char,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?.store.snapshot();
        let format: ExportFormat = text(format, "format")?.parse()?;
        let graph = graph::build_view_graph(&repo, &ViewId::new(text(view_id, "view_id")?))?;
        let iterations = NonZeroU32::new(iterations).unwrap_or(graph::DEFAULT_ITERATIONS);
        let layout = with_layout.then(|| graph::layout(&graph, seed, iterations));
        put_string(out, graph::export_graph(&graph, format, layout.as_ref()))
    })
}

/// Validates one view, or the whole repository when `view_id` is null.
/// Writes the diagnostics as a json array and their error-severity count.
///
/// # Safety
/// `handle` must be live, `view_id` null or nul-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pv_validate(
    handle: *const PvRepository,
    view_id: *const c_char,
    out: *mut *mut c_char,
    error_count: *mut usize,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?.store.snapshot();
        let scope = if view_id.is_null() {
            ValidationScope::Repository
        } else {
            ValidationScope::View(ViewId::new(text(view_id, "view_id")?))
        };
        let diagnostics = graph::validate(&repo, &scope)?;
        put(error_count, diagnostics.iter().filter(|d| d.is_error()).count());
        put_string(
            out,
            pattern_views::canonical::to_vec(&diagnostics).expect("diagnostics serialize"),
        )
    })
}

/// Patterns outside the view within `depth` language relations, as json.
///
/// # Safety
/// `handle` must be live, `view_id` nul-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pv_neighborhood(
    handle: *const PvRepository,
    view_id: *const c_char,
    depth: i64,
    out: *mut *mut c_char,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?.store.snapshot();
        let entries = graph::neighborhood(&repo, &ViewId::new(text(view_id, "view_id")?), depth)?;
        put_string(
            out,
            pattern_views::canonical::to_vec(&entries).expect("entries serialize"),
        )
    })
}

/// Current version of a view, for use as `expected_version`.
///
/// # Safety
/// `handle` must be live, `view_id` nul-terminated and `version` valid.
#[no_mangle]
pub unsafe extern "C" fn pv_view_version(
    handle: *const PvRepository,
    view_id: *const c_char,
    version: *mut u64,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?.store.snapshot();
        let id = text(view_id, "view_id")?;
        let view = repo
            .view(id)
            .ok_or_else(|| Failure::new(PvStatus::NotFound, "NotFound", format!("`{id}` not found")))?;
        put(version, view.version);
        Ok(())
    })
}

/// Adds a member to a view at `expected_version`; writes the new version.
///
/// # Safety
/// `handle` must be live, strings nul-terminated, `new_version` null or valid.
#[no_mangle]
pub unsafe extern "C" fn pv_view_add_pattern(
    handle: *const PvRepository,
    view_id: *const c_char,
    pattern_id: *const c_char,
    expected_version: u64,
    new_version: *mut u64,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?;
        let view = ViewId::new(text(view_id, "view_id")?);
        let pattern = PatternId::new(text(pattern_id, "pattern_id")?);
        let updated = repo.store.transact(|r| {
            check_version(
                r,
                &EntityRef::new(EntityKind::View, view.as_str()),
                Some(expected_version),
            )?;
            r.add_pattern_to_view(&view, &pattern).map_err(StoreError::from)
        })?;
        put(new_version, updated.version);
        Ok(())
    })
}

/// Adds a view-owned relation described by json
/// `{"sourceId","targetId","type","description"}`; writes the relation id
/// to `*relation_id` and the new view version.
///
/// # Safety
/// `handle` must be live, strings nul-terminated, `relation_id` valid.
#[no_mangle]
pub unsafe extern "C" fn pv_view_add_relation(
    handle: *const PvRepository,
    view_id: *const c_char,
    relation_json: *const c_char,
    expected_version: u64,
    relation_id: *mut *mut c_char,
    new_version: *mut u64,
) -> PvStatus {
    guard(|| {
        let repo = repo(handle)?;
        let view = ViewId::new(text(view_id, "view_id")?);
        let new: NewRelation = serde_json::from_str(text(relation_json, "relation_json")?)
            .map_err(|e| Failure::new(PvStatus::Malformed, "MalformedBody", e.to_string()))?;
        let (relation, updated) = repo.store.transact(|r| {
            check_version(
                r,
                &EntityRef::new(EntityKind::View, view.as_str()),
                Some(expected_version),
            )?;
            r.add_view_relation(&view, new).map_err(StoreError::from)
        })?;
        put_string(relation_id, relation.id.as_str().as_bytes().to_vec())?;
        put(new_version, updated.version);
        Ok(())
    })
}

/// Checks that a bundle would import, without touching any repository.
///
/// # Safety
/// `bundle_json` must be nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn pv_check_bundle(bundle_json: *const c_char, lenient: bool) -> PvStatus {
    guard(|| {
        let bundle = Bundle::from_json(text(bundle_json, "bundle_json")?.as_bytes())?;
        let mode = if lenient {
            ImportMode::Lenient
        } else {
            ImportMode::Strict
        };
        import_bundle(&bundle, mode)?;
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Module error code of the last failure on this thread (for example
/// `EndpointNotInView`), or null.
#[no_mangle]
pub extern "C" fn pv_last_error_code() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.code.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
