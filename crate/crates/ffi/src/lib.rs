// Copyright 2026 The faqai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! C interface to the faqai engine.
//!
//! Databases and queries are opaque handles created and released by this
//! library. Every fallible function returns a [`FaqStatus`]; on failure the
//! message is available from [`faq_last_error`] on the same thread. Panics
//! never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use faqai::drivers::{run_query, EvalOptions};
use faqai::error::Error;
use faqai::hypertree::build_decomposition;
use faqai::oracle::oracle_eval;
use faqai::query::{resolve, resolve_any_arity, Mode, QuerySpec};
use faqai::relation::{load_dir, load_table, Database, Table};

/// Result codes. Values match the command-line exit statuses where both
/// exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaqStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// Query refused: two or more inequalities, negative terms, unknown
    /// feature or algebra.
    Rejected = 2,
    CyclicJoin = 3,
    /// Row cap, sketch size cap, or count overflow.
    LimitExceeded = 4,
    ParseError = 5,
    IoError = 6,
    Internal = 7,
}

/// Tables added so far; the join index is built on first use.
pub struct FaqDatabase {
    tables: Vec<Table>,
    built: Option<Database>,
}

pub struct FaqQuery {
    spec: QuerySpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FaqStatus {
    match e {
        Error::Rejected(_)
        | Error::UnknownFeature(_)
        | Error::UnknownAlgebra(_)
        | Error::UnknownPreset(_) => FaqStatus::Rejected,
        Error::CyclicJoin { .. } => FaqStatus::CyclicJoin,
        Error::CapExceeded { .. } | Error::Overflow | Error::SketchTooLarge { .. } => {
            FaqStatus::LimitExceeded
        }
        Error::Csv { .. }
        | Error::NonNumeric { .. }
        | Error::RaggedRow { .. }
        | Error::DuplicateFeature { .. }
        | Error::DuplicateTable(_) => FaqStatus::ParseError,
        Error::Io(_) => FaqStatus::IoError,
        Error::InvalidArgument(_) | Error::NoTables => FaqStatus::InvalidArgument,
        _ => FaqStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (FaqStatus, String)>) -> FaqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FaqStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FaqStatus::Internal
        }
    }
}

fn fail(e: Error) -> (FaqStatus, String) {
    (status_of(&e), e.to_string())
}

fn invalid(msg: &str) -> (FaqStatus, String) {
    (FaqStatus::InvalidArgument, msg.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FaqStatus, String)> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

impl FaqDatabase {
    fn database(&mut self) -> Result<&Database, (FaqStatus, String)> {
        if self.built.is_none() {
            self.built = Some(Database::new(self.tables.clone()).map_err(fail)?);
        }
        Ok(self.built.as_ref().unwrap())
    }
}

/// Creates an empty database. Release with [`faq_database_free`].
#[no_mangle]
pub extern "C" fn faq_database_new() -> *mut FaqDatabase {
    Box::into_raw(Box::new(FaqDatabase {
        tables: Vec::new(),
        built: None,
    }))
}

/// Adds a table parsed from CSV text.
///
/// # Safety
/// `db` must come from this library; `name` and `csv` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn faq_database_add_csv(
    db: *mut FaqDatabase,
    name: *const c_char,
    csv: *const c_char,
    has_header: c_int,
) -> FaqStatus {
    guard(|| {
        let db = db.as_mut().ok_or_else(|| invalid("database is null"))?;
        let name = str_arg(name, "name")?;
        let csv = str_arg(csv, "csv")?;
        let t = load_table(csv.as_bytes(), name, has_header != 0).map_err(fail)?;
        if db.tables.iter().any(|x| x.name() == name) {
            return Err(fail(Error::DuplicateTable(name.to_string())));
        }
        db.tables.push(t);
        db.built = None;
        Ok(())
    })
}

/// Loads every `.csv` file of a directory into a new database.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn faq_database_load_dir(
    path: *const c_char,
    out: *mut *mut FaqDatabase,
) -> FaqStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let built = load_dir(Path::new(path)).map_err(fail)?;
        *out = Box::into_raw(Box::new(FaqDatabase {
            tables: built.tables().to_vec(),
            built: Some(built),
        }));
        Ok(())
    })
}

/// # Safety
/// `db` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn faq_database_free(db: *mut FaqDatabase) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}

/// Table count, largest table size, and feature count.
///
/// # Safety
/// `db` must come from this library; outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn faq_database_stats(
    db: *mut FaqDatabase,
    m: *mut usize,
    n: *mut usize,
    d: *mut usize,
) -> FaqStatus {
    guard(|| {
        let db = db.as_mut().ok_or_else(|| invalid("database is null"))?;
        if m.is_null() || n.is_null() || d.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let s = db.database()?.stats();
        *m = s.m;
        *n = s.n;
        *d = s.d;
        Ok(())
    })
}

/// Parses a JSON query specification.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn faq_query_parse(json: *const c_char, out: *mut *mut FaqQuery) -> FaqStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = ptr::null_mut();
        let json = str_arg(json, "json")?;
        let spec = QuerySpec::from_json(json).map_err(|e| (FaqStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(FaqQuery { spec }));
        Ok(())
    })
}

/// # Safety
/// `q` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn faq_query_free(q: *mut FaqQuery) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Switches the query to exact evaluation.
///
/// # Safety
/// `q` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn faq_query_set_exact(q: *mut FaqQuery) -> FaqStatus {
    guard(|| {
        let q = q.as_mut().ok_or_else(|| invalid("query is null"))?;
        q.spec.mode = Some(Mode::Exact);
        Ok(())
    })
}

/// Switches the query to approximate evaluation with relative error
/// `epsilon`.
///
/// # Safety
/// `q` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn faq_query_set_epsilon(q: *mut FaqQuery, epsilon: f64) -> FaqStatus {
    guard(|| {
        let q = q.as_mut().ok_or_else(|| invalid("query is null"))?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon must be a positive real"));
        }
        q.spec.mode = Some(Mode::Approx);
        q.spec.epsilon = Some(epsilon);
        Ok(())
    })
}

/// Evaluates a query; the query must name its kind.
///
/// # Safety
/// Handles must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn faq_evaluate(
    db: *mut FaqDatabase,
    q: *const FaqQuery,
    out: *mut f64,
) -> FaqStatus {
    guard(|| {
        let db = db.as_mut().ok_or_else(|| invalid("database is null"))?;
        let q = q.as_ref().ok_or_else(|| invalid("query is null"))?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let db = db.database()?;
        let query = resolve(&q.spec, db, None).map_err(fail)?;
        let o = run_query(db, &query, &EvalOptions::default()).map_err(fail)?;
        *out = o.value;
        Ok(())
    })
}

/// Evaluates a query by materializing the join, stopping after `cap` rows.
/// Any number of inequalities is accepted.
///
/// # Safety
/// Handles must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn faq_oracle(
    db: *mut FaqDatabase,
    q: *const FaqQuery,
    cap: usize,
    out: *mut f64,
) -> FaqStatus {
    guard(|| {
        let db = db.as_mut().ok_or_else(|| invalid("database is null"))?;
        let q = q.as_ref().ok_or_else(|| invalid("query is null"))?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let db = db.database()?;
        let query = resolve_any_arity(&q.spec, db, None).map_err(fail)?;
        *out = oracle_eval(db, &query, cap).map_err(fail)?.value;
        Ok(())
    })
}

/// Writes the join tree as 1-based `(child, parent)` pairs into `edges`
/// (`2 * (m - 1)` entries) and the pair count into `len`. When `capacity`
/// is too small nothing is written except `len`, and the call fails with
/// `FAQ_STATUS_INVALID_ARGUMENT`.
///
/// # Safety
/// `db` must come from this library; `edges` must hold `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn faq_decompose(
    db: *mut FaqDatabase,
    edges: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> FaqStatus {
    guard(|| {
        let db = db.as_mut().ok_or_else(|| invalid("database is null"))?;
        if len.is_null() {
            return Err(invalid("len is null"));
        }
        let d = build_decomposition(db.database()?).map_err(fail)?;
        *len = d.edges().len();
        if capacity < 2 * d.edges().len() {
            return Err(invalid("edge buffer too small"));
        }
        if !d.edges().is_empty() && edges.is_null() {
            return Err(invalid("edges is null"));
        }
        for (i, &(a, b)) in d.edges().iter().enumerate() {
            *edges.add(2 * i) = a + 1;
            *edges.add(2 * i + 1) = b + 1;
        }
        Ok(())
    })
}

/// Message of the last failed call on this thread, or "". Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn faq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn faq_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
