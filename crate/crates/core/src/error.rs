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

use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a query was refused before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectionKind {
    /// More than one additive inequality.
    TooManyInequalities,
    /// A factor value falls outside the admissible domain (negative terms).
    InadmissibleDomain,
    /// The algebra lacks a property the approximation scheme needs.
    UnsupportedAlgebra,
    /// The query text itself is malformed or inconsistent.
    Malformed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub kind: RejectionKind,
    pub reason: String,
}

impl Rejection {
    pub fn new(kind: RejectionKind, reason: impl Into<String>) -> Self {
        Rejection {
            kind,
            reason: reason.into(),
        }
    }

    pub fn malformed(reason: impl Into<String>) -> Self {
        Self::new(RejectionKind::Malformed, reason)
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error in table {table}: {message}")]
    Csv { table: String, message: String },

    #[error("table {table}: non-numeric value {value:?} at row {row} col {column}")]
    NonNumeric {
        table: String,
        row: usize,
        column: String,
        value: String,
    },

    #[error("table {table}: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        table: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("table {table}: duplicate feature name {feature:?}")]
    DuplicateFeature { table: String, feature: String },

    #[error("duplicate table name {0:?}")]
    DuplicateTable(String),

    #[error("a database needs at least one table")]
    NoTables,

    #[error("unknown feature {0:?}")]
    UnknownFeature(String),

    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("cyclic join: no eliminable table among {remaining:?}")]
    CyclicJoin { remaining: Vec<String> },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("join would exceed the materialization cap of {cap} rows")]
    CapExceeded { cap: usize },

    #[error("multiplicity overflow")]
    Overflow,

    #[error("intermediate sketch has {size} entries, above the cap of {cap}")]
    SketchTooLarge { size: usize, cap: usize },

    #[error("operands use different base semirings ({left} vs {right})")]
    BaseMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("addition of {0} is not monotone; cannot sketch")]
    NonMonotone(&'static str),

    #[error("non-finite value {value} produced by {what}")]
    NonFinite { what: String, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("query rejected: {0}")]
    Rejected(Rejection),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Rejected(_)
            | Error::UnknownFeature(_)
            | Error::UnknownAlgebra(_)
            | Error::UnknownPreset(_) => 2,
            Error::CyclicJoin { .. } => 3,
            Error::CapExceeded { .. } | Error::Overflow | Error::SketchTooLarge { .. } => 4,
            _ => 1,
        }
    }
}

impl From<Rejection> for Error {
    fn from(r: Rejection) -> Self {
        Error::Rejected(r)
    }
}
