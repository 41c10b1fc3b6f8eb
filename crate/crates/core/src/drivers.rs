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


//! Query drivers: inequality row counting, SumSum, and SumProd, each exact
//! or approximate.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dp::{Multiset, WeightedSet};
use crate::error::{Error, Rejection, RejectionKind, Result};
use crate::hypertree::{build_decomposition, HypertreeDecomposition};
use crate::insideout::{
    assign_features, evaluate, evaluate_to_root, EngineConfig, EngineTable, Instrumentation,
    MultisetAlgebra, Transform, WeightedAlgebra,
};
use crate::query::{ext_real, EvalMode, FunctionSpec, Inequality, Query, QueryKind};
use crate::relation::Database;
use crate::semiring::{repeat, ExtReal, MonoidDescriptor, NamedAlgebra, SemiringDescriptor};
use crate::sketch::{ms_sketch, ws_sketch, ApproxParams};

pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Root table for count and sumprod; sumsum picks its own roots.
    pub root: Option<usize>,
    /// Largest value (in entries) any operation may produce.
    pub size_cap: usize,
    /// Keep a text rendering of the final dynamic-programming value.
    pub dump_sketch: bool,
    /// Run sumsum's root evaluations on separate threads.
    pub parallel: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            root: None,
            size_cap: DEFAULT_SIZE_CAP,
            dump_sketch: false,
            parallel: true,
        }
    }
}

/// Aggregate engine statistics over all evaluations behind one answer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SketchStats {
    pub evaluations: usize,
    pub additions: u64,
    pub multiplications: u64,
    /// Largest value, in entries, produced by any operation.
    pub max_entries: usize,
    pub max_tree_depth: usize,
}

impl SketchStats {
    fn add(&mut self, i: &Instrumentation) {
        self.evaluations += 1;
        self.additions += i.additions;
        self.multiplications += i.multiplications;
        self.max_entries = self.max_entries.max(i.max_value_size);
        let depth = i.steps.iter().map(|s| s.max_tree_depth).max().unwrap_or(0);
        self.max_tree_depth = self.max_tree_depth.max(depth).max(i.final_tree_depth);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    #[serde(with = "ext_real")]
    pub value: ExtReal,
    /// The exact count, for exact-mode row counting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_count: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ApproxParams>,
    pub stats: SketchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sketch: Option<String>,
}

fn approx_params(db: &Database, mode: EvalMode) -> Result<Option<ApproxParams>> {
    match mode {
        EvalMode::Exact => Ok(None),
        EvalMode::Approx { epsilon, alpha } => {
            let s = db.stats();
            let p = ApproxParams::new(epsilon, s.m, s.n)?;
            Ok(Some(match alpha {
                Some(a) => p.with_alpha(a)?,
                None => p,
            }))
        }
    }
}

fn key(ineq: &Inequality, db: &Database, f: usize, x: f64) -> Result<f64> {
    let k = ineq.term(f, x);
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::NonFinite {
            what: format!("inequality term for {} at {x}", db.features()[f]),
            value: k,
        })
    }
}

fn config<'a, V>(
    opts: &EvalOptions,
    root: Option<usize>,
    transform: Option<Transform<'a, V>>,
) -> EngineConfig<'a, V> {
    EngineConfig {
        root,
        transform,
        size_cap: Some(opts.size_cap),
        ..EngineConfig::default()
    }
}

/// Number of join rows with `sum_f g_f(x_f) <= L`.
pub fn count_rows(
    db: &Database,
    decomp: &HypertreeDecomposition,
    ineq: &Inequality,
    mode: EvalMode,
    opts: &EvalOptions,
) -> Result<Outcome> {
    let params = approx_params(db, mode)?;
    let hook = |v: &Multiset| Ok(ms_sketch(v, params.unwrap().alpha));
    let transform: Option<Transform<Multiset>> = params.map(|_| &hook as _);
    let factor = |f: usize, x: f64| key(ineq, db, f, x).map(Multiset::singleton);
    let (value, inst) = evaluate(
        db,
        decomp,
        &factor,
        &MultisetAlgebra,
        &config(opts, opts.root, transform),
    )?;
    let count = value.triangle(ineq.l);
    let mut stats = SketchStats::default();
    stats.add(&inst);
    Ok(Outcome {
        value: count as f64,
        exact_count: params.is_none().then_some(count),
        params,
        stats,
        sketch: opts.dump_sketch.then(|| value.to_string()),
    })
}

fn root_tables(
    db: &Database,
    decomp: &HypertreeDecomposition,
    roots: &[usize],
    ineq: &Inequality,
    params: Option<ApproxParams>,
    opts: &EvalOptions,
) -> Result<Vec<(EngineTable<Multiset>, Instrumentation)>> {
    let hook = |v: &Multiset| Ok(ms_sketch(v, params.unwrap().alpha));
    let factor = |f: usize, x: f64| key(ineq, db, f, x).map(Multiset::singleton);
    let run = |r: usize| {
        let transform: Option<Transform<Multiset>> = params.map(|_| &hook as _);
        evaluate_to_root(db, decomp, &factor, &MultisetAlgebra, &config(opts, Some(r), transform))
    };
    if opts.parallel && roots.len() > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = roots.iter().map(|&r| s.spawn(move || run(r))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("root evaluation panicked"))
                .collect()
        })
    } else {
        roots.iter().map(|&r| run(r)).collect()
    }
}

/// `⊕` over qualifying rows of `⊕_f F_f(x_f)` for a repeatable monoid.
///
/// For every feature with a function, the join is evaluated to the
/// feature's assigned table; the qualifying-row count `U(v)` of each value
/// `v` is read off that table, and `F_f(v)` is repeated `U(v)` times.
pub fn sumsum(
    db: &Database,
    decomp: &HypertreeDecomposition,
    monoid: &MonoidDescriptor,
    factors: &[Option<FunctionSpec>],
    ineq: &Inequality,
    mode: EvalMode,
    opts: &EvalOptions,
) -> Result<Outcome> {
    if !monoid.repeatable {
        return Err(Rejection::new(
            RejectionKind::UnsupportedAlgebra,
            format!("monoid {} is not repeatable", monoid.name),
        )
        .into());
    }
    let params = approx_params(db, mode)?;
    let assignment = assign_features(db);
    let active: Vec<usize> = (0..factors.len()).filter(|&f| factors[f].is_some()).collect();
    let roots: Vec<usize> = active
        .iter()
        .map(|&f| assignment.table_of(f))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let tables = root_tables(db, decomp, &roots, ineq, params, opts)?;

    let mut stats = SketchStats::default();
    for (_, inst) in &tables {
        stats.add(inst);
    }
    let mut acc = monoid.identity;
    for &f in &active {
        let t = assignment.table_of(f);
        let (root, _) = &tables[roots.iter().position(|&r| r == t).unwrap()];
        let col = db.columns(t).iter().position(|&c| c == f).unwrap();
        let rows = db.table(t).rows();
        let mut per_value: Vec<(f64, u128)> = root
            .rows
            .iter()
            .map(|(r, q)| (rows[*r][col], q.triangle(ineq.l)))
            .collect();
        per_value.sort_by(|a, b| a.0.total_cmp(&b.0));
        let func = factors[f].as_ref().unwrap();
        let mut i = 0;
        while i < per_value.len() {
            let v = per_value[i].0;
            let mut u: u128 = 0;
            while i < per_value.len() && per_value[i].0 == v {
                u = u.checked_add(per_value[i].1).ok_or(Error::Overflow)?;
                i += 1;
            }
            if u > 0 {
                acc = monoid.plus(acc, repeat(monoid, func.eval(v), u));
            }
        }
    }
    Ok(Outcome {
        value: acc,
        exact_count: None,
        params,
        stats,
        sketch: None,
    })
}

/// `⊕` over qualifying rows of `⊗_f F_f(x_f)`; features without a function
/// contribute the semiring one.
pub fn sumprod(
    db: &Database,
    decomp: &HypertreeDecomposition,
    semiring: &SemiringDescriptor,
    factors: &[Option<FunctionSpec>],
    ineq: &Inequality,
    mode: EvalMode,
    opts: &EvalOptions,
) -> Result<Outcome> {
    let params = approx_params(db, mode)?;
    let base = *semiring;
    let hook = |v: &WeightedSet| ws_sketch(v, params.unwrap().alpha);
    let transform: Option<Transform<WeightedSet>> = params.map(|_| &hook as _);
    let factor = |f: usize, x: f64| {
        let w = factors[f].as_ref().map_or(base.one, |func| func.eval(x));
        Ok(WeightedSet::lift(key(ineq, db, f, x)?, w, base))
    };
    let (value, inst) = evaluate(
        db,
        decomp,
        &factor,
        &WeightedAlgebra(base),
        &config(opts, opts.root, transform),
    )?;
    let mut stats = SketchStats::default();
    stats.add(&inst);
    Ok(Outcome {
        value: value.triangle(ineq.l),
        exact_count: None,
        params,
        stats,
        sketch: opts.dump_sketch.then(|| value.to_string()),
    })
}

/// Decomposes the join and runs the driver for `q.kind`.
pub fn run_query(db: &Database, q: &Query, opts: &EvalOptions) -> Result<Outcome> {
    if q.inequalities.len() > 1 {
        return Err(Rejection::new(
            RejectionKind::TooManyInequalities,
            "the engine evaluates at most one additive inequality",
        )
        .into());
    }
    let decomp = build_decomposition(db)?;
    let ineq = q.inequality();
    match (q.kind, q.algebra) {
        (QueryKind::Count, _) => count_rows(db, &decomp, &ineq, q.mode, opts),
        (QueryKind::Sumsum, Some(NamedAlgebra::Monoid(m))) => {
            sumsum(db, &decomp, &m, &q.factors, &ineq, q.mode, opts)
        }
        (QueryKind::Sumprod, Some(NamedAlgebra::Semiring(s))) => {
            sumprod(db, &decomp, &s, &q.factors, &ineq, q.mode, opts)
        }
        (kind, _) => Err(Rejection::new(
            RejectionKind::UnsupportedAlgebra,
            format!("{kind} query with an unsuitable algebra"),
        )
        .into()),
    }
}
