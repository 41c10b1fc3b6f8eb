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


//! Ground truth by brute force, and generators for the knapsack and
//! partition instances.

use crate::error::{Error, Result};
use crate::query::{AdditiveInequality, FunctionSpec, Inequality, Query, QueryKind};
use crate::relation::{Database, Table};
use crate::semiring::{ExtReal, NamedAlgebra};

pub const DEFAULT_CAP: usize = 10_000_000;

/// The full join, one column per feature in feature-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterializedJoin {
    pub schema: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

struct Enumerator<'a> {
    db: &'a Database,
    cap: usize,
    seen: usize,
    point: Vec<f64>,
    bound: Vec<bool>,
}

impl Enumerator<'_> {
    fn run(&mut self, t: usize, visit: &mut dyn FnMut(&[f64])) -> Result<()> {
        if t == self.db.num_tables() {
            self.seen += 1;
            if self.seen > self.cap {
                return Err(Error::CapExceeded { cap: self.cap });
            }
            visit(&self.point);
            return Ok(());
        }
        let cols = self.db.columns(t);
        let mut fresh = Vec::with_capacity(cols.len());
        'rows: for row in self.db.table(t).rows() {
            for (&f, &x) in cols.iter().zip(row) {
                if self.bound[f] && self.point[f] != x {
                    continue 'rows;
                }
            }
            fresh.clear();
            for (&f, &x) in cols.iter().zip(row) {
                if !self.bound[f] {
                    self.bound[f] = true;
                    self.point[f] = x;
                    fresh.push(f);
                }
            }
            let result = self.run(t + 1, visit);
            for &f in &fresh {
                self.bound[f] = false;
            }
            result?;
        }
        Ok(())
    }
}

/// Calls `visit` on every row of the join; fails once more than `cap` rows
/// have been produced.
pub fn for_each_join_row(db: &Database, cap: usize, mut visit: impl FnMut(&[f64])) -> Result<usize> {
    let d = db.features().len();
    let mut e = Enumerator {
        db,
        cap,
        seen: 0,
        point: vec![0.0; d],
        bound: vec![false; d],
    };
    e.run(0, &mut visit)?;
    Ok(e.seen)
}

pub fn materialize(db: &Database, cap: usize) -> Result<MaterializedJoin> {
    let mut rows = Vec::new();
    for_each_join_row(db, cap, |x| rows.push(x.to_vec()))?;
    Ok(MaterializedJoin {
        schema: db.features().to_vec(),
        rows,
    })
}

/// Exact answer of a query, plus the number of rows satisfying every
/// inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: ExtReal,
    pub qualifying: u128,
}

fn satisfies(ineqs: &[Inequality], x: &[f64]) -> bool {
    ineqs.iter().all(|i| {
        let lhs: f64 = x.iter().enumerate().map(|(f, &v)| i.term(f, v)).sum();
        lhs <= i.l
    })
}

/// Filters the join by every inequality of `q` (any number) and folds the
/// query's algebra over the survivors. The evaluation mode is ignored.
pub fn oracle_eval(db: &Database, q: &Query, cap: usize) -> Result<OracleValue> {
    let mut qualifying: u128 = 0;
    let mut acc = match (q.kind, q.algebra) {
        (QueryKind::Count, _) => 0.0,
        (_, Some(NamedAlgebra::Monoid(m))) => m.identity,
        (_, Some(NamedAlgebra::Semiring(s))) => s.zero,
        (kind, None) => {
            return Err(Error::InvalidArgument(format!("{kind} query without an algebra")))
        }
    };
    let factors: Vec<(usize, &FunctionSpec)> = q
        .factors
        .iter()
        .enumerate()
        .filter_map(|(f, s)| s.as_ref().map(|s| (f, s)))
        .collect();
    for_each_join_row(db, cap, |x| {
        if !satisfies(&q.inequalities, x) {
            return;
        }
        qualifying += 1;
        match (q.kind, q.algebra) {
            (QueryKind::Sumsum, Some(NamedAlgebra::Monoid(m))) => {
                for &(f, func) in &factors {
                    acc = m.plus(acc, func.eval(x[f]));
                }
            }
            (QueryKind::Sumprod, Some(NamedAlgebra::Semiring(s))) => {
                let p = factors
                    .iter()
                    .fold(s.one, |p, &(f, func)| s.times(p, func.eval(x[f])));
                acc = s.plus(acc, p);
            }
            _ => {}
        }
    })?;
    if q.kind == QueryKind::Count {
        acc = qualifying as f64;
    }
    Ok(OracleValue {
        value: acc,
        qualifying,
    })
}

fn table_names(k: usize) -> Vec<String> {
    let width = k.to_string().len().max(2);
    (1..=k).map(|i| format!("t{i:0width$}")).collect()
}

fn single_column_tables(rows: impl Iterator<Item = [f64; 2]>, k: usize) -> Result<Database> {
    let tables = table_names(k)
        .into_iter()
        .zip(rows)
        .enumerate()
        .map(|(i, (name, r))| {
            Table::new(
                name,
                vec![format!("x{}", i + 1)],
                vec![vec![r[0]], vec![r[1]]],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Database::new(tables)
}

fn sum_of(k: usize, g: FunctionSpec, l: f64) -> AdditiveInequality {
    AdditiveInequality {
        g: (1..=k).map(|i| (format!("x{i}"), g.clone())).collect(),
        l,
    }
}

/// Knapsack counting as a join: table `i` holds rows `0` and `w_i`, so join
/// rows are subsets and `sum x <= capacity` selects those that fit.
pub fn gen_knapsack(weights: &[u64], capacity: f64) -> Result<(Database, AdditiveInequality)> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument("knapsack needs at least one weight".into()));
    }
    let db = single_column_tables(weights.iter().map(|&w| [0.0, w as f64]), weights.len())?;
    Ok((db, sum_of(weights.len(), FunctionSpec::Identity {}, capacity)))
}

/// Partition as a join: table `i` holds `w_i` and `-w_i`, and the two
/// inequalities `-sum x <= 0` and `sum x <= 0` keep sign vectors summing
/// to zero.
pub fn gen_partition(weights: &[u64]) -> Result<(Database, Vec<AdditiveInequality>)> {
    if weights.is_empty() || weights.contains(&0) {
        return Err(Error::InvalidArgument(
            "partition needs at least one weight, all positive".into(),
        ));
    }
    let db = single_column_tables(
        weights.iter().map(|&w| [w as f64, -(w as f64)]),
        weights.len(),
    )?;
    let k = weights.len();
    Ok((
        db,
        vec![
            sum_of(k, FunctionSpec::Scale { beta: -1.0 }, 0.0),
            sum_of(k, FunctionSpec::Identity {}, 0.0),
        ],
    ))
}
