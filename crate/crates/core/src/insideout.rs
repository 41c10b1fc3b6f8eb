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


//! Inside-Out: sum-product evaluation over an acyclic join by repeatedly
//! eliminating a leaf of the join tree.
//!
//! Every table carries an aggregate column `Q`. Eliminating leaf `T_i` with
//! parent `T_j` groups `T_i`'s rows by their projection onto the shared
//! features, sums each group, and multiplies the group value into every
//! matching row of `T_j`. The last table left is summed up.

use std::cmp::Ordering;

use crate::dp::{DpElement, Multiset, WeightedSet};
use crate::error::{Error, Result};
use crate::hypertree::HypertreeDecomposition;
use crate::relation::Database;
use crate::semiring::SemiringDescriptor;

/// Carrier and operations of the semiring the engine runs over.
pub trait Algebra: Sync {
    type Value: Clone + Send + Sync;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn is_zero(&self, v: &Self::Value) -> bool;
    fn plus(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn times(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    /// Stored entries, for size statistics and the size cap.
    fn size(&self, _v: &Self::Value) -> usize {
        1
    }
}

/// A scalar semiring given by its descriptor.
#[derive(Debug, Clone, Copy)]
pub struct ScalarAlgebra(pub SemiringDescriptor);

impl Algebra for ScalarAlgebra {
    type Value = f64;

    fn zero(&self) -> f64 {
        self.0.zero
    }
    fn one(&self) -> f64 {
        self.0.one
    }
    fn is_zero(&self, v: &f64) -> bool {
        self.0.is_zero(*v)
    }
    fn plus(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(self.0.plus(*a, *b))
    }
    fn times(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(self.0.times(*a, *b))
    }
}

/// Multisets under union and key-sum convolution.
#[derive(Debug, Clone, Copy, Default)]
pub struct MultisetAlgebra;

impl Algebra for MultisetAlgebra {
    type Value = Multiset;

    fn zero(&self) -> Multiset {
        Multiset::empty()
    }
    fn one(&self) -> Multiset {
        Multiset::one()
    }
    fn is_zero(&self, v: &Multiset) -> bool {
        v.is_empty()
    }
    fn plus(&self, a: &Multiset, b: &Multiset) -> Result<Multiset> {
        a.union(b)
    }
    fn times(&self, a: &Multiset, b: &Multiset) -> Result<Multiset> {
        a.convolve(b)
    }
    fn size(&self, v: &Multiset) -> usize {
        v.entry_count()
    }
}

/// Weighted sets over a base semiring.
#[derive(Debug, Clone, Copy)]
pub struct WeightedAlgebra(pub SemiringDescriptor);

impl Algebra for WeightedAlgebra {
    type Value = WeightedSet;

    fn zero(&self) -> WeightedSet {
        WeightedSet::empty(self.0)
    }
    fn one(&self) -> WeightedSet {
        WeightedSet::one(self.0)
    }
    fn is_zero(&self, v: &WeightedSet) -> bool {
        v.is_empty()
    }
    fn plus(&self, a: &WeightedSet, b: &WeightedSet) -> Result<WeightedSet> {
        a.union(b)
    }
    fn times(&self, a: &WeightedSet, b: &WeightedSet) -> Result<WeightedSet> {
        a.convolve(b)
    }
    fn size(&self, v: &WeightedSet) -> usize {
        v.entry_count()
    }
}

/// For each table, the features whose leaf factors it multiplies in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorAssignment {
    per_table: Vec<Vec<usize>>,
}

impl FactorAssignment {
    /// Feature ids assigned to table `t`.
    pub fn features_of(&self, t: usize) -> &[usize] {
        &self.per_table[t]
    }

    /// The table feature `f` is assigned to.
    pub fn table_of(&self, f: usize) -> usize {
        self.per_table
            .iter()
            .position(|fs| fs.contains(&f))
            .expect("every feature is assigned")
    }
}

/// Assigns every feature to the lowest-index table containing it.
pub fn assign_features(db: &Database) -> FactorAssignment {
    let mut per_table = vec![Vec::new(); db.num_tables()];
    for f in 0..db.features().len() {
        per_table[db.holders(f)[0]].push(f);
    }
    FactorAssignment { per_table }
}

/// Which leaf to eliminate next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeafOrder {
    #[default]
    LowestIndex,
    HighestIndex,
}

/// Post-aggregation hook, e.g. a sketch.
pub type Transform<'a, V> = &'a (dyn Fn(&V) -> Result<V> + Sync);

pub struct EngineConfig<'a, V> {
    /// Table that survives elimination; any table when `None`.
    pub root: Option<usize>,
    /// Applied to the result of every addition and multiplication.
    pub transform: Option<Transform<'a, V>>,
    pub order: LeafOrder,
    /// Abort when a value grows past this many entries.
    pub size_cap: Option<usize>,
}

impl<V> Default for EngineConfig<'_, V> {
    fn default() -> Self {
        EngineConfig {
            root: None,
            transform: None,
            order: LeafOrder::LowestIndex,
            size_cap: None,
        }
    }
}

impl<V> Clone for EngineConfig<'_, V> {
    fn clone(&self) -> Self {
        EngineConfig {
            root: self.root,
            transform: self.transform,
            order: self.order,
            size_cap: self.size_cap,
        }
    }
}

/// Statistics of one leaf elimination.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepStats {
    pub leaf: usize,
    pub parent: usize,
    pub groups: usize,
    pub largest_group: usize,
    pub max_tree_depth: usize,
    /// Parent rows left after the multiply step.
    pub surviving_rows: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instrumentation {
    pub steps: Vec<StepStats>,
    pub final_rows: usize,
    pub final_tree_depth: usize,
    pub additions: u64,
    pub multiplications: u64,
    /// Largest value (in entries) produced by any operation.
    pub max_value_size: usize,
}

/// Root table just before the final sum: `(row index, Q)` pairs with
/// `Q != 0`, in row order.
#[derive(Debug, Clone)]
pub struct EngineTable<V> {
    pub table: usize,
    pub rows: Vec<(usize, V)>,
}

struct Ops<'c, 'a, A: Algebra> {
    algebra: &'c A,
    config: &'c EngineConfig<'a, A::Value>,
    stats: Instrumentation,
}

impl<A: Algebra> Ops<'_, '_, A> {
    fn finish(&mut self, v: A::Value) -> Result<A::Value> {
        let v = match self.config.transform {
            Some(t) => t(&v)?,
            None => v,
        };
        let size = self.algebra.size(&v);
        self.stats.max_value_size = self.stats.max_value_size.max(size);
        if let Some(cap) = self.config.size_cap {
            if size > cap {
                return Err(Error::SketchTooLarge { size, cap });
            }
        }
        Ok(v)
    }

    fn plus(&mut self, a: &A::Value, b: &A::Value) -> Result<A::Value> {
        self.stats.additions += 1;
        let v = self.algebra.plus(a, b)?;
        self.finish(v)
    }

    fn times(&mut self, a: &A::Value, b: &A::Value) -> Result<A::Value> {
        self.stats.multiplications += 1;
        let v = self.algebra.times(a, b)?;
        self.finish(v)
    }

    /// Sums `values` pairwise level by level; returns the sum and the depth
    /// of the combination tree.
    fn balanced_sum(&mut self, mut values: Vec<A::Value>) -> Result<(A::Value, usize)> {
        if values.is_empty() {
            return Ok((self.algebra.zero(), 0));
        }
        let mut depth = 0;
        while values.len() > 1 {
            let mut next = Vec::with_capacity(values.len().div_ceil(2));
            let mut it = values.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(self.plus(&a, &b)?),
                    None => next.push(a),
                }
            }
            values = next;
            depth += 1;
        }
        Ok((values.pop().unwrap(), depth))
    }
}

fn cmp_keys(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

struct Working<V> {
    // (row index, Q) with Q != 0
    rows: Vec<(usize, V)>,
}

/// Runs elimination until only the root is left.
fn eliminate<A, F>(
    db: &Database,
    decomp: &HypertreeDecomposition,
    factor: &F,
    ops: &mut Ops<'_, '_, A>,
) -> Result<EngineTable<A::Value>>
where
    A: Algebra,
    F: Fn(usize, f64) -> Result<A::Value> + ?Sized,
{
    let m = db.num_tables();
    if decomp.vertices() != m || decomp.edges().len() + 1 != m {
        return Err(Error::InvalidDecomposition(format!(
            "expected a tree over {m} tables, got {} vertices and {} edges",
            decomp.vertices(),
            decomp.edges().len()
        )));
    }
    if let Some(r) = ops.config.root {
        if r >= m {
            return Err(Error::InvalidArgument(format!(
                "root table {} out of range 1..={m}",
                r + 1
            )));
        }
    }
    let assignment = assign_features(db);

    // initial value per row: product of its factors
    let mut tables = Vec::with_capacity(m);
    for t in 0..m {
        let cols: Vec<usize> = assignment
            .features_of(t)
            .iter()
            .map(|f| db.columns(t).iter().position(|c| c == f).unwrap())
            .collect();
        let feats = assignment.features_of(t);
        let mut rows = Vec::with_capacity(db.table(t).len());
        for (ri, row) in db.table(t).rows().iter().enumerate() {
            let mut q = ops.algebra.one();
            for (&col, &f) in cols.iter().zip(feats) {
                let v = factor(f, row[col])?;
                q = ops.times(&q, &v)?;
            }
            if !ops.algebra.is_zero(&q) {
                rows.push((ri, q));
            }
        }
        tables.push(Some(Working { rows }));
    }

    let mut adj: Vec<Vec<usize>> = decomp.adjacency();
    let mut remaining = m;
    while remaining > 1 {
        let is_leaf = |t: usize| tables[t].is_some() && adj[t].len() <= 1 && Some(t) != ops.config.root;
        let leaf = match ops.config.order {
            LeafOrder::LowestIndex => (0..m).find(|&t| is_leaf(t)),
            LeafOrder::HighestIndex => (0..m).rev().find(|&t| is_leaf(t)),
        };
        let Some(i) = leaf else {
            return Err(Error::InvalidDecomposition("no leaf to eliminate".into()));
        };
        let Some(&j) = adj[i].first() else {
            return Err(Error::InvalidDecomposition(format!(
                "table {} is disconnected",
                i + 1
            )));
        };
        let leaf_rows = tables[i].take().unwrap().rows;
        let parent = tables[j].take().unwrap();
        let (parent, step) = eliminate_leaf(db, i, j, leaf_rows, parent, ops)?;
        ops.stats.steps.push(step);
        tables[j] = Some(parent);
        adj[j].retain(|&x| x != i);
        adj[i].clear();
        remaining -= 1;
    }
    let root = (0..m).find(|&t| tables[t].is_some()).unwrap();
    Ok(EngineTable {
        table: root,
        rows: tables[root].take().unwrap().rows,
    })
}

fn eliminate_leaf<A: Algebra>(
    db: &Database,
    i: usize,
    j: usize,
    leaf_rows: Vec<(usize, A::Value)>,
    parent: Working<A::Value>,
    ops: &mut Ops<'_, '_, A>,
) -> Result<(Working<A::Value>, StepStats)> {
    // shared features as (column in i, column in j)
    let shared: Vec<(usize, usize)> = db
        .columns(i)
        .iter()
        .enumerate()
        .filter_map(|(ci, f)| db.columns(j).iter().position(|g| g == f).map(|cj| (ci, cj)))
        .collect();
    let ti = db.table(i).rows();
    let tj = db.table(j).rows();
    let key_i = |r: usize| -> Vec<f64> { shared.iter().map(|&(ci, _)| ti[r][ci]).collect() };
    let key_j = |r: usize| -> Vec<f64> { shared.iter().map(|&(_, cj)| tj[r][cj]).collect() };

    // group by projection onto the shared features
    let mut keyed: Vec<(Vec<f64>, A::Value)> =
        leaf_rows.into_iter().map(|(r, q)| (key_i(r), q)).collect();
    keyed.sort_by(|a, b| cmp_keys(&a.0, &b.0));
    let mut groups: Vec<(Vec<f64>, A::Value)> = Vec::new();
    let mut step = StepStats {
        leaf: i,
        parent: j,
        ..StepStats::default()
    };
    let mut it = keyed.into_iter().peekable();
    while let Some((key, q)) = it.next() {
        let mut members = vec![q];
        while let Some((_, q)) = it.next_if(|(k, _)| cmp_keys(k, &key).is_eq()) {
            members.push(q);
        }
        step.largest_group = step.largest_group.max(members.len());
        let (sum, depth) = ops.balanced_sum(members)?;
        step.max_tree_depth = step.max_tree_depth.max(depth);
        if !ops.algebra.is_zero(&sum) {
            groups.push((key, sum));
        }
    }
    step.groups = groups.len();

    // multiply group values into matching parent rows
    let mut rows = Vec::with_capacity(parent.rows.len());
    if shared.is_empty() {
        // cross-product edge: a single group holding the whole sum
        if let Some((_, g)) = groups.first() {
            for (r, q) in parent.rows {
                let v = ops.times(&q, g)?;
                if !ops.algebra.is_zero(&v) {
                    rows.push((r, v));
                }
            }
        }
    } else {
        for (r, q) in parent.rows {
            let key = key_j(r);
            if let Ok(g) = groups.binary_search_by(|(k, _)| cmp_keys(k, &key)) {
                let v = ops.times(&q, &groups[g].1)?;
                if !ops.algebra.is_zero(&v) {
                    rows.push((r, v));
                }
            }
        }
    }
    step.surviving_rows = rows.len();
    Ok((Working { rows }, step))
}

/// Evaluates `⊕_{x ∈ J} ⊗_f factor(f, x_f)` over the join of `db`.
///
/// `factor` is called with a feature id and a value of that feature.
pub fn evaluate<A, F>(
    db: &Database,
    decomp: &HypertreeDecomposition,
    factor: &F,
    algebra: &A,
    config: &EngineConfig<'_, A::Value>,
) -> Result<(A::Value, Instrumentation)>
where
    A: Algebra,
    F: Fn(usize, f64) -> Result<A::Value> + ?Sized,
{
    let mut ops = Ops {
        algebra,
        config,
        stats: Instrumentation::default(),
    };
    let root = eliminate(db, decomp, factor, &mut ops)?;
    ops.stats.final_rows = root.rows.len();
    let values = root.rows.into_iter().map(|(_, q)| q).collect();
    let (v, depth) = ops.balanced_sum(values)?;
    ops.stats.final_tree_depth = depth;
    // the final sum is transformed even when it came from a single row
    let v = if depth == 0 { ops.finish(v)? } else { v };
    Ok((v, ops.stats))
}

/// Like [`evaluate`] but stops before the final sum and returns the root
/// table with its aggregate column.
pub fn evaluate_to_root<A, F>(
    db: &Database,
    decomp: &HypertreeDecomposition,
    factor: &F,
    algebra: &A,
    config: &EngineConfig<'_, A::Value>,
) -> Result<(EngineTable<A::Value>, Instrumentation)>
where
    A: Algebra,
    F: Fn(usize, f64) -> Result<A::Value> + ?Sized,
{
    let mut ops = Ops {
        algebra,
        config,
        stats: Instrumentation::default(),
    };
    let root = eliminate(db, decomp, factor, &mut ops)?;
    ops.stats.final_rows = root.rows.len();
    Ok((root, ops.stats))
}
