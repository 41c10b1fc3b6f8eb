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


//! Shared fixtures for the integration tests: seeded random instances and
//! oracles that do not go through the engine.

#![allow(dead_code)]

use std::collections::BTreeMap;

use faqai::query::{AdditiveInequality, FunctionSpec, Mode, QueryKind, QuerySpec};
use faqai::relation::{Database, Table};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feature sets of a random acyclic schema: a random tree over `m` tables,
/// each feature spread over a connected set of tables.
pub fn random_acyclic_schema(rng: &mut impl Rng, m: usize, d_max: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m];
    for i in 1..m {
        let p = rng.gen_range(0..i);
        adj[i].push(p);
        adj[p].push(i);
    }
    let d = rng.gen_range(1..=d_max);
    let mut schemas: Vec<Vec<usize>> = vec![Vec::new(); m];
    for f in 0..d {
        let mut set = vec![rng.gen_range(0..m)];
        for _ in 0..rng.gen_range(0..m) {
            let u = *set.choose(rng).unwrap();
            if let Some(&v) = adj[u].choose(rng) {
                if !set.contains(&v) {
                    set.push(v);
                }
            }
        }
        for t in set {
            schemas[t].push(f);
        }
    }
    // fill empty tables with a feature borrowed from a neighbour
    while let Some(t) = (0..m).find(|&t| schemas[t].is_empty()) {
        let donors: Vec<usize> = adj[t].iter().copied().filter(|&u| !schemas[u].is_empty()).collect();
        match donors.choose(rng) {
            Some(&u) => {
                let f = *schemas[u].choose(rng).unwrap();
                schemas[t].push(f);
            }
            None => {
                // every neighbour is empty too: move on to one of them first
                let u = (0..m).find(|&u| !schemas[u].is_empty() && adj[u].iter().any(|&w| schemas[w].is_empty())).unwrap();
                let w = *adj[u].iter().find(|&&w| schemas[w].is_empty()).unwrap();
                let f = *schemas[u].choose(rng).unwrap();
                schemas[w].push(f);
            }
        }
    }
    for s in &mut schemas {
        s.shuffle(rng);
    }
    schemas
}

pub fn feature_name(f: usize) -> String {
    format!("f{f}")
}

/// Random acyclic database with integer data in [-5, 5].
pub fn random_acyclic_db(rng: &mut impl Rng, m_max: usize, n_max: usize, d_max: usize) -> Database {
    let m = rng.gen_range(1..=m_max);
    let schemas = random_acyclic_schema(rng, m, d_max);
    let d = schemas.iter().flatten().max().unwrap() + 1;
    // a narrow value range per feature so joins are rarely empty
    let ranges: Vec<(i32, i32)> = (0..d)
        .map(|_| {
            let width = rng.gen_range(0..=10).min(rng.gen_range(0..=10));
            let lo = rng.gen_range(-5..=5 - width);
            (lo, lo + width)
        })
        .collect();
    let tables = schemas
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let n = if rng.gen_bool(0.05) { 0 } else { rng.gen_range(1..=n_max) };
            let rows = (0..n)
                .map(|_| {
                    s.iter()
                        .map(|&f| f64::from(rng.gen_range(ranges[f].0..=ranges[f].1)))
                        .collect()
                })
                .collect();
            Table::new(format!("t{}", i + 1), s.iter().map(|&f| feature_name(f)).collect(), rows).unwrap()
        })
        .collect();
    Database::new(tables).unwrap()
}

/// Random integer-valued inequality term.
pub fn random_g(rng: &mut impl Rng) -> FunctionSpec {
    match rng.gen_range(0..6) {
        0 => FunctionSpec::Identity {},
        1 => FunctionSpec::Scale { beta: *[-2.0, -1.0, 0.5, 1.0, 2.0, 3.0].choose(rng).unwrap() },
        2 => FunctionSpec::Affine {
            a: f64::from(rng.gen_range(-2..=2)),
            b: f64::from(rng.gen_range(-3..=3)),
        },
        3 => FunctionSpec::Square {},
        4 => FunctionSpec::AbsOffset { y: f64::from(rng.gen_range(-2..=2)) },
        _ => FunctionSpec::SqOffset { y: f64::from(rng.gen_range(-2..=2)) },
    }
}

pub fn random_inequality(rng: &mut impl Rng, db: &Database) -> AdditiveInequality {
    let mut g = BTreeMap::new();
    for f in db.features() {
        if rng.gen_bool(0.8) {
            g.insert(f.clone(), random_g(rng));
        }
    }
    let l = if rng.gen_bool(0.05) {
        f64::INFINITY
    } else {
        f64::from(rng.gen_range(-6..=16))
    };
    AdditiveInequality { g, l }
}

/// Random factor function with values in [0, +inf).
pub fn random_nonneg_f(rng: &mut impl Rng) -> FunctionSpec {
    match rng.gen_range(0..5) {
        0 => FunctionSpec::AbsOffset { y: f64::from(rng.gen_range(-2..=2)) },
        1 => FunctionSpec::Square {},
        2 => FunctionSpec::SqOffset { y: f64::from(rng.gen_range(-2..=2)) },
        3 => FunctionSpec::IndicatorNonzero {},
        _ => FunctionSpec::Constant { c: f64::from(rng.gen_range(0..=3)) },
    }
}

/// Random factor function, possibly negative.
pub fn random_any_f(rng: &mut impl Rng) -> FunctionSpec {
    if rng.gen_bool(0.5) {
        random_nonneg_f(rng)
    } else {
        random_g(rng)
    }
}

pub fn random_factors(
    rng: &mut impl Rng,
    db: &Database,
    nonneg: bool,
) -> BTreeMap<String, FunctionSpec> {
    let mut out = BTreeMap::new();
    for f in db.features() {
        if rng.gen_bool(0.75) {
            let func = if nonneg { random_nonneg_f(rng) } else { random_any_f(rng) };
            out.insert(f.clone(), func);
        }
    }
    out
}

pub fn spec(
    kind: QueryKind,
    algebra: Option<&str>,
    f: BTreeMap<String, FunctionSpec>,
    ineq: &AdditiveInequality,
    mode: Mode,
    epsilon: Option<f64>,
) -> QuerySpec {
    QuerySpec {
        kind: Some(kind),
        algebra: algebra.map(str::to_string),
        f,
        inequality: Some(ineq.clone()),
        mode: Some(mode),
        epsilon,
        ..QuerySpec::default()
    }
}

/// Independent acyclicity test by GYO reduction: repeatedly drop vertices
/// that occur in one edge only and edges contained in another edge.
pub fn gyo_acyclic(edges: &[Vec<usize>]) -> bool {
    let mut edges: Vec<Vec<usize>> = edges.to_vec();
    loop {
        let mut changed = false;
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for e in &edges {
            for &v in e {
                *count.entry(v).or_default() += 1;
            }
        }
        for e in &mut edges {
            let before = e.len();
            e.retain(|v| count[v] > 1);
            changed |= e.len() != before;
        }
        if let Some(i) = (0..edges.len()).find(|&i| {
            (0..edges.len()).any(|j| j != i && edges[i].iter().all(|v| edges[j].contains(v)))
        }) {
            edges.remove(i);
            changed = true;
        }
        if !changed {
            return edges.len() <= 1;
        }
    }
}

/// Number of subsets of `weights` with total at most `capacity`, by a
/// pseudo-polynomial dynamic program over sums.
pub fn knapsack_count(weights: &[u64], capacity: u64) -> u128 {
    let cap = capacity as usize;
    let mut ways = vec![0u128; cap + 1];
    ways[0] = 1;
    for &w in weights {
        let w = w as usize;
        for s in (w..=cap).rev() {
            ways[s] += ways[s - w];
        }
    }
    ways.iter().sum()
}

/// `|a - b| / |b|`, with equal values (including infinities) at 0.
pub fn rel_err(approx: f64, exact: f64) -> f64 {
    if approx == exact {
        0.0
    } else if exact == 0.0 || !exact.is_finite() {
        f64::INFINITY
    } else {
        (approx - exact).abs() / exact.abs()
    }
}

/// Join rows by brute force over the cross product of all tables, as
/// feature-indexed points sorted by `total_cmp`.
pub fn brute_force_join(db: &Database) -> Vec<Vec<f64>> {
    let d = db.features().len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; db.num_tables()];
    if db.tables().iter().any(|t| t.rows().is_empty()) {
        return out;
    }
    'outer: loop {
        let mut point: Vec<Option<f64>> = vec![None; d];
        let mut ok = true;
        for (t, &r) in idx.iter().enumerate() {
            for (c, &f) in db.columns(t).iter().enumerate() {
                let v = db.table(t).rows()[r][c];
                match point[f] {
                    Some(w) if w != v => ok = false,
                    _ => point[f] = Some(v),
                }
            }
        }
        if ok {
            out.push(point.into_iter().map(Option::unwrap).collect());
        }
        for (t, i) in idx.iter_mut().enumerate() {
            *i += 1;
            if *i < db.table(t).len() {
                continue 'outer;
            }
            *i = 0;
        }
        break;
    }
    sort_points(&mut out);
    out
}

pub fn sort_points(rows: &mut [Vec<f64>]) {
    rows.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Evaluates `sum_f g_f(x_f)` for a point, by feature name.
pub fn lhs(db: &Database, ineq: &AdditiveInequality, point: &[f64]) -> f64 {
    ineq.g
        .iter()
        .map(|(name, g)| g.eval(point[db.feature_id(name).unwrap()]))
        .sum()
}
