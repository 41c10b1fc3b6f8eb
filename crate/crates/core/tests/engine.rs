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


mod common;

use faqai::drivers::{count_rows, run_query, EvalOptions};
use faqai::hypertree::build_decomposition;
use faqai::insideout::{evaluate, EngineConfig, LeafOrder, ScalarAlgebra};
use faqai::oracle::{materialize, oracle_eval, DEFAULT_CAP};
use faqai::query::{resolve, EvalMode, Mode, QueryKind};
use faqai::relation::{Database, Table};
use faqai::semiring::{semiring_named, SemiringDescriptor};
use proptest::prelude::*;
use rand::seq::SliceRandom;

use common::*;

fn db_from(seed: u64) -> Database {
    random_acyclic_db(&mut rng(seed), 4, 12, 5)
}

fn join_size(db: &Database, root: Option<usize>, order: LeafOrder) -> f64 {
    let decomp = build_decomposition(db).unwrap();
    let config = EngineConfig {
        root,
        order,
        ..EngineConfig::default()
    };
    let one = |_: usize, _: f64| Ok(1.0);
    evaluate(db, &decomp, &one, &ScalarAlgebra(SemiringDescriptor::counting()), &config)
        .unwrap()
        .0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn materialize_matches_brute_force(seed in any::<u64>()) {
        let db = db_from(seed);
        let mut rows = materialize(&db, DEFAULT_CAP).unwrap().rows;
        sort_points(&mut rows);
        prop_assert_eq!(rows, brute_force_join(&db));
    }

    #[test]
    fn counting_evaluate_is_join_size(seed in any::<u64>()) {
        let db = db_from(seed);
        let n = brute_force_join(&db).len() as f64;
        for root in (0..db.num_tables()).map(Some).chain([None]) {
            for order in [LeafOrder::LowestIndex, LeafOrder::HighestIndex] {
                prop_assert_eq!(join_size(&db, root, order), n);
            }
        }
    }

    #[test]
    fn exact_count_matches_brute_force_at_every_root(seed in any::<u64>()) {
        let db = db_from(seed);
        let mut r = rng(seed ^ 0x5eed);
        let ineq = random_inequality(&mut r, &db);
        let want = brute_force_join(&db)
            .iter()
            .filter(|p| lhs(&db, &ineq, p) <= ineq.l)
            .count() as u128;
        let q = resolve(&spec(QueryKind::Count, None, Default::default(), &ineq, Mode::Exact, None), &db, None).unwrap();
        let decomp = build_decomposition(&db).unwrap();
        for root in 0..db.num_tables() {
            let opts = EvalOptions { root: Some(root), ..EvalOptions::default() };
            let got = count_rows(&db, &decomp, &q.inequality(), EvalMode::Exact, &opts).unwrap();
            prop_assert_eq!(got.exact_count, Some(want));
        }
    }

    #[test]
    fn unbounded_count_is_join_size(seed in any::<u64>()) {
        let db = db_from(seed);
        let mut r = rng(seed);
        let mut ineq = random_inequality(&mut r, &db);
        ineq.l = f64::INFINITY;
        let q = resolve(&spec(QueryKind::Count, None, Default::default(), &ineq, Mode::Exact, None), &db, None).unwrap();
        let got = run_query(&db, &q, &EvalOptions::default()).unwrap();
        prop_assert_eq!(got.exact_count, Some(brute_force_join(&db).len() as u128));
    }

    #[test]
    fn count_is_monotone_in_threshold(seed in any::<u64>()) {
        let db = db_from(seed);
        let mut r = rng(seed);
        let mut ineq = random_inequality(&mut r, &db);
        let mut last = 0.0;
        for l in -8..=20 {
            ineq.l = f64::from(l);
            let q = resolve(&spec(QueryKind::Count, None, Default::default(), &ineq, Mode::Exact, None), &db, None).unwrap();
            let v = run_query(&db, &q, &EvalOptions::default()).unwrap().value;
            prop_assert!(v >= last, "L = {}: {} < {}", l, v, last);
            last = v;
        }
    }

    #[test]
    fn sumprod_matches_brute_force(seed in any::<u64>()) {
        let db = db_from(seed);
        let mut r = rng(seed.wrapping_add(1));
        let ineq = random_inequality(&mut r, &db);
        let f = random_factors(&mut r, &db, true);
        let join = brute_force_join(&db);
        for name in ["min-plus", "max-plus", "counting"] {
            let s = semiring_named(name).unwrap();
            let want = join
                .iter()
                .filter(|p| lhs(&db, &ineq, p) <= ineq.l)
                .map(|p| {
                    db.features().iter().enumerate().fold(s.one, |acc, (i, feat)| {
                        let w = f.get(feat).map_or(s.one, |g| g.eval(p[i]));
                        s.times(acc, w)
                    })
                })
                .fold(s.zero, |acc, w| s.plus(acc, w));
            let q = resolve(&spec(QueryKind::Sumprod, Some(name), f.clone(), &ineq, Mode::Exact, None), &db, None).unwrap();
            let got = run_query(&db, &q, &EvalOptions::default()).unwrap().value;
            prop_assert_eq!(got, want, "{}", name);
        }
    }

    #[test]
    fn oracle_ignores_table_order(seed in any::<u64>()) {
        let db = db_from(seed);
        let mut r = rng(seed);
        let ineq = random_inequality(&mut r, &db);
        let f = random_factors(&mut r, &db, false);
        let mut tables: Vec<Table> = db.tables().to_vec();
        tables.shuffle(&mut r);
        let shuffled = Database::new(tables).unwrap();
        for (kind, algebra) in [(QueryKind::Count, None), (QueryKind::Sumsum, Some("sum")), (QueryKind::Sumsum, Some("max"))] {
            let fs = if kind == QueryKind::Count { Default::default() } else { f.clone() };
            let s = spec(kind, algebra, fs, &ineq, Mode::Exact, None);
            let a = oracle_eval(&db, &resolve(&s, &db, None).unwrap(), DEFAULT_CAP).unwrap();
            let b = oracle_eval(&shuffled, &resolve(&s, &shuffled, None).unwrap(), DEFAULT_CAP).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn approximate_count_is_a_lower_bound(seed in any::<u64>(), eps in prop::sample::select(vec![0.05, 0.2, 1.0])) {
        let db = db_from(seed);
        let mut r = rng(seed);
        let ineq = random_inequality(&mut r, &db);
        let exact = resolve(&spec(QueryKind::Count, None, Default::default(), &ineq, Mode::Exact, None), &db, None).unwrap();
        let approx = resolve(&spec(QueryKind::Count, None, Default::default(), &ineq, Mode::Approx, Some(eps)), &db, None).unwrap();
        let x = run_query(&db, &exact, &EvalOptions::default()).unwrap().value;
        let y = run_query(&db, &approx, &EvalOptions::default()).unwrap().value;
        prop_assert!(y <= x && y >= (1.0 - eps) * x, "approx {} exact {}", y, x);
    }
}
