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

//! Join trees for acyclic joins.
//!
//! A decomposition is a tree over the tables in which, for every feature, the
//! tables holding that feature form a connected subtree. It is built by ear
//! removal: a table whose features are either private or all held by one
//! other remaining table is detached and hung under that table.

use std::fmt;

use crate::error::{Error, Result};
use crate::relation::Database;

/// A tree over table indices `0..m`. Edges are `(removed, parent)` pairs in
/// the order they were found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypertreeDecomposition {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl HypertreeDecomposition {
    /// Wraps an arbitrary edge list; use [`verify_decomposition`] to check it.
    pub fn from_edges(vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        HypertreeDecomposition { vertices, edges }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// One `i j` pair per line, 1-based.
impl fmt::Display for HypertreeDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, b) in &self.edges {
            writeln!(f, "{} {}", a + 1, b + 1)?;
        }
        Ok(())
    }
}

pub fn build_decomposition(db: &Database) -> Result<HypertreeDecomposition> {
    let m = db.num_tables();
    let mut alive = vec![true; m];
    // live holder count per feature
    let mut holders: Vec<Vec<usize>> = (0..db.features().len())
        .map(|f| db.holders(f).to_vec())
        .collect();
    let mut edges = Vec::with_capacity(m.saturating_sub(1));

    for _ in 1..m {
        let (i, j) = find_ear(db, &alive, &holders).ok_or_else(|| Error::CyclicJoin {
            remaining: (0..m)
                .filter(|&t| alive[t])
                .map(|t| db.table(t).name().to_string())
                .collect(),
        })?;
        alive[i] = false;
        for &f in db.columns(i) {
            holders[f].retain(|&t| t != i);
        }
        edges.push((i, j));
    }
    Ok(HypertreeDecomposition { vertices: m, edges })
}

// Lowest (i, j) such that every feature of T_i held by another live table is
// held by T_j.
fn find_ear(db: &Database, alive: &[bool], holders: &[Vec<usize>]) -> Option<(usize, usize)> {
    let live: Vec<usize> = (0..alive.len()).filter(|&t| alive[t]).collect();
    for &i in &live {
        'partner: for &j in &live {
            if j == i {
                continue;
            }
            for &f in db.columns(i) {
                let shared = holders[f].iter().any(|&t| t != i);
                if shared && !holders[f].contains(&j) {
                    continue 'partner;
                }
            }
            return Some((i, j));
        }
    }
    None
}

/// What makes a candidate decomposition invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionDefect {
    VertexCount { expected: usize, found: usize },
    BadIndex(usize, usize),
    NotATree,
    FeatureDisconnected(String),
}

impl fmt::Display for DecompositionDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VertexCount { expected, found } => {
                write!(f, "expected {expected} vertices, found {found}")
            }
            Self::BadIndex(a, b) => write!(f, "edge ({a}, {b}) references a missing table"),
            Self::NotATree => f.write_str("edges do not form a spanning tree"),
            Self::FeatureDisconnected(c) => {
                write!(f, "tables holding feature {c:?} are not connected")
            }
        }
    }
}

/// Checks that `decomp` is a spanning tree whose feature subtrees are
/// connected.
pub fn verify_decomposition(
    db: &Database,
    decomp: &HypertreeDecomposition,
) -> std::result::Result<(), DecompositionDefect> {
    let m = db.num_tables();
    if decomp.vertices != m {
        return Err(DecompositionDefect::VertexCount {
            expected: m,
            found: decomp.vertices,
        });
    }
    if let Some(&(a, b)) = decomp.edges.iter().find(|&&(a, b)| a >= m || b >= m || a == b) {
        return Err(DecompositionDefect::BadIndex(a, b));
    }
    if decomp.edges.len() + 1 != m || !connected(&decomp.adjacency(), &vec![true; m]) {
        return Err(DecompositionDefect::NotATree);
    }
    let adj = decomp.adjacency();
    for (f, name) in db.features().iter().enumerate() {
        let mut mask = vec![false; m];
        for &t in db.holders(f) {
            mask[t] = true;
        }
        if !connected(&adj, &mask) {
            return Err(DecompositionDefect::FeatureDisconnected(name.clone()));
        }
    }
    Ok(())
}

// Whether the vertices selected by `mask` induce a connected subgraph.
fn connected(adj: &[Vec<usize>], mask: &[bool]) -> bool {
    let Some(start) = mask.iter().position(|&b| b) else {
        return true;
    };
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if mask[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    mask.iter().zip(&seen).all(|(&want, &got)| !want || got)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{Database, Table};

    fn schemas(s: &[&[&str]]) -> Database {
        let tables = s
            .iter()
            .enumerate()
            .map(|(i, cols)| {
                Table::new(
                    format!("t{}", i + 1),
                    cols.iter().map(|c| c.to_string()).collect(),
                    vec![],
                )
                .unwrap()
            })
            .collect();
        Database::new(tables).unwrap()
    }

    #[test]
    fn path_schema() {
        let db = schemas(&[&["a", "b"], &["b", "c"], &["c", "d"]]);
        let d = build_decomposition(&db).unwrap();
        assert_eq!(d.edges(), [(0, 1), (1, 2)]);
        assert_eq!(d.to_string(), "1 2\n2 3\n");
        verify_decomposition(&db, &d).unwrap();
    }

    #[test]
    fn triangle_is_cyclic() {
        let db = schemas(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        assert!(matches!(
            build_decomposition(&db),
            Err(Error::CyclicJoin { .. })
        ));
    }

    #[test]
    fn shared_feature_star() {
        // every table holds `a`; any partner holding `a` will do
        let db = schemas(&[&["a"], &["a", "b"], &["a"], &["a", "c"]]);
        let d = build_decomposition(&db).unwrap();
        assert_eq!(d.edges(), [(0, 1), (1, 2), (2, 3)]);
        verify_decomposition(&db, &d).unwrap();
    }

    #[test]
    fn single_table() {
        let db = schemas(&[&["a"]]);
        let d = build_decomposition(&db).unwrap();
        assert_eq!(d.vertices(), 1);
        assert!(d.edges().is_empty());
    }

    #[test]
    fn isolated_tables_hang_off_lowest_index() {
        let db = schemas(&[&["x"], &["y"], &["z"]]);
        let d = build_decomposition(&db).unwrap();
        assert_eq!(d.edges(), [(0, 1), (1, 2)]);
    }

    #[test]
    fn verify_rejects_disconnected_feature() {
        let db = schemas(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        let d = HypertreeDecomposition::from_edges(3, vec![(0, 1), (1, 2)]);
        assert_eq!(
            verify_decomposition(&db, &d),
            Err(DecompositionDefect::FeatureDisconnected("a".into()))
        );
    }

    #[test]
    fn verify_rejects_forest() {
        let db = schemas(&[&["a"], &["b"]]);
        let d = HypertreeDecomposition::from_edges(2, vec![]);
        assert_eq!(
            verify_decomposition(&db, &d),
            Err(DecompositionDefect::NotATree)
        );
    }
}
