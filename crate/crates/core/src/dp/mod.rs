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

//! Dynamic-programming semirings.
//!
//! Elements are keyed collections: the key of an entry is a partial sum of
//! inequality terms, the payload a multiplicity (a count for [`Multiset`], a
//! base-semiring weight for [`WeightedSet`]). Addition merges collections,
//! multiplication convolves them over keys, so evaluating a sum-product over
//! a join runs a knapsack-style dynamic program.

mod multiset;
mod weighted;

pub use multiset::Multiset;
pub use weighted::WeightedSet;

use crate::error::Result;

/// The two semiring operations shared by both element kinds.
pub trait DpElement: Sized + Clone {
    fn union(&self, other: &Self) -> Result<Self>;
    fn convolve(&self, other: &Self) -> Result<Self>;
    /// Number of stored (distinct-key) entries.
    fn entry_count(&self) -> usize;
}

/// Sorts `(key, payload)` pairs by key and folds runs of equal keys.
pub(crate) fn sort_and_fold<P: Copy>(
    mut pairs: Vec<(f64, P)>,
    mut fold: impl FnMut(P, P) -> Result<P>,
) -> Result<Vec<(f64, P)>> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, P)> = Vec::with_capacity(pairs.len());
    for (k, p) in pairs {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 = fold(last.1, p)?,
            _ => out.push((k, p)),
        }
    }
    Ok(out)
}
