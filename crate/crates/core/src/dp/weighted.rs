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

use super::{sort_and_fold, DpElement};
use crate::error::{Error, Result};
use crate::relation::canon;
use crate::semiring::{ExtReal, SemiringDescriptor};

/// A finite map from real keys to non-zero weights of a base semiring.
///
/// The weight of a key acts as its (possibly fractional) multiplicity. Keys
/// absent from the map have weight equal to the base zero.
#[derive(Debug, Clone)]
pub struct WeightedSet {
    base: SemiringDescriptor,
    entries: Vec<(f64, ExtReal)>,
}

impl PartialEq for WeightedSet {
    fn eq(&self, other: &Self) -> bool {
        self.base.same_as(&other.base) && self.entries == other.entries
    }
}

impl WeightedSet {
    pub fn empty(base: SemiringDescriptor) -> Self {
        WeightedSet {
            base,
            entries: Vec::new(),
        }
    }

    /// `{(0, one)}`, the multiplicative identity.
    pub fn one(base: SemiringDescriptor) -> Self {
        WeightedSet {
            base,
            entries: vec![(0.0, base.one)],
        }
    }

    /// `{(key, weight)}`, or the empty set when `weight` is the base zero.
    pub fn lift(key: f64, weight: ExtReal, base: SemiringDescriptor) -> Self {
        if base.is_zero(weight) {
            return Self::empty(base);
        }
        WeightedSet {
            base,
            entries: vec![(canon(key), weight)],
        }
    }

    /// Canonical form of arbitrary pairs; weights on equal keys are added.
    pub fn from_pairs<I: IntoIterator<Item = (f64, ExtReal)>>(
        base: SemiringDescriptor,
        pairs: I,
    ) -> Self {
        let pairs = pairs.into_iter().map(|(k, w)| (canon(k), w)).collect();
        let mut entries =
            sort_and_fold(pairs, |a, b| Ok(base.plus(a, b))).expect("infallible fold");
        entries.retain(|e| !base.is_zero(e.1));
        WeightedSet { base, entries }
    }

    pub(crate) fn from_sorted(base: SemiringDescriptor, entries: Vec<(f64, ExtReal)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        WeightedSet { base, entries }
    }

    pub fn base(&self) -> &SemiringDescriptor {
        &self.base
    }

    pub fn entries(&self) -> &[(f64, ExtReal)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Weight of `key`, the base zero when absent.
    pub fn weight(&self, key: f64) -> ExtReal {
        let key = canon(key);
        self.entries
            .binary_search_by(|e| e.0.total_cmp(&key))
            .map(|i| self.entries[i].1)
            .unwrap_or(self.base.zero)
    }

    /// Sum (in the base semiring) of the weights of keys `<= l`.
    pub fn triangle(&self, l: f64) -> ExtReal {
        self.entries
            .iter()
            .take_while(|e| e.0 <= l)
            .fold(self.base.zero, |acc, e| self.base.plus(acc, e.1))
    }

    fn check_base(&self, other: &WeightedSet) -> Result<()> {
        if self.base.same_as(&other.base) {
            Ok(())
        } else {
            Err(Error::BaseMismatch {
                left: self.base.name,
                right: other.base.name,
            })
        }
    }

    /// Pointwise addition of weights on the union of keys.
    pub fn union(&self, other: &WeightedSet) -> Result<WeightedSet> {
        self.check_base(other)?;
        let base = self.base;
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.total_cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let w = base.plus(a[i].1, b[j].1);
                    if !base.is_zero(w) {
                        out.push((a[i].0, w));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(WeightedSet { base, entries: out })
    }

    /// Key-sum convolution: the weight at `e` is the sum over `i` of
    /// `w_A(e - i) * w_B(i)`.
    pub fn convolve(&self, other: &WeightedSet) -> Result<WeightedSet> {
        self.check_base(other)?;
        let base = self.base;
        let mut pairs = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(ka, wa) in &self.entries {
            for &(kb, wb) in &other.entries {
                pairs.push((canon(ka + kb), base.times(wa, wb)));
            }
        }
        Ok(Self::from_pairs(base, pairs))
    }
}

impl DpElement for WeightedSet {
    fn union(&self, other: &Self) -> Result<Self> {
        WeightedSet::union(self, other)
    }

    fn convolve(&self, other: &Self) -> Result<Self> {
        WeightedSet::convolve(self, other)
    }

    fn entry_count(&self) -> usize {
        self.entries.len()
    }
}

/// Space-separated `key:weight` pairs.
impl fmt::Display for WeightedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}:{w}")?;
        }
        Ok(())
    }
}
