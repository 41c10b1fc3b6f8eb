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

/// A finite multiset of reals, run-length encoded.
///
/// Entries are sorted by strictly increasing key and every count is at least
/// one, so equal multisets have identical entry vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multiset {
    entries: Vec<(f64, u128)>,
    total: u128,
}

impl Multiset {
    /// The additive identity.
    pub fn empty() -> Self {
        Multiset::default()
    }

    /// `{key}`; `{0}` is the multiplicative identity.
    pub fn singleton(key: f64) -> Self {
        Multiset {
            entries: vec![(canon(key), 1)],
            total: 1,
        }
    }

    pub fn one() -> Self {
        Self::singleton(0.0)
    }

    /// Builds the canonical form of arbitrary `(key, count)` pairs.
    pub fn from_counts<I: IntoIterator<Item = (f64, u128)>>(pairs: I) -> Result<Self> {
        let pairs = pairs
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(k, c)| (canon(k), c))
            .collect();
        let entries = sort_and_fold(pairs, |a, b| a.checked_add(b).ok_or(Error::Overflow))?;
        Self::from_sorted(entries)
    }

    pub(crate) fn from_sorted(entries: Vec<(f64, u128)>) -> Result<Self> {
        let total = entries
            .iter()
            .try_fold(0u128, |acc, &(_, c)| acc.checked_add(c))
            .ok_or(Error::Overflow)?;
        Ok(Multiset { entries, total })
    }

    pub fn entries(&self) -> &[(f64, u128)] {
        &self.entries
    }

    /// Number of elements counted with multiplicity.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplicity of `key`.
    pub fn count(&self, key: f64) -> u128 {
        let key = canon(key);
        self.entries
            .binary_search_by(|e| e.0.total_cmp(&key))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Number of elements `<= t`.
    pub fn triangle(&self, t: f64) -> u128 {
        let end = self.entries.partition_point(|e| e.0 <= t);
        if end == self.entries.len() {
            return self.total;
        }
        self.entries[..end].iter().map(|e| e.1).sum()
    }

    /// Multiset union: multiplicities add.
    pub fn union(&self, other: &Multiset) -> Result<Multiset> {
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
                    let c = a[i].1.checked_add(b[j].1).ok_or(Error::Overflow)?;
                    out.push((a[i].0, c));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let total = self
            .total
            .checked_add(other.total)
            .ok_or(Error::Overflow)?;
        Ok(Multiset {
            entries: out,
            total,
        })
    }

    /// All pairwise sums, with multiplicities multiplied.
    pub fn convolve(&self, other: &Multiset) -> Result<Multiset> {
        if self.is_empty() || other.is_empty() {
            return Ok(Multiset::empty());
        }
        let mut pairs = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(ka, ca) in &self.entries {
            for &(kb, cb) in &other.entries {
                let c = ca.checked_mul(cb).ok_or(Error::Overflow)?;
                pairs.push((canon(ka + kb), c));
            }
        }
        let entries = sort_and_fold(pairs, |a, b| a.checked_add(b).ok_or(Error::Overflow))?;
        Self::from_sorted(entries)
    }
}

impl DpElement for Multiset {
    fn union(&self, other: &Self) -> Result<Self> {
        Multiset::union(self, other)
    }

    fn convolve(&self, other: &Self) -> Result<Self> {
        Multiset::convolve(self, other)
    }

    fn entry_count(&self) -> usize {
        self.entries.len()
    }
}

/// Space-separated `key:count` pairs.
impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}:{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Law, SemiringOps};
    use proptest::prelude::*;

    fn ms(pairs: &[(f64, u128)]) -> Multiset {
        Multiset::from_counts(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn union_examples() {
        assert_eq!(
            ms(&[(1.0, 2), (3.0, 1)]).union(&ms(&[(1.0, 1)])).unwrap(),
            ms(&[(1.0, 3), (3.0, 1)])
        );
        let a = ms(&[(1.0, 2), (3.0, 1)]);
        assert_eq!(a.union(&Multiset::empty()).unwrap(), a);
        assert_eq!(
            ms(&[(5.0, 1)]).union(&ms(&[(5.0, 1)])).unwrap(),
            ms(&[(5.0, 2)])
        );
    }

    #[test]
    fn convolve_examples() {
        assert_eq!(
            ms(&[(1.0, 1), (2.0, 1)]).convolve(&ms(&[(10.0, 1)])).unwrap(),
            ms(&[(11.0, 1), (12.0, 1)])
        );
        let a = ms(&[(1.0, 2), (3.0, 1), (-4.5, 7)]);
        assert_eq!(a.convolve(&Multiset::one()).unwrap(), a);
        // 2 * 3 pairwise sums, all equal to 2
        assert_eq!(
            ms(&[(1.0, 2)]).convolve(&ms(&[(1.0, 3)])).unwrap(),
            ms(&[(2.0, 6)])
        );
    }

    #[test]
    fn triangle_examples() {
        let a = ms(&[(1.0, 1), (2.0, 1), (4.0, 2)]);
        assert_eq!(a.triangle(3.0), 2);
        assert_eq!(a.triangle(f64::INFINITY), a.total());
        assert_eq!(a.triangle(0.5), 0);
        assert_eq!(Multiset::empty().triangle(10.0), 0);
    }

    #[test]
    fn overflow_is_detected() {
        let big = ms(&[(0.0, u128::MAX / 2 + 1)]);
        assert!(matches!(big.union(&big), Err(Error::Overflow)));
        assert!(matches!(big.convolve(&ms(&[(1.0, 2)])), Err(Error::Overflow)));
    }

    #[test]
    fn negative_zero_is_canonical() {
        assert_eq!(Multiset::singleton(-0.0), Multiset::singleton(0.0));
        assert_eq!(
            Multiset::singleton(1.0)
                .convolve(&Multiset::singleton(-1.0))
                .unwrap(),
            Multiset::one()
        );
    }

    #[test]
    fn display_is_key_count_pairs() {
        assert_eq!(ms(&[(1.0, 2), (2.5, 1)]).to_string(), "1:2 2.5:1");
    }

    fn arb_multiset() -> impl Strategy<Value = Multiset> {
        prop::collection::vec((-20i32..20, 1u128..5), 0..8).prop_map(|v| {
            Multiset::from_counts(v.into_iter().map(|(k, c)| (f64::from(k), c))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn totals_are_additive_and_multiplicative(a in arb_multiset(), b in arb_multiset()) {
            prop_assert_eq!(a.union(&b).unwrap().total(), a.total() + b.total());
            prop_assert_eq!(a.convolve(&b).unwrap().total(), a.total() * b.total());
        }

        #[test]
        fn triangle_splits_over_union(a in arb_multiset(), b in arb_multiset(), t in -45i32..45) {
            let t = f64::from(t) + 0.5;
            prop_assert_eq!(a.union(&b).unwrap().triangle(t), a.triangle(t) + b.triangle(t));
        }

        #[test]
        fn semiring_laws_hold(a in arb_multiset(), b in arb_multiset(), c in arb_multiset()) {
            let ops = SemiringOps {
                zero: Multiset::empty(),
                one: Multiset::one(),
                plus: |x: &Multiset, y: &Multiset| x.union(y).unwrap(),
                times: |x: &Multiset, y: &Multiset| x.convolve(y).unwrap(),
            };
            let v: Vec<Law> = ops.violated_laws(&a, &b, &c);
            prop_assert!(v.is_empty(), "{:?}", v);
        }

        #[test]
        fn canonical_form_is_unique(v in prop::collection::vec((-5i32..5, 1u128..4), 0..12)) {
            let pairs: Vec<(f64, u128)> = v.iter().map(|&(k, c)| (f64::from(k), c)).collect();
            let mut rev = pairs.clone();
            rev.reverse();
            let a = Multiset::from_counts(pairs).unwrap();
            let b = Multiset::from_counts(rev).unwrap();
            prop_assert_eq!(a.entries(), b.entries());
            prop_assert!(a.entries().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
