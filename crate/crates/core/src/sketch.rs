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

//! Lossy compression of dynamic-programming values.
//!
//! A sketch keeps the cumulative aggregate `tri(t)` (everything at keys
//! `<= t`) within a relative error while shrinking the number of entries to
//! logarithmic size.
//!
//! * Multisets are compressed by rank: elements whose ranks fall between two
//!   consecutive boundaries `floor((1+eps)^k)` are moved up to the element at
//!   the upper boundary. Counts at a threshold only ever decrease, by at most
//!   a factor `1 - eps`.
//! * Weighted sets are compressed by value: consecutive keys whose running
//!   aggregate stays within a factor `1 + eps` of the last retained aggregate
//!   are folded into one key. The aggregate at every original key stays within
//!   a factor `1 + eps` in both directions.

use serde::Serialize;

use crate::dp::{DpElement, Multiset, WeightedSet};
use crate::error::{Error, Result};
use crate::semiring::{ExtReal, Monotonicity};

/// Error budget for one approximate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxParams {
    /// Target relative error of the final answer.
    pub epsilon: f64,
    /// Sketch parameter applied after every single operation.
    pub alpha: f64,
    pub m: usize,
    pub n: usize,
}

impl ApproxParams {
    pub fn new(epsilon: f64, m: usize, n: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be a positive real, got {epsilon}"
            )));
        }
        Ok(ApproxParams {
            epsilon,
            alpha: alpha_for(epsilon, m, n),
            m,
            n,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be a positive real, got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }
}

/// Per-operation sketch parameter `eps / (m^2 log2(max(n, 2)) + m)`.
///
/// Evaluating over `m` tables of at most `n` rows performs at most that many
/// sketched operations along any dependency chain.
pub fn alpha_for(epsilon: f64, m: usize, n: usize) -> f64 {
    let m = m.max(1) as f64;
    let log_n = (n.max(2) as f64).log2();
    epsilon / (m * m * log_n + m)
}

/// Compression with an error parameter.
pub trait Sketch: Sized {
    fn sketch(&self, eps: f64) -> Result<Self>;
}

impl Sketch for Multiset {
    fn sketch(&self, eps: f64) -> Result<Self> {
        Ok(ms_sketch(self, eps))
    }
}

impl Sketch for WeightedSet {
    fn sketch(&self, eps: f64) -> Result<Self> {
        ws_sketch(self, eps)
    }
}

/// `sketch(a + b)`.
pub fn approx_union<T: DpElement + Sketch>(a: &T, b: &T, alpha: f64) -> Result<T> {
    a.union(b)?.sketch(alpha)
}

/// `sketch(a * b)`.
pub fn approx_convolve<T: DpElement + Sketch>(a: &T, b: &T, alpha: f64) -> Result<T> {
    a.convolve(b)?.sketch(alpha)
}

/// Rank boundaries `floor((1+eps)^k)` for `k >= 0`.
struct RankBoundaries {
    base: f64,
    log_base: f64,
}

impl RankBoundaries {
    fn new(eps: f64) -> Self {
        let base = 1.0 + eps;
        RankBoundaries {
            base,
            log_base: base.ln(),
        }
    }

    fn at(&self, k: u64) -> u128 {
        // saturating cast: huge k maps to u128::MAX
        self.base.powf(k as f64).floor() as u128
    }

    /// Largest boundary `<= c`, or 0 when `c == 0`.
    fn floor_of(&self, c: u128) -> u128 {
        if c == 0 {
            return 0;
        }
        let est = ((c as f64 + 1.0).ln() / self.log_base).ceil() - 1.0;
        let mut k = if est.is_finite() && est > 0.0 { est as u64 } else { 0 };
        // the estimate is close; gallop in case rounding put it off by more
        let mut step = 1;
        while k > 0 && self.at(k) > c {
            k = k.saturating_sub(step);
            step *= 2;
        }
        let mut step = 1;
        while step > 0 {
            if self.at(k + step) <= c {
                k += step;
                step *= 2;
            } else {
                step /= 2;
            }
        }
        self.at(k)
    }
}

/// Rank-based multiset sketch.
///
/// The element of rank `r` (1-based, ascending) is replaced by the element
/// whose rank is the smallest boundary `floor((1+eps)^k) >= r`; ranks above
/// the last boundary go to the largest element, so the total is preserved.
pub fn ms_sketch(a: &Multiset, eps: f64) -> Multiset {
    assert!(eps > 0.0, "sketch parameter must be positive");
    let total = a.total();
    if total == 0 {
        return Multiset::empty();
    }
    let bounds = RankBoundaries::new(eps);
    let mut out = Vec::new();
    let mut cum = 0u128;
    let mut kept_before = 0u128;
    for &(key, count) in a.entries() {
        cum += count;
        let kept = if cum == total {
            total
        } else {
            bounds.floor_of(cum)
        };
        debug_assert!(kept >= kept_before, "rank boundaries must be monotone");
        if kept > kept_before {
            out.push((key, kept - kept_before));
        }
        kept_before = kept;
    }
    Multiset::from_sorted(out).expect("sketch total equals input total")
}

fn within_band(boundary: ExtReal, value: ExtReal, eps: f64) -> bool {
    if boundary == value {
        return true;
    }
    boundary > 0.0
        && value > 0.0
        && boundary.is_finite()
        && value.is_finite()
        && boundary.max(value) <= (1.0 + eps) * boundary.min(value)
}

/// Value-based weighted-set sketch.
///
/// Walking keys upward, the first key is kept alone; afterwards a run keeps
/// absorbing keys while the running aggregate stays within the band
/// `[b / (1+eps), b (1+eps)]` around the aggregate `b` at the last kept key.
/// The first key that leaves the band closes the run; the run collapses onto
/// that key with the sum of its weights, and its aggregate becomes the new
/// `b`. Aggregates at kept keys are exact.
pub fn ws_sketch(a: &WeightedSet, eps: f64) -> Result<WeightedSet> {
    assert!(eps > 0.0, "sketch parameter must be positive");
    let base = *a.base();
    if base.plus_monotonicity == Monotonicity::None {
        return Err(Error::NonMonotone(base.name));
    }
    let entries = a.entries();
    let Some(&first) = entries.first() else {
        return Ok(a.clone());
    };
    let mut out = vec![first];
    let mut boundary = first.1;
    let mut prefix = first.1;
    let mut run: Option<(f64, ExtReal)> = None;
    for &(key, w) in &entries[1..] {
        prefix = base.plus(prefix, w);
        let agg = run.map_or(w, |(_, acc)| base.plus(acc, w));
        if within_band(boundary, prefix, eps) {
            run = Some((key, agg));
        } else {
            out.push((key, agg));
            boundary = prefix;
            run = None;
        }
    }
    out.extend(run);
    out.retain(|e| !base.is_zero(e.1));
    Ok(WeightedSet::from_sorted(base, out))
}
