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


//! Aggregate queries over acyclic joins of CSV tables, restricted to the rows
//! that satisfy one additive inequality `sum_f g_f(x_f) <= L`.
//!
//! Queries are answered without materializing the join: the engine
//! ([`insideout`]) eliminates tables along a join tree ([`hypertree`]) and
//! carries dynamic-programming values ([`dp`]) keyed by partial inequality
//! sums. Exact mode keeps every key; approximate mode compresses values after
//! each operation ([`sketch`]) for a `(1 +- eps)` answer. [`oracle`]
//! materializes the join for checking.

pub mod cli;
pub mod dp;
pub mod drivers;
pub mod error;
pub mod hypertree;
pub mod insideout;
pub mod oracle;
pub mod query;
pub mod relation;
pub mod semiring;
pub mod sketch;
