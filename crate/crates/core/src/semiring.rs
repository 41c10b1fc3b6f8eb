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

//! Scalar commutative monoids and semirings over the extended reals.
//!
//! Descriptors carry, besides the operations, the properties the
//! approximation drivers rely on: monotonicity of addition, whether addition
//! introduces error, and whether it is repeatable.

use std::fmt;

use crate::error::{Error, Result};

/// A real number, `+inf` or `-inf`. NaN never denotes a valid value.
pub type ExtReal = f64;

pub type BinOp = fn(ExtReal, ExtReal) -> ExtReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    /// `x + y >= max(x, y)`
    Increasing,
    /// `x + y <= min(x, y)`
    Decreasing,
    None,
}

/// Error behaviour of an operation under `(1 + delta)` perturbation of its
/// operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Output error is at most the larger input error.
    NoError,
    /// Output error compounds the input errors multiplicatively.
    BoundedError,
    Unbounded,
}

#[derive(Clone, Copy)]
pub struct SemiringDescriptor {
    pub name: &'static str,
    pub plus: BinOp,
    pub times: BinOp,
    pub zero: ExtReal,
    pub one: ExtReal,
    pub plus_monotonicity: Monotonicity,
    pub plus_error: ErrorClass,
    pub times_error: ErrorClass,
}

impl SemiringDescriptor {
    pub fn plus(&self, a: ExtReal, b: ExtReal) -> ExtReal {
        (self.plus)(a, b)
    }

    pub fn times(&self, a: ExtReal, b: ExtReal) -> ExtReal {
        (self.times)(a, b)
    }

    pub fn is_zero(&self, x: ExtReal) -> bool {
        x == self.zero
    }

    /// Same algebra, judged by name and identities.
    pub fn same_as(&self, other: &SemiringDescriptor) -> bool {
        self.name == other.name
            && self.zero.to_bits() == other.zero.to_bits()
            && self.one.to_bits() == other.one.to_bits()
    }

    /// `(R, +, *, 0, 1)` with the usual real arithmetic.
    pub fn counting() -> Self {
        SemiringDescriptor {
            name: "counting",
            plus: |a, b| a + b,
            times: |a, b| a * b,
            zero: 0.0,
            one: 1.0,
            plus_monotonicity: Monotonicity::Increasing,
            plus_error: ErrorClass::NoError,
            times_error: ErrorClass::BoundedError,
        }
    }

    /// `(R+ u {0, +inf}, min, +, +inf, 0)`.
    pub fn min_plus() -> Self {
        SemiringDescriptor {
            name: "min-plus",
            plus: f64::min,
            times: |a, b| {
                if a == f64::INFINITY || b == f64::INFINITY {
                    f64::INFINITY
                } else {
                    a + b
                }
            },
            zero: f64::INFINITY,
            one: 0.0,
            plus_monotonicity: Monotonicity::Decreasing,
            plus_error: ErrorClass::NoError,
            times_error: ErrorClass::BoundedError,
        }
    }

    /// `(R+ u {0, -inf}, max, +, -inf, 0)`.
    pub fn max_plus() -> Self {
        SemiringDescriptor {
            name: "max-plus",
            plus: f64::max,
            times: |a, b| {
                if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    a + b
                }
            },
            zero: f64::NEG_INFINITY,
            one: 0.0,
            plus_monotonicity: Monotonicity::Increasing,
            plus_error: ErrorClass::NoError,
            times_error: ErrorClass::BoundedError,
        }
    }
}

impl fmt::Debug for SemiringDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiringDescriptor")
            .field("name", &self.name)
            .field("zero", &self.zero)
            .field("one", &self.one)
            .field("plus_monotonicity", &self.plus_monotonicity)
            .finish()
    }
}

#[derive(Clone, Copy)]
pub struct MonoidDescriptor {
    pub name: &'static str,
    pub plus: BinOp,
    pub identity: ExtReal,
    pub repeatable: bool,
    pub no_error: bool,
    /// `x + x = x` for every `x`.
    pub idempotent: bool,
}

impl MonoidDescriptor {
    pub fn plus(&self, a: ExtReal, b: ExtReal) -> ExtReal {
        (self.plus)(a, b)
    }

    pub fn sum() -> Self {
        MonoidDescriptor {
            name: "sum",
            plus: |a, b| a + b,
            identity: 0.0,
            repeatable: true,
            no_error: true,
            idempotent: false,
        }
    }

    pub fn min() -> Self {
        MonoidDescriptor {
            name: "min",
            plus: f64::min,
            identity: f64::INFINITY,
            repeatable: true,
            no_error: true,
            idempotent: true,
        }
    }

    pub fn max() -> Self {
        MonoidDescriptor {
            name: "max",
            plus: f64::max,
            identity: f64::NEG_INFINITY,
            repeatable: true,
            no_error: true,
            idempotent: true,
        }
    }
}

impl fmt::Debug for MonoidDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonoidDescriptor")
            .field("name", &self.name)
            .field("identity", &self.identity)
            .finish()
    }
}

#[derive(Debug, Clone, Copy)]
pub enum NamedAlgebra {
    Semiring(SemiringDescriptor),
    Monoid(MonoidDescriptor),
}

pub fn make_named(name: &str) -> Result<NamedAlgebra> {
    Ok(match name {
        "counting" => NamedAlgebra::Semiring(SemiringDescriptor::counting()),
        "min-plus" => NamedAlgebra::Semiring(SemiringDescriptor::min_plus()),
        "max-plus" => NamedAlgebra::Semiring(SemiringDescriptor::max_plus()),
        "sum" => NamedAlgebra::Monoid(MonoidDescriptor::sum()),
        "min" => NamedAlgebra::Monoid(MonoidDescriptor::min()),
        "max" => NamedAlgebra::Monoid(MonoidDescriptor::max()),
        other => return Err(Error::UnknownAlgebra(other.to_string())),
    })
}

pub fn semiring_named(name: &str) -> Result<SemiringDescriptor> {
    match make_named(name)? {
        NamedAlgebra::Semiring(s) => Ok(s),
        NamedAlgebra::Monoid(_) => Err(Error::UnknownAlgebra(format!("{name} (not a semiring)"))),
    }
}

pub fn monoid_named(name: &str) -> Result<MonoidDescriptor> {
    match make_named(name)? {
        NamedAlgebra::Monoid(m) => Ok(m),
        NamedAlgebra::Semiring(_) => Err(Error::UnknownAlgebra(format!("{name} (not a monoid)"))),
    }
}

/// `x + x + ... + x` (`k` copies) by repeated doubling.
pub fn repeat(m: &MonoidDescriptor, x: ExtReal, k: u128) -> ExtReal {
    if k == 0 {
        return m.identity;
    }
    if m.idempotent {
        return x;
    }
    let mut acc = m.identity;
    let mut pow = x;
    let mut k = k;
    loop {
        if k & 1 == 1 {
            acc = m.plus(acc, pow);
        }
        k >>= 1;
        if k == 0 {
            return acc;
        }
        pow = m.plus(pow, pow);
    }
}

/// The eight commutative-semiring laws, in the conventional order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    PlusCommutative,
    PlusAssociative,
    PlusIdentity,
    TimesCommutative,
    TimesAssociative,
    Annihilation,
    TimesIdentity,
    Distributive,
}

impl Law {
    pub const ALL: [Law; 8] = [
        Law::PlusCommutative,
        Law::PlusAssociative,
        Law::PlusIdentity,
        Law::TimesCommutative,
        Law::TimesAssociative,
        Law::Annihilation,
        Law::TimesIdentity,
        Law::Distributive,
    ];
}

#[derive(Debug, Clone)]
pub struct LawViolation<T> {
    pub law: Law,
    pub witness: (T, T, T),
}

/// Laws checked on a sample; at most one witness is kept per law.
#[derive(Debug, Clone)]
pub struct AxiomReport<T> {
    pub checked: usize,
    pub violations: Vec<LawViolation<T>>,
}

impl<T> AxiomReport<T> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, law: Law) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }
}

/// A commutative semiring given by its operations, for law checking.
pub struct SemiringOps<T, P, M> {
    pub zero: T,
    pub one: T,
    pub plus: P,
    pub times: M,
}

impl<T, P, M> SemiringOps<T, P, M>
where
    T: Clone + PartialEq,
    P: Fn(&T, &T) -> T,
    M: Fn(&T, &T) -> T,
{
    /// Laws violated by the triple `(a, b, c)`.
    pub fn violated_laws(&self, a: &T, b: &T, c: &T) -> Vec<Law> {
        let (p, t) = (&self.plus, &self.times);
        Law::ALL
            .into_iter()
            .filter(|law| {
                !match law {
                    Law::PlusCommutative => p(a, b) == p(b, a),
                    Law::PlusAssociative => p(a, &p(b, c)) == p(&p(a, b), c),
                    Law::PlusIdentity => p(a, &self.zero) == *a,
                    Law::TimesCommutative => t(a, b) == t(b, a),
                    Law::TimesAssociative => t(a, &t(b, c)) == t(&t(a, b), c),
                    Law::Annihilation => t(a, &self.zero) == self.zero,
                    Law::TimesIdentity => t(a, &self.one) == *a,
                    Law::Distributive => t(a, &p(b, c)) == p(&t(a, b), &t(a, c)),
                }
            })
            .collect()
    }

    pub fn check_triples<'a, I>(&self, triples: I) -> AxiomReport<T>
    where
        T: 'a,
        I: IntoIterator<Item = (&'a T, &'a T, &'a T)>,
    {
        let mut report = AxiomReport {
            checked: 0,
            violations: Vec::new(),
        };
        for (a, b, c) in triples {
            report.checked += 1;
            for law in self.violated_laws(a, b, c) {
                if !report.violates(law) {
                    report.violations.push(LawViolation {
                        law,
                        witness: (a.clone(), b.clone(), c.clone()),
                    });
                }
            }
        }
        report
    }
}

/// Checks the eight laws exactly on every ordered triple drawn from `samples`.
pub fn check_axioms(s: &SemiringDescriptor, samples: &[ExtReal]) -> AxiomReport<ExtReal> {
    let ops = SemiringOps {
        zero: s.zero,
        one: s.one,
        plus: |a: &f64, b: &f64| s.plus(*a, *b),
        times: |a: &f64, b: &f64| s.times(*a, *b),
    };
    let triples = samples.iter().flat_map(|a| {
        samples
            .iter()
            .flat_map(move |b| samples.iter().map(move |c| (a, b, c)))
    });
    ops.check_triples(triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn named_instances() {
        let mp = semiring_named("min-plus").unwrap();
        assert_eq!(mp.plus(3.0, 5.0), 3.0);
        assert_eq!(mp.times(3.0, 5.0), 8.0);
        assert_eq!(mp.plus(4.5, INF), 4.5);

        let c = semiring_named("counting").unwrap();
        assert_eq!(c.plus(2.0, 3.0), 5.0);
        assert_eq!(c.times(2.0, 3.0), 6.0);

        let xp = semiring_named("max-plus").unwrap();
        assert_eq!(xp.zero, -INF);
        assert_eq!(xp.times(-INF, 4.0), -INF);

        assert!(matches!(make_named("tropical"), Err(Error::UnknownAlgebra(_))));
        assert!(semiring_named("sum").is_err());
    }

    #[test]
    fn repeat_cases() {
        assert_eq!(repeat(&MonoidDescriptor::sum(), 1.5, 4), 6.0);
        assert_eq!(repeat(&MonoidDescriptor::min(), 7.0, 1000), 7.0);
        for m in [MonoidDescriptor::sum(), MonoidDescriptor::min(), MonoidDescriptor::max()] {
            assert_eq!(repeat(&m, 3.0, 0), m.identity);
        }
        assert_eq!(repeat(&MonoidDescriptor::sum(), 3.0, 1_000_001), 3_000_003.0);
    }

    #[test]
    fn counting_axioms_on_integers() {
        let samples: Vec<f64> = (-3..=4).map(f64::from).collect();
        assert!(check_axioms(&SemiringDescriptor::counting(), &samples).holds());
    }

    #[test]
    fn min_plus_axioms() {
        let r = check_axioms(&SemiringDescriptor::min_plus(), &[0.0, 1.0, 5.0, INF]);
        assert!(r.holds(), "{:?}", r.violations);
        assert_eq!(r.checked, 64);
        let r = check_axioms(&SemiringDescriptor::max_plus(), &[0.0, 0.25, 7.5, -INF]);
        assert!(r.holds(), "{:?}", r.violations);
    }

    #[test]
    fn broken_descriptor_fails_distributivity() {
        let mut broken = SemiringDescriptor::counting();
        broken.times = |a, b| a - b;
        let r = check_axioms(&broken, &[0.0, 1.0, 2.0, 3.0]);
        assert!(!r.holds());
        assert!(r.violates(Law::Distributive));
        let w = r
            .violations
            .iter()
            .find(|v| v.law == Law::Distributive)
            .unwrap()
            .witness;
        let (a, b, c) = w;
        assert_ne!(a - (b + c), (a - b) + (a - c));
    }

    fn ext_sample() -> impl Strategy<Value = f64> {
        prop_oneof![
            8 => -1.0e6..1.0e6f64,
            1 => Just(INF),
            1 => Just(-INF),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn repeat_is_additive_in_count(x in -1000i32..1000, j in 0u128..5000, k in 0u128..5000) {
            let x = f64::from(x);
            for m in [MonoidDescriptor::sum(), MonoidDescriptor::min(), MonoidDescriptor::max()] {
                prop_assert_eq!(repeat(&m, x, j + k), m.plus(repeat(&m, x, j), repeat(&m, x, k)));
            }
        }

        #[test]
        fn tropical_plus_is_idempotent(x in ext_sample()) {
            for s in [SemiringDescriptor::min_plus(), SemiringDescriptor::max_plus()] {
                prop_assert_eq!(s.plus(x, x), x);
            }
        }

        #[test]
        fn monotonicity_flags_match(x in 0.0..1.0e6f64, y in 0.0..1.0e6f64) {
            for s in [SemiringDescriptor::counting(), SemiringDescriptor::min_plus(), SemiringDescriptor::max_plus()] {
                let z = s.plus(x, y);
                match s.plus_monotonicity {
                    Monotonicity::Increasing => prop_assert!(z >= x.max(y)),
                    Monotonicity::Decreasing => prop_assert!(z <= x.min(y)),
                    Monotonicity::None => {}
                }
            }
        }
    }
}
