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


//! Query specifications: the JSON schema, presets, and validation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Rejection, RejectionKind, Result};
use crate::relation::Database;
use crate::semiring::{make_named, ErrorClass, ExtReal, Monotonicity, NamedAlgebra};

/// Serde helpers for extended reals: finite numbers are plain JSON numbers,
/// infinities are the strings `"inf"` and `"-inf"`.
pub mod ext_real {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn parse(v: &str) -> Option<f64> {
        match v.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
            "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
            other => other.parse().ok().filter(|x: &f64| !x.is_nan()),
        }
    }

    struct ExtVisitor;

    impl Visitor<'_> for ExtVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            parse(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtVisitor)
    }
}

/// A univariate function of a feature value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        #[serde(with = "ext_real")]
        c: ExtReal,
    },
    Identity {},
    Scale {
        beta: f64,
    },
    /// `a x + b`
    Affine {
        a: f64,
        b: f64,
    },
    Square {},
    /// `|x - y|`
    AbsOffset {
        y: f64,
    },
    /// `(x - y)^2`
    SqOffset {
        y: f64,
    },
    /// `x^2 / alpha^2`
    ScaledSquare {
        alpha: f64,
    },
    /// `then_val` when `x == v`, else `else_val`.
    IndicatorEq {
        v: f64,
        #[serde(with = "ext_real")]
        then_val: ExtReal,
        #[serde(with = "ext_real")]
        else_val: ExtReal,
    },
    /// 1 when `x != 0`, else 0.
    IndicatorNonzero {},
}

impl FunctionSpec {
    pub fn eval(&self, x: f64) -> ExtReal {
        match *self {
            FunctionSpec::Constant { c } => c,
            FunctionSpec::Identity {} => x,
            FunctionSpec::Scale { beta } => beta * x,
            FunctionSpec::Affine { a, b } => a * x + b,
            FunctionSpec::Square {} => x * x,
            FunctionSpec::AbsOffset { y } => (x - y).abs(),
            FunctionSpec::SqOffset { y } => (x - y) * (x - y),
            FunctionSpec::ScaledSquare { alpha } => x * x / (alpha * alpha),
            FunctionSpec::IndicatorEq {
                v,
                then_val,
                else_val,
            } => {
                if x == v {
                    then_val
                } else {
                    else_val
                }
            }
            FunctionSpec::IndicatorNonzero {} => {
                if x != 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// `sum_f g_f(x_f) <= L`; features without a `g` entry contribute 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveInequality {
    #[serde(default)]
    pub g: BTreeMap<String, FunctionSpec>,
    #[serde(rename = "L", with = "ext_real")]
    pub l: ExtReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Count,
    Sumsum,
    Sumprod,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::Count => "count",
            QueryKind::Sumsum => "sumsum",
            QueryKind::Sumprod => "sumprod",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Approx,
}

/// A named query shape with its parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: String,
    /// Point coordinates; defaults to every feature except `label`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
    /// Label column with values in {1, -1} (halfspace_count only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    /// Right-hand side `L`; 0 for halfspaces and 1 for ellipsoids when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

pub const PRESETS: [&str; 8] = [
    "halfspace_count",
    "sphere_count",
    "ellipsoid_count",
    "sum_abs_halfspace",
    "sum_squares_ellipsoid",
    "nnz_halfspace",
    "min_1norm_sphere",
    "max_sqdist_halfspace",
];

/// The query file format.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<QueryKind>,
    /// Monoid (sumsum) or semiring (sumprod) name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(rename = "F", default, skip_serializing_if = "BTreeMap::is_empty")]
    pub f: BTreeMap<String, FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequality: Option<AdditiveInequality>,
    /// Extra inequalities; accepted by the oracle only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inequalities: Vec<AdditiveInequality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetSpec>,
}

impl QuerySpec {
    pub fn from_json(text: &str) -> Result<QuerySpec> {
        serde_json::from_str(text)
            .map_err(|e| Rejection::malformed(format!("query file: {e}")).into())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("query specs serialize")
    }

    /// All inequalities, `inequality` first.
    pub fn all_inequalities(&self) -> Vec<&AdditiveInequality> {
        self.inequality.iter().chain(&self.inequalities).collect()
    }

    /// Replaces a preset by the query it stands for. `available` lists the
    /// database features, used when the preset names none.
    pub fn expand_preset(&self, available: &[String]) -> Result<QuerySpec> {
        let Some(p) = &self.preset else {
            return Ok(self.clone());
        };
        if !self.f.is_empty() || self.inequality.is_some() || !self.inequalities.is_empty() {
            return Err(Rejection::malformed(
                "a preset cannot be combined with explicit F or inequality fields",
            )
            .into());
        }
        let mut out = preset(p, available)?;
        if let (Some(k), Some(pk)) = (self.kind, out.kind) {
            if k != pk {
                return Err(Rejection::malformed(format!(
                    "preset {} is a {pk} query, but kind says {k}",
                    p.name
                ))
                .into());
            }
        }
        if self.algebra.is_some() && self.algebra != out.algebra {
            return Err(Rejection::malformed(format!(
                "preset {} fixes its own algebra",
                p.name
            ))
            .into());
        }
        out.epsilon = self.epsilon;
        out.alpha = self.alpha;
        out.mode = self.mode;
        Ok(out)
    }
}

fn vector_param(p: &PresetSpec, name: &str, v: &Option<Vec<f64>>, d: usize) -> Result<Vec<f64>> {
    match v {
        None => Err(Rejection::malformed(format!("preset {} needs parameter {name}", p.name)).into()),
        Some(v) if v.len() != d => Err(Rejection::malformed(format!(
            "preset {}: {name} has {} entries but there are {d} features",
            p.name,
            v.len()
        ))
        .into()),
        Some(v) => Ok(v.clone()),
    }
}

/// Expands a preset into an explicit query.
pub fn preset(p: &PresetSpec, available: &[String]) -> Result<QuerySpec> {
    if !PRESETS.contains(&p.name.as_str()) {
        return Err(Error::UnknownPreset(p.name.clone()));
    }
    if p.label.is_some() && p.name != "halfspace_count" {
        return Err(Rejection::malformed(format!("preset {} takes no label", p.name)).into());
    }
    let features: Vec<String> = match &p.features {
        Some(f) => f.clone(),
        None => available
            .iter()
            .filter(|f| Some(*f) != p.label.as_ref())
            .cloned()
            .collect(),
    };
    let d = features.len();
    let zeros = vec![0.0; d];
    let y = match &p.y {
        None => zeros,
        some => vector_param(p, "y", some, d)?,
    };
    let per_feature = |mk: &dyn Fn(usize) -> FunctionSpec| -> BTreeMap<String, FunctionSpec> {
        features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), mk(i)))
            .collect()
    };
    let radius = || {
        p.radius
            .ok_or_else(|| Error::from(Rejection::malformed(format!("preset {} needs radius", p.name))))
    };
    let halfspace = || -> Result<AdditiveInequality> {
        let beta = vector_param(p, "beta", &p.beta, d)?;
        Ok(AdditiveInequality {
            g: per_feature(&|i| FunctionSpec::Scale { beta: beta[i] }),
            l: p.threshold.unwrap_or(0.0),
        })
    };
    let sphere = || -> Result<AdditiveInequality> {
        let r = radius()?;
        Ok(AdditiveInequality {
            g: per_feature(&|i| FunctionSpec::SqOffset { y: y[i] }),
            l: r * r,
        })
    };
    let ellipsoid = || -> Result<AdditiveInequality> {
        let alpha = vector_param(p, "alpha", &p.alpha, d)?;
        if alpha.contains(&0.0) {
            return Err(Rejection::malformed("ellipsoid axis lengths must be nonzero").into());
        }
        Ok(AdditiveInequality {
            g: per_feature(&|i| FunctionSpec::ScaledSquare { alpha: alpha[i] }),
            l: p.threshold.unwrap_or(1.0),
        })
    };

    let mut q = QuerySpec::default();
    match p.name.as_str() {
        "halfspace_count" => {
            q.inequality = Some(halfspace()?);
            match &p.label {
                None => q.kind = Some(QueryKind::Count),
                Some(label) => {
                    q.kind = Some(QueryKind::Sumprod);
                    q.algebra = Some("counting".into());
                    q.f.insert(
                        label.clone(),
                        FunctionSpec::IndicatorEq {
                            v: -1.0,
                            then_val: 1.0,
                            else_val: 0.0,
                        },
                    );
                }
            }
        }
        "sphere_count" => {
            q.kind = Some(QueryKind::Count);
            q.inequality = Some(sphere()?);
        }
        "ellipsoid_count" => {
            q.kind = Some(QueryKind::Count);
            q.inequality = Some(ellipsoid()?);
        }
        "sum_abs_halfspace" => {
            q.kind = Some(QueryKind::Sumsum);
            q.algebra = Some("sum".into());
            q.f = per_feature(&|i| FunctionSpec::AbsOffset { y: y[i] });
            q.inequality = Some(halfspace()?);
        }
        "sum_squares_ellipsoid" => {
            q.kind = Some(QueryKind::Sumsum);
            q.algebra = Some("sum".into());
            q.f = per_feature(&|_| FunctionSpec::Square {});
            q.inequality = Some(ellipsoid()?);
        }
        "nnz_halfspace" => {
            q.kind = Some(QueryKind::Sumsum);
            q.algebra = Some("sum".into());
            q.f = per_feature(&|_| FunctionSpec::IndicatorNonzero {});
            q.inequality = Some(halfspace()?);
        }
        "min_1norm_sphere" => {
            q.kind = Some(QueryKind::Sumprod);
            q.algebra = Some("min-plus".into());
            q.f = per_feature(&|_| FunctionSpec::AbsOffset { y: 0.0 });
            q.inequality = Some(sphere()?);
        }
        "max_sqdist_halfspace" => {
            q.kind = Some(QueryKind::Sumprod);
            q.algebra = Some("max-plus".into());
            q.f = per_feature(&|i| FunctionSpec::SqOffset { y: y[i] });
            q.inequality = Some(halfspace()?);
        }
        _ => unreachable!("checked against PRESETS"),
    }
    Ok(q)
}

/// How to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    Exact,
    Approx {
        epsilon: f64,
        /// Per-operation sketch parameter; derived from `epsilon` when unset.
        alpha: Option<f64>,
    },
}

pub const DEFAULT_EPSILON: f64 = 0.1;

/// An inequality with its functions indexed by feature id.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub g: Vec<Option<FunctionSpec>>,
    pub l: ExtReal,
}

impl Inequality {
    /// `g_f(x)`, 0 when feature `f` has no term.
    pub fn term(&self, f: usize, x: f64) -> f64 {
        self.g[f].as_ref().map_or(0.0, |g| g.eval(x))
    }

    /// No constraint: `0 <= +inf`.
    pub fn vacuous(d: usize) -> Self {
        Inequality {
            g: vec![None; d],
            l: f64::INFINITY,
        }
    }
}

/// A query bound to a database's feature numbering.
#[derive(Debug, Clone)]
pub struct Query {
    pub kind: QueryKind,
    /// `None` for row counting.
    pub algebra: Option<NamedAlgebra>,
    /// Per feature id; `None` where the query gives no function.
    pub factors: Vec<Option<FunctionSpec>>,
    pub inequalities: Vec<Inequality>,
    pub mode: EvalMode,
}

impl Query {
    /// The single inequality, or the vacuous one.
    pub fn inequality(&self) -> Inequality {
        match self.inequalities.first() {
            Some(i) => i.clone(),
            None => Inequality::vacuous(self.factors.len()),
        }
    }
}

fn reject(kind: RejectionKind, reason: impl Into<String>) -> Error {
    Rejection::new(kind, reason).into()
}

/// Checks that need no data: arity, kind, algebra, mode parameters.
///
/// `expected` is the kind implied by the caller (e.g. a subcommand); a query
/// file that names a different kind is refused.
pub fn validate_structure(spec: &QuerySpec, expected: Option<QueryKind>) -> Result<QueryKind> {
    check_structure(spec, expected, false)
}

fn check_structure(spec: &QuerySpec, expected: Option<QueryKind>, any_arity: bool) -> Result<QueryKind> {
    let n = spec.all_inequalities().len();
    if n > 1 && !any_arity {
        return Err(reject(
            RejectionKind::TooManyInequalities,
            format!(
                "{n} additive inequalities given, at most one is supported: \
                 approximating FAQ-AI(2) within any constant factor is NP-hard \
                 (reduction from Partition)"
            ),
        ));
    }
    let kind = match (spec.kind, expected) {
        (Some(k), Some(e)) if k != e => {
            return Err(Rejection::malformed(format!(
                "query file is a {k} query, but {e} was requested"
            ))
            .into())
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => {
            return Err(Rejection::malformed("query kind is not specified").into());
        }
    };
    if let Some(e) = spec.epsilon {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Rejection::malformed(format!("epsilon must be positive, got {e}")).into());
        }
    }
    if let Some(a) = spec.alpha {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Rejection::malformed(format!("alpha must be positive, got {a}")).into());
        }
    }
    let approx = spec.mode != Some(Mode::Exact);
    match kind {
        QueryKind::Count => {
            if spec.algebra.as_deref().is_some_and(|a| a != "counting") {
                return Err(Rejection::malformed("count queries take no algebra").into());
            }
            if !spec.f.is_empty() {
                return Err(Rejection::malformed("count queries take no F").into());
            }
        }
        QueryKind::Sumsum => {
            let name = spec.algebra.as_deref().unwrap_or("sum");
            match make_named(name)? {
                NamedAlgebra::Monoid(m) => {
                    if !(m.repeatable && m.no_error) {
                        return Err(reject(
                            RejectionKind::UnsupportedAlgebra,
                            format!("monoid {name} must be repeatable and error-free"),
                        ));
                    }
                }
                NamedAlgebra::Semiring(_) => {
                    return Err(reject(
                        RejectionKind::UnsupportedAlgebra,
                        format!("sumsum needs a monoid (sum, min, max), got semiring {name}"),
                    ))
                }
            }
        }
        QueryKind::Sumprod => {
            let name = spec.algebra.as_deref().unwrap_or("counting");
            match make_named(name)? {
                NamedAlgebra::Semiring(s) => {
                    let ok = s.plus_error == ErrorClass::NoError
                        && s.plus_monotonicity != Monotonicity::None
                        && s.times_error != ErrorClass::Unbounded;
                    if approx && !ok {
                        return Err(reject(
                            RejectionKind::UnsupportedAlgebra,
                            format!(
                                "semiring {name} needs monotone error-free addition and \
                                 bounded-error multiplication for approximation"
                            ),
                        ));
                    }
                }
                NamedAlgebra::Monoid(_) => {
                    return Err(reject(
                        RejectionKind::UnsupportedAlgebra,
                        format!(
                            "sumprod needs a semiring (counting, min-plus, max-plus), got monoid {name}"
                        ),
                    ))
                }
            }
        }
    }
    Ok(kind)
}

fn bind(
    db: &Database,
    map: &BTreeMap<String, FunctionSpec>,
) -> Result<Vec<Option<FunctionSpec>>> {
    let mut out = vec![None; db.features().len()];
    for (name, f) in map {
        out[db.require_feature(name)?] = Some(f.clone());
    }
    Ok(out)
}

/// Expands presets, validates, and binds feature names.
pub fn resolve(spec: &QuerySpec, db: &Database, expected: Option<QueryKind>) -> Result<Query> {
    resolve_with(spec, db, expected, false)
}

/// [`resolve`] without the one-inequality limit, for the oracle.
pub fn resolve_any_arity(
    spec: &QuerySpec,
    db: &Database,
    expected: Option<QueryKind>,
) -> Result<Query> {
    resolve_with(spec, db, expected, true)
}

fn resolve_with(
    spec: &QuerySpec,
    db: &Database,
    expected: Option<QueryKind>,
    any_arity: bool,
) -> Result<Query> {
    let spec = spec.expand_preset(db.features())?;
    let kind = check_structure(&spec, expected, any_arity)?;
    let algebra = match kind {
        QueryKind::Count => None,
        QueryKind::Sumsum => Some(make_named(spec.algebra.as_deref().unwrap_or("sum"))?),
        QueryKind::Sumprod => Some(make_named(spec.algebra.as_deref().unwrap_or("counting"))?),
    };
    let mode = match spec.mode {
        Some(Mode::Exact) => EvalMode::Exact,
        _ => EvalMode::Approx {
            epsilon: spec.epsilon.unwrap_or(DEFAULT_EPSILON),
            alpha: spec.alpha,
        },
    };
    let inequalities = spec
        .all_inequalities()
        .into_iter()
        .map(|i| {
            Ok(Inequality {
                g: bind(db, &i.g)?,
                l: i.l,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let q = Query {
        kind,
        algebra,
        factors: bind(db, &spec.f)?,
        inequalities,
        mode,
    };
    validate_domain(&q, db)?;
    Ok(q)
}

/// Checks every function on every value the data can feed it.
pub fn validate_domain(q: &Query, db: &Database) -> Result<()> {
    for (fid, name) in db.features().iter().enumerate() {
        let domain = db.active_domain_of(fid);
        for ineq in &q.inequalities {
            if let Some(g) = &ineq.g[fid] {
                if let Some(&x) = domain.iter().find(|&&x| !g.eval(x).is_finite()) {
                    return Err(Rejection::malformed(format!(
                        "inequality term for {name} is {} at {name} = {x}",
                        g.eval(x)
                    ))
                    .into());
                }
            }
        }
        let Some(f) = &q.factors[fid] else { continue };
        for &x in &domain {
            let v = f.eval(x);
            if v.is_nan() {
                return Err(Rejection::malformed(format!("F_{name}({x}) is not a number")).into());
            }
            let bad = match q.algebra {
                Some(NamedAlgebra::Semiring(s)) => {
                    !(v == s.zero || v == s.one || (v >= 0.0 && v.is_finite()))
                }
                Some(NamedAlgebra::Monoid(m)) => {
                    matches!(q.mode, EvalMode::Approx { .. }) && !m.idempotent && v < 0.0
                }
                None => false,
            };
            if bad {
                return Err(reject(
                    RejectionKind::InadmissibleDomain,
                    format!(
                        "F_{name}({x}) = {v} is negative; approximation needs factor values \
                         in [0, +inf) or the algebra's identities, since approximate sums of \
                         positive and negative terms do not approximate their difference"
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// [`resolve`] reduced to accept/refuse.
pub fn validate(spec: &QuerySpec, db: &Database) -> Result<()> {
    resolve(spec, db, None).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::tests::db1;

    #[test]
    fn function_specs_evaluate() {
        assert_eq!(FunctionSpec::Affine { a: 2.0, b: 1.0 }.eval(3.0), 7.0);
        assert_eq!(FunctionSpec::AbsOffset { y: 5.0 }.eval(2.0), 3.0);
        assert_eq!(FunctionSpec::SqOffset { y: 1.0 }.eval(-1.0), 4.0);
        assert_eq!(FunctionSpec::ScaledSquare { alpha: 2.0 }.eval(4.0), 4.0);
        assert_eq!(FunctionSpec::IndicatorNonzero {}.eval(0.0), 0.0);
        let ind = FunctionSpec::IndicatorEq {
            v: -1.0,
            then_val: 1.0,
            else_val: 0.0,
        };
        assert_eq!((ind.eval(-1.0), ind.eval(1.0)), (1.0, 0.0));
    }

    #[test]
    fn parses_query_json() {
        let q = QuerySpec::from_json(
            r#"{"kind":"sumprod","algebra":"min-plus",
                "F":{"a":{"kind":"identity"},"c":{"kind":"constant","c":"inf"}},
                "inequality":{"g":{"a":{"kind":"scale","beta":2}},"L":"inf"},
                "mode":"exact"}"#,
        )
        .unwrap();
        assert_eq!(q.kind, Some(QueryKind::Sumprod));
        assert_eq!(q.f["c"], FunctionSpec::Constant { c: f64::INFINITY });
        assert_eq!(q.inequality.as_ref().unwrap().l, f64::INFINITY);
        let back = QuerySpec::from_json(&q.to_json()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn unknown_fields_are_refused() {
        for text in [
            r#"{"kind":"count","bogus":1}"#,
            r#"{"kind":"count","inequality":{"L":1,"x":2}}"#,
            r#"{"kind":"sumsum","F":{"a":{"kind":"identity","y":1}}}"#,
            r#"{"kind":"sumsum","F":{"a":{"kind":"cube"}}}"#,
        ] {
            let err = QuerySpec::from_json(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn two_inequalities_are_refused() {
        let q = QuerySpec::from_json(
            r#"{"kind":"count","inequalities":[{"L":0},{"L":1}]}"#,
        )
        .unwrap();
        match validate_structure(&q, None) {
            Err(Error::Rejected(r)) => {
                assert_eq!(r.kind, RejectionKind::TooManyInequalities);
                assert!(r.reason.contains("FAQ-AI(2)") && r.reason.contains("NP-hard"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_factors_are_refused_for_sumprod() {
        let db = db1();
        let q = QuerySpec {
            kind: Some(QueryKind::Sumprod),
            algebra: Some("min-plus".into()),
            f: [("a".to_string(), FunctionSpec::Scale { beta: -1.0 })].into(),
            ..QuerySpec::default()
        };
        match validate(&q, &db) {
            Err(Error::Rejected(r)) => assert_eq!(r.kind, RejectionKind::InadmissibleDomain),
            other => panic!("{other:?}"),
        }
        let ok = QuerySpec {
            kind: Some(QueryKind::Count),
            inequality: Some(AdditiveInequality {
                g: [("a".to_string(), FunctionSpec::Identity {})].into(),
                l: 3.0,
            }),
            ..QuerySpec::default()
        };
        assert!(validate(&ok, &db).is_ok());
    }

    #[test]
    fn negative_sum_terms_are_refused_only_when_approximating() {
        let db = db1();
        let mut q = QuerySpec {
            kind: Some(QueryKind::Sumsum),
            f: [("a".to_string(), FunctionSpec::Scale { beta: -1.0 })].into(),
            ..QuerySpec::default()
        };
        assert!(validate(&q, &db).is_err());
        q.mode = Some(Mode::Exact);
        assert!(validate(&q, &db).is_ok());
        q.algebra = Some("min".into());
        q.mode = None;
        assert!(validate(&q, &db).is_ok());
    }

    #[test]
    fn kind_mismatch_and_unknown_names() {
        let q = QuerySpec {
            kind: Some(QueryKind::Count),
            ..QuerySpec::default()
        };
        assert!(validate_structure(&q, Some(QueryKind::Sumprod)).is_err());
        let q = QuerySpec {
            kind: Some(QueryKind::Sumprod),
            algebra: Some("sum".into()),
            ..QuerySpec::default()
        };
        assert!(validate_structure(&q, None).is_err());
        let q = QuerySpec {
            kind: Some(QueryKind::Sumsum),
            f: [("zz".to_string(), FunctionSpec::Square {})].into(),
            ..QuerySpec::default()
        };
        assert!(matches!(resolve(&q, &db1(), None), Err(Error::UnknownFeature(_))));
    }

    #[test]
    fn presets_expand() {
        let feats: Vec<String> = ["x1", "x2", "lbl"].iter().map(|s| s.to_string()).collect();
        let p = PresetSpec {
            name: "halfspace_count".into(),
            label: Some("lbl".into()),
            beta: Some(vec![1.0, 1.0]),
            ..PresetSpec::default()
        };
        let q = preset(&p, &feats).unwrap();
        assert_eq!(q.kind, Some(QueryKind::Sumprod));
        assert_eq!(q.algebra.as_deref(), Some("counting"));
        let ineq = q.inequality.unwrap();
        assert_eq!(ineq.l, 0.0);
        assert!(!ineq.g.contains_key("lbl"));
        assert!(matches!(q.f["lbl"], FunctionSpec::IndicatorEq { v, .. } if v == -1.0));

        let p = PresetSpec {
            name: "sphere_count".into(),
            radius: Some(3.0),
            y: Some(vec![1.0, 2.0]),
            features: Some(vec!["x1".into(), "x2".into()]),
            ..PresetSpec::default()
        };
        let q = preset(&p, &feats).unwrap();
        assert_eq!(q.inequality.unwrap().l, 9.0);

        let bad = PresetSpec {
            name: "sum_abs_halfspace".into(),
            beta: Some(vec![1.0]),
            ..PresetSpec::default()
        };
        assert_eq!(preset(&bad, &feats).unwrap_err().exit_code(), 2);
        let unknown = PresetSpec {
            name: "volume".into(),
            ..PresetSpec::default()
        };
        assert!(matches!(preset(&unknown, &feats), Err(Error::UnknownPreset(_))));
    }
}
