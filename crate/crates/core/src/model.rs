//! Attribute primitives: requirements, constraints, dependency and derivation
//! relations, and the tradeoff matrix between general scenarios.
//!
//! The general-scenario equivalence is stored as a label on every scenario, so
//! two scenarios are equivalent exactly when their labels match. All types are
//! plain values; nothing here mutates after construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance used when checking that the relevance weights sum to one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RequirementId(String);

impl RequirementId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RequirementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RequirementId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for RequirementId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RequirementKind {
    Functional,
    Scenario,
}

impl fmt::Display for RequirementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RequirementKind::Functional => f.write_str("functional"),
            RequirementKind::Scenario => f.write_str("a scenario"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Requirement {
    pub id: RequirementId,
    pub kind: RequirementKind,
    pub description: String,
    /// General-scenario label; present iff `kind` is `Scenario`.
    pub general_scenario: Option<String>,
}

impl Requirement {
    pub fn functional(id: impl Into<RequirementId>, description: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: RequirementKind::Functional,
            description: description.into(),
            general_scenario: None,
        }
    }

    pub fn scenario(
        id: impl Into<RequirementId>,
        description: impl Into<String>,
        general_scenario: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            kind: RequirementKind::Scenario,
            description: description.into(),
            general_scenario: Some(general_scenario.into()),
        }
    }

    pub fn is_functional(&self) -> bool {
        self.kind == RequirementKind::Functional
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub description: String,
    pub members: BTreeSet<RequirementId>,
}

impl Constraint {
    pub fn new<I, R>(id: impl Into<String>, members: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: Into<RequirementId>,
    {
        Self {
            id: id.into(),
            description: String::new(),
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }
}

/// Directed effects between general scenarios, entries in {-1, 0, +1}.
///
/// Row = source, column = target. The diagonal is always zero: two scenarios of
/// the same general scenario never affect each other.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TradeoffMatrix {
    labels: Vec<String>,
    entries: Vec<Vec<i8>>,
}

impl TradeoffMatrix {
    pub fn new(labels: Vec<String>, entries: Vec<Vec<i8>>) -> Result<Self> {
        let n = labels.len();
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidTradeoff("duplicate general-scenario label".into()));
        }
        if entries.len() != n {
            return Err(Error::InvalidTradeoff(format!(
                "expected {n} rows, found {}",
                entries.len()
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTradeoff(format!(
                    "row `{}` has {} entries, expected {n}",
                    labels[i],
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(-1..=1).contains(&v) {
                    return Err(Error::InvalidTradeoff(format!(
                        "entry ({}, {}) = {v} is outside {{-1, 0, 1}}",
                        labels[i], labels[j]
                    )));
                }
                if i == j && v != 0 {
                    return Err(Error::InvalidTradeoff(format!(
                        "diagonal entry for `{}` must be 0",
                        labels[i]
                    )));
                }
            }
        }
        Ok(Self { labels, entries })
    }

    /// All-zero matrix over the given labels.
    pub fn neutral(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, vec![vec![0; n]; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Effect of general scenario `from` on `to`, or `None` for unknown labels.
    pub fn effect(&self, from: &str, to: &str) -> Option<i8> {
        Some(self.entries[self.index_of(from)?][self.index_of(to)?])
    }
}

/// How the dependency set of a functional requirement is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ClosureMode {
    /// Everything comparable under the reflexive-transitive dependency order.
    #[default]
    Comparable,
    /// Only the requirement itself and what it (transitively) depends on.
    Upward,
}

impl ClosureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClosureMode::Comparable => "comparable",
            ClosureMode::Upward => "upward",
        }
    }
}

impl std::str::FromStr for ClosureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "comparable" => Ok(ClosureMode::Comparable),
            "upward" => Ok(ClosureMode::Upward),
            other => Err(Error::InvalidParams(format!("unknown closure mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    /// Weight on shared originating scenarios.
    pub alpha: f64,
    /// Weight on dependency / derived-set overlap.
    pub beta: f64,
    /// Weight on shared design constraints.
    pub gamma: f64,
    /// Relevance assigned to irrelevant pairs; strictly negative.
    pub lambda: f64,
    /// Expected cohesion level for the k-cohesive solver.
    pub k: usize,
    pub closure: ClosureMode,
}

impl Default for GameParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.4,
            gamma: 0.1,
            lambda: -0.5,
            k: 3,
            closure: ClosureMode::Comparable,
        }
    }
}

impl GameParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, lambda: f64, k: usize) -> Result<Self> {
        let params = Self {
            alpha,
            beta,
            gamma,
            lambda,
            k,
            closure: ClosureMode::Comparable,
        };
        params.check()?;
        Ok(params)
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_closure(mut self, closure: ClosureMode) -> Self {
        self.closure = closure;
        self
    }

    pub fn check(&self) -> Result<()> {
        let weights = [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)];
        for (name, w) in weights {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {w}")));
            }
        }
        let sum = self.alpha + self.beta + self.gamma;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "alpha + beta + gamma must equal 1, got {sum}"
            )));
        }
        if !self.lambda.is_finite() || self.lambda >= 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be negative, got {}",
                self.lambda
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// A structural problem found by [`AttributePrimitive::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyId,
    DuplicateRequirement(RequirementId),
    MissingGeneralScenario(RequirementId),
    UnexpectedGeneralScenario(RequirementId),
    UnknownGeneralScenario { id: RequirementId, label: String },
    DependsOnNonFunctional { from: RequirementId, to: RequirementId },
    DerivesWrongKind { scenario: RequirementId, functional: RequirementId },
    UnknownRequirement { context: String, id: RequirementId },
    EmptyConstraint(String),
    DuplicateConstraint(String),
    RawRelevanceSelfPair(RequirementId),
    RawRelevanceNotFinite { a: RequirementId, b: RequirementId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyId => write!(f, "requirement with an empty id"),
            Violation::DuplicateRequirement(id) => write!(f, "duplicate requirement `{id}`"),
            Violation::MissingGeneralScenario(id) => {
                write!(f, "scenario `{id}` has no general scenario")
            }
            Violation::UnexpectedGeneralScenario(id) => {
                write!(f, "functional requirement `{id}` carries a general scenario")
            }
            Violation::UnknownGeneralScenario { id, label } => write!(
                f,
                "scenario `{id}` uses general scenario `{label}` missing from the tradeoff matrix"
            ),
            Violation::DependsOnNonFunctional { from, to } => write!(
                f,
                "dependency ({from}, {to}) must relate two functional requirements"
            ),
            Violation::DerivesWrongKind {
                scenario,
                functional,
            } => write!(
                f,
                "derivation ({scenario}, {functional}) must go from a scenario to a functional requirement"
            ),
            Violation::UnknownRequirement { context, id } => {
                write!(f, "{context} references unknown requirement `{id}`")
            }
            Violation::EmptyConstraint(c) => write!(f, "constraint `{c}` has no members"),
            Violation::DuplicateConstraint(c) => write!(f, "duplicate constraint id `{c}`"),
            Violation::RawRelevanceSelfPair(id) => {
                write!(f, "relevance override pairs `{id}` with itself")
            }
            Violation::RawRelevanceNotFinite { a, b } => {
                write!(f, "relevance override for ({a}, {b}) is not finite")
            }
        }
    }
}

/// Orders an unordered pair so that it can key a map.
pub fn unordered_pair(a: RequirementId, b: RequirementId) -> (RequirementId, RequirementId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AttributePrimitive {
    pub name: String,
    /// Requirements in declaration order. This order is the canonical order
    /// used for deterministic tie-breaking in the solvers.
    pub requirements: Vec<Requirement>,
    pub constraints: Vec<Constraint>,
    /// `(a, b)` means functional `a` depends on functional `b`.
    pub depends: BTreeSet<(RequirementId, RequirementId)>,
    /// `(q, f)` means functional `f` is derived from scenario `q`.
    pub derives: BTreeSet<(RequirementId, RequirementId)>,
    pub tradeoff: TradeoffMatrix,
    /// Direct relevance values keyed by [`unordered_pair`]; they bypass the
    /// relevance predicate entirely.
    pub raw_relevance: BTreeMap<(RequirementId, RequirementId), f64>,
}

impl AttributePrimitive {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &RequirementId> {
        self.requirements.iter().map(|r| &r.id)
    }

    pub fn requirement(&self, id: &RequirementId) -> Option<&Requirement> {
        self.requirements.iter().find(|r| &r.id == id)
    }

    pub fn contains(&self, id: &RequirementId) -> bool {
        self.requirement(id).is_some()
    }

    pub fn functional(&self) -> impl Iterator<Item = &Requirement> {
        self.requirements.iter().filter(|r| r.is_functional())
    }

    pub fn scenarios(&self) -> impl Iterator<Item = &Requirement> {
        self.requirements.iter().filter(|r| !r.is_functional())
    }

    pub fn kind_of(&self, id: &RequirementId) -> Result<RequirementKind> {
        self.requirement(id)
            .map(|r| r.kind)
            .ok_or_else(|| Error::UnknownRequirement(id.clone()))
    }

    fn expect_kind(&self, id: &RequirementId, expected: RequirementKind) -> Result<&Requirement> {
        let r = self
            .requirement(id)
            .ok_or_else(|| Error::UnknownRequirement(id.clone()))?;
        if r.kind != expected {
            return Err(Error::WrongKind {
                id: id.clone(),
                expected,
            });
        }
        Ok(r)
    }

    pub fn set_raw_relevance(&mut self, a: impl Into<RequirementId>, b: impl Into<RequirementId>, sigma: f64) {
        self.raw_relevance.insert(unordered_pair(a.into(), b.into()), sigma);
    }

    pub fn raw_relevance_of(&self, a: &RequirementId, b: &RequirementId) -> Option<f64> {
        self.raw_relevance
            .get(&unordered_pair(a.clone(), b.clone()))
            .copied()
    }

    /// Lists every structural violation. An empty list means the primitive is
    /// well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut kinds: BTreeMap<&RequirementId, RequirementKind> = BTreeMap::new();
        for r in &self.requirements {
            if r.id.as_str().is_empty() {
                out.push(Violation::EmptyId);
            }
            if kinds.insert(&r.id, r.kind).is_some() {
                out.push(Violation::DuplicateRequirement(r.id.clone()));
            }
            match (r.kind, &r.general_scenario) {
                (RequirementKind::Scenario, None) => {
                    out.push(Violation::MissingGeneralScenario(r.id.clone()))
                }
                (RequirementKind::Functional, Some(_)) => {
                    out.push(Violation::UnexpectedGeneralScenario(r.id.clone()))
                }
                (RequirementKind::Scenario, Some(label)) => {
                    if self.tradeoff.index_of(label).is_none() {
                        out.push(Violation::UnknownGeneralScenario {
                            id: r.id.clone(),
                            label: label.clone(),
                        });
                    }
                }
                (RequirementKind::Functional, None) => {}
            }
        }

        let unknown = |context: String, id: &RequirementId, out: &mut Vec<Violation>| {
            if !kinds.contains_key(id) {
                out.push(Violation::UnknownRequirement {
                    context,
                    id: id.clone(),
                });
                true
            } else {
                false
            }
        };

        let mut seen_constraints = BTreeSet::new();
        for c in &self.constraints {
            if !seen_constraints.insert(c.id.as_str()) {
                out.push(Violation::DuplicateConstraint(c.id.clone()));
            }
            if c.members.is_empty() {
                out.push(Violation::EmptyConstraint(c.id.clone()));
            }
            for m in &c.members {
                unknown(format!("constraint `{}`", c.id), m, &mut out);
            }
        }

        for (a, b) in &self.depends {
            let missing_a = unknown(format!("dependency ({a}, {b})"), a, &mut out);
            let missing_b = unknown(format!("dependency ({a}, {b})"), b, &mut out);
            if !missing_a
                && !missing_b
                && (kinds[a] != RequirementKind::Functional || kinds[b] != RequirementKind::Functional)
            {
                out.push(Violation::DependsOnNonFunctional {
                    from: a.clone(),
                    to: b.clone(),
                });
            }
        }

        for (q, f) in &self.derives {
            let missing_q = unknown(format!("derivation ({q}, {f})"), q, &mut out);
            let missing_f = unknown(format!("derivation ({q}, {f})"), f, &mut out);
            if !missing_q
                && !missing_f
                && (kinds[q] != RequirementKind::Scenario || kinds[f] != RequirementKind::Functional)
            {
                out.push(Violation::DerivesWrongKind {
                    scenario: q.clone(),
                    functional: f.clone(),
                });
            }
        }

        for ((a, b), sigma) in &self.raw_relevance {
            let context = format!("relevance override ({a}, {b})");
            unknown(context.clone(), a, &mut out);
            unknown(context, b, &mut out);
            if a == b {
                out.push(Violation::RawRelevanceSelfPair(a.clone()));
            }
            if !sigma.is_finite() {
                out.push(Violation::RawRelevanceNotFinite {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
        out
    }

    /// `Ok(())` when [`validate`](Self::validate) finds nothing.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    /// Dependency set of a functional requirement under the given closure.
    ///
    /// The closure is reflexive and transitive; cycles in `depends` are
    /// tolerated.
    pub fn dependency_set(&self, r: &RequirementId, mode: ClosureMode) -> Result<BTreeSet<RequirementId>> {
        self.expect_kind(r, RequirementKind::Functional)?;
        let mut set = self.reachable(r, true);
        if mode == ClosureMode::Comparable {
            set.extend(self.reachable(r, false));
        }
        Ok(set)
    }

    fn reachable(&self, start: &RequirementId, forward: bool) -> BTreeSet<RequirementId> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(cur) = queue.pop_front() {
            for (a, b) in &self.depends {
                let (from, to) = if forward { (a, b) } else { (b, a) };
                if from == &cur && seen.insert(to.clone()) {
                    queue.push_back(to.clone());
                }
            }
        }
        seen
    }

    /// Equivalence class of a scenario under the general-scenario relation.
    pub fn general_scenario(&self, r: &RequirementId) -> Result<BTreeSet<RequirementId>> {
        let label = self
            .expect_kind(r, RequirementKind::Scenario)?
            .general_scenario
            .as_deref();
        Ok(self
            .scenarios()
            .filter(|s| s.general_scenario.as_deref() == label)
            .map(|s| s.id.clone())
            .collect())
    }

    /// Ids of the constraints that mention `r`.
    pub fn constraints_of(&self, r: &RequirementId) -> Result<BTreeSet<String>> {
        if !self.contains(r) {
            return Err(Error::UnknownRequirement(r.clone()));
        }
        Ok(self
            .constraints
            .iter()
            .filter(|c| c.members.contains(r))
            .map(|c| c.id.clone())
            .collect())
    }

    /// Functional requirements derived from scenario `q`.
    pub fn derived_set(&self, q: &RequirementId) -> Result<BTreeSet<RequirementId>> {
        self.expect_kind(q, RequirementKind::Scenario)?;
        Ok(self
            .derives
            .iter()
            .filter(|(s, _)| s == q)
            .map(|(_, f)| f.clone())
            .collect())
    }

    /// Scenarios that functional requirement `f` is derived from.
    pub fn derived_from(&self, f: &RequirementId) -> Result<BTreeSet<RequirementId>> {
        self.expect_kind(f, RequirementKind::Functional)?;
        Ok(self
            .derives
            .iter()
            .filter(|(_, t)| t == f)
            .map(|(q, _)| q.clone())
            .collect())
    }
}

/// A primitive together with the parameters it was shipped with, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub primitive: AttributePrimitive,
    pub params: Option<GameParams>,
}

impl Model {
    pub fn new(primitive: AttributePrimitive, params: Option<GameParams>) -> Self {
        Self { primitive, params }
    }

    /// Shipped parameters, or the defaults when none were given.
    pub fn params_or_default(&self) -> GameParams {
        self.params.unwrap_or_default()
    }
}

/// A design element: a set of requirements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coalition {
    pub members: BTreeSet<RequirementId>,
}

impl Coalition {
    pub fn new<I, R>(members: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: Into<RequirementId>,
    {
        Self {
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: &RequirementId) -> bool {
        self.members.contains(id)
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition {
            members: self.members.union(&other.members).cloned().collect(),
        }
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// An exhaustive partition of a primitive's requirements into coalitions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub coalitions: Vec<Coalition>,
}

impl Decomposition {
    pub fn new(coalitions: Vec<Coalition>) -> Self {
        Self { coalitions }
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    /// Checks that the coalitions are non-empty, pairwise disjoint and cover
    /// exactly the requirements of `primitive`.
    pub fn check_against(&self, primitive: &AttributePrimitive) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, c) in self.coalitions.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidDecomposition(format!("coalition {i} is empty")));
            }
            for m in &c.members {
                if !primitive.contains(m) {
                    return Err(Error::InvalidDecomposition(format!(
                        "coalition {i} contains unknown requirement `{m}`"
                    )));
                }
                if !seen.insert(m.clone()) {
                    return Err(Error::InvalidDecomposition(format!(
                        "requirement `{m}` appears in more than one coalition"
                    )));
                }
            }
        }
        if let Some(missing) = primitive.ids().find(|id| !seen.contains(*id)) {
            return Err(Error::InvalidDecomposition(format!(
                "requirement `{missing}` is not covered"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn id(s: &str) -> RequirementId {
        RequirementId::from(s)
    }

    fn ids(xs: &[&str]) -> BTreeSet<RequirementId> {
        xs.iter().map(|s| id(s)).collect()
    }

    #[test]
    fn running_example_is_valid() {
        assert_eq!(corpus::running_example().primitive.validate(), vec![]);
    }

    #[test]
    fn derives_with_functional_source_is_flagged() {
        let mut p = corpus::running_example().primitive;
        p.derives.insert((id("f1"), id("f2")));
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("(f1, f2)"), "{}", v[0]);
    }

    #[test]
    fn unknown_constraint_member_is_flagged() {
        let mut p = corpus::running_example().primitive;
        p.constraints.push(Constraint::new("c3", ["zz"]));
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("zz"));
    }

    #[test]
    fn scenario_without_label_and_functional_with_label() {
        let mut p = AttributePrimitive::new("bad");
        p.requirements.push(Requirement {
            id: id("q"),
            kind: RequirementKind::Scenario,
            description: String::new(),
            general_scenario: None,
        });
        p.requirements.push(Requirement {
            id: id("f"),
            kind: RequirementKind::Functional,
            description: String::new(),
            general_scenario: Some("x".into()),
        });
        p.requirements.push(Requirement::functional("f", ""));
        let v = p.validate();
        assert!(v.contains(&Violation::MissingGeneralScenario(id("q"))));
        assert!(v.contains(&Violation::UnexpectedGeneralScenario(id("f"))));
        assert!(v.contains(&Violation::DuplicateRequirement(id("f"))));
    }

    #[test]
    fn dependency_sets_by_mode() {
        let p = corpus::running_example().primitive;
        let cmp = ClosureMode::Comparable;
        assert_eq!(p.dependency_set(&id("f1"), cmp).unwrap(), ids(&["f1", "f2"]));
        assert_eq!(p.dependency_set(&id("f2"), cmp).unwrap(), ids(&["f1", "f2"]));
        assert_eq!(p.dependency_set(&id("f2"), ClosureMode::Upward).unwrap(), ids(&["f2"]));
        assert_eq!(p.dependency_set(&id("f1"), ClosureMode::Upward).unwrap(), ids(&["f1", "f2"]));
        for mode in [cmp, ClosureMode::Upward] {
            assert_eq!(p.dependency_set(&id("f3"), mode).unwrap(), ids(&["f3"]));
        }
        assert!(matches!(
            p.dependency_set(&id("q1"), cmp),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn dependency_cycles_are_closed() {
        let mut p = AttributePrimitive::new("cycle");
        for f in ["a", "b", "c", "d"] {
            p.requirements.push(Requirement::functional(f, ""));
        }
        p.depends.insert((id("a"), id("b")));
        p.depends.insert((id("b"), id("c")));
        p.depends.insert((id("c"), id("a")));
        assert!(p.validate().is_empty());
        assert_eq!(
            p.dependency_set(&id("b"), ClosureMode::Upward).unwrap(),
            ids(&["a", "b", "c"])
        );
        assert_eq!(p.dependency_set(&id("d"), ClosureMode::Comparable).unwrap(), ids(&["d"]));
    }

    #[test]
    fn accessors_on_running_example() {
        let p = corpus::running_example().primitive;
        assert_eq!(p.derived_set(&id("q1")).unwrap(), ids(&["f1", "f2"]));
        assert_eq!(p.derived_from(&id("f1")).unwrap(), ids(&["q1", "q2"]));
        assert_eq!(
            p.constraints_of(&id("q1")).unwrap(),
            BTreeSet::from(["c1".to_string(), "c2".to_string()])
        );
        assert_eq!(p.general_scenario(&id("q1")).unwrap(), ids(&["q1", "q2"]));
        assert!(p.constraints_of(&id("f3")).unwrap().is_empty());
        assert_eq!(p.general_scenario(&id("q3")).unwrap(), ids(&["q3"]));
        assert!(p.derived_set(&id("f1")).is_err());
        assert!(p.derived_from(&id("q1")).is_err());
        assert!(p.general_scenario(&id("f1")).is_err());
    }

    #[test]
    fn params_guard() {
        assert!(GameParams::new(0.5, 0.4, 0.1, -0.5, 3).is_ok());
        assert!(GameParams::new(0.5, 0.4, 0.2, -0.5, 3).is_err());
        assert!(GameParams::new(0.5, 0.4, 0.1, 0.0, 3).is_err());
        assert!(GameParams::new(0.5, 0.4, 0.1, -0.5, 0).is_err());
        assert!(GameParams::new(1.0, 0.0, 0.0, -0.5, 1).is_err());
    }

    #[test]
    fn tradeoff_rejects_bad_entries() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(TradeoffMatrix::new(labels.clone(), vec![vec![0, 1], vec![-1, 0]]).is_ok());
        assert!(TradeoffMatrix::new(labels.clone(), vec![vec![1, 1], vec![-1, 0]]).is_err());
        assert!(TradeoffMatrix::new(labels.clone(), vec![vec![0, 2], vec![-1, 0]]).is_err());
        assert!(TradeoffMatrix::new(labels, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn decomposition_check() {
        let p = corpus::running_example().primitive;
        let good = Decomposition::new(vec![
            Coalition::new(["q1", "q2", "f1", "f2"]),
            Coalition::new(["q3", "f3"]),
        ]);
        assert!(good.check_against(&p).is_ok());
        let overlap = Decomposition::new(vec![
            Coalition::new(["q1", "q2", "f1", "f2"]),
            Coalition::new(["q3", "f3", "f1"]),
        ]);
        assert!(overlap.check_against(&p).is_err());
        let missing = Decomposition::new(vec![Coalition::new(["q1", "q2", "f1", "f2"])]);
        assert!(missing.check_against(&p).is_err());
    }
}
