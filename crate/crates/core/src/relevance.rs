//! Pairwise relevance between requirements and the weighted-Jaccard
//! relevance index built on top of it.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{AttributePrimitive, ClosureMode, GameParams, RequirementId, RequirementKind};

/// `|a ∩ b| / |a ∪ b|`, with `jaccard(∅, ∅) = 0`.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn overlaps<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> bool {
    a.intersection(b).next().is_some()
}

/// The sets a requirement contributes to relevance, resolved once.
#[derive(Debug, Clone)]
pub(crate) struct Profile {
    kind: RequirementKind,
    label: Option<String>,
    /// Dependency set (functional) or derived set (scenario).
    links: BTreeSet<RequirementId>,
    /// Originating scenarios; functional requirements only.
    origins: BTreeSet<RequirementId>,
    constraints: BTreeSet<String>,
}

impl Profile {
    pub(crate) fn of(p: &AttributePrimitive, id: &RequirementId, mode: ClosureMode) -> Result<Self> {
        let r = p
            .requirement(id)
            .ok_or_else(|| Error::UnknownRequirement(id.clone()))?;
        let constraints = p.constraints_of(id)?;
        Ok(match r.kind {
            RequirementKind::Functional => Profile {
                kind: r.kind,
                label: None,
                links: p.dependency_set(id, mode)?,
                origins: p.derived_from(id)?,
                constraints,
            },
            RequirementKind::Scenario => Profile {
                kind: r.kind,
                label: r.general_scenario.clone(),
                links: p.derived_set(id)?,
                origins: BTreeSet::new(),
                constraints,
            },
        })
    }

    fn relevant_to(&self, other: &Profile) -> bool {
        use RequirementKind::*;
        let shared_constraint = overlaps(&self.constraints, &other.constraints);
        match (self.kind, other.kind) {
            (Functional, Functional) => {
                overlaps(&self.origins, &other.origins)
                    || overlaps(&self.links, &other.links)
                    || shared_constraint
            }
            (Scenario, Scenario) => {
                self.label == other.label || overlaps(&self.links, &other.links) || shared_constraint
            }
            // dependency set of the functional side against the derived set of the scenario
            _ => overlaps(&self.links, &other.links) || shared_constraint,
        }
    }

    fn index_to(&self, other: &Profile, params: &GameParams) -> f64 {
        if !self.relevant_to(other) {
            return params.lambda;
        }
        let constraint_term = params.gamma * jaccard(&self.constraints, &other.constraints);
        let link_term = params.beta * jaccard(&self.links, &other.links);
        match (self.kind, other.kind) {
            (RequirementKind::Functional, RequirementKind::Functional) => {
                params.alpha * jaccard(&self.origins, &other.origins) + link_term + constraint_term
            }
            _ => link_term + constraint_term,
        }
    }
}

fn distinct<'a>(r1: &'a RequirementId, r2: &RequirementId) -> Result<&'a RequirementId> {
    if r1 == r2 {
        Err(Error::SelfPair(r1.clone()))
    } else {
        Ok(r1)
    }
}

/// Whether two distinct requirements are relevant to each other. Ignores raw
/// relevance overrides.
pub fn are_relevant(
    p: &AttributePrimitive,
    mode: ClosureMode,
    r1: &RequirementId,
    r2: &RequirementId,
) -> Result<bool> {
    distinct(r1, r2)?;
    Ok(Profile::of(p, r1, mode)?.relevant_to(&Profile::of(p, r2, mode)?))
}

/// Relevance index of two distinct requirements. A raw override for the pair,
/// when present, is returned as is.
pub fn relevance_index(
    p: &AttributePrimitive,
    params: &GameParams,
    r1: &RequirementId,
    r2: &RequirementId,
) -> Result<f64> {
    distinct(r1, r2)?;
    if !p.contains(r1) {
        return Err(Error::UnknownRequirement(r1.clone()));
    }
    if !p.contains(r2) {
        return Err(Error::UnknownRequirement(r2.clone()));
    }
    if let Some(sigma) = p.raw_relevance_of(r1, r2) {
        return Ok(sigma);
    }
    let a = Profile::of(p, r1, params.closure)?;
    let b = Profile::of(p, r2, params.closure)?;
    Ok(a.index_to(&b, params))
}

/// Relevance index of every pair, indexed by declaration order. Built once and
/// read-only afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTable {
    n: usize,
    values: Vec<f64>,
}

impl SigmaTable {
    pub fn build(p: &AttributePrimitive, params: &GameParams) -> Result<Self> {
        let n = p.len();
        let profiles = p
            .ids()
            .map(|id| Profile::of(p, id, params.closure))
            .collect::<Result<Vec<_>>>()?;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let a = &p.requirements[i].id;
                let b = &p.requirements[j].id;
                let v = p
                    .raw_relevance_of(a, b)
                    .unwrap_or_else(|| profiles[i].index_to(&profiles[j], params));
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// σ between the requirements at positions `i` and `j`; zero on the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::model::Constraint;

    fn id(s: &str) -> RequirementId {
        RequirementId::from(s)
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn jaccard_cases() {
        assert_eq!(jaccard(&set(&["f1", "f2"]), &set(&["f1", "f2"])), 1.0);
        assert_eq!(jaccard(&set(&["c1", "c2"]), &set(&["c1"])), 0.5);
        assert_eq!(jaccard::<String>(&BTreeSet::new(), &BTreeSet::new()), 0.0);
        assert_eq!(jaccard(&set(&["a"]), &set(&["b"])), 0.0);
    }

    #[test]
    fn relevance_predicate_on_running_example() {
        let p = corpus::running_example().primitive;
        let mode = ClosureMode::Comparable;
        assert!(are_relevant(&p, mode, &id("q1"), &id("q2")).unwrap());
        assert!(!are_relevant(&p, mode, &id("q1"), &id("f3")).unwrap());
        assert!(are_relevant(&p, mode, &id("q3"), &id("f3")).unwrap());
        assert!(matches!(
            are_relevant(&p, mode, &id("q1"), &id("q1")),
            Err(Error::SelfPair(_))
        ));
    }

    #[test]
    fn relevance_index_running_example() {
        let m = corpus::running_example();
        let p = &m.primitive;
        let params = m.params_or_default();
        let s = |a: &str, b: &str| relevance_index(p, &params, &id(a), &id(b)).unwrap();
        assert!((s("f1", "f2") - 0.9).abs() < 1e-12);
        assert!((s("q1", "q3") - 0.05).abs() < 1e-12);
        for (a, b) in [("q1", "q2"), ("q3", "f3"), ("q1", "f1"), ("q1", "f2"), ("q2", "f1"), ("q2", "f2")] {
            assert!((s(a, b) - 0.4).abs() < 1e-12, "{a},{b}");
        }
        assert_eq!(s("f1", "f3"), -0.5);
        assert!(relevance_index(p, &params, &id("f1"), &id("f1")).is_err());
    }

    #[test]
    fn upward_mode_halves_the_cross_term() {
        let m = corpus::running_example();
        let params = m.params_or_default().with_closure(ClosureMode::Upward);
        let v = relevance_index(&m.primitive, &params, &id("q1"), &id("f2")).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn raw_override_bypasses_predicate() {
        let mut p = corpus::running_example().primitive;
        p.set_raw_relevance("f3", "f1", 0.25);
        let params = GameParams::default();
        assert_eq!(relevance_index(&p, &params, &id("f1"), &id("f3")).unwrap(), 0.25);
        assert!(!are_relevant(&p, params.closure, &id("f1"), &id("f3")).unwrap());
    }

    #[test]
    fn table_agrees_with_pointwise_index() {
        let m = corpus::running_example();
        let params = m.params_or_default();
        let table = SigmaTable::build(&m.primitive, &params).unwrap();
        for (i, a) in m.primitive.ids().enumerate() {
            for (j, b) in m.primitive.ids().enumerate() {
                if i != j {
                    assert_eq!(table.get(i, j), relevance_index(&m.primitive, &params, a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn shared_constraint_raises_relevance() {
        let m = corpus::running_example();
        let params = m.params_or_default();
        let before = relevance_index(&m.primitive, &params, &id("q1"), &id("q3")).unwrap();
        let mut p = m.primitive.clone();
        p.constraints.push(Constraint::new("c9", ["q1", "q3"]));
        let after = relevance_index(&p, &params, &id("q1"), &id("q3")).unwrap();
        assert!(after > before);
    }
}
