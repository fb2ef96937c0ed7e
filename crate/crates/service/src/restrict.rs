//! Child primitives: the parent restricted to one coalition, plus edits.

use std::collections::BTreeSet;

use archgame_core::model::{AttributePrimitive, Coalition, Constraint, Requirement, RequirementId};
use archgame_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Additions an architect makes to a child primitive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edits {
    #[serde(default)]
    pub functional: Vec<NewFunctional>,
    #[serde(default)]
    pub scenarios: Vec<NewScenario>,
    #[serde(default)]
    pub constraints: Vec<NewConstraint>,
    #[serde(default)]
    pub depends: Vec<(String, String)>,
    #[serde(default)]
    pub derives: Vec<(String, String)>,
}

impl Edits {
    pub fn is_empty(&self) -> bool {
        *self == Edits::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewFunctional {
    pub id: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewScenario {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub general_scenario: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewConstraint {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restricted {
    pub primitive: AttributePrimitive,
    /// Relations dropped because one endpoint left the requirement set.
    pub warnings: Vec<String>,
}

/// The primitive over `d` (in the parent's declaration order) followed by
/// any added requirements. Relations keep the pairs with both endpoints
/// inside; constraints shrink to their members inside and vanish when
/// empty; labels, the tradeoff matrix and fixed relevance values carry over.
pub fn restrict_primitive(parent: &AttributePrimitive, d: &Coalition, edits: &Edits) -> Result<AttributePrimitive> {
    restrict_with_warnings(parent, d, edits).map(|r| r.primitive)
}

pub fn restrict_with_warnings(parent: &AttributePrimitive, d: &Coalition, edits: &Edits) -> Result<Restricted> {
    if d.is_empty() {
        return Err(Error::InvalidDecomposition("cannot restrict to an empty coalition".into()));
    }
    if let Some(id) = d.members.iter().find(|id| !parent.contains(id)) {
        return Err(Error::UnknownRequirement(id.clone()));
    }
    let mut child = AttributePrimitive::new(parent.name.clone());
    child.requirements = parent
        .requirements
        .iter()
        .filter(|r| d.contains(&r.id))
        .cloned()
        .collect();
    child.requirements.extend(
        edits
            .functional
            .iter()
            .map(|f| Requirement::functional(f.id.as_str(), f.description.as_str())),
    );
    child.requirements.extend(
        edits
            .scenarios
            .iter()
            .map(|s| Requirement::scenario(s.id.as_str(), s.description.as_str(), s.general_scenario.as_str())),
    );
    let inside: BTreeSet<RequirementId> = child.ids().cloned().collect();

    let mut warnings = Vec::new();
    let keep = |(a, b): &(RequirementId, RequirementId)| inside.contains(a) && inside.contains(b);
    for (name, set) in [("depends", &parent.depends), ("derives", &parent.derives)] {
        for pair in set.iter().filter(|p| !keep(p)) {
            if inside.contains(&pair.0) || inside.contains(&pair.1) {
                warnings.push(format!("dropped {name} pair ({}, {}) leaving the coalition", pair.0, pair.1));
            }
        }
    }
    child.depends = parent.depends.iter().filter(|p| keep(p)).cloned().collect();
    child.derives = parent.derives.iter().filter(|p| keep(p)).cloned().collect();
    child.depends.extend(edits.depends.iter().map(|(a, b)| (a.as_str().into(), b.as_str().into())));
    child.derives.extend(edits.derives.iter().map(|(a, b)| (a.as_str().into(), b.as_str().into())));

    child.constraints = parent
        .constraints
        .iter()
        .filter_map(|c| {
            let members: BTreeSet<RequirementId> = c.members.intersection(&inside).cloned().collect();
            (!members.is_empty()).then(|| Constraint {
                id: c.id.clone(),
                description: c.description.clone(),
                members,
            })
        })
        .collect();
    child.constraints.extend(
        edits
            .constraints
            .iter()
            .map(|c| Constraint::new(c.id.as_str(), c.members.iter().map(String::as_str)).with_description(c.description.as_str())),
    );
    child.tradeoff = parent.tradeoff.clone();
    child.raw_relevance = parent
        .raw_relevance
        .iter()
        .filter(|((a, b), _)| inside.contains(a) && inside.contains(b))
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    child.ensure_valid()?;
    Ok(Restricted {
        primitive: child,
        warnings,
    })
}
