//! Coalition utility: coalitional relevance, effect factors, pairwise
//! interaction and the utility of a whole coalition.
//!
//! [`GameContext`] resolves a primitive into dense index tables once. Member
//! lists passed to the `*_idx` methods are positions in declaration order and
//! must be sorted and duplicate free; every summation runs in that order so
//! results are reproducible bit for bit.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    AttributePrimitive, Coalition, GameParams, RequirementId, RequirementKind, TradeoffMatrix,
};
use crate::relevance::SigmaTable;

pub const QUALITY_ATTRIBUTES: [&str; 6] = [
    "Performance",
    "Modifiability",
    "Security",
    "Availability",
    "Testability",
    "Usability",
];

/// Effects between six common quality attributes (row acts on column).
pub fn default_tradeoff_matrix() -> TradeoffMatrix {
    let rows = vec![
        vec![0, -1, 0, 0, 0, -1],
        vec![-1, 0, 0, 1, 1, 0],
        vec![-1, 0, 0, 1, -1, -1],
        vec![0, 0, 0, 0, 0, 0],
        vec![0, 1, 1, 1, 0, 1],
        vec![-1, 0, 0, 0, -1, 0],
    ];
    TradeoffMatrix::new(QUALITY_ATTRIBUTES.iter().map(|s| s.to_string()).collect(), rows)
        .expect("built-in tradeoff matrix is well formed")
}

#[inline]
fn effect_term(sign: i8, rho: f64) -> f64 {
    match sign {
        1 => rho,
        -1 => -rho.abs(),
        _ => 0.0,
    }
}

#[derive(Debug, Clone)]
pub struct GameContext {
    primitive: AttributePrimitive,
    params: GameParams,
    sigma: SigmaTable,
    index: BTreeMap<RequirementId, usize>,
    functional: Vec<bool>,
    /// Tradeoff sign from the general scenario of `i` to that of `j`, row major.
    /// Zero whenever either side is functional.
    effect: Vec<i8>,
}

impl GameContext {
    /// Validates both inputs and precomputes the σ table.
    pub fn new(primitive: AttributePrimitive, params: GameParams) -> Result<Self> {
        params.check()?;
        primitive.ensure_valid()?;
        let sigma = SigmaTable::build(&primitive, &params)?;
        let n = primitive.len();
        let index = primitive
            .ids()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let functional: Vec<bool> = primitive.requirements.iter().map(|r| r.is_functional()).collect();
        let labels: Vec<Option<usize>> = primitive
            .requirements
            .iter()
            .map(|r| {
                r.general_scenario
                    .as_deref()
                    .and_then(|l| primitive.tradeoff.index_of(l))
            })
            .collect();
        let mut effect = vec![0i8; n * n];
        let rows = primitive.tradeoff.rows();
        for i in 0..n {
            for j in 0..n {
                if let (Some(gi), Some(gj)) = (labels[i], labels[j]) {
                    if i != j {
                        effect[i * n + j] = rows[gi][gj];
                    }
                }
            }
        }
        Ok(Self {
            primitive,
            params,
            sigma,
            index,
            functional,
            effect,
        })
    }

    pub fn primitive(&self) -> &AttributePrimitive {
        &self.primitive
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn sigma_table(&self) -> &SigmaTable {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.functional.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functional.is_empty()
    }

    pub fn id(&self, i: usize) -> &RequirementId {
        &self.primitive.requirements[i].id
    }

    pub fn index_of(&self, id: &RequirementId) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownRequirement(id.clone()))
    }

    pub fn is_functional_idx(&self, i: usize) -> bool {
        self.functional[i]
    }

    /// Sorted positions of a coalition's members.
    pub fn indices(&self, d: &Coalition) -> Result<Vec<usize>> {
        let mut out = d
            .members
            .iter()
            .map(|m| self.index_of(m))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        Ok(out)
    }

    pub fn coalition_of(&self, members: &[usize]) -> Coalition {
        Coalition {
            members: members.iter().map(|&i| self.id(i).clone()).collect(),
        }
    }

    /// Every requirement position, in declaration order.
    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    pub fn sigma(&self, r1: &RequirementId, r2: &RequirementId) -> Result<f64> {
        let (i, j) = (self.index_of(r1)?, self.index_of(r2)?);
        if i == j {
            return Err(Error::SelfPair(r1.clone()));
        }
        Ok(self.sigma.get(i, j))
    }

    #[inline]
    pub(crate) fn effect_sign(&self, i: usize, j: usize) -> i8 {
        self.effect[i * self.len() + j]
    }

    pub fn rho_idx(&self, r: usize, members: &[usize]) -> f64 {
        members
            .iter()
            .filter(|&&s| s != r)
            .map(|&s| self.sigma.get(r, s))
            .sum()
    }

    pub fn pair_interaction_idx(&self, a: usize, b: usize, members: &[usize]) -> f64 {
        if self.functional[a] || self.functional[b] {
            self.sigma.get(a, b)
        } else {
            effect_term(self.effect_sign(a, b), self.rho_idx(a, members))
                + effect_term(self.effect_sign(b, a), self.rho_idx(b, members))
        }
    }

    /// Utility of a coalition given as sorted positions.
    pub fn utility_idx(&self, members: &[usize]) -> f64 {
        let mut rho = Vec::with_capacity(members.len());
        self.utility_with(members, &mut rho)
    }

    /// [`utility_idx`](Self::utility_idx) reusing a caller-owned buffer.
    pub fn utility_with(&self, members: &[usize], rho: &mut Vec<f64>) -> f64 {
        rho.clear();
        for &a in members {
            rho.push(if self.functional[a] {
                0.0
            } else {
                self.rho_idx(a, members)
            });
        }
        let mut total = 0.0;
        for x in 0..members.len() {
            let a = members[x];
            for y in (x + 1)..members.len() {
                let b = members[y];
                total += if self.functional[a] || self.functional[b] {
                    self.sigma.get(a, b)
                } else {
                    effect_term(self.effect_sign(a, b), rho[x]) + effect_term(self.effect_sign(b, a), rho[y])
                };
            }
        }
        total
    }

    fn member_indices(&self, d: &Coalition, required: &[&RequirementId]) -> Result<Vec<usize>> {
        for r in required {
            if !d.contains(r) {
                self.index_of(r)?;
                return Err(Error::NotInCoalition((*r).clone()));
            }
        }
        self.indices(d)
    }

    /// Total relevance from `r` to the other members of `d`.
    pub fn coalitional_relevance(&self, r: &RequirementId, d: &Coalition) -> Result<f64> {
        let members = self.member_indices(d, &[r])?;
        Ok(self.rho_idx(self.index_of(r)?, &members))
    }

    /// Effect of scenario `r1` on scenario `r2` inside `d`.
    pub fn effect_factor(&self, r1: &RequirementId, r2: &RequirementId, d: &Coalition) -> Result<f64> {
        let members = self.member_indices(d, &[r1, r2])?;
        let (a, b) = (self.index_of(r1)?, self.index_of(r2)?);
        if a == b {
            return Err(Error::SelfPair(r1.clone()));
        }
        for (idx, id) in [(a, r1), (b, r2)] {
            if self.functional[idx] {
                return Err(Error::WrongKind {
                    id: id.clone(),
                    expected: RequirementKind::Scenario,
                });
            }
        }
        Ok(effect_term(self.effect_sign(a, b), self.rho_idx(a, &members)))
    }

    /// Interaction of two distinct members of `d`.
    pub fn pair_interaction(&self, r1: &RequirementId, r2: &RequirementId, d: &Coalition) -> Result<f64> {
        let members = self.member_indices(d, &[r1, r2])?;
        let (a, b) = (self.index_of(r1)?, self.index_of(r2)?);
        if a == b {
            return Err(Error::SelfPair(r1.clone()));
        }
        Ok(self.pair_interaction_idx(a, b, &members))
    }

    /// Sum of interactions over unordered member pairs.
    pub fn coalition_utility(&self, d: &Coalition) -> Result<f64> {
        Ok(self.utility_idx(&self.indices(d)?))
    }
}
