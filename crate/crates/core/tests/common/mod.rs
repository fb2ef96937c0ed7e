//! Reference implementations written straight from the definitions, sharing
//! no code with the library beyond the data model. Slow on purpose.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use archgame_core::model::{AttributePrimitive, ClosureMode, Constraint, GameParams, Requirement};
use archgame_core::utility::QUALITY_ATTRIBUTES;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const EPS: f64 = 1e-9;

fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    let union: HashSet<&String> = a.iter().chain(b.iter()).collect();
    if union.is_empty() {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union.len() as f64
}

fn meets(a: &HashSet<String>, b: &HashSet<String>) -> bool {
    a.iter().any(|x| b.contains(x))
}

/// Oracle view of one primitive: ids, kinds and the σ matrix.
pub struct Oracle {
    pub ids: Vec<String>,
    pub functional: Vec<bool>,
    pub labels: Vec<Option<String>>,
    pub sigma: Vec<Vec<f64>>,
    /// Effect of `i`'s general scenario on `j`'s, 0 for functional sides.
    pub effect: Vec<Vec<i8>>,
}

impl Oracle {
    pub fn new(p: &AttributePrimitive, g: &GameParams) -> Self {
        let ids: Vec<String> = p.requirements.iter().map(|r| r.id.to_string()).collect();
        let n = ids.len();
        let functional: Vec<bool> = p.requirements.iter().map(|r| r.is_functional()).collect();
        let labels: Vec<Option<String>> = p.requirements.iter().map(|r| r.general_scenario.clone()).collect();

        // reachability over `depends` by repeated relaxation
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &p.depends {
            let i = ids.iter().position(|x| x == a.as_str()).unwrap();
            let j = ids.iter().position(|x| x == b.as_str()).unwrap();
            reach[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let links: Vec<HashSet<String>> = (0..n)
            .map(|i| {
                if functional[i] {
                    (0..n)
                        .filter(|&j| match g.closure {
                            ClosureMode::Comparable => reach[i][j] || reach[j][i],
                            ClosureMode::Upward => reach[i][j],
                        })
                        .map(|j| ids[j].clone())
                        .collect()
                } else {
                    p.derives
                        .iter()
                        .filter(|(q, _)| q.as_str() == ids[i])
                        .map(|(_, f)| f.to_string())
                        .collect()
                }
            })
            .collect();
        let origins: Vec<HashSet<String>> = (0..n)
            .map(|i| {
                p.derives
                    .iter()
                    .filter(|(_, f)| f.as_str() == ids[i])
                    .map(|(q, _)| q.to_string())
                    .collect()
            })
            .collect();
        let constraints: Vec<HashSet<String>> = (0..n)
            .map(|i| {
                p.constraints
                    .iter()
                    .filter(|c| c.members.iter().any(|m| m.as_str() == ids[i]))
                    .map(|c| c.id.clone())
                    .collect()
            })
            .collect();

        let mut sigma = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let raw = p
                    .raw_relevance
                    .iter()
                    .find(|((a, b), _)| {
                        (a.as_str() == ids[i] && b.as_str() == ids[j]) || (a.as_str() == ids[j] && b.as_str() == ids[i])
                    })
                    .map(|(_, s)| *s);
                sigma[i][j] = match raw {
                    Some(s) => s,
                    None => {
                        let cc = meets(&constraints[i], &constraints[j]);
                        let cj = g.gamma * jaccard(&constraints[i], &constraints[j]);
                        match (functional[i], functional[j]) {
                            (true, true) => {
                                if meets(&origins[i], &origins[j]) || meets(&links[i], &links[j]) || cc {
                                    g.alpha * jaccard(&origins[i], &origins[j])
                                        + g.beta * jaccard(&links[i], &links[j])
                                        + cj
                                } else {
                                    g.lambda
                                }
                            }
                            (false, false) => {
                                if labels[i] == labels[j] || meets(&links[i], &links[j]) || cc {
                                    g.beta * jaccard(&links[i], &links[j]) + cj
                                } else {
                                    g.lambda
                                }
                            }
                            _ => {
                                if meets(&links[i], &links[j]) || cc {
                                    g.beta * jaccard(&links[i], &links[j]) + cj
                                } else {
                                    g.lambda
                                }
                            }
                        }
                    }
                };
            }
        }

        let label_pos = |l: &Option<String>| l.as_ref().and_then(|l| p.tradeoff.labels().iter().position(|x| x == l));
        let mut effect = vec![vec![0i8; n]; n];
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (label_pos(&labels[i]), label_pos(&labels[j])) {
                    if i != j {
                        effect[i][j] = p.tradeoff.rows()[a][b];
                    }
                }
            }
        }
        Oracle {
            ids,
            functional,
            labels,
            sigma,
            effect,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn pos(&self, id: &str) -> usize {
        self.ids.iter().position(|x| x == id).unwrap()
    }

    /// Utility straight from the definition, over positions in any order.
    pub fn utility(&self, members: &[usize]) -> f64 {
        let rho = |r: usize| -> f64 { members.iter().filter(|&&s| s != r).map(|&s| self.sigma[r][s]).sum() };
        let eps = |a: usize, b: usize| -> f64 {
            let r = rho(a);
            match self.effect[a][b] {
                -1 => -r.abs(),
                0 => 0.0,
                _ => r,
            }
        };
        let mut total = 0.0;
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                total += if self.functional[a] || self.functional[b] {
                    self.sigma[a][b]
                } else {
                    eps(a, b) + eps(b, a)
                };
            }
        }
        total
    }

    pub fn utility_of_ids<S: AsRef<str>>(&self, ids: impl IntoIterator<Item = S>) -> f64 {
        let members: Vec<usize> = ids.into_iter().map(|s| self.pos(s.as_ref())).collect();
        self.utility(&members)
    }

    /// Whether every proper non-empty subset of size at most `max_size`
    /// has strictly smaller utility. Bitmask enumeration.
    pub fn cohesive(&self, members: &[usize], max_size: usize) -> bool {
        let m = members.len();
        if m <= 1 {
            return true;
        }
        let whole = self.utility(members);
        for mask in 1u64..((1u64 << m) - 1) {
            if (mask.count_ones() as usize) > max_size {
                continue;
            }
            let sub: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| members[b]).collect();
            if self.utility(&sub) >= whole - EPS {
                return false;
            }
        }
        true
    }

    /// No union of two parts beats both parts.
    pub fn expansion_free(&self, parts: &[Vec<usize>]) -> bool {
        for i in 0..parts.len() {
            for j in (i + 1)..parts.len() {
                let union: Vec<usize> = parts[i].iter().chain(&parts[j]).copied().collect();
                let u = self.utility(&union);
                if u > self.utility(&parts[i]) + EPS && u > self.utility(&parts[j]) + EPS {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_partition(&self, parts: &[Vec<usize>]) -> bool {
        let mut seen = BTreeSet::new();
        parts.iter().all(|p| !p.is_empty()) && parts.iter().flatten().all(|&x| seen.insert(x)) && seen.len() == self.len()
    }
}

/// Largest clique size by trying every node subset.
pub fn max_clique(n: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    let adjacent = |u: usize, v: usize| edges.contains(&(u.min(v), u.max(v)));
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let nodes: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        let clique = nodes
            .iter()
            .enumerate()
            .all(|(x, &u)| nodes[x + 1..].iter().all(|&v| adjacent(u, v)));
        if clique {
            best = best.max(nodes.len());
        }
    }
    best
}

/// Random primitive with up to `max_n` requirements, labels from the
/// built-in attributes and random depends, derives and constraints.
pub fn random_primitive(rng: &mut impl Rng, max_n: usize) -> AttributePrimitive {
    let n = rng.random_range(1..=max_n);
    let mut p = AttributePrimitive::new("random");
    for i in 0..n {
        let id = format!("r{i}");
        if rng.random_bool(0.5) {
            p.requirements.push(Requirement::functional(id, ""));
        } else {
            let label = QUALITY_ATTRIBUTES.choose(rng).unwrap();
            p.requirements.push(Requirement::scenario(id, "", *label));
        }
    }
    p.tradeoff = archgame_core::utility::default_tradeoff_matrix();
    let fs: Vec<String> = p.functional().map(|r| r.id.to_string()).collect();
    let qs: Vec<String> = p.scenarios().map(|r| r.id.to_string()).collect();
    for a in &fs {
        for b in &fs {
            if a != b && rng.random_bool(0.2) {
                p.depends.insert((a.as_str().into(), b.as_str().into()));
            }
        }
    }
    for q in &qs {
        for f in &fs {
            if rng.random_bool(0.3) {
                p.derives.insert((q.as_str().into(), f.as_str().into()));
            }
        }
    }
    for c in 0..rng.random_range(0..=3) {
        let members: Vec<String> = p
            .ids()
            .filter(|_| rng.random_bool(0.3))
            .map(|id| id.to_string())
            .collect();
        if !members.is_empty() {
            p.constraints.push(Constraint::new(format!("c{c}"), members));
        }
    }
    p
}
