//! Games built from other problems: the clique reduction and a small fixture
//! with two distinct solutions.
//!
//! In the clique game every node `i` of a graph on `n` nodes becomes a row of
//! `n` scenarios `a{i}_{j}`. Scenarios in one row share pairwise constraints
//! and are mildly relevant to each other, scenarios of non-adjacent nodes are
//! hostile, and each graph edge is realized by exactly one pair of mutually
//! reinforcing scenarios. The coalition made of the rows of a clique of size
//! `l` is then worth `l(l-1)γ/2`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{AttributePrimitive, Coalition, Constraint, GameParams, Model, Requirement, TradeoffMatrix};

/// Simple undirected graph over nodes `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            for x in [u, v] {
                if x == 0 || x > n {
                    return Err(Error::InvalidGraph(format!("node {x} outside 1..={n}")));
                }
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    /// Parses one `u v` pair per line. Blank lines and `#` comments are
    /// skipped; a `nodes N` line fixes the node count, which otherwise is the
    /// largest endpoint.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let number = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidGraph(format!("line {}: `{s}` is not a node number", no + 1)))
            };
            match fields.as_slice() {
                ["nodes", n] => declared = Some(number(n)?),
                [u, v] => edges.push((number(u)?, number(v)?)),
                _ => {
                    return Err(Error::InvalidGraph(format!(
                        "line {}: expected `u v` or `nodes N`",
                        no + 1
                    )))
                }
            }
        }
        let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0));
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn is_clique(&self, nodes: &BTreeSet<usize>) -> bool {
        nodes
            .iter()
            .all(|&u| nodes.iter().all(|&v| u >= v || self.has_edge(u, v)))
    }
}

/// Scenario id for row `i`, position `j` (both 1-based).
pub fn scenario_id(i: usize, j: usize) -> String {
    format!("a{i}_{j}")
}

fn label(i: usize, j: usize) -> String {
    format!("g{i}_{j}")
}

/// Game whose cohesive coalitions are exactly the row unions of cliques.
///
/// Requires `0 < γ < 1` and `λ < -γ`. The remaining weight `1 - γ` is split
/// evenly between α and β; neither term is used since the game has no
/// functional requirements. Relevance values are fixed per pair: `γ/(2(n-1))`
/// inside a row, `0` between rows of adjacent nodes and `λ` between rows of
/// non-adjacent nodes.
pub fn clique_to_game(h: &Graph, gamma: f64, lambda: f64) -> Result<Model> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidReduction(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if lambda.is_nan() || lambda >= -gamma {
        return Err(Error::InvalidReduction(format!(
            "lambda must be below -gamma, got lambda = {lambda}, gamma = {gamma}"
        )));
    }
    let rest = (1.0 - gamma) / 2.0;
    let params = GameParams::new(rest, rest, gamma, lambda, 3)?;
    let n = h.n;
    let pos = |i: usize, j: usize| (i - 1) * n + (j - 1);

    let mut p = AttributePrimitive::new(format!("clique-{n}"));
    for i in 1..=n {
        for j in 1..=n {
            p.requirements.push(Requirement::scenario(
                scenario_id(i, j),
                format!("node {i}, slot {j}"),
                label(i, j),
            ));
        }
        for j in 1..=n {
            for j2 in (j + 1)..=n {
                p.constraints.push(Constraint::new(
                    format!("c{i}_{j}_{j2}"),
                    [scenario_id(i, j), scenario_id(i, j2)],
                ));
            }
        }
    }

    // edge (u, v) uses the next free slot of each endpoint
    let mut next_slot = vec![1usize; n + 1];
    let mut reinforcing = BTreeSet::new();
    for &(u, v) in &h.edges {
        reinforcing.insert((pos(u, next_slot[u]), pos(v, next_slot[v])));
        next_slot[u] += 1;
        next_slot[v] += 1;
    }

    let size = n * n;
    let mut rows = vec![vec![0i8; size]; size];
    for i in 1..=n {
        for i2 in 1..=n {
            if i == i2 || h.has_edge(i, i2) {
                continue;
            }
            for j in 1..=n {
                for j2 in 1..=n {
                    rows[pos(i, j)][pos(i2, j2)] = -1;
                }
            }
        }
    }
    for &(x, y) in &reinforcing {
        rows[x][y] = 1;
        rows[y][x] = 1;
    }
    let labels = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| label(i, j)))
        .collect();
    p.tradeoff = TradeoffMatrix::new(labels, rows)?;

    let within = if n > 1 { gamma / (2.0 * (n - 1) as f64) } else { 0.0 };
    for i in 1..=n {
        for j in 1..=n {
            for i2 in i..=n {
                for j2 in 1..=n {
                    if (i2, j2) <= (i, j) {
                        continue;
                    }
                    let sigma = if i == i2 {
                        within
                    } else if h.has_edge(i, i2) {
                        0.0
                    } else {
                        lambda
                    };
                    p.set_raw_relevance(scenario_id(i, j), scenario_id(i2, j2), sigma);
                }
            }
        }
    }
    Ok(Model::new(p, Some(params)))
}

/// Union of the full rows of the given nodes.
pub fn meta_clique_coalition(h: &Graph, nodes: &BTreeSet<usize>) -> Result<Coalition> {
    if let Some(&bad) = nodes.iter().find(|&&i| i == 0 || i > h.n) {
        return Err(Error::InvalidGraph(format!("node {bad} outside 1..={}", h.n)));
    }
    Ok(Coalition::new(
        nodes
            .iter()
            .flat_map(|&i| (1..=h.n).map(move |j| scenario_id(i, j))),
    ))
}

/// Six functional requirements `d1..d6` whose pair values are fixed directly:
/// 0.1 inside `{d1..d4}` and inside `{d4,d5,d6}`, -0.1 between `{d1,d2,d3}`
/// and `{d5,d6}`. Both `{{d1,d2,d3},{d4,d5,d6}}` and `{{d1..d4},{d5,d6}}`
/// are solutions.
pub fn two_solution_fixture() -> Model {
    let mut p = AttributePrimitive::new("two-solutions");
    for i in 1..=6 {
        p.requirements.push(Requirement::functional(format!("d{i}"), format!("requirement {i}")));
    }
    let group = |i: usize| match i {
        1..=3 => 0,
        4 => 1,
        _ => 2,
    };
    for i in 1..=6 {
        for j in (i + 1)..=6 {
            let sigma = match (group(i), group(j)) {
                (0, 2) => -0.1,
                _ => 0.1,
            };
            p.set_raw_relevance(format!("d{i}"), format!("d{j}"), sigma);
        }
    }
    Model::new(p, Some(GameParams::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Decomposition;
    use crate::solver::{is_cohesive_capped, verify_solution, SolveMode};
    use crate::utility::GameContext;

    fn ctx(m: Model) -> GameContext {
        let params = m.params_or_default();
        GameContext::new(m.primitive, params).unwrap()
    }

    fn nodes(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::parse_edge_list("# triangle\n1 2\n2 3\n\n3 1\nnodes 4\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges().len(), 3);
        assert!(g.has_edge(1, 3));
        assert!(matches!(Graph::parse_edge_list("1 1"), Err(Error::InvalidGraph(_))));
        assert!(matches!(Graph::parse_edge_list("1 x"), Err(Error::InvalidGraph(_))));
        assert!(matches!(Graph::parse_edge_list("nodes 2\n1 3"), Err(Error::InvalidGraph(_))));
        assert_eq!(Graph::parse_edge_list("").unwrap().n(), 0);
    }

    #[test]
    fn reduction_preconditions() {
        let g = Graph::complete(2);
        assert!(clique_to_game(&g, 0.3, -0.2).is_err());
        assert!(clique_to_game(&g, 0.0, -0.5).is_err());
        assert!(clique_to_game(&g, 0.3, -0.31).is_ok());
    }

    #[test]
    fn reduction_sigma_values() {
        let g = Graph::new(3, [(1, 2)]).unwrap();
        let c = ctx(clique_to_game(&g, 0.3, -0.5).unwrap());
        let s = |a: &str, b: &str| c.sigma(&a.into(), &b.into()).unwrap();
        assert!((s("a1_1", "a1_3") - 0.075).abs() < 1e-12);
        assert_eq!(s("a1_1", "a3_2"), -0.5);
        assert_eq!(s("a1_1", "a2_1"), 0.0);
    }

    #[test]
    fn every_edge_has_one_reinforcing_pair() {
        let g = Graph::complete(4);
        let m = clique_to_game(&g, 0.3, -0.5).unwrap();
        let t = &m.primitive.tradeoff;
        let mut count = 0;
        let mut touched = BTreeSet::new();
        for (x, row) in t.rows().iter().enumerate() {
            for (y, &e) in row.iter().enumerate() {
                if e == 1 && x < y {
                    count += 1;
                    assert!(touched.insert(x) && touched.insert(y));
                }
            }
        }
        assert_eq!(count, g.edges().len());
    }

    #[test]
    fn single_edge_clique_value() {
        let g = Graph::complete(2);
        let c = ctx(clique_to_game(&g, 0.3, -0.5).unwrap());
        let d = meta_clique_coalition(&g, &nodes(&[1, 2])).unwrap();
        assert!((c.coalition_utility(&d).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn meta_clique_rows() {
        let g = Graph::new(3, [(1, 2), (2, 3)]).unwrap();
        let d = meta_clique_coalition(&g, &nodes(&[2])).unwrap();
        assert_eq!(d, Coalition::new(["a2_1", "a2_2", "a2_3"]));
        assert!(meta_clique_coalition(&g, &nodes(&[4])).is_err());
        let c = ctx(clique_to_game(&g, 0.3, -0.5).unwrap());
        let bad = meta_clique_coalition(&g, &nodes(&[1, 3])).unwrap();
        assert!(!is_cohesive_capped(&c, &bad, 36).unwrap().holds());
        let good = meta_clique_coalition(&g, &nodes(&[1, 2])).unwrap();
        assert!(is_cohesive_capped(&c, &good, 36).unwrap().holds());
    }

    #[test]
    fn two_solution_values_and_solutions() {
        let c = ctx(two_solution_fixture());
        let u = |xs: &[&str]| c.coalition_utility(&Coalition::new(xs.iter().copied())).unwrap();
        assert!((u(&["d1", "d2", "d3"]) - 0.3).abs() < 1e-12);
        assert!((u(&["d1", "d2", "d3", "d4"]) - 0.6).abs() < 1e-12);
        assert!((u(&["d1", "d2", "d3", "d4", "d5", "d6"]) - 0.3).abs() < 1e-12);
        let first = Decomposition::new(vec![
            Coalition::new(["d1", "d2", "d3"]),
            Coalition::new(["d4", "d5", "d6"]),
        ]);
        let second = Decomposition::new(vec![
            Coalition::new(["d1", "d2", "d3", "d4"]),
            Coalition::new(["d5", "d6"]),
        ]);
        assert!(verify_solution(&c, &first, SolveMode::Exact).unwrap().passed());
        assert!(verify_solution(&c, &second, SolveMode::Exact).unwrap().passed());
    }
}
