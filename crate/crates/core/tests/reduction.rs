mod common;

use std::collections::BTreeSet;

use archgame_core::reduction::{clique_to_game, meta_clique_coalition, Graph};
use archgame_core::{solver, GameContext, Model};
use common::{max_clique, Oracle};

fn context(m: &Model) -> GameContext {
    GameContext::new(m.primitive.clone(), m.params_or_default()).unwrap()
}

fn graphs_on(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v))).collect();
    (0u32..(1 << pairs.len()))
        .map(|mask| Graph::new(n, pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e)).unwrap())
        .collect()
}

#[test]
fn row_unions_are_cohesive_exactly_for_cliques() {
    for n in 2..=3 {
        for h in graphs_on(n) {
            let m = clique_to_game(&h, 0.3, -0.5).unwrap();
            let oracle = Oracle::new(&m.primitive, &m.params_or_default());
            for mask in 1u32..(1 << n) {
                let nodes: BTreeSet<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
                let d = meta_clique_coalition(&h, &nodes).unwrap();
                let members: Vec<usize> = d.members.iter().map(|id| oracle.pos(id.as_str())).collect();
                let cohesive = oracle.cohesive(&members, members.len());
                // a single row is worth nothing, like each of its members
                let expected = h.is_clique(&nodes) && nodes.len() > 1;
                assert_eq!(cohesive, expected, "graph {:?}, nodes {nodes:?}", h.edges());
            }
        }
    }
}

#[test]
fn clique_value_formula() {
    for n in 2..=4 {
        let h = Graph::complete(n);
        let m = clique_to_game(&h, 0.3, -0.5).unwrap();
        let ctx = context(&m);
        for l in 2..=n {
            let nodes: BTreeSet<usize> = (1..=l).collect();
            let d = meta_clique_coalition(&h, &nodes).unwrap();
            let expected = (l * (l - 1)) as f64 * 0.3 / 2.0;
            assert!((ctx.coalition_utility(&d).unwrap() - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn triangle_with_k_cohesive_solver() {
    let h = Graph::complete(3);
    let m = clique_to_game(&h, 0.3, -0.5).unwrap();
    let ctx = context(&m);
    let r = solver::solve_k(&ctx, 9);
    assert!((r.max_utility().unwrap() - 0.9).abs() < 1e-9);
}

#[test]
fn exact_solver_finds_the_clique_value() {
    let h = Graph::parse_edge_list("1 2\n2 3\n3 1\n3 4\n4 5\nnodes 5\n").unwrap();
    assert_eq!(max_clique(h.n(), h.edges()), 3);
    let m = clique_to_game(&h, 0.2, -0.4).unwrap();
    let r = solver::solve_exact_capped(&context(&m), 25).unwrap();
    assert!((r.max_utility().unwrap() - 0.6).abs() < 1e-9);
    let rows: BTreeSet<usize> = [1, 2, 3].into_iter().collect();
    assert_eq!(r.decomposition.coalitions[0], meta_clique_coalition(&h, &rows).unwrap());
}
