//! Solution checking and solving.
//!
//! A decomposition is a solution when every coalition is cohesive (no proper
//! non-empty subset reaches its utility) and no pair of coalitions gains by
//! merging (the union never beats both parts). The k-cohesive variant only
//! inspects subsets of at most `k` requirements.
//!
//! Utilities are compared with an absolute tolerance of [`UTILITY_EPS`]:
//! relevance inputs such as 0.1 are not exact in binary floating point, and
//! sums that are equal in exact arithmetic must compare equal here.

mod exact;
mod subsets;

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{Coalition, Decomposition};
use crate::utility::GameContext;

pub use exact::{solve_exact, solve_exact_capped};

/// Two utilities closer than this are treated as equal.
pub const UTILITY_EPS: f64 = 1e-9;

/// Largest coalition the exhaustive cohesion check and the exact solver accept
/// by default.
pub const DEFAULT_EXACT_CAP: usize = 20;

/// `a > b` beyond tolerance.
#[inline]
pub fn exceeds(a: f64, b: f64) -> bool {
    a > b + UTILITY_EPS
}

/// `a >= b` up to tolerance.
#[inline]
pub fn reaches(a: f64, b: f64) -> bool {
    a >= b - UTILITY_EPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    KCohesive(usize),
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveMode::Exact => f.write_str("exact"),
            SolveMode::KCohesive(k) => write!(f, "{k}-cohesive"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Coalitions whose utility was evaluated while searching.
    pub subsets_evaluated: u64,
    pub merges: usize,
    /// Total utility of the decomposition before the first merge and after
    /// each merge.
    pub total_utility_trace: Vec<f64>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub decomposition: Decomposition,
    /// Aligned with `decomposition.coalitions`.
    pub utilities: Vec<f64>,
    pub mode: SolveMode,
    pub stats: SolveStats,
}

impl SolveReport {
    fn new(ctx: &GameContext, coalitions: Vec<Vec<usize>>, mode: SolveMode, mut stats: SolveStats, started: Instant) -> Self {
        let mut rows: Vec<(Coalition, f64)> = coalitions
            .iter()
            .map(|c| (ctx.coalition_of(c), ctx.utility_idx(c)))
            .collect();
        // payoff order; the sort is stable so equal utilities keep solver order
        rows.sort_by(|a, b| b.1.total_cmp(&a.1));
        stats.wall_time = started.elapsed();
        let (coalitions, utilities) = rows.into_iter().unzip();
        Self {
            decomposition: Decomposition::new(coalitions),
            utilities,
            mode,
            stats,
        }
    }

    pub fn max_utility(&self) -> Option<f64> {
        self.utilities.iter().copied().reduce(f64::max)
    }

    pub fn total_utility(&self) -> f64 {
        self.utilities.iter().sum()
    }
}

/// Outcome of a cohesion check.
#[derive(Debug, Clone, PartialEq)]
pub enum Cohesion {
    Cohesive,
    /// A proper subset reaching the coalition's utility; the one with the
    /// highest utility (then fewest members, then earliest) is reported.
    Violated { witness: Coalition, utility: f64 },
}

impl Cohesion {
    pub fn holds(&self) -> bool {
        matches!(self, Cohesion::Cohesive)
    }

    pub fn witness(&self) -> Option<&Coalition> {
        match self {
            Cohesion::Cohesive => None,
            Cohesion::Violated { witness, .. } => Some(witness),
        }
    }
}

/// A pair of coalitions whose union beats both of them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionWitness {
    pub first: usize,
    pub second: usize,
    pub union_utility: f64,
}

fn check_subsets(ctx: &GameContext, members: &[usize], max_size: usize, evaluated: &mut u64) -> Cohesion {
    if members.len() <= 1 {
        return Cohesion::Cohesive;
    }
    let whole = ctx.utility_idx(members);
    let max_size = max_size.min(members.len() - 1);
    let violating = subsets::best_subset(ctx, members, max_size, evaluated, |u| reaches(u, whole));
    match violating {
        None => Cohesion::Cohesive,
        Some((sub, utility)) => Cohesion::Violated {
            witness: ctx.coalition_of(&sub),
            utility,
        },
    }
}

/// Exhaustive cohesion check; refuses coalitions larger than
/// [`DEFAULT_EXACT_CAP`]. Singletons are cohesive.
pub fn is_cohesive(ctx: &GameContext, d: &Coalition) -> Result<Cohesion> {
    is_cohesive_capped(ctx, d, DEFAULT_EXACT_CAP)
}

pub fn is_cohesive_capped(ctx: &GameContext, d: &Coalition, cap: usize) -> Result<Cohesion> {
    if d.len() > cap {
        return Err(Error::CapExceeded { size: d.len(), cap });
    }
    let members = ctx.indices(d)?;
    Ok(check_subsets(ctx, &members, members.len(), &mut 0))
}

/// Cohesion restricted to subsets of at most `k` requirements.
pub fn is_k_cohesive(ctx: &GameContext, d: &Coalition, k: usize) -> Result<Cohesion> {
    let members = ctx.indices(d)?;
    Ok(check_subsets(ctx, &members, k, &mut 0))
}

fn first_expansion(ctx: &GameContext, parts: &[Vec<usize>], utilities: &[f64]) -> Option<ExpansionWitness> {
    expansions(ctx, parts, utilities).next()
}

fn expansions<'a>(
    ctx: &'a GameContext,
    parts: &'a [Vec<usize>],
    utilities: &'a [f64],
) -> impl Iterator<Item = ExpansionWitness> + 'a {
    (0..parts.len()).flat_map(move |i| {
        ((i + 1)..parts.len()).filter_map(move |j| {
            let union = merge_sorted(&parts[i], &parts[j]);
            let u = ctx.utility_idx(&union);
            (exceeds(u, utilities[i]) && exceeds(u, utilities[j])).then_some(ExpansionWitness {
                first: i,
                second: j,
                union_utility: u,
            })
        })
    })
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out
}

fn decomposition_indices(ctx: &GameContext, d: &Decomposition) -> Result<Vec<Vec<usize>>> {
    d.check_against(ctx.primitive())?;
    d.coalitions.iter().map(|c| ctx.indices(c)).collect()
}

/// `None` when no two coalitions gain by merging, else the first pair (in
/// list order) whose union strictly beats both.
pub fn is_expansion_free(ctx: &GameContext, d: &Decomposition) -> Result<Option<ExpansionWitness>> {
    let parts = decomposition_indices(ctx, d)?;
    let utilities: Vec<f64> = parts.iter().map(|p| ctx.utility_idx(p)).collect();
    Ok(first_expansion(ctx, &parts, &utilities))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVerdict {
    pub mode: SolveMode,
    pub utilities: Vec<f64>,
    /// Coalition position and its cohesion failure.
    pub cohesion_failures: Vec<(usize, Cohesion)>,
    pub expansion_failures: Vec<ExpansionWitness>,
}

impl SolutionVerdict {
    pub fn passed(&self) -> bool {
        self.cohesion_failures.is_empty() && self.expansion_failures.is_empty()
    }
}

/// Checks a decomposition against the solution concept of `mode`, collecting
/// every witness.
pub fn verify_solution(ctx: &GameContext, d: &Decomposition, mode: SolveMode) -> Result<SolutionVerdict> {
    verify_solution_capped(ctx, d, mode, DEFAULT_EXACT_CAP)
}

pub fn verify_solution_capped(
    ctx: &GameContext,
    d: &Decomposition,
    mode: SolveMode,
    cap: usize,
) -> Result<SolutionVerdict> {
    let parts = decomposition_indices(ctx, d)?;
    let utilities: Vec<f64> = parts.iter().map(|p| ctx.utility_idx(p)).collect();
    let mut cohesion_failures = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let max_size = match mode {
            SolveMode::Exact => {
                if part.len() > cap {
                    return Err(Error::CapExceeded { size: part.len(), cap });
                }
                part.len()
            }
            SolveMode::KCohesive(k) => k,
        };
        let verdict = check_subsets(ctx, part, max_size, &mut 0);
        if !verdict.holds() {
            cohesion_failures.push((i, verdict));
        }
    }
    let expansion_failures = expansions(ctx, &parts, &utilities).collect();
    Ok(SolutionVerdict {
        mode,
        utilities,
        cohesion_failures,
        expansion_failures,
    })
}

/// Subset of `pool` with at most `k` members and maximal utility. Ties go to
/// fewer members, then to the lexicographically least list of declaration
/// positions, which makes the winner k-cohesive.
pub fn max_k_cohesive(ctx: &GameContext, pool: &Coalition, k: usize) -> Result<Coalition> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let members = ctx.indices(pool)?;
    Ok(ctx.coalition_of(&max_k_idx(ctx, &members, k, &mut 0)))
}

fn max_k_idx(ctx: &GameContext, pool: &[usize], k: usize, evaluated: &mut u64) -> Vec<usize> {
    let k = k.max(1).min(pool.len());
    subsets::best_subset(ctx, pool, k, evaluated, |_| true)
        .map(|(s, _)| s)
        .expect("non-empty pool has a singleton candidate")
}

fn peel(ctx: &GameContext, k: usize, evaluated: &mut u64) -> Vec<Vec<usize>> {
    let mut remaining = ctx.all_indices();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let best = max_k_idx(ctx, &remaining, k, evaluated);
        remaining.retain(|r| best.binary_search(r).is_err());
        out.push(best);
    }
    out
}

/// Greedy peeling: repeatedly removes a maximally k-cohesive coalition from
/// the remaining requirements. Coalitions come out in extraction order.
pub fn cohesive_decomposition(ctx: &GameContext, k: usize) -> Decomposition {
    Decomposition::new(peel(ctx, k, &mut 0).iter().map(|c| ctx.coalition_of(c)).collect())
}

/// k-cohesive solution: greedy peeling followed by merging any pair whose
/// union strictly beats both parts, until no such pair is left.
///
/// Pairs are scanned in list order and the scan restarts after each merge;
/// the merged coalition takes the position of the earlier part.
pub fn solve_k(ctx: &GameContext, k: usize) -> SolveReport {
    let started = Instant::now();
    let mut stats = SolveStats::default();
    let mut parts = peel(ctx, k, &mut stats.subsets_evaluated);
    let mut utilities: Vec<f64> = parts.iter().map(|p| ctx.utility_idx(p)).collect();
    stats.total_utility_trace.push(utilities.iter().sum());
    while let Some(w) = first_expansion(ctx, &parts, &utilities) {
        let second = parts.remove(w.second);
        utilities.remove(w.second);
        parts[w.first] = merge_sorted(&parts[w.first], &second);
        utilities[w.first] = w.union_utility;
        stats.merges += 1;
        stats.total_utility_trace.push(utilities.iter().sum());
    }
    SolveReport::new(ctx, parts, SolveMode::KCohesive(k), stats, started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::model::{AttributePrimitive, GameParams, Requirement};

    fn ctx_of(m: crate::model::Model) -> GameContext {
        let params = m.params_or_default();
        GameContext::new(m.primitive, params).unwrap()
    }

    fn c(xs: &[&str]) -> Coalition {
        Coalition::new(xs.iter().copied())
    }

    fn solution() -> Decomposition {
        Decomposition::new(vec![c(&["q1", "q2", "f1", "f2"]), c(&["q3", "f3"])])
    }

    #[test]
    fn cohesion_examples() {
        let ctx = ctx_of(corpus::running_example());
        assert!(is_cohesive(&ctx, &c(&["q1", "q2", "f1", "f2"])).unwrap().holds());
        let v = is_cohesive(&ctx, &c(&["q1", "q3", "f3"])).unwrap();
        assert_eq!(v.witness(), Some(&c(&["q3", "f3"])));
        assert!(is_cohesive(&ctx, &c(&["f2"])).unwrap().holds());
    }

    #[test]
    fn cohesion_cap_is_enforced() {
        let mut p = AttributePrimitive::new("wide");
        for i in 0..21 {
            p.requirements.push(Requirement::functional(format!("r{i:02}"), ""));
        }
        let ids: Vec<String> = (0..21).map(|i| format!("r{i:02}")).collect();
        let ctx = GameContext::new(p, GameParams::default()).unwrap();
        let all = Coalition::new(ids.iter().map(String::as_str));
        assert_eq!(
            is_cohesive(&ctx, &all),
            Err(Error::CapExceeded { size: 21, cap: 20 })
        );
        assert!(solve_exact(&ctx).is_err());
    }

    #[test]
    fn k_cohesion_examples() {
        let ctx = ctx_of(corpus::running_example());
        let s1 = c(&["q1", "q2", "f1", "f2"]);
        assert!(is_k_cohesive(&ctx, &s1, 3).unwrap().holds());
        let v = is_k_cohesive(&ctx, &c(&["q1", "q3", "f3"]), 2).unwrap();
        assert_eq!(v.witness(), Some(&c(&["q3", "f3"])));
        for d in [&s1, &c(&["q1", "q3", "f3"]), &c(&["q3", "f3"])] {
            assert_eq!(
                is_k_cohesive(&ctx, d, d.len()).unwrap().holds(),
                is_cohesive(&ctx, d).unwrap().holds()
            );
        }
    }

    #[test]
    fn expansion_examples() {
        let ctx = ctx_of(corpus::running_example());
        assert_eq!(is_expansion_free(&ctx, &solution()).unwrap(), None);
        let whole = Decomposition::new(vec![c(&["q1", "q2", "q3", "f1", "f2", "f3"])]);
        assert_eq!(is_expansion_free(&ctx, &whole).unwrap(), None);

        let dilemma = ctx_of(corpus::dilemma_fixture());
        let start = Decomposition::new(vec![c(&["d1", "d2"]), c(&["d3"]), c(&["d4"])]);
        let w = is_expansion_free(&dilemma, &start).unwrap().expect("merge available");
        assert_eq!((w.first, w.second), (0, 1));
        assert!((w.union_utility - 0.3).abs() < 1e-12);
    }

    #[test]
    fn verify_examples() {
        let ctx = ctx_of(corpus::running_example());
        assert!(verify_solution(&ctx, &solution(), SolveMode::Exact).unwrap().passed());
        let singles = Decomposition::new(
            ["q1", "q2", "q3", "f1", "f2", "f3"].iter().map(|x| c(&[x])).collect(),
        );
        let v = verify_solution(&ctx, &singles, SolveMode::Exact).unwrap();
        assert!(!v.passed());
        assert!(v.cohesion_failures.is_empty());
        let q3 = singles.coalitions.iter().position(|x| x == &c(&["q3"])).unwrap();
        let f3 = singles.coalitions.iter().position(|x| x == &c(&["f3"])).unwrap();
        assert!(v
            .expansion_failures
            .iter()
            .any(|w| (w.first, w.second) == (q3.min(f3), q3.max(f3))));
    }

    #[test]
    fn verify_rejects_non_partitions() {
        let ctx = ctx_of(corpus::running_example());
        let bad = Decomposition::new(vec![c(&["q1", "q2", "f1", "f2"])]);
        assert!(matches!(
            verify_solution(&ctx, &bad, SolveMode::Exact),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn solve_exact_running_example() {
        let ctx = ctx_of(corpus::running_example());
        let r = solve_exact(&ctx).unwrap();
        assert_eq!(r.decomposition, solution());
        assert!((r.utilities[0] - 2.5).abs() < 1e-12);
        assert!((r.utilities[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn solve_exact_single_requirement() {
        let mut p = AttributePrimitive::new("one");
        p.requirements.push(Requirement::functional("r", ""));
        let ctx = GameContext::new(p, GameParams::default()).unwrap();
        let r = solve_exact(&ctx).unwrap();
        assert_eq!(r.decomposition, Decomposition::new(vec![c(&["r"])]));
    }

    #[test]
    fn max_k_examples() {
        let ctx = ctx_of(corpus::running_example());
        assert_eq!(max_k_cohesive(&ctx, &c(&["f3"]), 3).unwrap(), c(&["f3"]));
        assert_eq!(max_k_cohesive(&ctx, &Coalition::default(), 3), Err(Error::EmptyPool));
        // f1 f3 and q2 q3 are both irrelevant pairs
        let pick = max_k_cohesive(&ctx, &c(&["f1", "f3"]), 2).unwrap();
        assert_eq!(pick, c(&["f1"]));
    }

    #[test]
    fn k_one_gives_singletons() {
        let ctx = ctx_of(corpus::running_example());
        let d = cohesive_decomposition(&ctx, 1);
        assert_eq!(d.len(), 6);
        assert!(d.coalitions.iter().all(|x| x.len() == 1));
    }

    #[test]
    fn empty_model_decomposes_to_nothing() {
        let ctx = GameContext::new(AttributePrimitive::new("empty"), GameParams::default()).unwrap();
        assert!(cohesive_decomposition(&ctx, 3).is_empty());
        assert!(solve_k(&ctx, 3).decomposition.is_empty());
        assert!(solve_exact(&ctx).unwrap().decomposition.is_empty());
    }

    #[test]
    fn solve_k_running_example() {
        let ctx = ctx_of(corpus::running_example());
        let r = solve_k(&ctx, 4);
        assert_eq!(r.decomposition, solution());
        assert!(verify_solution(&ctx, &r.decomposition, SolveMode::KCohesive(4)).unwrap().passed());
        let first = cohesive_decomposition(&ctx, 6);
        assert!((ctx.coalition_utility(&first.coalitions[0]).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn solve_k_dilemma_never_keeps_a_crumbling_coalition() {
        let ctx = ctx_of(corpus::dilemma_fixture());
        let r = solve_k(&ctx, 2);
        assert!(!r.decomposition.coalitions.contains(&c(&["d1", "d2", "d4"])));
        assert!(verify_solution(&ctx, &r.decomposition, SolveMode::KCohesive(2)).unwrap().passed());
    }

    #[test]
    fn merge_can_lower_total_utility() {
        // greedy with k = 2 takes {a,b} (0.5) then {c,d} (0.4); their union
        // (0.6) beats both, so they merge even though 0.6 < 0.9
        let mut p = AttributePrimitive::new("merge");
        for x in ["a", "b", "c", "d"] {
            p.requirements.push(Requirement::functional(x, ""));
        }
        for (x, y, s) in [
            ("a", "b", 0.5),
            ("c", "d", 0.4),
            ("a", "c", 0.2),
            ("a", "d", -0.1),
            ("b", "c", -0.2),
            ("b", "d", -0.2),
        ] {
            p.set_raw_relevance(x, y, s);
        }
        let ctx = GameContext::new(p, GameParams::default()).unwrap();
        let r = solve_k(&ctx, 2);
        assert_eq!(r.stats.merges, 1);
        assert_eq!(r.decomposition.len(), 1);
        let trace = &r.stats.total_utility_trace;
        assert!(trace[1] < trace[0]);
        assert!(verify_solution(&ctx, &r.decomposition, SolveMode::KCohesive(2)).unwrap().passed());
    }
}
