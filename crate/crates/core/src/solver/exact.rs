//! Exact solver: repeatedly extracts a subset of maximal utility from the
//! remaining requirements.
//!
//! Ties go to fewer members, then to the lexicographically least list of
//! declaration positions. A maximal subset with no smaller tied subset is
//! cohesive, and a later extraction never beats an earlier one, so the
//! sequence of extractions is expansion free.
//!
//! Each extraction is a depth-first branch and bound over the remaining pool.
//! The search visits subsets in lexicographic preorder (each node extends its
//! parent with a larger position), which lets the second pass stop at the
//! first subset of each size that reaches the maximum.

use std::time::Instant;

use super::{exceeds, reaches, SolveMode, SolveReport, SolveStats, DEFAULT_EXACT_CAP, UTILITY_EPS};
use crate::error::{Error, Result};
use crate::utility::GameContext;

/// Exact solution with the default cap of [`DEFAULT_EXACT_CAP`] requirements.
pub fn solve_exact(ctx: &GameContext) -> Result<SolveReport> {
    solve_exact_capped(ctx, DEFAULT_EXACT_CAP)
}

/// Exact solution for primitives of at most `cap` requirements.
pub fn solve_exact_capped(ctx: &GameContext, cap: usize) -> Result<SolveReport> {
    if ctx.len() > cap {
        return Err(Error::CapExceeded { size: ctx.len(), cap });
    }
    let started = Instant::now();
    let mut stats = SolveStats::default();
    let mut remaining = ctx.all_indices();
    let mut parts = Vec::new();
    while !remaining.is_empty() {
        let mut search = Search::new(ctx, &remaining);
        let best = search.extract();
        stats.subsets_evaluated += search.evaluated;
        remaining.retain(|r| best.binary_search(r).is_err());
        parts.push(best);
    }
    let total = parts.iter().map(|p| ctx.utility_idx(p)).sum();
    stats.total_utility_trace.push(total);
    Ok(SolveReport::new(ctx, parts, SolveMode::Exact, stats, started))
}

struct Search<'a> {
    ctx: &'a GameContext,
    pool: &'a [usize],
    included: Vec<usize>,
    rho: Vec<f64>,
    evaluated: u64,
    max: f64,
    best: Option<Vec<usize>>,
    open: Vec<bool>,
    charge: Vec<f64>,
}

impl<'a> Search<'a> {
    fn new(ctx: &'a GameContext, pool: &'a [usize]) -> Self {
        Self {
            ctx,
            pool,
            included: Vec::with_capacity(pool.len()),
            rho: Vec::with_capacity(pool.len()),
            evaluated: 0,
            // every singleton is worth zero
            max: 0.0,
            best: None,
            open: Vec::new(),
            charge: Vec::new(),
        }
    }

    fn extract(&mut self) -> Vec<usize> {
        self.maximise(0);
        self.included.clear();
        self.first_reaching(0);
        self.best.take().expect("a singleton always reaches the maximum")
    }

    fn utility(&mut self) -> f64 {
        self.evaluated += 1;
        self.ctx.utility_with(&self.included, &mut self.rho)
    }

    /// First pass: the maximum utility over non-empty subsets of the pool.
    fn maximise(&mut self, from: usize) {
        for t in from..self.pool.len() {
            self.included.push(self.pool[t]);
            let u = self.utility();
            if u > self.max {
                self.max = u;
            }
            if t + 1 < self.pool.len() && exceeds(self.upper_bound(&self.pool[t + 1..]), self.max) {
                self.maximise(t + 1);
            }
            self.included.pop();
        }
    }

    /// Second pass: the first subset in lexicographic preorder of each size
    /// that reaches the maximum, keeping the smallest size found.
    fn first_reaching(&mut self, from: usize) {
        for t in from..self.pool.len() {
            let size = self.included.len() + 1;
            if self.best.as_ref().is_some_and(|b| size >= b.len()) {
                return;
            }
            self.included.push(self.pool[t]);
            let u = self.utility();
            if reaches(u, self.max) {
                self.best = Some(self.included.clone());
            } else if t + 1 < self.pool.len()
                && self.best.as_ref().is_none_or(|b| size + 1 < b.len())
                && self.upper_bound(&self.pool[t + 1..]) >= self.max - UTILITY_EPS
            {
                self.first_reaching(t + 1);
            }
            self.included.pop();
        }
    }

    /// Bound on the utility of any `included ∪ S` with `S ⊆ undecided`.
    ///
    /// Scenario terms are bounded through the interval of coalitional
    /// relevance the acting scenario can still reach. Every term touching an
    /// undecided requirement is charged to it (to the acting side, or the
    /// lower position, when both are undecided), and since the charged terms
    /// all vanish when that requirement stays out, each charge counts at
    /// least zero.
    fn upper_bound(&mut self, undecided: &[usize]) -> f64 {
        let ctx = self.ctx;
        let sigma = ctx.sigma_table();
        let n = ctx.len();
        self.open.clear();
        self.open.resize(n, false);
        self.charge.clear();
        self.charge.resize(n, 0.0);
        for &u in undecided {
            self.open[u] = true;
        }
        let open = &self.open;
        let charge = &mut self.charge;
        let mut fixed = 0.0;
        let mut add = |owner: usize, other: usize, t: f64| {
            if !open[owner] {
                fixed += t;
            } else {
                charge[owner] += if open[other] { t.max(0.0) } else { t };
            }
        };
        let all: Vec<usize> = self.included.iter().chain(undecided).copied().collect();
        for &a in &all {
            if ctx.is_functional_idx(a) {
                continue;
            }
            let (mut lo, mut hi) = (0.0, 0.0);
            for &b in &all {
                if b == a {
                    continue;
                }
                let s = sigma.get(a, b);
                if !open[b] {
                    lo += s;
                    hi += s;
                } else if s < 0.0 {
                    lo += s;
                } else {
                    hi += s;
                }
            }
            let gap = if lo > 0.0 {
                lo
            } else if hi < 0.0 {
                -hi
            } else {
                0.0
            };
            for &b in &all {
                if b == a || ctx.is_functional_idx(b) {
                    continue;
                }
                let t = match ctx.effect_sign(a, b) {
                    1 => hi,
                    -1 => -gap,
                    _ => continue,
                };
                if open[a] {
                    add(a, b, t);
                } else {
                    add(b, a, t);
                }
            }
        }
        for (x, &a) in all.iter().enumerate() {
            for &b in &all[x + 1..] {
                if !(ctx.is_functional_idx(a) || ctx.is_functional_idx(b)) {
                    continue;
                }
                let s = sigma.get(a, b);
                let (owner, other) = match (open[a], open[b]) {
                    (true, true) => (a.min(b), a.max(b)),
                    (true, false) => (a, b),
                    _ => (b, a),
                };
                add(owner, other, s);
            }
        }
        fixed + undecided.iter().map(|&u| self.charge[u].max(0.0)).sum::<f64>()
    }
}
