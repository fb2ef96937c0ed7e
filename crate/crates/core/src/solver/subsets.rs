//! Bounded-size subset enumeration in (size, lexicographic) order.

use super::reaches;
use crate::utility::GameContext;

/// Calls `f` with every subset of `pool` of size `1..=max_size`, smallest
/// first and lexicographically within a size. Stops when `f` returns `false`.
fn for_each_subset(pool: &[usize], max_size: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let n = pool.len();
    let mut picks = Vec::with_capacity(max_size);
    let mut members = Vec::with_capacity(max_size);
    for size in 1..=max_size.min(n) {
        picks.clear();
        picks.extend(0..size);
        loop {
            members.clear();
            members.extend(picks.iter().map(|&p| pool[p]));
            if !f(&members) {
                return;
            }
            // advance to the next combination
            let mut i = size;
            while i > 0 && picks[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            picks[i - 1] += 1;
            for j in i..size {
                picks[j] = picks[j - 1] + 1;
            }
        }
    }
}

/// The accepted subset of highest utility among those with at most `max_size`
/// members. Utilities within tolerance of the maximum count as tied and the
/// tie goes to the first tied subset in enumeration order.
pub(super) fn best_subset(
    ctx: &GameContext,
    pool: &[usize],
    max_size: usize,
    evaluated: &mut u64,
    accept: impl Fn(f64) -> bool,
) -> Option<(Vec<usize>, f64)> {
    let mut rho = Vec::new();
    let mut utilities = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for_each_subset(pool, max_size, |s| {
        let u = ctx.utility_with(s, &mut rho);
        utilities.push(u);
        if accept(u) && u > best {
            best = u;
        }
        true
    });
    *evaluated += utilities.len() as u64;
    if best == f64::NEG_INFINITY {
        return None;
    }
    let mut pos = 0;
    let mut found = None;
    for_each_subset(pool, max_size, |s| {
        let u = utilities[pos];
        pos += 1;
        if accept(u) && reaches(u, best) {
            found = Some((s.to_vec(), u));
            false
        } else {
            true
        }
    });
    found
}
