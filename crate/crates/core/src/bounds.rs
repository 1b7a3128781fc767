//! Upper bounds on the largest k-plex containing `S ∪ {v}` inside `G(S ∪ C)`.
//!
//! Throughout, the cost of a candidate `u` is the number of members of `S` it
//! is not adjacent to, and the slack of a member `w ∈ S` is how many more
//! non-neighbours `w` may acquire: `k - 1 - cost(w)`, which counts `w` itself
//! as one of its own `k` allowed non-neighbours. The budget is the total slack.

use crate::context::{LocalId, Place, SearchContext};

/// How slack is initialised before the greedy pass of [`hybrid_bound`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundMode {
    /// Slack relative to `S`, ignoring that `v` itself consumes slack.
    #[default]
    Literal,
    /// Additionally charges `v` to each of its non-neighbours in `S`.
    Tight,
}

/// Reusable buffers for [`hybrid_bound`]; one per worker.
#[derive(Clone, Debug, Default)]
pub struct BoundScratch {
    buckets: Vec<Vec<LocalId>>,
    slack: Vec<i64>,
    touches: u64,
}

impl BoundScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Vertices visited by all calls so far; each call touches every member of
    /// `S` and every neighbour of `v` in `C` at most a constant number of times.
    pub fn touches(&self) -> u64 {
        self.touches
    }

    fn prepare(&mut self, n: usize, k: usize) {
        if self.buckets.len() < k {
            self.buckets.resize_with(k, Vec::new);
        }
        for b in &mut self.buckets[..k] {
            b.clear();
        }
        if self.slack.len() < n {
            self.slack.resize(n, 0);
        }
    }
}

fn require_candidate(ctx: &SearchContext, v: LocalId) {
    assert_eq!(ctx.place(v), Place::C, "bound requested for non-candidate {v}");
}

/// `|S| + k - cost(v) + d_v(C)`.
pub fn basic_bound(ctx: &SearchContext, v: LocalId) -> usize {
    require_candidate(ctx, v);
    // d_v(S ∪ C) = (|S| - cost(v)) + d_v(C), so the sum collapses.
    ctx.k() + ctx.degree_in_sc(v)
}

/// Greedily admits the cheapest neighbours of `v` in `C` while their total
/// cost fits in the budget.
pub fn support_bound(ctx: &SearchContext, v: LocalId) -> usize {
    require_candidate(ctx, v);
    let k = ctx.k();
    let mut counts = vec![0usize; k];
    ctx.for_each_candidate_neighbor(v, |u| counts[ctx.nonadjacent_in_s(u)] += 1);
    let mut budget: usize = ctx.s().iter().map(|&w| k - 1 - ctx.nonadjacent_in_s(w)).sum();
    let mut ub = ctx.s().len() + k - ctx.nonadjacent_in_s(v);
    for (cost, &count) in counts.iter().enumerate() {
        let take = budget.checked_div(cost).map_or(count, |fit| count.min(fit));
        ub += take;
        budget -= take * cost;
        if take < count {
            break;
        }
    }
    ub
}

/// Combines the budget of [`support_bound`] with per-member slack: a
/// candidate is admitted only if its non-neighbour in `S` with the least
/// remaining slack still has some, and admitting it spends one unit there.
/// Ties on slack go to the lowest ID.
pub fn hybrid_bound(
    ctx: &SearchContext,
    v: LocalId,
    scratch: &mut BoundScratch,
    mode: BoundMode,
) -> usize {
    require_candidate(ctx, v);
    let k = ctx.k();
    scratch.prepare(ctx.graph().len(), k);
    let BoundScratch { buckets, touches, .. } = scratch;
    ctx.for_each_candidate_neighbor(v, |u| {
        let cost = ctx.nonadjacent_in_s(u);
        assert!(cost < k, "candidate {u} cannot extend S");
        buckets[cost].push(u);
        *touches += 1;
    });
    let mut budget: i64 = 0;
    for &w in ctx.s() {
        let slack = (k - 1 - ctx.nonadjacent_in_s(w)) as i64;
        scratch.slack[w as usize] = slack;
        budget += slack;
        scratch.touches += 1;
    }
    if mode == BoundMode::Tight {
        for &w in ctx.nonneighbors_in_s(v) {
            scratch.slack[w as usize] -= 1;
            budget -= 1;
        }
    }

    let mut ub = ctx.s().len() + k - ctx.nonadjacent_in_s(v);
    ub += scratch.buckets[0].len();
    'levels: for cost in 1..k {
        for &u in &scratch.buckets[cost] {
            if budget < cost as i64 {
                break 'levels;
            }
            scratch.touches += 1;
            let mut best = LocalId::MAX;
            let mut best_slack = i64::MAX;
            for &w in ctx.nonneighbors_in_s(u) {
                let slack = scratch.slack[w as usize];
                if slack < best_slack || (slack == best_slack && w < best) {
                    best = w;
                    best_slack = slack;
                }
            }
            if best_slack > 0 {
                ub += 1;
                budget -= cost as i64;
                scratch.slack[best as usize] -= 1;
            }
        }
    }
    ub
}
