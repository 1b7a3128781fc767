//! Branch-and-bound enumeration of maximal k-plexes.
//!
//! The graph is reduced to its `(q - k)`-core and ordered by degeneracy. Each
//! vertex in turn seeds a search over its two-hop neighbourhood: later
//! vertices are candidates, earlier ones are excluded so every plex is found
//! from its earliest member only. Each branch node picks a pivot and splits
//! into "pivot in" and "pivot out" subtrees.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::{hybrid_bound, BoundMode, BoundScratch};
use crate::context::{LocalGraph, LocalId, Place, SearchContext};
use crate::error::{check_parameters, Result};
use crate::graph::{Graph, VertexId};
use crate::preprocess::{core_decomposition, lemma3_prune, reduce_to_core, CoreInfo, SeedBuilder};
use crate::sink::ResultSink;

/// How the branching vertex is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Minimum degree in `G(S ∪ C)`, then most non-neighbours in `S`; a pivot
    /// that lands in `S` is re-chosen among its non-neighbours in `C`.
    #[default]
    Reselect,
    /// Lowest-ID candidate. Only useful as a baseline.
    FirstCandidate,
}

/// Switches for the pruning stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub core_reduction: bool,
    pub lemma3: bool,
    pub bounds: bool,
    pub bound_mode: BoundMode,
    pub pivot_rule: PivotRule,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            core_reduction: true,
            lemma3: true,
            bounds: true,
            bound_mode: BoundMode::Literal,
            pivot_rule: PivotRule::Reselect,
        }
    }
}

/// Counters and timings for one run. Times are in milliseconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    pub n: usize,
    pub m: usize,
    pub reduced_n: usize,
    pub reduced_m: usize,
    pub seeds: u64,
    pub branch_nodes: u64,
    pub count: u64,
    pub core_ms: f64,
    pub seed_ms: f64,
    pub search_ms: f64,
    pub total_ms: f64,
    pub workers: usize,
    pub tasks_spawned: u64,
    pub steals: u64,
}

/// Whether every member of `set` has at least `|set| - k` neighbours in it.
pub fn is_kplex(g: &Graph, set: &[VertexId], k: usize) -> bool {
    set.iter().all(|&v| {
        let inside = set.iter().filter(|&&u| u != v && g.has_edge(u, v)).count();
        inside + k >= set.len()
    })
}

#[inline]
fn better(ctx: &SearchContext, a: LocalId, b: LocalId) -> bool {
    let key = |u: LocalId| (ctx.degree_in_sc(u), usize::MAX - ctx.nonadjacent_in_s(u), u);
    key(a) < key(b)
}

/// Best vertex of `S ∪ C` under the pivot order: minimum degree in
/// `G(S ∪ C)`, then most non-neighbours in `S`, then lowest ID.
pub(crate) fn min_degree_vertex(ctx: &SearchContext) -> LocalId {
    let mut best = ctx.c()[0];
    for &u in ctx.s().iter().chain(ctx.c()) {
        if better(ctx, u, best) {
            best = u;
        }
    }
    best
}

/// Pivot for a node that did not terminate early; always a candidate.
///
/// # Panics
/// If `C` is empty, or if the minimum-degree vertex lies in `S` and has no
/// non-neighbour in `C` (which the early-termination test rules out).
pub fn select_pivot(ctx: &SearchContext) -> LocalId {
    assert!(!ctx.c().is_empty(), "pivot requested with no candidates");
    let v = min_degree_vertex(ctx);
    if ctx.place(v) == Place::C {
        return v;
    }
    reselect(ctx, v).expect("minimum-degree member has no non-neighbour among the candidates")
}

pub(crate) fn reselect(ctx: &SearchContext, v: LocalId) -> Option<LocalId> {
    let g = ctx.graph();
    let mut best: Option<LocalId> = None;
    for &u in ctx.c() {
        if !g.adjacent(u, v) && best.map_or(true, |b| better(ctx, u, b)) {
            best = Some(u);
        }
    }
    best
}

/// For a context where `S ∪ C` is a k-plex: true iff no vertex of `X`
/// extends it to a larger k-plex.
pub fn check_maximal(ctx: &SearchContext) -> bool {
    let size = ctx.sc_len();
    let k = ctx.k();
    let g = ctx.graph();
    // Members already at k non-neighbours (counting themselves) admit only
    // common neighbours.
    let saturated: Vec<LocalId> = ctx
        .s()
        .iter()
        .chain(ctx.c())
        .copied()
        .filter(|&u| ctx.degree_in_sc(u) + k == size)
        .collect();
    !ctx.x().iter().any(|&x| {
        ctx.degree_in_sc(x) + k > size && saturated.iter().all(|&u| g.adjacent(x, u))
    })
}

/// Candidates and excluded vertices that survive adding `v` to `S`, sorted.
pub fn filter_on_add(ctx: &SearchContext, v: LocalId) -> (Vec<LocalId>, Vec<LocalId>) {
    let mut next = ctx.snapshot();
    next.include(v);
    let mut c = next.c().to_vec();
    let mut x = next.x().to_vec();
    c.sort_unstable();
    x.sort_unstable();
    (c, x)
}

/// Called before every pivot bound computation during a sequential run.
pub trait BranchObserver {
    fn before_bound(&mut self, ctx: &SearchContext, pivot: LocalId);
}

/// The reduced graph and seeding order shared by all seeds of one run.
#[derive(Clone, Debug)]
pub struct Prepared {
    graph: Graph,
    info: CoreInfo,
    k: usize,
    q: usize,
    options: Options,
    core_ms: f64,
}

impl Prepared {
    pub fn new(g: &Graph, k: usize, q: usize, options: &Options) -> Result<Self> {
        check_parameters(k, q)?;
        let start = Instant::now();
        let graph = if options.core_reduction {
            reduce_to_core(g, k, q).graph
        } else {
            g.clone()
        };
        let info = core_decomposition(&graph);
        Ok(Prepared {
            graph,
            info,
            k,
            q,
            options: options.clone(),
            core_ms: ms(start),
        })
    }

    /// The graph seeds are drawn from.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn core_info(&self) -> &CoreInfo {
        &self.info
    }

    /// Number of ordering positions that can start a plex of size `q`.
    pub fn seed_count(&self) -> usize {
        (self.graph.vertex_count() + 1).saturating_sub(self.q)
    }

    pub fn seed_builder(&self) -> SeedBuilder {
        SeedBuilder::new(self.graph.vertex_count())
    }

    /// Root context for the seed at ordering position `i`.
    pub fn seed_context(&self, i: usize, builder: &mut SeedBuilder) -> SearchContext {
        let sets = builder.build(&self.graph, &self.info, i);
        let seed = sets.seed;
        let (mut cand, mut excl) = (sets.cand, sets.excl);
        if self.k == 1 {
            // A vertex extends {seed} to a clique only if adjacent to it.
            cand.retain(|&u| self.graph.has_edge(u, seed));
            excl.retain(|&u| self.graph.has_edge(u, seed));
        }
        if self.options.lemma3 {
            (cand, excl) = lemma3_prune(&self.graph, &[seed], &cand, &excl, self.k, self.q);
        }
        let mut members = Vec::with_capacity(cand.len() + excl.len() + 1);
        members.push(seed);
        members.extend_from_slice(&cand);
        members.extend_from_slice(&excl);
        let local = Arc::new(LocalGraph::from_graph(&self.graph, &members));
        let to_local = |v: VertexId| local.local_id(v).expect("seed member missing");
        let s = [to_local(seed)];
        let c: Vec<LocalId> = cand.iter().map(|&v| to_local(v)).collect();
        let x: Vec<LocalId> = excl.iter().map(|&v| to_local(v)).collect();
        SearchContext::new(Arc::clone(&local), self.k, self.q, &s, &c, &x)
    }

    pub(crate) fn stats_base(&self, g: &Graph, workers: usize) -> Stats {
        Stats {
            n: g.vertex_count(),
            m: g.edge_count(),
            reduced_n: self.graph.vertex_count(),
            reduced_m: self.graph.edge_count(),
            core_ms: self.core_ms,
            workers,
            ..Stats::default()
        }
    }

    pub fn options(&self) -> &Options {
        &self.options
    }
}

pub(crate) fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stage {
    /// Exploring the subtree with the pivot added; the pivot-out subtree is
    /// still pending.
    Include,
    /// Exploring the pivot-out subtree.
    Exclude,
    /// Exploring the pivot-in subtree; the pivot-out subtree was handed to
    /// another worker.
    Donated,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame {
    pub pivot: LocalId,
    pub mark: usize,
    /// `|C|` when the frame was opened, the size of its pivot-out subtree.
    pub c_len: usize,
    pub stage: Stage,
}

/// Extension points of the search loop.
pub(crate) trait Hooks {
    fn before_bound(&mut self, _ctx: &SearchContext, _pivot: LocalId) {}
    fn at_node(&mut self, _ctx: &SearchContext, _frames: &mut [Frame]) {}
}

pub(crate) struct NoHooks;
impl Hooks for NoHooks {}

struct Observed<'a>(&'a mut dyn BranchObserver);
impl Hooks for Observed<'_> {
    fn before_bound(&mut self, ctx: &SearchContext, pivot: LocalId) {
        self.0.before_bound(ctx, pivot);
    }
}

/// Depth-first search state owned by one worker.
pub(crate) struct Searcher {
    options: Options,
    scratch: BoundScratch,
    frames: Vec<Frame>,
    labels: Vec<u64>,
    pub nodes: u64,
    pub emitted: u64,
    unflushed: u64,
}

impl Searcher {
    pub fn new(options: &Options) -> Self {
        Searcher {
            options: options.clone(),
            scratch: BoundScratch::new(),
            frames: Vec::new(),
            labels: Vec::new(),
            nodes: 0,
            emitted: 0,
            unflushed: 0,
        }
    }

    /// Emits every result below `ctx` and leaves `ctx` as it was.
    pub fn run<H: Hooks>(&mut self, ctx: &mut SearchContext, sink: &ResultSink, hooks: &mut H) {
        self.frames.clear();
        loop {
            hooks.at_node(ctx, &mut self.frames);
            if !self.visit(ctx, sink, hooks) && !self.backtrack(ctx) {
                break;
            }
        }
        self.flush(sink);
    }

    pub fn flush(&mut self, sink: &ResultSink) {
        sink.add_count(std::mem::take(&mut self.unflushed));
    }

    /// Processes the current node; returns whether it branched.
    fn visit<H: Hooks>(&mut self, ctx: &mut SearchContext, sink: &ResultSink, hooks: &mut H) -> bool {
        self.nodes += 1;
        #[cfg(any(test, feature = "invariant-checks"))]
        ctx.assert_consistent();

        let k = ctx.k();
        let q = ctx.q();
        if ctx.c().is_empty() {
            if ctx.s().len() >= q && ctx.x().is_empty() {
                self.emit(ctx, false, sink);
            }
            return false;
        }
        if ctx.sc_len() < q {
            return false;
        }
        let low = min_degree_vertex(ctx);
        if ctx.degree_in_sc(low) + k >= ctx.sc_len() {
            if check_maximal(ctx) {
                self.emit(ctx, true, sink);
            }
            return false;
        }
        let pivot = match self.options.pivot_rule {
            PivotRule::Reselect if ctx.place(low) == Place::C => low,
            PivotRule::Reselect => reselect(ctx, low)
                .expect("minimum-degree member has no non-neighbour among the candidates"),
            PivotRule::FirstCandidate => *ctx.c().iter().min().unwrap(),
        };

        hooks.before_bound(ctx, pivot);
        let include = !self.options.bounds
            || hybrid_bound(ctx, pivot, &mut self.scratch, self.options.bound_mode) >= q;
        let mark = ctx.mark();
        let c_len = ctx.c().len();
        let stage = if include { Stage::Include } else { Stage::Exclude };
        self.frames.push(Frame { pivot, mark, c_len, stage });
        if include {
            ctx.include(pivot);
        } else {
            ctx.exclude(pivot);
        }
        true
    }

    /// Unwinds to the next pending subtree; returns false when none is left.
    fn backtrack(&mut self, ctx: &mut SearchContext) -> bool {
        while let Some(top) = self.frames.last_mut() {
            ctx.undo_to(top.mark);
            if top.stage == Stage::Include {
                top.stage = Stage::Exclude;
                ctx.exclude(top.pivot);
                return true;
            }
            self.frames.pop();
        }
        false
    }

    fn emit(&mut self, ctx: &SearchContext, with_candidates: bool, sink: &ResultSink) {
        self.emitted += 1;
        if !sink.wants_members() {
            self.unflushed += 1;
            return;
        }
        let g = ctx.graph();
        self.labels.clear();
        self.labels.extend(ctx.s().iter().map(|&u| g.label(u)));
        if with_candidates {
            self.labels.extend(ctx.c().iter().map(|&u| g.label(u)));
        }
        self.labels.sort_unstable();
        sink.emit(&self.labels);
    }
}

/// Emits every maximal k-plex of `g` with at least `q` vertices into `sink`.
///
/// # Errors
/// If `k < 1` or `q < 2k - 1`.
pub fn enumerate(g: &Graph, k: usize, q: usize, sink: &ResultSink, options: &Options) -> Result<Stats> {
    run_sequential(g, k, q, sink, options, &mut NoHooks)
}

/// [`enumerate`] with a callback before each pivot bound computation.
pub fn enumerate_with_observer(
    g: &Graph,
    k: usize,
    q: usize,
    sink: &ResultSink,
    options: &Options,
    observer: &mut dyn BranchObserver,
) -> Result<Stats> {
    run_sequential(g, k, q, sink, options, &mut Observed(observer))
}

fn run_sequential<H: Hooks>(
    g: &Graph,
    k: usize,
    q: usize,
    sink: &ResultSink,
    options: &Options,
    hooks: &mut H,
) -> Result<Stats> {
    let start = Instant::now();
    let prepared = Prepared::new(g, k, q, options)?;
    let mut stats = prepared.stats_base(g, 1);
    let mut builder = prepared.seed_builder();
    let mut searcher = Searcher::new(options);
    let mut seed_ms = 0.0;
    let search_start = Instant::now();
    for i in 0..prepared.seed_count() {
        let t = Instant::now();
        let mut ctx = prepared.seed_context(i, &mut builder);
        seed_ms += ms(t);
        stats.seeds += 1;
        searcher.run(&mut ctx, sink, hooks);
    }
    stats.seed_ms = seed_ms;
    stats.search_ms = ms(search_start) - seed_ms;
    stats.branch_nodes = searcher.nodes;
    stats.count = searcher.emitted;
    stats.tasks_spawned = stats.seeds;
    stats.total_ms = ms(start);
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_maximal_kplexes;
    use proptest::prelude::*;

    fn complete(n: u32) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n as usize, edges)
    }

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|v| (v, (v + 1) % n)))
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges)
    }

    fn family(g: &Graph, k: usize, q: usize, options: &Options) -> (Vec<Vec<u64>>, Stats) {
        let sink = ResultSink::collector();
        let stats = enumerate(g, k, q, &sink, options).unwrap();
        (sink.take_collected(), stats)
    }

    #[test]
    fn is_kplex_examples() {
        let c5 = cycle(5);
        assert!(is_kplex(&c5, &[3], 1));
        assert!(is_kplex(&complete(6), &[0, 1, 2, 3, 4, 5], 1));
        // C5 triple {a, b, d}: only a-b inside, d isolated.
        assert!(!is_kplex(&c5, &[0, 1, 3], 2));
    }

    #[test]
    fn complete_graph_is_one_plex() {
        let (found, _) = family(&complete(5), 2, 4, &Options::default());
        assert_eq!(found, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn five_cycle_triples() {
        let (found, _) = family(&cycle(5), 2, 3, &Options::default());
        let expected: Vec<Vec<u64>> = (0..5u64)
            .map(|i| {
                let mut t = vec![i, (i + 1) % 5, (i + 2) % 5];
                t.sort_unstable();
                t
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(found, expected);
    }

    #[test]
    fn small_graph_has_nothing() {
        let (found, stats) = family(&complete(3), 1, 4, &Options::default());
        assert!(found.is_empty());
        assert_eq!(stats.branch_nodes, 0);
        assert_eq!(stats.reduced_n, 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let sink = ResultSink::counter();
        assert!(enumerate(&complete(3), 2, 2, &sink, &Options::default()).is_err());
        assert!(enumerate(&complete(3), 0, 2, &sink, &Options::default()).is_err());
    }

    #[test]
    fn pivot_prefers_unique_low_degree_candidate() {
        // K4 on {0..3} plus 4 adjacent only to 0 and 1; S = {0}.
        let mut edges: Vec<(u32, u32)> = complete(4).edges().collect();
        edges.extend([(4, 0), (4, 1)]);
        let g = Graph::from_edges(5, edges);
        let all: Vec<VertexId> = g.vertices().collect();
        let local = Arc::new(LocalGraph::from_graph(&g, &all));
        let ctx = SearchContext::new(local, 2, 3, &[0], &[1, 2, 3, 4], &[]);
        assert_eq!(select_pivot(&ctx), 4);
    }

    #[test]
    fn pivot_in_s_is_reselected() {
        // S = {0} where 0 misses both 3 and 4 (k = 2); candidates 1..4 form a
        // clique and 1, 2 see 0.
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let all: Vec<VertexId> = g.vertices().collect();
        let local = Arc::new(LocalGraph::from_graph(&g, &all));
        let ctx = SearchContext::new(local, 2, 3, &[0], &[1, 2, 3, 4], &[]);
        assert_eq!(min_degree_vertex(&ctx), 0);
        assert_eq!(select_pivot(&ctx), 3);
    }

    #[test]
    fn check_maximal_examples() {
        let g = complete(4);
        let all: Vec<VertexId> = g.vertices().collect();
        let local = Arc::new(LocalGraph::from_graph(&g, &all));
        let ctx = SearchContext::new(Arc::clone(&local), 1, 1, &[0], &[1, 2], &[]);
        assert!(check_maximal(&ctx));
        let ctx = SearchContext::new(local, 1, 1, &[0], &[1, 2], &[3]);
        assert!(!check_maximal(&ctx));
    }

    #[test]
    fn k1_filter_keeps_neighbours_only() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 3)]);
        let all: Vec<VertexId> = g.vertices().collect();
        let local = Arc::new(LocalGraph::from_graph(&g, &all));
        let ctx = SearchContext::new(local, 1, 1, &[], &[0, 1, 2, 3], &[]);
        assert_eq!(filter_on_add(&ctx, 0).0, vec![1, 2]);
    }

    struct Isomorphism(Vec<(usize, usize, usize)>);
    impl BranchObserver for Isomorphism {
        fn before_bound(&mut self, ctx: &SearchContext, _pivot: LocalId) {
            self.0.push((ctx.s().len(), ctx.c().len(), ctx.x().len()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_oracle(n in 4usize..13, p in 0.2f64..0.9, seed in any::<u64>(), k in 1usize..4, extra in 0usize..3) {
            let q = 2 * k - 1 + extra;
            let g = random_graph(n, p, seed);
            let expected = brute_force_maximal_kplexes(&g, k, q).unwrap().into_sets();
            for options in [
                Options::default(),
                Options { bound_mode: BoundMode::Tight, ..Options::default() },
                Options { pivot_rule: PivotRule::FirstCandidate, ..Options::default() },
                Options { core_reduction: false, lemma3: false, bounds: false, ..Options::default() },
            ] {
                let (found, stats) = family(&g, k, q, &options);
                prop_assert_eq!(&found, &expected, "{:?}", options);
                prop_assert_eq!(stats.count as usize, found.len());
            }
        }

        #[test]
        fn filter_matches_definition(n in 3usize..12, p in 0.3f64..0.9, seed in any::<u64>(), k in 1usize..4, picks in prop::collection::vec(any::<usize>(), 0..4)) {
            let g = random_graph(n, p, seed);
            let all: Vec<VertexId> = g.vertices().collect();
            let local = Arc::new(LocalGraph::from_graph(&g, &all));
            let c: Vec<LocalId> = (1..n as u32).collect();
            let c: Vec<LocalId> = c.into_iter().filter(|&u| k > 1 || g.has_edge(0, u)).collect();
            let mut ctx = SearchContext::new(local, k, 1, &[0], &c, &[]);
            for pick in picks {
                if ctx.c().len() < 2 { break; }
                let v = ctx.c()[pick % ctx.c().len()];
                // Alternate: move one candidate to X, then grow S.
                ctx.exclude(v);
                if ctx.c().is_empty() { break; }
                let w = ctx.c()[pick / 7 % ctx.c().len()];
                let (c2, x2) = filter_on_add(&ctx, w);
                let mut grown: Vec<VertexId> = ctx.s().to_vec();
                grown.push(w);
                let keeps = |u: LocalId| {
                    let mut set = grown.clone();
                    set.push(u);
                    is_kplex(&g, &set, k)
                };
                let mut want_c: Vec<LocalId> = ctx.c().iter().copied().filter(|&u| u != w && keeps(u)).collect();
                let mut want_x: Vec<LocalId> = ctx.x().iter().copied().filter(|&u| keeps(u)).collect();
                want_c.sort_unstable();
                want_x.sort_unstable();
                prop_assert_eq!(c2, want_c);
                prop_assert_eq!(x2, want_x);
                ctx.include(w);
            }
        }

        #[test]
        fn relabelled_copies_branch_alike(n in 4usize..12, p in 0.3f64..0.9, seed in any::<u64>(), k in 1usize..4) {
            // Relabelling only the original IDs leaves internal IDs, and hence
            // every tie-break, unchanged.
            let g = random_graph(n, p, seed);
            let labels: Vec<u64> = (0..n as u64).map(|v| 1000 - v).collect();
            let h = Graph::with_labels(labels, g.edges());
            let q = 2 * k - 1;
            let mut a = Isomorphism(Vec::new());
            let mut b = Isomorphism(Vec::new());
            let sa = enumerate_with_observer(&g, k, q, &ResultSink::counter(), &Options::default(), &mut a).unwrap();
            let sb = enumerate_with_observer(&h, k, q, &ResultSink::counter(), &Options::default(), &mut b).unwrap();
            prop_assert_eq!(a.0, b.0);
            prop_assert_eq!(sa.branch_nodes, sb.branch_nodes);
            prop_assert_eq!(sa.count, sb.count);
        }
    }
}
