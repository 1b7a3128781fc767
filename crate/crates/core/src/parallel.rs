//! Multi-threaded enumeration.
//!
//! Seeds are handed out through a shared counter. Once they run out, a worker
//! that goes idle posts a request; a busy worker notices it at its next branch
//! node and donates the pending "pivot out" subtree of its shallowest open
//! frame, which is usually the largest piece of work it can give away. Among
//! several busy workers the one advertising the largest such subtree serves
//! the request.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Instant;

use crate::bounds::{hybrid_bound, BoundScratch};
use crate::context::{LocalId, Place, SearchContext};
use crate::enumerator::{
    min_degree_vertex, ms, reselect, Frame, Hooks, NoHooks, Options, PivotRule, Prepared, Searcher,
    Stage, Stats,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sink::ResultSink;

/// An unexplored subtree: a self-contained search context.
#[derive(Clone, Debug)]
pub struct BranchTask {
    ctx: SearchContext,
}

impl BranchTask {
    pub fn new(ctx: SearchContext) -> Self {
        BranchTask { ctx: ctx.snapshot() }
    }

    pub fn context(&self) -> &SearchContext {
        &self.ctx
    }

    pub fn into_context(self) -> SearchContext {
        self.ctx
    }
}

/// Runs `task` to completion on the calling thread; returns the number of
/// results emitted.
pub fn run_task(task: &BranchTask, sink: &ResultSink, options: &Options) -> u64 {
    let mut ctx = task.ctx.clone();
    let mut searcher = Searcher::new(options);
    searcher.run(&mut ctx, sink, &mut NoHooks);
    searcher.emitted
}

/// Splits `task` on its pivot into the subtree containing the pivot and the
/// subtree without it. The first half is `None` when the bound rules it out.
///
/// # Panics
/// If the task has no candidates.
pub fn split_task(task: BranchTask, options: &Options) -> (Option<BranchTask>, BranchTask) {
    let ctx = task.ctx;
    assert!(!ctx.c().is_empty(), "cannot split a task without candidates");
    let pivot = split_pivot(&ctx, options.pivot_rule);
    let include = (!options.bounds
        || hybrid_bound(&ctx, pivot, &mut BoundScratch::new(), options.bound_mode) >= ctx.q())
    .then(|| {
        let mut with = ctx.snapshot();
        with.include(pivot);
        BranchTask::new(with)
    });
    let mut without = ctx;
    without.exclude(pivot);
    (include, BranchTask::new(without))
}

fn split_pivot(ctx: &SearchContext, rule: PivotRule) -> LocalId {
    match rule {
        PivotRule::FirstCandidate => *ctx.c().iter().min().unwrap(),
        PivotRule::Reselect => {
            let low = min_degree_vertex(ctx);
            if ctx.place(low) == Place::C {
                return low;
            }
            // When S ∪ C is already a k-plex the member may see every
            // candidate; any candidate then splits the task correctly.
            reselect(ctx, low).unwrap_or_else(|| {
                *ctx.c()
                    .iter()
                    .min_by_key(|&&u| (ctx.degree_in_sc(u), usize::MAX - ctx.nonadjacent_in_s(u), u))
                    .unwrap()
            })
        }
    }
}

struct Queue {
    tasks: Vec<SearchContext>,
    idle: usize,
    done: bool,
}

struct Shared<'a> {
    prepared: &'a Prepared,
    sink: &'a ResultSink,
    workers: usize,
    next_seed: AtomicUsize,
    /// Idle workers still waiting for a donation, minus queued tasks.
    requests: AtomicUsize,
    /// Per worker: `|C|` of its best donatable subtree, or 0.
    offers: Vec<AtomicUsize>,
    queue: Mutex<Queue>,
    wake: Condvar,
}

/// Polls after which a worker donates even if it does not hold the largest
/// advertised subtree, so stale advertisements cannot stall a request.
const PATIENCE: u32 = 64;

struct Donor<'s, 'a> {
    shared: &'s Shared<'a>,
    id: usize,
    polls: u32,
    donated: u64,
}

impl Donor<'_, '_> {
    fn advertise(&self, size: usize) {
        let slot = &self.shared.offers[self.id];
        if slot.load(Ordering::Relaxed) != size {
            slot.store(size, Ordering::Relaxed);
        }
    }

    fn holds_largest(&self, size: usize) -> bool {
        self.shared.offers.iter().enumerate().all(|(i, o)| {
            let other = o.load(Ordering::Relaxed);
            i == self.id || other < size || (other == size && self.id < i)
        })
    }

    fn claim_request(&self) -> bool {
        let requests = &self.shared.requests;
        let mut seen = requests.load(Ordering::Acquire);
        while seen > 0 {
            match requests.compare_exchange_weak(seen, seen - 1, Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => return true,
                Err(now) => seen = now,
            }
        }
        false
    }
}

impl Hooks for Donor<'_, '_> {
    #[inline]
    fn at_node(&mut self, ctx: &SearchContext, frames: &mut [Frame]) {
        if self.shared.requests.load(Ordering::Relaxed) == 0 {
            self.polls = 0;
            return;
        }
        let Some(at) = frames.iter().position(|f| f.stage == Stage::Include) else {
            self.advertise(0);
            return;
        };
        let size = frames[at].c_len;
        self.advertise(size);
        self.polls += 1;
        if !(self.holds_largest(size) || self.polls > PATIENCE) || !self.claim_request() {
            return;
        }
        self.polls = 0;
        let frame = &mut frames[at];
        let mut task = ctx.clone();
        task.undo_to(frame.mark);
        task.exclude(frame.pivot);
        task.clear_log();
        frame.stage = Stage::Donated;
        self.donated += 1;
        self.advertise(0);
        let mut queue = self.shared.queue.lock().unwrap();
        queue.tasks.push(task);
        drop(queue);
        self.shared.wake.notify_one();
    }
}

#[derive(Default)]
struct WorkerReport {
    seeds: u64,
    nodes: u64,
    emitted: u64,
    seed_ms: f64,
    donated: u64,
    taken: u64,
}

fn worker(shared: &Shared<'_>, id: usize) -> WorkerReport {
    let prepared = shared.prepared;
    let mut searcher = Searcher::new(prepared.options());
    let mut builder = prepared.seed_builder();
    let mut donor = Donor { shared, id, polls: 0, donated: 0 };
    let mut report = WorkerReport::default();
    let seeds = prepared.seed_count();
    loop {
        let i = shared.next_seed.fetch_add(1, Ordering::Relaxed);
        if i >= seeds {
            break;
        }
        let t = Instant::now();
        let mut ctx = prepared.seed_context(i, &mut builder);
        report.seed_ms += ms(t);
        report.seeds += 1;
        searcher.run(&mut ctx, shared.sink, &mut donor);
    }
    loop {
        let task = {
            let mut queue = shared.queue.lock().unwrap();
            queue.idle += 1;
            shared.requests.fetch_add(1, Ordering::AcqRel);
            loop {
                if let Some(task) = queue.tasks.pop() {
                    queue.idle -= 1;
                    break Some(task);
                }
                if queue.done || queue.idle == shared.workers {
                    queue.done = true;
                    shared.wake.notify_all();
                    break None;
                }
                queue = shared.wake.wait(queue).unwrap();
            }
        };
        let Some(mut ctx) = task else { break };
        donor.advertise(0);
        report.taken += 1;
        searcher.run(&mut ctx, shared.sink, &mut donor);
    }
    donor.advertise(0);
    report.nodes = searcher.nodes;
    report.emitted = searcher.emitted;
    report.donated = donor.donated;
    report
}

/// [`crate::enumerate`] spread over `workers` threads. Emits the same results;
/// only their order may differ.
///
/// # Errors
/// If `workers` is zero or the parameters are invalid.
pub fn enumerate_parallel(
    g: &Graph,
    k: usize,
    q: usize,
    workers: usize,
    sink: &ResultSink,
    options: &Options,
) -> Result<Stats> {
    if workers == 0 {
        return Err(Error::InvalidParameters("at least one worker is required".into()));
    }
    let start = Instant::now();
    let prepared = Prepared::new(g, k, q, options)?;
    let mut stats = prepared.stats_base(g, workers);
    let shared = Shared {
        prepared: &prepared,
        sink,
        workers,
        next_seed: AtomicUsize::new(0),
        requests: AtomicUsize::new(0),
        offers: (0..workers).map(|_| AtomicUsize::new(0)).collect(),
        queue: Mutex::new(Queue { tasks: Vec::new(), idle: 0, done: false }),
        wake: Condvar::new(),
    };
    let search_start = Instant::now();
    let reports: Vec<WorkerReport> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|id| {
                let shared = &shared;
                scope.spawn(move || worker(shared, id))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let wall = ms(search_start);
    for r in &reports {
        stats.seeds += r.seeds;
        stats.branch_nodes += r.nodes;
        stats.count += r.emitted;
        stats.seed_ms += r.seed_ms;
        stats.tasks_spawned += r.donated;
        stats.steals += r.taken;
    }
    stats.tasks_spawned += stats.seeds;
    stats.search_ms = (wall - stats.seed_ms / workers as f64).max(0.0);
    stats.total_ms = ms(start);
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerator::enumerate;
    use proptest::prelude::*;

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

    fn collect_task(task: &BranchTask, options: &Options) -> Vec<Vec<u64>> {
        let sink = ResultSink::collector();
        run_task(task, &sink, options);
        sink.take_collected()
    }

    #[test]
    fn zero_workers_rejected() {
        let g = random_graph(5, 0.5, 1);
        let err = enumerate_parallel(&g, 1, 1, 0, &ResultSink::counter(), &Options::default());
        assert!(matches!(err, Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn split_with_pruned_include_half() {
        // Path 0-1-2 with k = 1, q = 3: S = {0}, C = {1}. The bound for 1 is
        // 2 < 3, so only the exclude half remains.
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let all: Vec<u32> = g.vertices().collect();
        let local = std::sync::Arc::new(crate::context::LocalGraph::from_graph(&g, &all));
        let ctx = SearchContext::new(local, 1, 3, &[0], &[1], &[]);
        let (with, without) = split_task(BranchTask::new(ctx), &Options::default());
        assert!(with.is_none());
        assert!(without.context().c().is_empty());
        assert_eq!(without.context().x(), &[1]);
    }

    #[test]
    fn split_single_candidate() {
        let g = Graph::from_edges(2, [(0, 1)]);
        let all: Vec<u32> = g.vertices().collect();
        let local = std::sync::Arc::new(crate::context::LocalGraph::from_graph(&g, &all));
        let ctx = SearchContext::new(local, 1, 1, &[0], &[1], &[]);
        let (with, without) = split_task(BranchTask::new(ctx), &Options::default());
        let with = with.unwrap();
        assert!(with.context().c().is_empty() && with.context().s().len() == 2);
        assert!(without.context().c().is_empty());
        let options = Options::default();
        assert_eq!(collect_task(&with, &options), vec![vec![0, 1]]);
        assert!(collect_task(&without, &options).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn split_halves_partition_results(n in 4usize..14, p in 0.3f64..0.9, seed in any::<u64>(), k in 1usize..4, depth in 1usize..4) {
            let g = random_graph(n, p, seed);
            let q = 2 * k - 1;
            let options = Options::default();
            let prepared = Prepared::new(&g, k, q, &options).unwrap();
            let mut builder = prepared.seed_builder();
            for i in 0..prepared.seed_count() {
                let mut task = BranchTask::new(prepared.seed_context(i, &mut builder));
                for _ in 0..depth {
                    if task.context().c().is_empty() {
                        break;
                    }
                    let whole = collect_task(&task, &options);
                    let (with, without) = split_task(task.clone(), &options);
                    let mut parts = with.as_ref().map(|t| collect_task(t, &options)).unwrap_or_default();
                    let rest = collect_task(&without, &options);
                    parts.extend(rest);
                    parts.sort_unstable();
                    prop_assert_eq!(&parts, &whole);
                    task = with.unwrap_or(without);
                }
            }
        }

        #[test]
        fn worker_counts_agree(n in 6usize..17, p in 0.3f64..0.8, seed in any::<u64>(), k in 1usize..4) {
            let g = random_graph(n, p, seed);
            let q = 2 * k - 1 + 1;
            let options = Options::default();
            let sink = ResultSink::collector();
            let base = enumerate(&g, k, q, &sink, &options).unwrap();
            let expected = sink.take_collected();
            for workers in [1, 2, 3, 4] {
                let sink = ResultSink::collector();
                let stats = enumerate_parallel(&g, k, q, workers, &sink, &options).unwrap();
                prop_assert_eq!(stats.count, base.count);
                prop_assert_eq!(sink.take_collected(), expected.clone());
            }
        }
    }
}
