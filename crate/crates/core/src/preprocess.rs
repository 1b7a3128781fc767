//! Core decomposition, seed construction and common-neighbour pruning.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Graph, InducedSubgraph, VertexId};

const NONE: u32 = u32::MAX;

/// Core numbers and the peeling order that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreInfo {
    pub core_number: Vec<u32>,
    /// Vertices in removal order.
    pub ordering: Vec<VertexId>,
    /// `position[v]` is the index of `v` in `ordering`.
    pub position: Vec<u32>,
    pub degeneracy: u32,
}

/// Repeatedly removes a vertex of least remaining degree, lowest ID first
/// among ties, in `O(m log n)`.
pub fn core_decomposition(g: &Graph) -> CoreInfo {
    let n = g.vertex_count();
    let mut degree: Vec<u32> = g.vertices().map(|v| g.degree(v) as u32).collect();
    let mut core_number = vec![0u32; n];
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // Stale entries are skipped on pop; equal degrees pop lowest ID first.
    let mut heap: BinaryHeap<Reverse<(u32, VertexId)>> =
        g.vertices().map(|v| Reverse((degree[v as usize], v))).collect();
    let mut level = 0;
    while let Some(Reverse((d, v))) = heap.pop() {
        if removed[v as usize] || d != degree[v as usize] {
            continue;
        }
        removed[v as usize] = true;
        level = level.max(d);
        core_number[v as usize] = level;
        order.push(v);
        for &u in g.neighbors(v) {
            if !removed[u as usize] {
                degree[u as usize] -= 1;
                heap.push(Reverse((degree[u as usize], u)));
            }
        }
    }

    let mut position = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i as u32;
    }
    CoreInfo {
        core_number,
        ordering: order,
        position,
        degeneracy: level,
    }
}

/// The `(q - k)`-core of `g`, which contains every k-plex of size at least `q`.
pub fn reduce_to_core(g: &Graph, k: usize, q: usize) -> InducedSubgraph {
    let floor = q.saturating_sub(k) as u32;
    let info = core_decomposition(g);
    let keep: Vec<VertexId> = g
        .vertices()
        .filter(|&v| info.core_number[v as usize] >= floor)
        .collect();
    g.induced_subgraph(&keep)
}

/// Seed vertex plus its two-hop neighbourhood split by ordering position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSets {
    pub seed: VertexId,
    /// Later-ordered vertices within distance two, ascending by ID.
    pub cand: Vec<VertexId>,
    /// Earlier-ordered vertices within distance two, ascending by ID.
    pub excl: Vec<VertexId>,
}

/// Builds the seed at 0-based ordering position `i`.
pub fn build_seed(g: &Graph, info: &CoreInfo, i: usize) -> SeedSets {
    SeedBuilder::new(g.vertex_count()).build(g, info, i)
}

/// Reusable scratch for building many seeds over one graph.
#[derive(Clone, Debug)]
pub struct SeedBuilder {
    stamp: Vec<u32>,
    epoch: u32,
    reached: Vec<VertexId>,
}

impl SeedBuilder {
    pub fn new(n: usize) -> Self {
        SeedBuilder {
            stamp: vec![0; n],
            epoch: 0,
            reached: Vec::new(),
        }
    }

    pub fn build(&mut self, g: &Graph, info: &CoreInfo, i: usize) -> SeedSets {
        let seed = info.ordering[i];
        self.next_epoch();
        let epoch = self.epoch;
        self.stamp[seed as usize] = epoch;
        self.reached.clear();
        for &a in g.neighbors(seed) {
            if self.stamp[a as usize] != epoch {
                self.stamp[a as usize] = epoch;
                self.reached.push(a);
            }
        }
        for j in 0..self.reached.len() {
            let a = self.reached[j];
            for &b in g.neighbors(a) {
                if self.stamp[b as usize] != epoch {
                    self.stamp[b as usize] = epoch;
                    self.reached.push(b);
                }
            }
        }
        self.reached.sort_unstable();
        let here = info.position[seed as usize];
        let (mut cand, mut excl) = (Vec::new(), Vec::new());
        for &u in &self.reached {
            if info.position[u as usize] > here {
                cand.push(u);
            } else {
                excl.push(u);
            }
        }
        SeedSets { seed, cand, excl }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }
}

/// Removes vertices of `cand` and `excl` that conflict with some member of `s`
/// under the common-neighbour thresholds for k-plexes of size `max(q, |s|)`.
///
/// Common neighbours are counted inside `G(s ∪ cand)`; removing a candidate
/// lowers the counts of its neighbours, so removal repeats to a fixed point.
/// Both outputs keep their input order.
pub fn lemma3_prune(
    g: &Graph,
    s: &[VertexId],
    cand: &[VertexId],
    excl: &[VertexId],
    k: usize,
    q: usize,
) -> (Vec<VertexId>, Vec<VertexId>) {
    let target = q.max(s.len()) as i64;
    let k = k as i64;
    let need_adjacent = target - 2 * k;
    let need_apart = target - 2 * k + 2;
    if need_apart <= 0 {
        return (cand.to_vec(), excl.to_vec());
    }

    // slot[v]: index into `members` for candidates and excluded vertices;
    // in_s[v]: index into `s`.
    let n = g.vertex_count();
    let mut slot = vec![NONE; n];
    let mut in_s = vec![NONE; n];
    for (j, &v) in s.iter().enumerate() {
        in_s[v as usize] = j as u32;
    }
    let members: Vec<VertexId> = cand.iter().chain(excl).copied().collect();
    let cand_len = cand.len();
    for (i, &u) in members.iter().enumerate() {
        slot[u as usize] = i as u32;
    }
    let width = s.len();

    // common[i * width + j] = |N(members[i]) ∩ N(s[j]) ∩ (S ∪ cand)|.
    let mut common = vec![0i64; members.len() * width];
    let mut alive = vec![true; members.len()];
    let inside = |w: VertexId, slot: &[u32], in_s: &[u32]| {
        in_s[w as usize] != NONE || (slot[w as usize] != NONE && (slot[w as usize] as usize) < cand_len)
    };
    for (j, &v) in s.iter().enumerate() {
        for &w in g.neighbors(v) {
            if !inside(w, &slot, &in_s) {
                continue;
            }
            for &u in g.neighbors(w) {
                let i = slot[u as usize];
                if i != NONE {
                    common[i as usize * width + j] += 1;
                }
            }
        }
    }

    let violates = |i: usize, common: &[i64]| {
        let u = members[i];
        s.iter().enumerate().any(|(j, &v)| {
            let need = if g.has_edge(u, v) { need_adjacent } else { need_apart };
            common[i * width + j] < need
        })
    };
    let mut work: Vec<usize> = (0..members.len()).collect();
    work.reverse();
    let mut queued = vec![true; members.len()];
    while let Some(i) = work.pop() {
        queued[i] = false;
        if !alive[i] || !violates(i, &common) {
            continue;
        }
        alive[i] = false;
        if i >= cand_len {
            continue;
        }
        // A vanishing candidate u stops being a common neighbour of (y, v)
        // for every neighbour y of u and every member v adjacent to u.
        let u = members[i];
        slot[u as usize] = NONE;
        let adjacent_members: Vec<usize> = (0..width).filter(|&j| g.has_edge(u, s[j])).collect();
        if adjacent_members.is_empty() {
            continue;
        }
        for &y in g.neighbors(u) {
            let iy = slot[y as usize];
            if iy == NONE || !alive[iy as usize] {
                continue;
            }
            let iy = iy as usize;
            for &j in &adjacent_members {
                common[iy * width + j] -= 1;
            }
            if !queued[iy] {
                queued[iy] = true;
                work.push(iy);
            }
        }
    }

    let cand_out = (0..cand_len).filter(|&i| alive[i]).map(|i| members[i]).collect();
    let excl_out = (cand_len..members.len())
        .filter(|&i| alive[i])
        .map(|i| members[i])
        .collect();
    (cand_out, excl_out)
}
