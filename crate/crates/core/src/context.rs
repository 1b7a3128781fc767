//! Branch state for one seed: the local graph and the live `(S, C, X)` sets.
//!
//! A [`LocalGraph`] is the subgraph induced by a seed and its surviving two-hop
//! neighbourhood, renumbered densely. [`SearchContext`] holds the three sets
//! over it with incrementally maintained counters and an undo log, so a
//! depth-first search can descend and backtrack without copying.

use std::sync::Arc;

use crate::graph::{Graph, VertexId};

/// Dense vertex ID inside a [`LocalGraph`].
pub type LocalId = u32;

/// Local graphs up to this many vertices also get an adjacency bit matrix.
const MATRIX_LIMIT: usize = 8192;

#[derive(Clone, Debug)]
pub struct LocalGraph {
    offsets: Vec<u32>,
    targets: Vec<LocalId>,
    words: usize,
    matrix: Vec<u64>,
    vertices: Vec<VertexId>,
    labels: Vec<u64>,
}

impl LocalGraph {
    /// The subgraph of `g` induced by `vertices`, numbered in ascending order
    /// of their IDs in `g`.
    pub fn from_graph(g: &Graph, vertices: &[VertexId]) -> Self {
        let mut vertices = vertices.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        let n = vertices.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &x in &vertices {
            let nbrs = g.neighbors(x);
            if nbrs.len() > n {
                let mut i = 0;
                for (local, &y) in vertices.iter().enumerate() {
                    while i < nbrs.len() && nbrs[i] < y {
                        i += 1;
                    }
                    if i < nbrs.len() && nbrs[i] == y {
                        targets.push(local as LocalId);
                    }
                }
            } else {
                for &y in nbrs {
                    if let Ok(local) = vertices.binary_search(&y) {
                        targets.push(local as LocalId);
                    }
                }
            }
            offsets.push(targets.len() as u32);
        }
        let labels = vertices.iter().map(|&v| g.original_id(v)).collect();
        let (words, matrix) = if n <= MATRIX_LIMIT {
            let words = n.div_ceil(64);
            let mut matrix = vec![0u64; words * n];
            for u in 0..n {
                for &v in &targets[offsets[u] as usize..offsets[u + 1] as usize] {
                    matrix[u * words + v as usize / 64] |= 1 << (v % 64);
                }
            }
            (words, matrix)
        } else {
            (0, Vec::new())
        };
        LocalGraph {
            offsets,
            targets,
            words,
            matrix,
            vertices,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, u: LocalId) -> &[LocalId] {
        let u = u as usize;
        &self.targets[self.offsets[u] as usize..self.offsets[u + 1] as usize]
    }

    #[inline]
    pub fn adjacent(&self, u: LocalId, v: LocalId) -> bool {
        if self.words > 0 {
            let row = u as usize * self.words;
            self.matrix[row + v as usize / 64] >> (v % 64) & 1 == 1
        } else {
            self.neighbors(u).binary_search(&v).is_ok()
        }
    }

    /// ID of `u` in the graph this was built from.
    pub fn parent_vertex(&self, u: LocalId) -> VertexId {
        self.vertices[u as usize]
    }

    /// Adjacency row of `u` as a bitset, when the matrix was built.
    #[inline]
    pub fn row(&self, u: LocalId) -> Option<&[u64]> {
        (self.words > 0).then(|| {
            let start = u as usize * self.words;
            &self.matrix[start..start + self.words]
        })
    }

    /// Words per bitset row; zero when no matrix was built.
    pub fn words(&self) -> usize {
        self.words
    }

    /// Original input label of `u`.
    pub fn label(&self, u: LocalId) -> u64 {
        self.labels[u as usize]
    }

    /// Local ID of parent vertex `v`, if present.
    pub fn local_id(&self, v: VertexId) -> Option<LocalId> {
        self.vertices.binary_search(&v).ok().map(|i| i as LocalId)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Place {
    Out,
    S,
    C,
    X,
}

#[derive(Clone, Copy, Debug)]
enum Undo {
    /// `v` moved from C into S.
    Include(LocalId),
    /// `v` moved from C to X.
    Exclude(LocalId),
    /// Candidate dropped from C.
    DropC(LocalId),
    /// Vertex dropped from X.
    DropX(LocalId),
}

/// Live `(S, C, X)` state over a [`LocalGraph`].
///
/// For every vertex in `S ∪ C ∪ X` it tracks how many members of `S` it is
/// not adjacent to (itself excluded) and its degree inside `G(S ∪ C)`.
#[derive(Clone, Debug)]
pub struct SearchContext {
    graph: Arc<LocalGraph>,
    k: usize,
    q: usize,
    place: Vec<Place>,
    s: Vec<LocalId>,
    c: Vec<LocalId>,
    x: Vec<LocalId>,
    pos: Vec<u32>,
    nonadj: Vec<u32>,
    nonadj_list: Vec<LocalId>,
    degree: Vec<u32>,
    /// Bitsets over local IDs of C and of S ∪ C ∪ X, when the graph has a
    /// matrix.
    c_bits: Vec<u64>,
    live_bits: Vec<u64>,
    log: Vec<Undo>,
    saturated: Vec<LocalId>,
}

impl SearchContext {
    /// Builds a context from explicit sets.
    ///
    /// # Panics
    /// If the sets overlap, `s` is not a k-plex, or some vertex of `c` or `x`
    /// cannot extend `s` to a k-plex.
    pub fn new(
        graph: Arc<LocalGraph>,
        k: usize,
        q: usize,
        s: &[LocalId],
        c: &[LocalId],
        x: &[LocalId],
    ) -> Self {
        assert!(k >= 1, "k must be at least 1");
        let n = graph.len();
        let words = graph.words();
        let mut ctx = SearchContext {
            graph,
            k,
            q,
            place: vec![Place::Out; n],
            s: Vec::with_capacity(n),
            c: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            pos: vec![0; n],
            nonadj: vec![0; n],
            nonadj_list: vec![0; n * k],
            degree: vec![0; n],
            c_bits: vec![0; words],
            live_bits: vec![0; words],
            log: Vec::new(),
            saturated: Vec::new(),
        };
        for (list, place) in [(s, Place::S), (c, Place::C), (x, Place::X)] {
            for &v in list {
                assert_eq!(ctx.place[v as usize], Place::Out, "vertex {v} listed twice");
                ctx.set_place(v, place);
                match place {
                    Place::S => ctx.s.push(v),
                    Place::C => {
                        ctx.pos[v as usize] = ctx.c.len() as u32;
                        ctx.c.push(v);
                    }
                    _ => {
                        ctx.pos[v as usize] = ctx.x.len() as u32;
                        ctx.x.push(v);
                    }
                }
            }
        }
        ctx.recount();
        for &v in &ctx.s {
            assert!(
                (ctx.nonadj[v as usize] as usize) < k,
                "S is not a {k}-plex"
            );
        }
        for &u in ctx.c.iter().chain(&ctx.x) {
            assert!(ctx.extends_s(u), "vertex {u} cannot extend S to a {k}-plex");
        }
        ctx
    }

    fn recount(&mut self) {
        let k = self.k;
        let live: Vec<LocalId> = self.live().collect();
        for &u in &live {
            let u = u as usize;
            self.nonadj[u] = 0;
            self.degree[u] = 0;
        }
        for w in self.s.clone() {
            for &u in &live {
                if u != w && !self.graph.adjacent(u, w) {
                    let slot = self.nonadj[u as usize] as usize;
                    if slot < k {
                        self.nonadj_list[u as usize * k + slot] = w;
                    }
                    self.nonadj[u as usize] += 1;
                }
            }
        }
        for &u in &live {
            let d = self
                .graph
                .neighbors(u)
                .iter()
                .filter(|&&w| matches!(self.place[w as usize], Place::S | Place::C))
                .count();
            self.degree[u as usize] = d as u32;
        }
    }

    /// Whether `S ∪ {u}` is a k-plex, for `u` outside `S`.
    fn extends_s(&self, u: LocalId) -> bool {
        if self.nonadj[u as usize] as usize >= self.k {
            return false;
        }
        self.s.iter().all(|&w| {
            (self.nonadj[w as usize] as usize) < self.k - 1 || self.graph.adjacent(u, w)
        })
    }

    fn live(&self) -> impl Iterator<Item = LocalId> + '_ {
        self.s.iter().chain(&self.c).chain(&self.x).copied()
    }

    pub fn graph(&self) -> &Arc<LocalGraph> {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn s(&self) -> &[LocalId] {
        &self.s
    }

    /// Candidates, in no particular order.
    pub fn c(&self) -> &[LocalId] {
        &self.c
    }

    /// Excluded vertices, in no particular order.
    pub fn x(&self) -> &[LocalId] {
        &self.x
    }

    #[inline]
    pub fn place(&self, u: LocalId) -> Place {
        self.place[u as usize]
    }

    /// `|S ∪ C|`.
    #[inline]
    pub fn sc_len(&self) -> usize {
        self.s.len() + self.c.len()
    }

    /// Number of members of `S` other than `u` that `u` is not adjacent to.
    #[inline]
    pub fn nonadjacent_in_s(&self, u: LocalId) -> usize {
        self.nonadj[u as usize] as usize
    }

    /// The members counted by [`SearchContext::nonadjacent_in_s`].
    #[inline]
    pub fn nonneighbors_in_s(&self, u: LocalId) -> &[LocalId] {
        let start = u as usize * self.k;
        let len = (self.nonadj[u as usize] as usize).min(self.k);
        &self.nonadj_list[start..start + len]
    }

    /// Degree of `u` inside `G(S ∪ C)`.
    #[inline]
    pub fn degree_in_sc(&self, u: LocalId) -> usize {
        self.degree[u as usize] as usize
    }

    /// Current undo-log position.
    pub fn mark(&self) -> usize {
        self.log.len()
    }

    /// Deep copy with an empty undo log.
    pub fn snapshot(&self) -> SearchContext {
        let mut copy = self.clone();
        copy.log.clear();
        copy
    }

    /// Forgets history so the current state becomes the root.
    pub fn clear_log(&mut self) {
        self.log.clear();
    }

    /// Moves `v` from C into S and drops every vertex of C and X that can no
    /// longer extend the enlarged S.
    ///
    /// # Panics
    /// If `v` is not a candidate.
    pub fn include(&mut self, v: LocalId) {
        assert_eq!(self.place(v), Place::C, "vertex {v} is not a candidate");
        self.log.push(Undo::Include(v));
        self.take_from_list(v);
        self.set_place(v, Place::S);
        let k = self.k;
        let g = Arc::clone(&self.graph);

        self.saturated.clear();
        for i in 0..self.s.len() {
            let u = self.s[i];
            if !g.adjacent(u, v) {
                self.push_nonadjacent(u, v);
                if self.nonadj[u as usize] as usize == k - 1 {
                    self.saturated.push(u);
                }
            }
        }
        if self.nonadj[v as usize] as usize == k - 1 {
            self.saturated.push(v);
        }
        self.s.push(v);

        for i in 0..self.c.len() {
            let u = self.c[i];
            if !g.adjacent(u, v) {
                self.push_nonadjacent(u, v);
            }
        }
        for i in 0..self.x.len() {
            let u = self.x[i];
            if !g.adjacent(u, v) {
                self.push_nonadjacent(u, v);
            }
        }

        let mut i = self.c.len();
        while i > 0 {
            i -= 1;
            let w = self.c[i];
            if !self.survives(w) {
                self.drop_candidate(w);
            }
        }
        let mut i = self.x.len();
        while i > 0 {
            i -= 1;
            let w = self.x[i];
            if !self.survives(w) {
                self.drop_excluded(w);
            }
        }
    }

    #[inline]
    fn survives(&self, w: LocalId) -> bool {
        (self.nonadj[w as usize] as usize) < self.k
            && self.saturated.iter().all(|&z| self.graph.adjacent(w, z))
    }

    #[inline]
    fn push_nonadjacent(&mut self, u: LocalId, v: LocalId) {
        let slot = self.nonadj[u as usize] as usize;
        if slot < self.k {
            self.nonadj_list[u as usize * self.k + slot] = v;
        }
        self.nonadj[u as usize] += 1;
    }

    /// Moves candidate `v` to X.
    pub fn exclude(&mut self, v: LocalId) {
        assert_eq!(self.place(v), Place::C, "vertex {v} is not a candidate");
        self.log.push(Undo::Exclude(v));
        self.take_from_list(v);
        self.set_place(v, Place::X);
        self.pos[v as usize] = self.x.len() as u32;
        self.x.push(v);
        self.adjust_degrees(v, false);
    }

    /// Drops a candidate from the search entirely.
    pub fn drop_candidate(&mut self, w: LocalId) {
        debug_assert_eq!(self.place(w), Place::C);
        self.log.push(Undo::DropC(w));
        self.take_from_list(w);
        self.set_place(w, Place::Out);
        self.adjust_degrees(w, false);
    }

    /// Drops an excluded vertex.
    pub fn drop_excluded(&mut self, w: LocalId) {
        debug_assert_eq!(self.place(w), Place::X);
        self.log.push(Undo::DropX(w));
        self.take_from_list(w);
        self.set_place(w, Place::Out);
    }

    fn take_from_list(&mut self, v: LocalId) {
        let list = match self.place[v as usize] {
            Place::C => &mut self.c,
            Place::X => &mut self.x,
            _ => unreachable!("vertex {v} is not in C or X"),
        };
        let i = self.pos[v as usize] as usize;
        list.swap_remove(i);
        if let Some(&moved) = list.get(i) {
            self.pos[moved as usize] = i as u32;
        }
    }

    fn push_to_c(&mut self, v: LocalId) {
        self.set_place(v, Place::C);
        self.pos[v as usize] = self.c.len() as u32;
        self.c.push(v);
    }

    #[inline]
    fn set_place(&mut self, v: LocalId, place: Place) {
        self.place[v as usize] = place;
        if !self.c_bits.is_empty() {
            let (word, bit) = (v as usize / 64, 1u64 << (v % 64));
            if place == Place::C {
                self.c_bits[word] |= bit;
            } else {
                self.c_bits[word] &= !bit;
            }
            if place == Place::Out {
                self.live_bits[word] &= !bit;
            } else {
                self.live_bits[word] |= bit;
            }
        }
    }

    /// Calls `f` on each neighbour of `v` in C, in ascending ID order.
    #[inline]
    pub fn for_each_candidate_neighbor(&self, v: LocalId, mut f: impl FnMut(LocalId)) {
        match self.graph.row(v) {
            Some(row) => {
                for (w, (&r, &c)) in row.iter().zip(&self.c_bits).enumerate() {
                    let mut bits = r & c;
                    while bits != 0 {
                        f((w * 64) as LocalId + bits.trailing_zeros());
                        bits &= bits - 1;
                    }
                }
            }
            None => {
                for &u in self.graph.neighbors(v) {
                    if self.place[u as usize] == Place::C {
                        f(u);
                    }
                }
            }
        }
    }

    /// Updates live neighbours of `v` after it enters or leaves `S ∪ C`.
    fn adjust_degrees(&mut self, v: LocalId, entering: bool) {
        let g = Arc::clone(&self.graph);
        match g.row(v) {
            Some(row) => {
                for (w, &r) in row.iter().enumerate() {
                    let mut bits = r & self.live_bits[w];
                    while bits != 0 {
                        let y = w * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        if entering {
                            self.degree[y] += 1;
                        } else {
                            self.degree[y] -= 1;
                        }
                    }
                }
            }
            None => {
                for &y in g.neighbors(v) {
                    if self.place[y as usize] != Place::Out {
                        if entering {
                            self.degree[y as usize] += 1;
                        } else {
                            self.degree[y as usize] -= 1;
                        }
                    }
                }
            }
        }
    }

    /// Rolls back every mutation made after `mark`.
    pub fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            match self.log.pop().unwrap() {
                Undo::Include(v) => {
                    let popped = self.s.pop();
                    debug_assert_eq!(popped, Some(v));
                    self.push_to_c(v);
                    let g = Arc::clone(&self.graph);
                    for i in 0..self.s.len() {
                        let u = self.s[i];
                        if !g.adjacent(u, v) {
                            self.nonadj[u as usize] -= 1;
                        }
                    }
                    for i in 0..self.c.len() {
                        let u = self.c[i];
                        if u != v && !g.adjacent(u, v) {
                            self.nonadj[u as usize] -= 1;
                        }
                    }
                    for i in 0..self.x.len() {
                        let u = self.x[i];
                        if !g.adjacent(u, v) {
                            self.nonadj[u as usize] -= 1;
                        }
                    }
                }
                Undo::Exclude(v) => {
                    self.take_from_list(v);
                    self.push_to_c(v);
                    self.adjust_degrees(v, true);
                }
                Undo::DropC(w) => {
                    self.push_to_c(w);
                    self.adjust_degrees(w, true);
                }
                Undo::DropX(w) => {
                    self.set_place(w, Place::X);
                    self.pos[w as usize] = self.x.len() as u32;
                    self.x.push(w);
                }
            }
        }
    }

    /// Recomputes every counter from scratch and panics on any mismatch.
    pub fn assert_consistent(&self) {
        let mut fresh = self.clone();
        fresh.recount();
        for u in self.live() {
            let i = u as usize;
            assert_eq!(self.nonadj[i], fresh.nonadj[i], "non-adjacency count of {u}");
            assert_eq!(self.degree[i], fresh.degree[i], "degree of {u}");
            let mut a = self.nonneighbors_in_s(u).to_vec();
            let mut b = fresh.nonneighbors_in_s(u).to_vec();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b, "non-neighbour list of {u}");
        }
        for (list, place) in [(&self.c, Place::C), (&self.x, Place::X)] {
            for (i, &u) in list.iter().enumerate() {
                assert_eq!(self.place[u as usize], place);
                assert_eq!(self.pos[u as usize] as usize, i);
            }
        }
        for &u in &self.s {
            assert_eq!(self.place[u as usize], Place::S);
            assert!((self.nonadj[u as usize] as usize) < self.k, "S is not a k-plex");
        }
        for &u in self.c.iter().chain(&self.x) {
            assert!(self.extends_s(u), "{u} cannot extend S");
        }
        let counted = self.place.iter().filter(|&&p| p != Place::Out).count();
        assert_eq!(counted, self.s.len() + self.c.len() + self.x.len());
        if !self.c_bits.is_empty() {
            for (u, &place) in self.place.iter().enumerate() {
                let bit = |bits: &[u64]| bits[u / 64] >> (u % 64) & 1 == 1;
                assert_eq!(bit(&self.c_bits), place == Place::C, "candidate bit of {u}");
                assert_eq!(bit(&self.live_bits), place != Place::Out, "live bit of {u}");
            }
        }
    }
}
