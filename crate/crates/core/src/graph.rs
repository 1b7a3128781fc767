//! Immutable undirected simple graphs in compressed sorted-adjacency form.
//!
//! Vertices are dense internal IDs `0..n`. Every graph also remembers the label
//! each vertex carried in its input file, so results can be reported in the
//! caller's vocabulary while all search code works on array indices.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Internal vertex identifier.
pub type VertexId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    original_ids: Vec<u64>,
}

/// Result of [`Graph::induced_subgraph`].
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `new_to_old[v]` is the parent ID of subgraph vertex `v`.
    pub new_to_old: Vec<VertexId>,
    /// `old_to_new[u]` is the subgraph ID of parent vertex `u`, if kept.
    pub old_to_new: Vec<Option<VertexId>>,
}

impl Graph {
    /// Builds a graph on `n` vertices labelled `0..n`.
    ///
    /// Self-loops are dropped and duplicate edges (in either orientation)
    /// collapse to one.
    ///
    /// # Panics
    /// If an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    /// Like [`Graph::from_edges`] but with explicit original labels.
    pub fn with_labels<I>(original_ids: Vec<u64>, edges: I) -> Self
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let n = original_ids.len();
        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "edge ({u}, {v}) out of range for {n} vertices"
            );
            if u != v {
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            original_ids,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.original_ids.len()
    }

    /// Number of undirected edges, each counted once.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn original_id(&self, v: VertexId) -> u64 {
        self.original_ids[v as usize]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator {
        0..self.vertex_count() as VertexId
    }

    /// Iterates every edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// The subgraph induced by `keep`, re-densified in ascending parent-ID
    /// order. Original labels carry over, so the subgraph reports the same
    /// labels as its parent.
    ///
    /// # Panics
    /// If `keep` names a vertex outside the graph.
    pub fn induced_subgraph(&self, keep: &[VertexId]) -> InducedSubgraph {
        let n = self.vertex_count();
        let mut old_to_new = vec![None; n];
        let mut sorted: Vec<VertexId> = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (new, &old) in sorted.iter().enumerate() {
            assert!((old as usize) < n, "vertex {old} out of range for {n} vertices");
            old_to_new[old as usize] = Some(new as VertexId);
        }
        let mut offsets = Vec::with_capacity(sorted.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &old in &sorted {
            // Parent adjacency is ascending and the remap is monotone, so the
            // filtered list stays sorted.
            targets.extend(
                self.neighbors(old)
                    .iter()
                    .filter_map(|&w| old_to_new[w as usize]),
            );
            offsets.push(targets.len());
        }
        let original_ids = sorted.iter().map(|&v| self.original_id(v)).collect();
        InducedSubgraph {
            graph: Graph {
                offsets,
                targets,
                original_ids,
            },
            new_to_old: sorted,
            old_to_new,
        }
    }

    /// Reads whitespace-separated integer label pairs, one edge per line.
    ///
    /// Lines starting with `#` or `%` are comments. Labels are numbered densely
    /// in first-seen order; a self-loop line registers its label but adds no
    /// edge.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut index: HashMap<u64, VertexId> = HashMap::new();
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut intern = |label: u64| -> VertexId {
            *index.entry(label).or_insert_with(|| {
                labels.push(label);
                (labels.len() - 1) as VertexId
            })
        };
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(Error::parse(lineno, "expected exactly two vertex labels"));
            };
            let a = parse_label(a, lineno)?;
            let b = parse_label(b, lineno)?;
            let u = intern(a);
            let v = intern(b);
            edges.push((u, v));
        }
        Ok(Graph::with_labels(labels, edges))
    }

    /// Reads the DIMACS ascii clique format (`c`, `p edge n m`, `e u v`).
    ///
    /// Labels are 1-based in the file and become internal IDs `label - 1`; the
    /// original label is kept for output. The declared edge count is not
    /// checked, since published files differ on whether it counts both
    /// orientations.
    pub fn load_dimacs<R: BufRead>(reader: R) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut last_line = 0;
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            last_line = lineno;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("c") => {}
                Some("p") => {
                    if n.is_some() {
                        return Err(Error::parse(lineno, "duplicate problem line"));
                    }
                    let _format = tokens
                        .next()
                        .ok_or_else(|| Error::parse(lineno, "problem line is missing its format"))?;
                    let count = tokens
                        .next()
                        .ok_or_else(|| Error::parse(lineno, "problem line is missing the vertex count"))?;
                    let count: usize = count
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("invalid vertex count {count:?}")))?;
                    if let Some(m) = tokens.next() {
                        m.parse::<usize>()
                            .map_err(|_| Error::parse(lineno, format!("invalid edge count {m:?}")))?;
                    }
                    n = Some(count);
                }
                Some("e") => {
                    let Some(n) = n else {
                        return Err(Error::parse(lineno, "edge line before the problem line"));
                    };
                    let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
                        return Err(Error::parse(lineno, "edge line needs two endpoints"));
                    };
                    let u = parse_dimacs_endpoint(a, n, lineno)?;
                    let v = parse_dimacs_endpoint(b, n, lineno)?;
                    edges.push((u, v));
                }
                Some(other) => {
                    return Err(Error::parse(lineno, format!("unrecognised line type {other:?}")));
                }
                None => {}
            }
        }
        let n = n.ok_or_else(|| Error::parse(last_line, "missing problem line"))?;
        Ok(Graph::with_labels((1..=n as u64).collect(), edges))
    }

    /// Writes the graph in the edge-list format using original labels.
    ///
    /// Vertices are introduced in internal-ID order; one without an earlier
    /// neighbour is introduced by a self-loop line. Reloading the output with
    /// [`Graph::load_edge_list`] therefore reproduces this graph exactly,
    /// isolated vertices included.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for v in self.vertices() {
            let earlier: Vec<VertexId> = self
                .neighbors(v)
                .iter()
                .copied()
                .take_while(|&u| u < v)
                .collect();
            let label = self.original_id(v);
            if earlier.is_empty() {
                writeln!(out, "{label} {label}")?;
            }
            for u in earlier {
                writeln!(out, "{} {label}", self.original_id(u))?;
            }
        }
        Ok(())
    }
}

fn parse_label(token: &str, line: usize) -> Result<u64> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid vertex label {token:?}")))
}

fn parse_dimacs_endpoint(token: &str, n: usize, line: usize) -> Result<VertexId> {
    let label: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid vertex label {token:?}")))?;
    if label == 0 || label > n {
        return Err(Error::parse(
            line,
            format!("vertex label {label} outside 1..={n}"),
        ));
    }
    Ok((label - 1) as VertexId)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_list(lines: &[&str]) -> Graph {
        Graph::load_edge_list(lines.join("\n").as_bytes()).unwrap()
    }

    fn dimacs(text: &str) -> Result<Graph> {
        Graph::load_dimacs(text.replace(" / ", "\n").as_bytes())
    }

    fn check_invariants(g: &Graph) {
        let mut total = 0;
        for v in g.vertices() {
            let nbrs = g.neighbors(v);
            assert!(nbrs.windows(2).all(|w| w[0] < w[1]), "adjacency of {v} not strictly ascending");
            for &u in nbrs {
                assert_ne!(u, v, "self-loop at {v}");
                assert!(g.has_edge(u, v), "asymmetric edge {v}-{u}");
            }
            total += nbrs.len();
        }
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn triangle_from_edge_list() {
        let g = edge_list(&["0 1", "1 2", "2 0"]);
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 3));
        check_invariants(&g);
    }

    #[test]
    fn self_loops_and_duplicates_are_dropped() {
        let g = edge_list(&["5 5", "5 7", "7 5"]);
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        assert_eq!(g.original_ids(), &[5, 7]);
    }

    #[test]
    fn comments_and_first_seen_remap() {
        let g = edge_list(&["# c", "10 20", "% other", "20 30"]);
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        assert_eq!(g.original_ids(), &[10, 20, 30]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    #[test]
    fn empty_input_is_empty_graph() {
        let g = Graph::load_edge_list("".as_bytes()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (0, 0));
    }

    #[test]
    fn malformed_edge_list_reports_line() {
        let err = Graph::load_edge_list("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Graph::load_edge_list("0 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = Graph::load_edge_list("0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn dimacs_minimal_path() {
        let g = dimacs("p edge 3 2 / e 1 2 / e 2 3").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        assert_eq!(g.original_ids(), &[1, 2, 3]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn dimacs_self_loop_dropped_and_isolated_kept() {
        let g = dimacs("c hello / p edge 2 1 / e 1 1").unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 0));
    }

    #[test]
    fn dimacs_errors_carry_line_numbers() {
        let cases = [
            ("e 1 2 / p edge 2 1", 1),
            ("c only comments", 1),
            ("p edge 2 1 / e 1 3", 2),
            ("p edge 2 1 / e 1 b", 2),
            ("p edge x 1", 1),
            ("p edge 2 1 / e 0 1", 2),
        ];
        for (text, line) in cases {
            match dimacs(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text}"),
                other => panic!("{text}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn induced_subgraph_cases() {
        let triangle = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let sub = triangle.induced_subgraph(&[0, 1]);
        assert_eq!((sub.graph.vertex_count(), sub.graph.edge_count()), (2, 1));

        let all: Vec<VertexId> = triangle.vertices().collect();
        let sub = triangle.induced_subgraph(&all);
        assert_eq!(sub.graph, triangle);
        assert_eq!(sub.new_to_old, all);

        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        let leaves = star.induced_subgraph(&[1, 2, 3]);
        assert_eq!((leaves.graph.vertex_count(), leaves.graph.edge_count()), (3, 0));
        assert_eq!(leaves.graph.original_ids(), &[1, 2, 3]);
        assert_eq!(leaves.old_to_new, vec![None, Some(0), Some(1), Some(2)]);
    }

    #[test]
    #[should_panic]
    fn induced_subgraph_rejects_out_of_range() {
        Graph::from_edges(2, [(0, 1)]).induced_subgraph(&[0, 5]);
    }

    #[test]
    fn nested_subgraphs_keep_labels() {
        let g = Graph::with_labels(vec![100, 200, 300, 400], [(0, 1), (1, 2), (2, 3)]);
        let a = g.induced_subgraph(&[1, 2, 3]);
        let b = a.graph.induced_subgraph(&[1, 2]);
        let labels: Vec<u64> = b
            .new_to_old
            .iter()
            .map(|&v| g.original_id(a.new_to_old[v as usize]))
            .collect();
        assert_eq!(labels, b.graph.original_ids());
        assert_eq!(labels, vec![300, 400]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_lines() -> impl Strategy<Value = Vec<(u64, u64)>> {
            prop::collection::vec((0u64..40, 0u64..40), 0..120)
        }

        proptest! {
            #[test]
            fn loaded_graphs_are_simple_and_round_trip(pairs in arb_lines()) {
                let text: String = pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
                let g = Graph::load_edge_list(text.as_bytes()).unwrap();
                check_invariants(&g);

                let mut buf = Vec::new();
                g.write_edge_list(&mut buf).unwrap();
                let again = Graph::load_edge_list(buf.as_slice()).unwrap();
                prop_assert_eq!(&again, &g);
            }

            #[test]
            fn full_induced_subgraph_keeps_degrees(pairs in arb_lines()) {
                let text: String = pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
                let g = Graph::load_edge_list(text.as_bytes()).unwrap();
                let all: Vec<VertexId> = g.vertices().rev().collect();
                let sub = g.induced_subgraph(&all);
                let before: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
                let after: Vec<usize> = sub.graph.vertices().map(|v| sub.graph.degree(v)).collect();
                prop_assert_eq!(before, after);
            }
        }
    }
}
