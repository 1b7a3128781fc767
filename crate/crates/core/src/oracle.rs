//! Exhaustive reference enumeration for small graphs.
//!
//! Everything here works from the k-plex definition alone and shares no code
//! with the search modules, so the two can check each other.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Largest graph [`brute_force_maximal_kplexes`] accepts.
pub const ORACLE_LIMIT: usize = 24;

/// A family of vertex sets in original labels, each sorted, the family sorted
/// lexicographically and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionSet {
    sets: Vec<Vec<u64>>,
}

impl SolutionSet {
    pub fn from_sets(sets: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let mut sets: Vec<Vec<u64>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        sets.sort_unstable();
        sets.dedup();
        SolutionSet { sets }
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    pub fn into_sets(self) -> Vec<Vec<u64>> {
        self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Members with at least `q` vertices.
    pub fn at_least(&self, q: usize) -> SolutionSet {
        SolutionSet {
            sets: self.sets.iter().filter(|s| s.len() >= q).cloned().collect(),
        }
    }
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    g.vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect()
}

fn mask_is_kplex(adj: &[u32], mask: u32, k: usize) -> bool {
    let size = mask.count_ones() as usize;
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if ((adj[v] & mask).count_ones() as usize) + k < size {
            return false;
        }
    }
    true
}

/// Every maximal k-plex of `g` with at least `q` vertices, by testing all
/// `2^n` vertex subsets.
///
/// Maximality is tested by single-vertex extension: k-plexes are closed
/// under taking subsets, so any strictly larger k-plex contains one with
/// exactly one extra vertex.
///
/// # Errors
/// [`Error::TooLarge`] when `g` has more than [`ORACLE_LIMIT`] vertices.
pub fn brute_force_maximal_kplexes(g: &Graph, k: usize, q: usize) -> Result<SolutionSet> {
    let n = g.vertex_count();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge { n, limit: ORACLE_LIMIT });
    }
    let adj = adjacency_masks(g);
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut found = Vec::new();
    for mask in 1..=full {
        if (mask.count_ones() as usize) < q || !mask_is_kplex(&adj, mask, k) {
            continue;
        }
        let mut outside = full & !mask;
        let mut maximal = true;
        while outside != 0 {
            let u = outside.trailing_zeros();
            outside &= outside - 1;
            if mask_is_kplex(&adj, mask | 1 << u, k) {
                maximal = false;
                break;
            }
        }
        if maximal {
            let labels = (0..n as u32)
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| g.original_id(v))
                .collect();
            found.push(labels);
        }
    }
    Ok(SolutionSet::from_sets(found))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    /// Set `index` names a label that is not in the graph.
    UnknownVertex { index: usize, label: u64 },
    /// Set `index` lists a vertex twice.
    RepeatedVertex { index: usize, label: u64 },
    /// In set `index`, `label` has fewer than `|set| - k` neighbours.
    NotKPlex { index: usize, label: u64 },
    /// Set `index` has fewer than `q` vertices.
    TooSmall { index: usize, size: usize },
    /// Adding `extender` to set `index` gives a larger k-plex.
    NotMaximal { index: usize, extender: u64 },
    /// Set `index` repeats set `first`.
    Duplicate { index: usize, first: usize },
}

/// Problems found by [`verify_solution`]; empty means every set is a maximal
/// k-plex of size at least `q` and no set repeats.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub issues: Vec<Issue>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks each set of `family` (in original labels) against the definition.
/// Says nothing about sets missing from the family.
pub fn verify_solution(g: &Graph, k: usize, q: usize, family: &[Vec<u64>]) -> VerifyReport {
    let index: HashMap<u64, VertexId> =
        g.vertices().map(|v| (g.original_id(v), v)).collect();
    let mut report = VerifyReport::default();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, labels) in family.iter().enumerate() {
        let mut key = labels.clone();
        key.sort_unstable();
        if let Some(&first) = seen.get(&key) {
            report.issues.push(Issue::Duplicate { index: i, first });
            continue;
        }
        seen.insert(key, i);

        let mut members = Vec::with_capacity(labels.len());
        let mut present = HashSet::new();
        let mut broken = false;
        for &label in labels {
            match index.get(&label) {
                Some(&v) if present.insert(v) => members.push(v),
                Some(_) => {
                    report.issues.push(Issue::RepeatedVertex { index: i, label });
                    broken = true;
                }
                None => {
                    report.issues.push(Issue::UnknownVertex { index: i, label });
                    broken = true;
                }
            }
        }
        if broken {
            continue;
        }
        if members.len() < q {
            report.issues.push(Issue::TooSmall { index: i, size: members.len() });
        }
        let inside = |v: VertexId, set: &HashSet<VertexId>| {
            g.neighbors(v).iter().filter(|u| set.contains(u)).count()
        };
        let mut plex = true;
        for &v in &members {
            if inside(v, &present) + k < members.len() {
                report.issues.push(Issue::NotKPlex { index: i, label: g.original_id(v) });
                plex = false;
            }
        }
        if !plex {
            continue;
        }
        for u in g.vertices() {
            if present.contains(&u) {
                continue;
            }
            let mut bigger = present.clone();
            bigger.insert(u);
            let size = bigger.len();
            if bigger.iter().all(|&v| inside(v, &bigger) + k >= size) {
                report.issues.push(Issue::NotMaximal { index: i, extender: g.original_id(u) });
                break;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n as usize, edges)
    }

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|v| (v, (v + 1) % n)))
    }

    #[test]
    fn k4_single_clique() {
        let found = brute_force_maximal_kplexes(&complete(4), 1, 3).unwrap();
        assert_eq!(found.sets(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn five_cycle_consecutive_triples() {
        let found = brute_force_maximal_kplexes(&cycle(5), 2, 3).unwrap();
        assert_eq!(
            found.sets(),
            &[vec![0, 1, 2], vec![0, 1, 4], vec![0, 3, 4], vec![1, 2, 3], vec![2, 3, 4]]
        );
    }

    #[test]
    fn edgeless_graph_has_no_triples() {
        let g = Graph::from_edges(5, []);
        assert!(brute_force_maximal_kplexes(&g, 2, 3).unwrap().is_empty());
    }

    #[test]
    fn refuses_large_graphs() {
        let g = Graph::from_edges(25, []);
        assert!(matches!(
            brute_force_maximal_kplexes(&g, 1, 1),
            Err(Error::TooLarge { n: 25, .. })
        ));
    }

    #[test]
    fn verify_accepts_oracle_output() {
        let g = cycle(5);
        let found = brute_force_maximal_kplexes(&g, 2, 3).unwrap();
        assert!(verify_solution(&g, 2, 3, found.sets()).is_clean());
    }

    #[test]
    fn verify_names_extender() {
        let g = complete(4);
        let report = verify_solution(&g, 1, 2, &[vec![0, 1, 2]]);
        assert_eq!(report.issues, vec![Issue::NotMaximal { index: 0, extender: 3 }]);
    }

    #[test]
    fn verify_flags_other_problems() {
        let g = cycle(5);
        let report = verify_solution(&g, 1, 3, &[vec![0, 2], vec![0, 9], vec![0, 2]]);
        assert!(report.issues.contains(&Issue::TooSmall { index: 0, size: 2 }));
        assert!(report.issues.contains(&Issue::NotKPlex { index: 0, label: 0 }));
        assert!(report.issues.contains(&Issue::UnknownVertex { index: 1, label: 9 }));
        assert!(report.issues.contains(&Issue::Duplicate { index: 2, first: 0 }));
    }

    #[test]
    fn oracle_plexes_are_hereditary() {
        let g = cycle(6);
        let adj = adjacency_masks(&g);
        for set in brute_force_maximal_kplexes(&g, 3, 5).unwrap().sets() {
            let mask = set.iter().fold(0u32, |m, &v| m | 1 << v);
            let mut sub = mask;
            while sub != 0 {
                assert!(mask_is_kplex(&adj, sub, 3));
                sub = (sub - 1) & mask;
            }
        }
    }
}
