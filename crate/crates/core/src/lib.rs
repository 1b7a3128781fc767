//! Enumeration of maximal k-plexes.
//!
//! A k-plex is a vertex set in which every member is adjacent to all but at
//! most `k` members, itself included. [`enumerate`] lists every maximal k-plex
//! with at least `q` vertices (`q >= 2k - 1`) by branch and bound;
//! [`enumerate_parallel`] does the same on several threads. The [`oracle`]
//! module holds an exhaustive reference implementation for small graphs.
//!
//! ```
//! use kplex::{enumerate, Graph, Options, ResultSink};
//!
//! let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
//! let sink = ResultSink::collector();
//! enumerate(&g, 2, 3, &sink, &Options::default()).unwrap();
//! assert_eq!(sink.take_collected().len(), 5);
//! ```

pub mod bounds;
pub mod context;
pub mod enumerator;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod parallel;
pub mod preprocess;
pub mod sink;

pub use bounds::{basic_bound, hybrid_bound, support_bound, BoundMode, BoundScratch};
pub use context::{LocalGraph, LocalId, Place, SearchContext};
pub use enumerator::{
    check_maximal, enumerate, enumerate_with_observer, filter_on_add, is_kplex, select_pivot,
    BranchObserver, Options, PivotRule, Prepared, Stats,
};
pub use error::{check_parameters, Error, Result};
pub use graph::{Graph, InducedSubgraph, VertexId};
pub use parallel::{enumerate_parallel, run_task, split_task, BranchTask};
pub use preprocess::{core_decomposition, reduce_to_core, CoreInfo, SeedSets};
pub use sink::ResultSink;
