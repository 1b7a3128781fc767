//! Benchmark fixtures.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use kplex::Graph;

/// Directory holding the DIMACS instances shipped with the core crate's tests.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

/// Loads `<name>.clq` from [`data_dir`].
///
/// # Panics
/// If the file is missing or malformed.
pub fn instance(name: &str) -> Graph {
    let path = data_dir().join(format!("{name}.clq"));
    let file = File::open(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    Graph::load_dimacs(BufReader::new(file)).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
