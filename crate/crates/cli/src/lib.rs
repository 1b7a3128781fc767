//! Command-line front end: parse arguments, load a graph, enumerate, report.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use kplex::{check_parameters, enumerate, enumerate_parallel, Error, Graph, Options, ResultSink, Stats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Edgelist,
    Dimacs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Print the number of maximal k-plexes.
    Count,
    /// Print each maximal k-plex on its own line.
    List,
}

/// Enumerate maximal k-plexes of at least q vertices.
#[derive(Debug, Parser)]
#[command(name = "kplex", version)]
pub struct RunConfig {
    /// Graph file.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; guessed from the extension when omitted (.clq and
    /// .dimacs mean DIMACS, anything else an edge list).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Each member may miss at most k members, itself included.
    #[arg(short = 'k')]
    pub k: usize,
    /// Minimum size, at least 2k - 1.
    #[arg(short = 'q')]
    pub q: usize,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
    #[arg(long, value_enum, default_value_t = Mode::Count)]
    pub mode: Mode,
    /// Write results here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print run statistics as one JSON line on standard error.
    #[arg(long)]
    pub stats: bool,
    /// Skip the core reduction.
    #[arg(long)]
    pub no_core: bool,
    /// Skip common-neighbour pruning of the seed sets.
    #[arg(long)]
    pub no_lemma3: bool,
    /// Skip the upper-bound test before each include branch.
    #[arg(long)]
    pub no_bounds: bool,
}

impl RunConfig {
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| detect_format(&self.input))
    }

    pub fn options(&self) -> Options {
        Options {
            core_reduction: !self.no_core,
            lemma3: !self.no_lemma3,
            bounds: !self.no_bounds,
            ..Options::default()
        }
    }
}

pub fn detect_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("clq" | "dimacs") => Format::Dimacs,
        _ => Format::Edgelist,
    }
}

/// Exit status for usage errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for I/O and parse errors.
pub const EXIT_FAILURE: i32 = 1;

/// Runs the tool with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io::stdout(), "{e}");
                return 0;
            }
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return EXIT_USAGE;
        }
    };
    if let Err(e) = check_parameters(config.k, config.q) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(&config) {
        Ok(()) => 0,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_FAILURE
        }
    }
}

fn load(config: &RunConfig) -> Result<Graph, String> {
    let path = &config.input;
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let reader = BufReader::new(file);
    let loaded = match config.format() {
        Format::Edgelist => Graph::load_edge_list(reader),
        Format::Dimacs => Graph::load_dimacs(reader),
    };
    loaded.map_err(|e| format!("{}: {e}", path.display()))
}

fn open_output(config: &RunConfig) -> Result<Box<dyn Write + Send>, String> {
    Ok(match &config.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn execute(config: &RunConfig) -> Result<(), String> {
    let start = Instant::now();
    let graph = load(config)?;
    let load_ms = start.elapsed().as_secs_f64() * 1e3;

    let out = open_output(config)?;
    let (sink, mut out) = match config.mode {
        Mode::List => (ResultSink::stream(out), None),
        Mode::Count => (ResultSink::counter(), Some(out)),
    };
    let options = config.options();
    let workers = config.threads as usize;
    let stats = if workers == 1 {
        enumerate(&graph, config.k, config.q, &sink, &options)
    } else {
        enumerate_parallel(&graph, config.k, config.q, workers, &sink, &options)
    }
    .map_err(|e| match e {
        Error::Io(e) => e.to_string(),
        other => other.to_string(),
    })?;

    let output_name = || {
        config
            .output
            .as_ref()
            .map_or_else(|| "standard output".to_string(), |p| p.display().to_string())
    };
    sink.finish().map_err(|e| format!("{}: {e}", output_name()))?;
    if let Some(out) = out.as_mut() {
        writeln!(out, "{}", sink.count())
            .and_then(|_| out.flush())
            .map_err(|e| format!("{}: {e}", output_name()))?;
    }
    if config.stats {
        eprintln!("{}", stats_json(&stats, load_ms));
    }
    Ok(())
}

/// One-line JSON rendering of `stats` plus the load time.
pub fn stats_json(stats: &Stats, load_ms: f64) -> String {
    let mut value = serde_json::to_value(stats).expect("stats serialise");
    value["load_ms"] = serde_json::json!(load_ms);
    value.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, clap::Error> {
        RunConfig::try_parse_from(std::iter::once("kplex").chain(args.iter().copied()))
    }

    #[test]
    fn defaults() {
        let c = parse(&["--input", "g.el", "-k", "2", "-q", "3"]).unwrap();
        assert_eq!(c.threads, 1);
        assert_eq!(c.mode, Mode::Count);
        assert_eq!(c.format(), Format::Edgelist);
        assert_eq!(c.options(), Options::default());
    }

    #[test]
    fn format_detection() {
        assert_eq!(detect_format(Path::new("a/b.clq")), Format::Dimacs);
        assert_eq!(detect_format(Path::new("b.dimacs")), Format::Dimacs);
        assert_eq!(detect_format(Path::new("b.txt")), Format::Edgelist);
        let c = parse(&["--input", "g.clq", "--format", "edgelist", "-k", "1", "-q", "1"]).unwrap();
        assert_eq!(c.format(), Format::Edgelist);
    }

    #[test]
    fn toggles_map_to_options() {
        let c = parse(&["--input", "g", "-k", "1", "-q", "1", "--no-core", "--no-bounds"]).unwrap();
        let o = c.options();
        assert!(!o.core_reduction && o.lemma3 && !o.bounds);
    }

    #[test]
    fn rejects_bad_flags() {
        assert!(parse(&["--input", "g", "-k", "1", "-q", "1", "--bogus"]).is_err());
        assert!(parse(&["--input", "g", "-k", "1", "-q", "1", "--threads", "0"]).is_err());
        assert!(parse(&["--input", "g", "-k", "x", "-q", "1"]).is_err());
        assert!(parse(&["-k", "1", "-q", "1"]).is_err());
    }

    #[test]
    fn stats_line_is_json() {
        let line = stats_json(&Stats { count: 7, workers: 2, ..Stats::default() }, 1.5);
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["count"], 7);
        assert_eq!(v["workers"], 2);
        assert_eq!(v["load_ms"], 1.5);
        for key in ["n", "m", "reduced_n", "reduced_m", "seeds", "branch_nodes", "steals", "search_ms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
