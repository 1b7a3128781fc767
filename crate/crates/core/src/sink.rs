//! Destinations for enumerated k-plexes.

use std::io::{self, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

enum Mode {
    Count,
    Collect(Mutex<Vec<Vec<u64>>>),
    Stream(Mutex<StreamState>),
}

struct StreamState {
    out: Box<dyn Write + Send>,
    line: String,
    error: Option<io::Error>,
}

/// Receives every emitted k-plex as ascending original labels.
///
/// Shared by reference between workers. Counting is lock-free; collecting and
/// streaming serialise through a mutex.
pub struct ResultSink {
    count: AtomicU64,
    mode: Mode,
}

impl ResultSink {
    /// Counts results without keeping them.
    pub fn counter() -> Self {
        ResultSink {
            count: AtomicU64::new(0),
            mode: Mode::Count,
        }
    }

    /// Keeps every result in memory.
    pub fn collector() -> Self {
        ResultSink {
            count: AtomicU64::new(0),
            mode: Mode::Collect(Mutex::new(Vec::new())),
        }
    }

    /// Writes one result per line, labels separated by single spaces.
    ///
    /// The first write error is kept and reported by [`ResultSink::finish`];
    /// later results are still counted but not written.
    pub fn stream<W: Write + Send + 'static>(out: W) -> Self {
        ResultSink {
            count: AtomicU64::new(0),
            mode: Mode::Stream(Mutex::new(StreamState {
                out: Box::new(out),
                line: String::new(),
                error: None,
            })),
        }
    }

    /// Whether [`ResultSink::emit`] needs the members or a count suffices.
    pub fn wants_members(&self) -> bool {
        !matches!(self.mode, Mode::Count)
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    /// Records `n` results whose members are not needed.
    pub fn add_count(&self, n: u64) {
        if n > 0 {
            self.count.fetch_add(n, Ordering::Relaxed);
        }
    }

    /// Records one result. `labels` must be sorted ascending.
    pub fn emit(&self, labels: &[u64]) {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        self.count.fetch_add(1, Ordering::Relaxed);
        match &self.mode {
            Mode::Count => {}
            Mode::Collect(found) => found.lock().unwrap().push(labels.to_vec()),
            Mode::Stream(state) => {
                let mut state = state.lock().unwrap();
                if state.error.is_some() {
                    return;
                }
                let StreamState { out, line, error } = &mut *state;
                line.clear();
                for (i, label) in labels.iter().enumerate() {
                    use std::fmt::Write as _;
                    if i > 0 {
                        line.push(' ');
                    }
                    let _ = write!(line, "{label}");
                }
                line.push('\n');
                if let Err(e) = out.write_all(line.as_bytes()) {
                    *error = Some(e);
                }
            }
        }
    }

    /// Results kept by a collector, sorted; empty for other modes.
    pub fn take_collected(&self) -> Vec<Vec<u64>> {
        match &self.mode {
            Mode::Collect(found) => {
                let mut found = std::mem::take(&mut *found.lock().unwrap());
                found.sort_unstable();
                found
            }
            _ => Vec::new(),
        }
    }

    /// Flushes a stream and reports the first write error, if any.
    pub fn finish(&self) -> io::Result<()> {
        if let Mode::Stream(state) = &self.mode {
            let mut state = state.lock().unwrap();
            if let Some(e) = state.error.take() {
                return Err(e);
            }
            state.out.flush()?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for ResultSink {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mode = match self.mode {
            Mode::Count => "count",
            Mode::Collect(_) => "collect",
            Mode::Stream(_) => "stream",
        };
        f.debug_struct("ResultSink")
            .field("mode", &mode)
            .field("count", &self.count())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);

    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn count_matches_emits() {
        let sink = ResultSink::counter();
        sink.emit(&[1, 2]);
        sink.add_count(3);
        assert_eq!(sink.count(), 4);
        assert!(!sink.wants_members());
    }

    #[test]
    fn collector_sorts_family() {
        let sink = ResultSink::collector();
        sink.emit(&[3, 4]);
        sink.emit(&[1, 9]);
        assert_eq!(sink.take_collected(), vec![vec![1, 9], vec![3, 4]]);
        assert_eq!(sink.count(), 2);
    }

    #[test]
    fn stream_writes_lines() {
        let buf = Shared::default();
        let sink = ResultSink::stream(buf.clone());
        sink.emit(&[1, 20, 300]);
        sink.emit(&[7]);
        sink.finish().unwrap();
        assert_eq!(String::from_utf8(buf.0.lock().unwrap().clone()).unwrap(), "1 20 300\n7\n");
    }

    #[test]
    fn stream_reports_write_errors() {
        struct Broken;
        impl Write for Broken {
            fn write(&mut self, _: &[u8]) -> io::Result<usize> {
                Err(io::Error::other("closed"))
            }
            fn flush(&mut self) -> io::Result<()> {
                Ok(())
            }
        }
        let sink = ResultSink::stream(Broken);
        sink.emit(&[1]);
        sink.emit(&[2]);
        assert_eq!(sink.count(), 2);
        assert!(sink.finish().is_err());
    }
}
