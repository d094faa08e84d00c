//! Streaming destinations for trace lines. Sinks are shared between
//! concurrently running episodes and keyed by episode.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

pub trait TraceSink: Send + Sync {
    /// Appends one JSON line to the episode's stream.
    fn emit(&self, episode: &str, line: &str);
    /// The episode wrote its last line.
    fn finish(&self, _episode: &str) {}
}

/// Keeps lines in memory; handy in tests.
#[derive(Debug, Default)]
pub struct MemorySink {
    lines: Mutex<BTreeMap<String, Vec<String>>>,
}

impl MemorySink {
    pub fn lines(&self, episode: &str) -> Vec<String> {
        self.lines
            .lock()
            .expect("sink lock")
            .get(episode)
            .cloned()
            .unwrap_or_default()
    }

    pub fn episodes(&self) -> Vec<String> {
        self.lines.lock().expect("sink lock").keys().cloned().collect()
    }
}

impl TraceSink for MemorySink {
    fn emit(&self, episode: &str, line: &str) {
        self.lines
            .lock()
            .expect("sink lock")
            .entry(episode.to_string())
            .or_default()
            .push(line.to_string());
    }
}

/// Writes `<dir>/<episode>.jsonl`, one file per episode.
#[derive(Debug)]
pub struct JsonlDirSink {
    dir: PathBuf,
    open: Mutex<BTreeMap<String, BufWriter<File>>>,
    errors: Mutex<Vec<String>>,
}

impl JsonlDirSink {
    pub fn new(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: dir.as_ref().to_path_buf(),
            open: Mutex::new(BTreeMap::new()),
            errors: Mutex::new(Vec::new()),
        })
    }

    pub fn path_for(&self, episode: &str) -> PathBuf {
        self.dir.join(format!("{episode}.jsonl"))
    }

    /// I/O errors seen so far.
    pub fn errors(&self) -> Vec<String> {
        self.errors.lock().expect("sink lock").clone()
    }

    fn fail(&self, e: std::io::Error) {
        self.errors.lock().expect("sink lock").push(e.to_string());
    }
}

impl TraceSink for JsonlDirSink {
    fn emit(&self, episode: &str, line: &str) {
        let mut open = self.open.lock().expect("sink lock");
        if !open.contains_key(episode) {
            match File::create(self.path_for(episode)) {
                Ok(f) => {
                    open.insert(episode.to_string(), BufWriter::new(f));
                }
                Err(e) => return self.fail(e),
            }
        }
        let w = open.get_mut(episode).expect("inserted above");
        if let Err(e) = writeln!(w, "{line}") {
            self.fail(e);
        }
    }

    fn finish(&self, episode: &str) {
        let w = self.open.lock().expect("sink lock").remove(episode);
        if let Some(mut w) = w {
            if let Err(e) = w.flush() {
                self.fail(e);
            }
        }
    }
}
