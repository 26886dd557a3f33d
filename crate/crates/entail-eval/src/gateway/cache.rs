//! Content-addressed transcript cache with JSONL persistence.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::{Mutex, RwLock};

use crate::error::{Error, Result};

use super::Transcript;

/// Thread-safe store of [`Transcript`]s keyed by request content hash.
///
/// Three modes: purely in-memory, file-backed (every new insert is
/// appended and flushed), and read-only from a file. A cache file is one
/// JSON transcript per line; every line must parse and carry a key that
/// matches its own content, otherwise the whole file is rejected with the
/// offending line number.
pub struct TranscriptCache {
    entries: RwLock<HashMap<String, Transcript>>,
    writer: Option<Mutex<BufWriter<File>>>,
}

impl TranscriptCache {
    /// Cache with no persistence.
    pub fn in_memory() -> TranscriptCache {
        TranscriptCache { entries: RwLock::new(HashMap::new()), writer: None }
    }

    /// Open (or create) a file-backed cache at `path`. Existing entries are
    /// loaded and validated; new inserts are appended.
    pub fn open(path: &Path) -> Result<TranscriptCache> {
        let entries = if path.exists() { read_cache_file(path)? } else { HashMap::new() };
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(TranscriptCache {
            entries: RwLock::new(entries),
            writer: Some(Mutex::new(BufWriter::new(file))),
        })
    }

    /// Load a cache file without opening it for writing. Used for replay.
    pub fn load_read_only(path: &Path) -> Result<TranscriptCache> {
        let entries = read_cache_file(path)?;
        Ok(TranscriptCache { entries: RwLock::new(entries), writer: None })
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<Transcript> {
        self.entries.read().expect("cache lock poisoned").get(key).cloned()
    }

    /// Insert a transcript. The first write for a key wins; re-inserting an
    /// existing key is a no-op returning `false`. New entries are appended
    /// to the backing file (when present) and flushed before returning.
    pub fn insert(&self, transcript: Transcript) -> Result<bool> {
        let mut entries = self.entries.write().expect("cache lock poisoned");
        if entries.contains_key(&transcript.key) {
            return Ok(false);
        }
        if let Some(writer) = &self.writer {
            let line = serde_json::to_string(&transcript)?;
            let mut w = writer.lock().expect("cache writer poisoned");
            writeln!(w, "{line}")?;
            w.flush()?;
        }
        entries.insert(transcript.key.clone(), transcript);
        Ok(true)
    }

    /// Write every transcript, sorted by key, to `path` as JSONL. The write
    /// goes to a temporary sibling first and is renamed into place, so a
    /// failed export never leaves a truncated file. Returns the number of
    /// transcripts written.
    pub fn export(&self, path: &Path) -> Result<usize> {
        let entries = self.entries.read().expect("cache lock poisoned");
        let mut keys: Vec<&String> = entries.keys().collect();
        keys.sort();
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            for key in &keys {
                let line = serde_json::to_string(&entries[key.as_str()])?;
                writeln!(w, "{line}")?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(keys.len())
    }

    /// Merge transcripts from a JSONL file into this cache. The file is
    /// fully validated before anything is merged: one malformed line
    /// rejects the import and leaves the cache untouched. Keys already
    /// present are skipped, so importing is idempotent. Returns the number
    /// of newly added transcripts.
    pub fn import(&self, path: &Path) -> Result<usize> {
        let incoming = read_cache_file(path)?;
        let mut added = 0;
        // Sort for a deterministic append order in file-backed caches.
        let mut transcripts: Vec<Transcript> = incoming.into_values().collect();
        transcripts.sort_by(|a, b| a.key.cmp(&b.key));
        for t in transcripts {
            if self.insert(t)? {
                added += 1;
            }
        }
        Ok(added)
    }

    /// All transcripts, sorted by key.
    pub fn snapshot(&self) -> Vec<Transcript> {
        let entries = self.entries.read().expect("cache lock poisoned");
        let mut all: Vec<Transcript> = entries.values().cloned().collect();
        all.sort_by(|a, b| a.key.cmp(&b.key));
        all
    }
}

/// Parse and validate a JSONL cache file.
///
/// Rules: every non-empty line must be a JSON transcript whose `key`
/// equals the hash of its own request fields. A key occurring twice with
/// identical content is tolerated (append-style files can repeat after a
/// crash); conflicting content for one key is an error.
fn read_cache_file(path: &Path) -> Result<HashMap<String, Transcript>> {
    let file = File::open(path).map_err(|e| {
        Error::Dataset(format!("cannot open cache file {}: {e}", path.display()))
    })?;
    let reader = BufReader::new(file);
    let mut entries: HashMap<String, Transcript> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::CacheFormat { line: line_no, msg: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let t: Transcript = serde_json::from_str(&line)
            .map_err(|e| Error::CacheFormat { line: line_no, msg: e.to_string() })?;
        let expected = t.request().cache_key();
        if t.key != expected {
            return Err(Error::CacheFormat {
                line: line_no,
                msg: format!("key {} does not match content hash {expected}", t.key),
            });
        }
        if let Some(existing) = entries.get(&t.key) {
            if *existing != t {
                return Err(Error::CacheFormat {
                    line: line_no,
                    msg: format!("conflicting duplicate for key {}", t.key),
                });
            }
        } else {
            entries.insert(t.key.clone(), t);
        }
    }
    Ok(entries)
}
