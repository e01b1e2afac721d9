//! On-disk layout of a data directory.
//!
//! `records.log` is the append-only sequence of frames
//! `u32 BE length || record`, where `record` is the canonical record
//! encoding. `tools.jsonl` holds one registered [`ToolIdentity`] per line.
//! Both files are the single source of truth; every in-memory index is
//! rebuilt from them on startup.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use safekeeper_core::canonical::{decode_record, encode_record};
use safekeeper_core::{ChainedRecord, ToolIdentity, ToolRegistry};
use thiserror::Error;

pub const RECORDS_FILE: &str = "records.log";
pub const TOOLS_FILE: &str = "tools.jsonl";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} line {line}: {message}")]
    BadToolLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("record is not encodable: {0}")]
    Unencodable(String),
    #[error("write failure injected")]
    Injected,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// A frame whose bytes could not be decoded into a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptFrame {
    /// Zero-based frame index in the file.
    pub index: u64,
    pub offset: u64,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct LoadedRecords {
    pub records: Vec<ChainedRecord>,
    pub corrupt: Vec<CorruptFrame>,
    /// Bytes after the last complete frame (an interrupted, never
    /// acknowledged write).
    pub torn_tail: u64,
    /// File length up to the end of the last complete frame.
    pub valid_len: u64,
}

pub fn read_records(dir: &Path) -> Result<LoadedRecords, StoreError> {
    let path = dir.join(RECORDS_FILE);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(io_err(&path)(e)),
    };
    Ok(parse_frames(&bytes))
}

fn parse_frames(bytes: &[u8]) -> LoadedRecords {
    let mut out = LoadedRecords::default();
    let mut pos = 0usize;
    let mut index = 0u64;
    while pos < bytes.len() {
        let Some(len_bytes) = bytes.get(pos..pos + 4) else {
            break;
        };
        let len = u32::from_be_bytes(len_bytes.try_into().expect("4 bytes")) as usize;
        let Some(frame) = bytes.get(pos + 4..pos + 4 + len) else {
            break;
        };
        match decode_record(frame) {
            Ok((sequence, prev_hash, entry_hash, envelope)) => out.records.push(ChainedRecord {
                sequence,
                prev_hash,
                entry_hash,
                envelope,
            }),
            Err(e) => out.corrupt.push(CorruptFrame {
                index,
                offset: pos as u64,
                reason: e.to_string(),
            }),
        }
        pos += 4 + len;
        index += 1;
    }
    out.valid_len = pos as u64;
    out.torn_tail = (bytes.len() - pos) as u64;
    out
}

pub fn encode_frame(record: &ChainedRecord) -> Result<Vec<u8>, StoreError> {
    let body = encode_record(
        record.sequence,
        &record.prev_hash,
        &record.entry_hash,
        &record.envelope,
    )
    .map_err(|e| StoreError::Unencodable(e.to_string()))?;
    let mut frame = Vec::with_capacity(4 + body.len());
    frame.extend_from_slice(&(body.len() as u32).to_be_bytes());
    frame.extend_from_slice(&body);
    Ok(frame)
}

/// Replaces the whole record file. Only the tamper tooling and tests use
/// this; the service itself never rewrites records.
pub fn rewrite_records(dir: &Path, records: &[ChainedRecord]) -> Result<(), StoreError> {
    let path = dir.join(RECORDS_FILE);
    let tmp = dir.join(format!("{RECORDS_FILE}.tmp"));
    let mut bytes = Vec::new();
    for record in records {
        bytes.extend(encode_frame(record)?);
    }
    fs::write(&tmp, &bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))
}

/// Append handle on `records.log`.
pub struct RecordFile {
    path: PathBuf,
    file: File,
    len: u64,
    fail_writes: AtomicBool,
}

impl RecordFile {
    /// Opens (creating if needed) the record file and loads every record.
    /// A torn tail left by an interrupted write is cut off.
    pub fn open(dir: &Path) -> Result<(RecordFile, LoadedRecords), StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join(RECORDS_FILE);
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(io_err(&path))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io_err(&path))?;
        let loaded = parse_frames(&bytes);
        if loaded.torn_tail > 0 {
            tracing::warn!(
                bytes = loaded.torn_tail,
                "discarding incomplete trailing frame from an interrupted write"
            );
            file.set_len(loaded.valid_len).map_err(io_err(&path))?;
            file.sync_data().map_err(io_err(&path))?;
        }
        let len = loaded.valid_len;
        Ok((
            RecordFile {
                path,
                file,
                len,
                fail_writes: AtomicBool::new(false),
            },
            loaded,
        ))
    }

    /// Writes one frame and flushes it to stable storage. On failure the
    /// file is cut back to its previous length.
    pub fn append(&mut self, record: &ChainedRecord) -> Result<(), StoreError> {
        let frame = encode_frame(record)?;
        if self.fail_writes.load(Ordering::SeqCst) {
            return Err(StoreError::Injected);
        }
        let result = self
            .file
            .write_all(&frame)
            .and_then(|()| self.file.sync_data());
        match result {
            Ok(()) => {
                self.len += frame.len() as u64;
                Ok(())
            }
            Err(e) => {
                let _ = self.file.set_len(self.len);
                Err(io_err(&self.path)(e))
            }
        }
    }

    pub fn set_fail_writes(&self, fail: bool) {
        self.fail_writes.store(fail, Ordering::SeqCst);
    }
}

pub fn read_tools(dir: &Path) -> Result<ToolRegistry, StoreError> {
    let path = dir.join(TOOLS_FILE);
    let mut registry = ToolRegistry::new();
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(registry),
        Err(e) => return Err(io_err(&path)(e)),
    };
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| StoreError::BadToolLine {
            path: path.clone(),
            line: idx + 1,
            message,
        };
        let identity: ToolIdentity =
            serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        registry.restore(identity).map_err(|e| bad(e.to_string()))?;
    }
    Ok(registry)
}

pub fn append_tool(dir: &Path, identity: &ToolIdentity) -> Result<(), StoreError> {
    let path = dir.join(TOOLS_FILE);
    let mut file = OpenOptions::new()
        .append(true)
        .create(true)
        .open(&path)
        .map_err(io_err(&path))?;
    let mut line = serde_json::to_vec(identity).expect("identity serializes");
    line.push(b'\n');
    file.write_all(&line)
        .and_then(|()| file.sync_data())
        .map_err(io_err(&path))
}
