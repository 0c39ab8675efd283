//! Reproducible output files.
//!
//! Every CSV starts with one `# config_hash=<sha256> seed=<u64>` line and every
//! JSON summary carries the same two fields. Nothing time- or host-dependent
//! is written, so rerunning a config reproduces its files byte for byte.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dataset::fmt_f64;
use crate::error::{CliError, Result};

/// SHA-256 of the compact JSON encoding of `cfg`, hex encoded.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn provenance_line(hash: &str, seed: u64) -> String {
    format!("# config_hash={hash} seed={seed}\n")
}

/// In-memory CSV with the provenance line, written in one go.
pub struct CsvOut {
    buf: Vec<u8>,
}

impl CsvOut {
    pub fn new<S: AsRef<str>>(hash: &str, seed: u64, header: &[S]) -> Self {
        let mut out = CsvOut {
            buf: provenance_line(hash, seed).into_bytes(),
        };
        out.push_raw(header.iter().map(|s| s.as_ref().to_owned()));
        out
    }

    fn push_raw(&mut self, fields: impl IntoIterator<Item = String>) {
        let mut wtr = csv::Writer::from_writer(&mut self.buf);
        wtr.write_record(fields).expect("writing to memory");
        wtr.flush().expect("writing to memory");
    }

    pub fn row(&mut self, values: &[f64]) {
        self.push_raw(values.iter().map(|&v| fmt_f64(v)));
    }

    /// A row whose first field is an integer index.
    pub fn indexed_row(&mut self, index: usize, values: &[f64]) {
        self.push_raw(std::iter::once(index.to_string()).chain(values.iter().map(|&v| fmt_f64(v))));
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.buf)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    write_file(path, s.as_bytes())
}
