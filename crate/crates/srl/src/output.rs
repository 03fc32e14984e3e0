//! CSV tables, atomic file writes and the run manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty cell for a missing value.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Writes to a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// First eight bytes of the SHA-256 digest, big-endian.
pub fn input_hash(bytes: &[u8]) -> u64 {
    let digest = Sha256::digest(bytes);
    u64::from_be_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    /// The budget ran out; the artifacts hold what was computed.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// [`input_hash`] as 16 hex digits.
    pub input_hash: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub status: Status,
    pub artifacts: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Collects the artifacts of one invocation and writes the manifest last.
pub struct Run {
    command: String,
    out: PathBuf,
    input_hash: u64,
    seed: Option<u64>,
    parameters: BTreeMap<String, String>,
    started: DateTime<Utc>,
    artifacts: Vec<String>,
}

impl Run {
    pub fn new(command: &str, out: &Path, input: &[u8]) -> Result<Self> {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Run {
            command: command.into(),
            out: out.to_path_buf(),
            input_hash: input_hash(input),
            seed: None,
            parameters: BTreeMap::new(),
            started: Utc::now(),
            artifacts: Vec::new(),
        })
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<()> {
        write_atomic(&self.out.join(name), &table.to_bytes()?)?;
        self.artifacts.push(name.into());
        Ok(())
    }

    pub fn finish(self, status: Status) -> Result<Status> {
        let stamp = |t: DateTime<Utc>| t.to_rfc3339_opts(SecondsFormat::Millis, true);
        let manifest = RunManifest {
            command: self.command,
            input_hash: format!("{:016x}", self.input_hash),
            seed: self.seed,
            parameters: self.parameters,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started: stamp(self.started),
            finished: stamp(Utc::now()),
            status,
            artifacts: self.artifacts,
        };
        let json = serde_json::to_string_pretty(&manifest)? + "\n";
        write_atomic(&self.out.join(MANIFEST_NAME), json.as_bytes())?;
        Ok(status)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1.618033988749895, f64::MAX, 5e-324] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn hash_is_prefix_of_sha256() {
        // sha256("abc") = ba7816bf8f01cfea...
        assert_eq!(input_hash(b"abc"), 0xba7816bf8f01cfea);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "x"]);
        t.push(vec!["1".into(), num(0.5)]);
        assert_eq!(t.to_bytes().unwrap(), b"n,x\n1,5.0000000000000000e-1\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
