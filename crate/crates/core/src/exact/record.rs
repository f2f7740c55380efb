//! Flat result records and an append-only cache file of them.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{InvariantKind, InvariantResult, UpperBoundProof};
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, ZSequence};

/// One exact result as a single line of JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Canonical group literal, e.g. `2,4`.
    pub group: String,
    pub invariant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub value: u64,
    pub certificate: Vec<Vec<u128>>,
    pub nodes: u64,
    pub millis: u64,
    pub upper_bound: UpperBoundProof,
}

impl ResultRecord {
    pub fn key(&self) -> (String, String, Option<u32>) {
        (self.group.clone(), self.invariant.clone(), self.m)
    }

    pub fn kind(&self) -> Result<InvariantKind> {
        InvariantKind::from_parts(&self.invariant, self.m)
    }

    /// Rebuilds the typed result; fails if the group literal or certificate
    /// do not parse.
    pub fn to_result(&self) -> Result<InvariantResult> {
        let group: GroupDescriptor = self.group.parse()?;
        let elements = self
            .certificate
            .iter()
            .map(|c| {
                let coords: Vec<i128> = c.iter().map(|&x| x as i128).collect();
                group.element(&coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InvariantResult {
            kind: self.kind()?,
            value: self.value,
            certificate: ZSequence::new(elements),
            nodes_explored: self.nodes,
            elapsed: Duration::from_millis(self.millis),
            upper_bound: self.upper_bound.clone(),
            group,
        })
    }
}

impl From<&InvariantResult> for ResultRecord {
    fn from(r: &InvariantResult) -> Self {
        ResultRecord {
            group: r.group.to_string(),
            invariant: r.kind.name().to_string(),
            m: r.kind.m(),
            value: r.value,
            certificate: r.certificate.elements().iter().map(|e| e.coords().to_vec()).collect(),
            nodes: r.nodes_explored,
            millis: r.elapsed.as_millis() as u64,
            upper_bound: r.upper_bound.clone(),
        }
    }
}

/// Line-delimited cache keyed by `(group, invariant, m)`. New results are
/// appended; unreadable lines are skipped and reported in
/// [`ResultCache::warnings`].
#[derive(Debug)]
pub struct ResultCache {
    path: PathBuf,
    entries: HashMap<(String, String, Option<u32>), ResultRecord>,
    warnings: Vec<String>,
}

impl ResultCache {
    /// Loads `path`, treating a missing file as an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = ResultCache {
            path,
            entries: HashMap::new(),
            warnings: Vec::new(),
        };
        let file = match File::open(&cache.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(io_error(&cache.path, e)),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_error(&cache.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<ResultRecord>(&line) {
                Ok(rec) => {
                    cache.entries.insert(rec.key(), rec);
                }
                Err(e) => cache
                    .warnings
                    .push(format!("{}:{}: skipping unreadable cache line: {e}", cache.path.display(), i + 1)),
            }
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, group: &GroupDescriptor, kind: InvariantKind) -> Option<&ResultRecord> {
        self.entries
            .get(&(group.to_string(), kind.name().to_string(), kind.m()))
    }

    pub fn insert(&mut self, record: ResultRecord) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| io_error(&self.path, e))?;
        let line = serde_json::to_string(&record).expect("records always serialize");
        writeln!(file, "{line}").map_err(|e| io_error(&self.path, e))?;
        self.entries.insert(record.key(), record);
        Ok(())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}
