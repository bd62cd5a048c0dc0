//! Persistent on-disk cache of cohomology records and dominant spectra.
//!
//! One JSON file per entry, named by the SHA-256 of the full key (block,
//! family, weight, method, engine version). Entries are immutable and
//! checksummed; unreadable or stale entries are skipped with a warning and
//! recomputed. Writes go through a temp file and an atomic rename, so
//! concurrent runs sharing a cache directory cannot observe torn files.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use bgg_core::{BlockSpec, CohomologyRecord, RecordSource, Weight, ENGINE_VERSION};

pub struct DiskCache {
    dir: PathBuf,
    prefix: String,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    /// SHA-256 hex of the serialized payload.
    checksum: String,
    payload: Payload,
}

#[derive(Serialize, Deserialize)]
enum Payload {
    Record(CohomologyRecord),
    Spectrum(Vec<Weight>),
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn payload_checksum(p: &Payload) -> String {
    let ser = serde_json::to_vec(p).expect("payload serializes");
    hex(&Sha256::digest(&ser))
}

impl DiskCache {
    pub fn open(dir: &Path, block: &BlockSpec) -> std::io::Result<DiskCache> {
        std::fs::create_dir_all(dir)?;
        let prefix = format!(
            "{}{}|J={:?}|{}",
            block.series, block.rank, block.levi, ENGINE_VERSION
        );
        Ok(DiskCache {
            dir: dir.to_path_buf(),
            prefix,
        })
    }

    fn key(&self, j: usize, k: i64, lam: Option<&Weight>) -> String {
        match lam {
            Some(l) => format!("{}|j={j}|k={k}|lam={:?}|varpi", self.prefix, l.0),
            None => format!("{}|j={j}|k={k}|spectrum", self.prefix),
        }
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir
            .join(format!("{}.json", hex(&Sha256::digest(key.as_bytes()))))
    }

    fn read(&self, key: &str) -> Option<Payload> {
        let path = self.path_for(key);
        let text = std::fs::read_to_string(&path).ok()?;
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => {
                eprintln!(
                    "warning: discarding unreadable cache entry {}: {e}",
                    path.display()
                );
                return None;
            }
        };
        if entry.key != key || entry.checksum != payload_checksum(&entry.payload) {
            eprintln!(
                "warning: discarding corrupt or stale cache entry {}",
                path.display()
            );
            return None;
        }
        Some(entry.payload)
    }

    fn write(&self, key: &str, payload: Payload) {
        let entry = Entry {
            key: key.to_string(),
            checksum: payload_checksum(&payload),
            payload,
        };
        let bytes = match serde_json::to_vec_pretty(&entry) {
            Ok(b) => b,
            Err(_) => return,
        };
        let write = || -> std::io::Result<()> {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            tmp.write_all(&bytes)?;
            tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
            Ok(())
        };
        if let Err(e) = write() {
            eprintln!("warning: cache write failed for {key}: {e}");
        }
    }
}

impl RecordSource for DiskCache {
    fn get_record(&self, j: usize, k: i64, lam: &Weight) -> Option<CohomologyRecord> {
        match self.read(&self.key(j, k, Some(lam)))? {
            Payload::Record(r) => Some(r),
            Payload::Spectrum(_) => None,
        }
    }

    fn put_record(&self, j: usize, k: i64, lam: &Weight, rec: &CohomologyRecord) {
        self.write(&self.key(j, k, Some(lam)), Payload::Record(rec.clone()));
    }

    fn get_spectrum(&self, j: usize, k: i64) -> Option<Vec<Weight>> {
        match self.read(&self.key(j, k, None))? {
            Payload::Spectrum(s) => Some(s),
            Payload::Record(_) => None,
        }
    }

    fn put_spectrum(&self, j: usize, k: i64, lams: &[Weight]) {
        self.write(&self.key(j, k, None), Payload::Spectrum(lams.to_vec()));
    }
}
