//! On-disk catalog of biplanes keyed by canonical certificate.
//!
//! Layout: one directory per entry, named by the certificate digest, holding
//! `matrix.txt` and `meta.json`; `index.json` at the root lists all entries.
//! Writes go to a temporary name first and are renamed into place, and a
//! `.lock` file serializes concurrent writers.

use std::fs::{self, File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::thread::sleep;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::autgroup::{analyze, Certificate};
use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::params::BiplaneParams;

/// Environment variable naming the default catalog directory.
pub const CATALOG_ENV: &str = "BIPLANE_CATALOG";
const DEFAULT_DIR: &str = "biplane-catalog";
const MATRIX_FILE: &str = "matrix.txt";
const META_FILE: &str = "meta.json";
const INDEX_FILE: &str = "index.json";
const LOCK_FILE: &str = ".lock";
const LOCK_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub invariant: String,
    pub config_digest: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Provenance {
    pub fn now(invariant: &str, config_digest: &str) -> Self {
        Provenance {
            invariant: invariant.to_string(),
            config_digest: config_digest.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

/// sha256 of the JSON form of a search configuration.
pub fn config_digest<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("serializable config");
    hex::encode(Sha256::digest(json))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub certificate: Certificate,
    pub digest: String,
    pub params: BiplaneParams,
    pub aut_order: u128,
    pub trace: usize,
    pub symmetric: bool,
    pub provenance: Provenance,
    /// Relative to the catalog root.
    pub matrix_path: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub digest: String,
    pub order: usize,
    pub aut_order: u128,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityReport {
    pub checked: usize,
    pub problems: Vec<String>,
}

impl IntegrityReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    root: PathBuf,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl Catalog {
    /// Opens (creating if needed) the catalog at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Catalog { root })
    }

    /// The directory named by the environment, else `./biplane-catalog`.
    pub fn default_path() -> PathBuf {
        std::env::var_os(CATALOG_ENV).map_or_else(|| PathBuf::from(DEFAULT_DIR), PathBuf::from)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn lock(&self) -> Result<LockGuard> {
        let path = self.root.join(LOCK_FILE);
        let start = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(LockGuard(path)),
                Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                    if start.elapsed() > LOCK_TIMEOUT {
                        return Err(Error::Catalog(format!(
                            "catalog locked: remove {} if no other process is running",
                            path.display()
                        )));
                    }
                    sleep(Duration::from_millis(50));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    pub fn index(&self) -> Result<Vec<IndexEntry>> {
        match fs::read_to_string(self.root.join(INDEX_FILE)) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn write_index(&self, mut index: Vec<IndexEntry>) -> Result<()> {
        index.sort_by(|a, b| a.digest.cmp(&b.digest));
        index.dedup_by(|a, b| a.digest == b.digest);
        write_atomic(
            &self.root.join(INDEX_FILE),
            serde_json::to_string_pretty(&index)?.as_bytes(),
        )
    }

    pub fn contains(&self, digest: &str) -> bool {
        self.root.join(digest).join(META_FILE).is_file()
    }

    /// Adds `m` unless its isomorphism class is already present. Returns the
    /// stored entry and whether it was new.
    pub fn insert(&self, m: &IncidenceMatrix, provenance: Provenance) -> Result<(CatalogEntry, bool)> {
        m.verify()
            .map_err(|v| Error::Catalog(format!("refusing to store a non-biplane: {v}")))?;
        let a = analyze(m);
        let digest = a.certificate.digest();
        let _lock = self.lock()?;
        if self.contains(&digest) {
            return Ok((self.entry(&digest)?, false));
        }
        let entry = CatalogEntry {
            certificate: a.certificate,
            digest: digest.clone(),
            params: m.params(),
            aut_order: a.aut.group_order,
            trace: m.trace(),
            symmetric: m.is_symmetric(),
            provenance,
            matrix_path: format!("{digest}/{MATRIX_FILE}"),
        };
        let tmp = self.root.join(format!(".{digest}.tmp"));
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir(&tmp)?;
        fs::write(tmp.join(MATRIX_FILE), m.to_text())?;
        fs::write(tmp.join(META_FILE), serde_json::to_string_pretty(&entry)?)?;
        fs::rename(&tmp, self.root.join(&digest))?;
        let mut index = self.index()?;
        index.push(IndexEntry {
            digest,
            order: entry.params.order,
            aut_order: entry.aut_order,
        });
        self.write_index(index)?;
        Ok((entry, true))
    }

    pub fn entry(&self, digest: &str) -> Result<CatalogEntry> {
        let text = fs::read_to_string(self.root.join(digest).join(META_FILE))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn load_matrix(&self, entry: &CatalogEntry) -> Result<IncidenceMatrix> {
        IncidenceMatrix::from_text(&fs::read_to_string(self.root.join(&entry.matrix_path))?)
    }

    /// All entries, by digest.
    pub fn entries(&self) -> Result<Vec<CatalogEntry>> {
        let mut out = Vec::new();
        for d in fs::read_dir(&self.root)? {
            let d = d?;
            let name = d.file_name().to_string_lossy().into_owned();
            if d.file_type()?.is_dir() && !name.starts_with('.') {
                out.push(self.entry(&name)?);
            }
        }
        out.sort_by(|a, b| a.digest.cmp(&b.digest));
        Ok(out)
    }

    /// Re-verifies every stored matrix, its certificate and group order, and
    /// the index.
    pub fn check(&self) -> Result<IntegrityReport> {
        let mut report = IntegrityReport::default();
        let mut dirs = Vec::new();
        for d in fs::read_dir(&self.root)? {
            let d = d?;
            let name = d.file_name().to_string_lossy().into_owned();
            if d.file_type()?.is_dir() && !name.starts_with('.') {
                dirs.push(name);
            }
        }
        dirs.sort();
        for name in &dirs {
            report.checked += 1;
            let entry = match self.entry(name) {
                Ok(e) => e,
                Err(e) => {
                    report.problems.push(format!("{name}: unreadable metadata: {e}"));
                    continue;
                }
            };
            let m = match self.load_matrix(&entry) {
                Ok(m) => m,
                Err(e) => {
                    report.problems.push(format!("{name}: unreadable matrix: {e}"));
                    continue;
                }
            };
            if let Err(v) = m.verify() {
                report.problems.push(format!("{name}: not a biplane: {v}"));
                continue;
            }
            let a = analyze(&m);
            if a.certificate != entry.certificate {
                report.problems.push(format!("{name}: certificate does not recompute"));
            }
            if a.certificate.digest() != *name || entry.digest != *name {
                report.problems.push(format!("{name}: digest does not match directory"));
            }
            if a.aut.group_order != entry.aut_order {
                report.problems.push(format!(
                    "{name}: stored |Aut| {} but recomputed {}",
                    entry.aut_order, a.aut.group_order
                ));
            }
        }
        let mut indexed: Vec<String> = self.index()?.into_iter().map(|e| e.digest).collect();
        indexed.sort();
        if indexed != dirs {
            report.problems.push("index does not list exactly the stored entries".into());
        }
        Ok(report)
    }
}
