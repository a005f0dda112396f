//! Write-once cache of oracle values, one file per `(variant, d, p, e)`.

use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use hnlab_core::curves::HkTable;

pub struct HkCache {
    dir: PathBuf,
}

impl HkCache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn path(&self, variant: &str, d: u64, p: u64, e: u32) -> PathBuf {
        self.dir.join(format!("hk-{variant}-d{d}-p{p}-e{e}.json"))
    }

    pub fn get(&self, variant: &str, d: u64, p: u64, e: u32) -> Option<u64> {
        let text = fs::read_to_string(self.path(variant, d, p, e)).ok()?;
        let table: HkTable = serde_json::from_str(&text).ok()?;
        let key_matches = table.variant == variant && table.d == d && table.p == p;
        key_matches.then(|| table.entries.get(&e).copied()).flatten()
    }

    /// Stores a value unless the entry already exists.
    pub fn put(&self, variant: &str, d: u64, p: u64, e: u32, value: u64) -> std::io::Result<()> {
        let mut table = HkTable::new(d, p, variant);
        table.entries.insert(e, value);
        let body = serde_json::to_string(&table).map_err(std::io::Error::other)?;
        match OpenOptions::new().write(true).create_new(true).open(self.path(variant, d, p, e)) {
            Ok(mut f) => f.write_all(body.as_bytes()),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Ok(()),
            Err(e) => Err(e),
        }
    }
}
