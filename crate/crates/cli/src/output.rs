use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use moran_core::table::Table;
use sha2::{Digest, Sha256};

use crate::config::{hex, RunConfig};

/// Files written during one run, in order, for the manifest.
pub struct Artifacts {
    dir: PathBuf,
    header: String,
    written: Vec<(String, usize, String)>,
}

impl Artifacts {
    pub fn new(dir: &Path, config: &RunConfig) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut header = format!("# moran {}\n", env!("CARGO_PKG_VERSION"));
        for line in config.canonical().lines() {
            header.push_str("# ");
            header.push_str(line);
            header.push('\n');
        }
        header.push_str(&format!("# config_sha256 = {}\n", config.hash()));
        Ok(Artifacts { dir: dir.to_path_buf(), header, written: Vec::new() })
    }

    fn store(&mut self, name: &str, bytes: Vec<u8>, rows: usize) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push((name.to_string(), rows, hex(&Sha256::digest(&bytes))));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(self.header.clone().into_bytes());
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("flushing {name}: {e}"))?;
        self.store(name, bytes, table.rows.len())
    }

    pub fn text(&mut self, name: &str, body: &str) -> anyhow::Result<()> {
        let bytes = format!("{}{body}", self.header).into_bytes();
        self.store(name, bytes, body.lines().count())
    }

    /// Writes `manifest.txt`: the resolved config, then one line per artifact.
    pub fn finish(self, config: &RunConfig) -> anyhow::Result<PathBuf> {
        let mut m = String::new();
        m.push_str(&format!("command = {}\n", config.command));
        m.push_str(&format!("config_sha256 = {}\n", config.hash()));
        m.push_str("\n[config]\n");
        m.push_str(&config.canonical());
        m.push_str("\n[artifacts]\n");
        for (name, rows, digest) in &self.written {
            m.push_str(&format!("{name} rows={rows} sha256={digest}\n"));
        }
        let path = self.dir.join("manifest.txt");
        fs::write(&path, m).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
