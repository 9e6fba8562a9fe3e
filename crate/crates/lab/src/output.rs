//! CSV and SVG artifacts with a provenance header.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Who produced an artifact: tool version, command, seed and a hash of the full configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub command: String,
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, config: &impl Serialize) -> Self {
        let bytes = serde_json::to_vec(config).expect("configurations serialize");
        let digest = Sha256::digest(&bytes);
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            command: command.into(),
            seed,
            config_hash,
        }
    }

    pub fn header(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!(
            "majorana-lab {VERSION} command={} seed={seed} config=sha256:{}",
            self.command, self.config_hash
        )
    }
}

/// A named output file held in memory until written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Shortest representation that parses back to the same f64.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// CSV table whose first line is `# <provenance header>`.
pub struct CsvTable {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.headers.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, provenance: &Provenance) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().context("flushing CSV")?)?;
        Ok(format!("# {}\r\n{body}", provenance.header()))
    }

    pub fn artifact(&self, name: &str, provenance: &Provenance) -> Result<Artifact> {
        Ok(Artifact {
            name: name.into(),
            contents: self.render(provenance)?,
        })
    }
}

/// Reads a CSV written by [`CsvTable`], skipping the provenance line.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let body: String = text
        .split_inclusive('\n')
        .filter(|l| !l.starts_with('#'))
        .collect();
    let mut r = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let headers = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok((headers, rows))
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
