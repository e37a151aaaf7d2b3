//! Output directory handling: CSV tables, JSON documents, snapshots and the run manifest.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use hartree_core::{spectral, Error, FourierField, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// One CSV cell; floats are written with 17 significant digits.
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.written.push(name.to_string());
        Ok(p)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.path(name)?).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(Error::Numerical(format!("{name}: row width {} does not match the header", row.len())));
            }
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let f = BufWriter::new(File::create(self.path(name)?)?);
        serde_json::to_writer_pretty(f, value).map_err(io)
    }

    pub fn snapshot(&mut self, name: &str, u: &FourierField) -> Result<()> {
        let f = BufWriter::new(File::create(self.path(name)?)?);
        spectral::write_snapshot(u, f)
    }

    pub fn manifest(mut self, subcommand: &str, config: &Value, threads: usize, wall: f64) -> Result<()> {
        let canonical = serde_json::to_string(config).map_err(io)?;
        let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
        let doc = json!({
            "subcommand": subcommand,
            "config": config,
            "config_sha256": hash,
            "seed": config.get("seed"),
            "versions": { "hp43": env!("CARGO_PKG_VERSION"), "hartree-core": hartree_core::VERSION },
            "threads": threads,
            "wall_time_seconds": wall,
            "outputs": self.written,
        });
        let f = BufWriter::new(File::create(self.dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(f, &doc).map_err(io)?;
        self.written.push("manifest.json".into());
        Ok(())
    }
}
