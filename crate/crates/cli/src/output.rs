//! Table and JSON emission. Every file carries the run manifest; floats in
//! CSV use 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::Cell::from($x)),*] };
}

pub struct Emitter {
    dir: PathBuf,
    format: Format,
    manifest: Value,
    written: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(dir: &Path, format: Format, manifest: Value) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let e = Emitter { dir: dir.to_path_buf(), format, manifest, written: Vec::new() };
        Ok(e)
    }

    fn write(&mut self, name: &str, contents: String) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn manifest(&mut self) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        self.write("manifest.json", text)
    }

    /// Writes `stem.csv` (comment header with the manifest, then a header row)
    /// or `stem.json` (`{manifest, columns, rows}`).
    pub fn table(&mut self, stem: &str, columns: &[&str], rows: &[Vec<Cell>]) -> anyhow::Result<()> {
        match self.format {
            Format::Csv => {
                let mut out = format!("# manifest: {}\n", serde_json::to_string(&self.manifest)?);
                out += &columns.join(",");
                out.push('\n');
                for r in rows {
                    debug_assert_eq!(r.len(), columns.len());
                    out += &r.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
                    out.push('\n');
                }
                self.write(&format!("{stem}.csv"), out)
            }
            Format::Json => {
                let rows: Vec<Value> = rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let doc = json!({ "manifest": self.manifest, "columns": columns, "rows": rows });
                self.write(&format!("{stem}.json"), serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }

    /// Writes `{manifest, result}` to `name.json`.
    pub fn summary(&mut self, name: &str, result: &impl Serialize) -> anyhow::Result<()> {
        let doc = json!({ "manifest": self.manifest, "result": result });
        self.write(&format!("{name}.json"), serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
