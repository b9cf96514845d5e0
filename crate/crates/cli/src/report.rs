use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const TOOL: &str = "bcsgp";

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// A flat table destined for CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    fn to_csv(&self) -> csv::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

/// A run's JSON document and CSV tables.
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub seeds: Value,
    pub threads: usize,
    pub status: &'static str,
    pub exit_code: i32,
    pub error: Option<Value>,
    pub result: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, threads: usize) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            seeds: json!({ "mc": config.mc.seed }),
            threads,
            status: "ok",
            exit_code: 0,
            error: None,
            result: Value::Null,
            tables: Vec::new(),
        }
    }

    pub fn set_result<T: Serialize>(&mut self, result: &T) {
        self.result = serde_json::to_value(result).expect("results serialize");
    }

    pub fn fail(&mut self, exit_code: i32, kind: &str, message: String, extra: Value) {
        self.status = "error";
        self.exit_code = exit_code;
        let mut e = json!({ "kind": kind, "message": message });
        if let (Value::Object(m), Value::Object(x)) = (&mut e, extra) {
            m.extend(x);
        }
        self.error = Some(e);
    }

    pub fn document(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "status": self.status,
            "exit_code": self.exit_code,
            "error": self.error,
            "seeds": self.seeds,
            "threads": self.threads,
            "config": self.config,
            "result": self.result,
        })
    }

    /// Writes `<command>.json` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let stem = self.command.replace('-', "_");
        if self.config.output.json {
            let path = dir.join(format!("{stem}.json"));
            let mut text = serde_json::to_string_pretty(&self.document()).map_err(std::io::Error::other)?;
            text.push('\n');
            write_atomic(&path, text.as_bytes())?;
            written.push(path);
        }
        if self.config.output.csv {
            for t in &self.tables {
                let path = dir.join(format!("{}.csv", t.name));
                write_atomic(&path, &t.to_csv().map_err(std::io::Error::other)?)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn numbers_roundtrip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 1e300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), "");
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(["x,y".to_string(), "1.5".to_string()]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\n\"x,y\",1.5\n");
    }
}
