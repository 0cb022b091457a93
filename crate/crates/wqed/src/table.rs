//! Column-ordered result tables and their CSV, JSON and gnuplot renderings.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value as Json};

use crate::config::Format;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Num(v) => format!("{v:e}"),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Empty => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Num(v) => Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Int(v) => Json::from(*v),
            Value::Text(s) => Json::from(s.as_str()),
            Value::Bool(b) => Json::from(*b),
            Value::Empty => Json::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Numeric column as `f64`, skipping nothing; `None` if absent.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let col = self.column(name)?;
        Some(
            col.into_iter()
                .map(|v| match v {
                    Value::Num(x) => *x,
                    Value::Int(x) => *x as f64,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    /// Fails on the first NaN or infinite entry.
    pub fn check_finite(&self) -> Result<()> {
        for row in &self.rows {
            for (name, v) in self.columns.iter().zip(row) {
                if let Value::Num(x) = v {
                    if !x.is_finite() {
                        return Err(CliError::NonFinite(name.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        self.check_finite()?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io { path: PathBuf::from("<csv>"), source: e.into() };
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::csv_field)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io { path: PathBuf::from("<csv>"), source: e.into_error() })
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        self.check_finite()?;
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Json> = self.columns.iter().cloned().zip(row.iter().map(Value::json)).collect();
                Json::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&Json::Array(rows)).expect("JSON values are always serializable");
        out.push(b'\n');
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Gnuplot script plotting every numeric column against the first one.
    pub fn gnuplot_script(&self, data_file: &Path) -> String {
        let name = data_file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let numeric: Vec<usize> = (1..self.columns.len())
            .filter(|&i| self.rows.first().is_some_and(|r| matches!(r[i], Value::Num(_))))
            .collect();
        let mut s = String::new();
        s.push_str("set datafile separator ','\nset key autotitle columnhead\n");
        s.push_str(&format!("set xlabel '{}'\n", self.columns.first().map_or("", String::as_str)));
        if numeric.is_empty() {
            return s;
        }
        let plots: Vec<String> = numeric.iter().map(|i| format!("'{name}' using 1:{} with lines", i + 1)).collect();
        s.push_str("plot ");
        s.push_str(&plots.join(", \\\n     "));
        s.push('\n');
        s
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes the table and, for CSV with `plot`, a `.gp` script next to it.
/// Returns the paths written.
pub fn write_table(table: &Table, path: &Path, format: Format, plot: bool) -> Result<Vec<PathBuf>> {
    let bytes = table.render(format)?;
    write_atomic(path, &bytes)?;
    let mut written = vec![path.to_path_buf()];
    if plot && format == Format::Csv {
        let script = path.with_extension("gp");
        write_atomic(&script, table.gnuplot_script(path).as_bytes())?;
        written.push(script);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "y", "label"]);
        t.push(vec![1.0.into(), 0.5.into(), "a".into()]);
        t.push(vec![2.0.into(), Value::Empty, "b,c".into()]);
        t
    }

    #[test]
    fn csv_dialect() {
        let text = String::from_utf8(sample().to_csv().unwrap()).unwrap();
        assert_eq!(text, "x,y,label\n1e0,5e-1,a\n2e0,,\"b,c\"\n");
    }

    #[test]
    fn csv_numbers_round_trip() {
        let mut t = Table::new(&["v"]);
        for v in [0.1, 1.0 / 3.0, 1e-300, 6.02e23] {
            t.push(vec![v.into()]);
        }
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let back: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
        assert_eq!(back, t.numbers("v").unwrap());
    }

    #[test]
    fn json_preserves_column_order() {
        let text = String::from_utf8(sample().to_json().unwrap()).unwrap();
        let v: Json = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["x", "y", "label"]);
        assert!(v[1]["y"].is_null());
    }

    #[test]
    fn non_finite_is_refused() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0.into(), f64::NAN.into()]);
        let err = t.to_csv().unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("`b`"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        let written = write_table(&sample(), &path, Format::Csv, true).unwrap();
        assert_eq!(written.len(), 2);
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("x,y,label\n"));
        let script = std::fs::read_to_string(path.with_extension("gp")).unwrap();
        assert!(script.contains("'out.csv' using 1:2"));
    }
}
