//! CSV tables with `#`-prefixed manifest headers, and their JSON form.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Rational,
    Float64,
    Integer,
    String,
}

impl ColumnType {
    pub fn name(self) -> &'static str {
        match self {
            ColumnType::Rational => "rational",
            ColumnType::Float64 => "float64",
            ColumnType::Integer => "integer",
            ColumnType::String => "string",
        }
    }
}

/// Provenance of an emitted table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: Vec<(String, String)>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            inputs: Vec::new(),
            parameters: Vec::new(),
            version: format!("kstab {}", env!("CARGO_PKG_VERSION")),
        }
    }

    pub fn input(mut self, path: impl Into<String>) -> Self {
        self.inputs.push(path.into());
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub manifest: RunManifest,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<String>>,
}

/// Floats print in Rust's shortest round-trip form.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

impl Table {
    pub fn new(manifest: RunManifest, columns: &[(&str, ColumnType)]) -> Self {
        Table {
            manifest,
            columns: columns.iter().map(|(n, k)| Column { name: (*n).into(), kind: *k }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!("row has {} cells, table has {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.manifest.command));
        for i in &self.manifest.inputs {
            out.push_str(&format!("# input: {i}\n"));
        }
        for (k, v) in &self.manifest.parameters {
            out.push_str(&format!("# param: {k}={v}\n"));
        }
        out.push_str(&format!("# version: {}\n", self.manifest.version));
        let types: Vec<String> = self.columns.iter().map(|c| format!("{}:{}", c.name, c.kind.name())).collect();
        out.push_str(&format!("# columns: {}\n", types.join(",")));
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("tables always serialize");
        s.push('\n');
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_and_rows() {
        let mut t = Table::new(RunManifest::new("invariants").input("a.json").param("k", 4), &[("name", ColumnType::String), ("value", ColumnType::Rational)]);
        t.push(vec!["b0".into(), "1/2".into()]).unwrap();
        assert!(t.push(vec!["x".into()]).is_err());
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("# command: invariants\n# input: a.json\n# param: k=4\n# version: kstab "));
        assert!(csv.ends_with("# columns: name:string,value:rational\nname,value\nb0,1/2\n"));
        assert!(t.to_json().contains("\"type\": \"rational\""));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(1.0), "1.0");
    }
}
