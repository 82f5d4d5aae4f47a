//! CSV tables and JSON reports with a provenance header.

use serde_json::Value;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

fn fmt_cell(c: &Cell, out: &mut String) {
    match c {
        // shortest round-trip form
        Cell::F(v) if v.is_nan() => out.push_str("nan"),
        Cell::F(v) if v.is_infinite() => out.push_str(if *v > 0.0 { "inf" } else { "-inf" }),
        Cell::F(v) => write!(out, "{:?}", v).unwrap(),
        Cell::I(v) => write!(out, "{}", v).unwrap(),
        Cell::S(s) => out.push_str(s),
        Cell::B(b) => out.push_str(if *b { "1" } else { "0" }),
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    /// File stem, e.g. `lyapunov` or `wspectrum_measure`.
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, provenance: &str) -> String {
        let mut s = String::new();
        s.push_str(provenance);
        s.push('\n');
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            for (i, c) in r.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                fmt_cell(c, &mut s);
            }
            s.push('\n');
        }
        s
    }
}

/// Everything one run produces.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub report: Value,
    pub tables: Vec<Table>,
}

impl Artifacts {
    pub fn new(report: Value) -> Self {
        Artifacts { report, tables: Vec::new() }
    }

    pub fn with(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }
}

pub fn provenance(subcommand: &str, hash: &str) -> String {
    format!("# stdmap {} {} config-sha256={}", VERSION, subcommand, hash)
}

/// JSON report wrapped with the provenance fields.
pub fn report_json(subcommand: &str, hash: &str, config: &Value, report: &Value) -> String {
    let v = serde_json::json!({
        "stdmap_version": VERSION,
        "subcommand": subcommand,
        "config_sha256": hash,
        "config": config,
        "report": report,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

/// JSON has no NaN or infinity: `NaN`/`±inf` become `"nan"`/`"inf"`/`"-inf"` strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn write_all(dir: &Path, subcommand: &str, hash: &str, config: &Value, a: &Artifacts) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let prov = provenance(subcommand, hash);
    let mut written = Vec::new();
    for t in &a.tables {
        let p = dir.join(format!("{}.csv", t.name));
        std::fs::File::create(&p)?.write_all(t.render(&prov).as_bytes())?;
        written.push(p);
    }
    let p = dir.join(format!("{}.json", subcommand));
    std::fs::File::create(&p)?.write_all(report_json(subcommand, hash, config, &a.report).as_bytes())?;
    written.push(p);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rendering() {
        let mut t = Table::new("x", &["a", "b", "c", "d"]);
        t.push(vec![Cell::F(0.1), Cell::I(3), Cell::F(f64::NAN), Cell::B(true)]);
        t.push(vec![Cell::F(1.0), Cell::I(-1), Cell::F(f64::NEG_INFINITY), Cell::S("z".into())]);
        assert_eq!(t.render("# p"), "# p\na,b,c,d\n0.1,3,nan,1\n1.0,-1,-inf,z\n");
    }

    #[test]
    fn floats_round_trip() {
        let v = 0.1f64 + 0.2;
        let mut s = String::new();
        fmt_cell(&Cell::F(v), &mut s);
        assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn non_finite_json() {
        assert_eq!(num(f64::NAN), Value::from("nan"));
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(num(2.5), serde_json::json!(2.5));
    }

    #[test]
    fn provenance_is_one_comment_line() {
        let p = provenance("bounds", "ab");
        assert!(p.starts_with('#') && !p.contains('\n') && p.contains("config-sha256=ab"));
    }
}
