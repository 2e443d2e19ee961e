//! Deterministic CSV tables and run summaries.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

/// Values recorded in the comment line of every CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub config_hash: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub xi: Option<f64>,
    pub delta: Option<f64>,
    pub psi: String,
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), num)
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl RunMeta {
    pub fn comment(&self) -> String {
        format!(
            "# config_hash={} alpha={} beta={} gamma={} xi={} delta={} psi={}",
            self.config_hash,
            num(self.alpha),
            opt(self.beta),
            opt(self.gamma),
            opt(self.xi),
            opt(self.delta),
            self.psi
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Num(f64),
    Int(usize),
    Text(&'a str),
}

impl From<f64> for Cell<'_> {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell<'_> {
    fn from(x: usize) -> Self {
        Cell::Int(x)
    }
}

impl<'a> From<&'a str> for Cell<'a> {
    fn from(x: &'a str) -> Self {
        Cell::Text(x)
    }
}

#[derive(Debug, Clone)]
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(meta: &RunMeta, header: &[&str]) -> Self {
        Self::with_columns(meta, header.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_columns(meta: &RunMeta, header: Vec<String>) -> Self {
        let text = format!("{}\n{}\n", meta.comment(), header.join(","));
        Self { text, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) {
        debug_assert_eq!(cells.len(), self.columns);
        for (k, c) in cells.iter().enumerate() {
            if k > 0 {
                self.text.push(',');
            }
            match c {
                Cell::Num(x) => self.text.push_str(&num(*x)),
                Cell::Int(i) => write!(self.text, "{i}").unwrap(),
                Cell::Text(s) => self.text.push_str(s),
            }
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<(), CliError> {
        write_file(dir, name, &self.text)
    }
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let io = |path: &Path, source| CliError::Io { path: path.display().to_string(), source };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io(&path, e))
}

/// `key: value` lines, printed and saved at the end of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    lines: Vec<String>,
}

impl Summary {
    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    pub fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let meta = RunMeta {
            config_hash: "abc".into(),
            alpha: 0.5,
            beta: None,
            gamma: Some(1.0),
            xi: None,
            delta: Some(2.0),
            psi: "identity".into(),
        };
        let mut t = CsvTable::new(&meta, &["t", "value"]);
        t.row(&[0.1.into(), Cell::Text("x")]);
        let lines: Vec<_> = t.as_str().lines().collect();
        assert_eq!(
            lines[0],
            "# config_hash=abc alpha=5.0000000000000000e-1 beta=- gamma=1.0000000000000000e0 xi=- delta=2.0000000000000000e0 psi=identity"
        );
        assert_eq!(lines[1], "t,value");
        assert_eq!(lines[2], "1.0000000000000001e-1,x");
        assert!(!t.as_str().contains('\r'));
    }
}
