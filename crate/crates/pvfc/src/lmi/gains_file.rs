//! Flat `key = value` text format for synthesized gains.
//!
//! Matrix entries are written as `name.row.col`; `#` starts a comment.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::fmt::Write as _;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GainsFile {
    entries: Vec<(String, f64)>,
    comments: Vec<String>,
}

impl GainsFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn set(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        let key = key.into();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => *v = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn set_matrix(&mut self, name: &str, m: &DMatrix<f64>) -> &mut Self {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.set(format!("{name}.{i}.{j}"), m[(i, j)]);
            }
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn require(&self, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("gains file lacks `{key}`")))
    }

    pub fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.require(&format!("{name}.{i}.{j}"))?;
            }
        }
        Ok(m)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = GainsFile::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("gains line {}: expected `key = value`", n + 1))
            })?;
            let key = k.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Config(format!(
                    "gains line {}: bad key `{key}`",
                    n + 1
                )));
            }
            let value: f64 = v.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "gains line {}: `{}` is not a number",
                    n + 1,
                    v.trim()
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Config(format!(
                    "gains line {}: non-finite value",
                    n + 1
                )));
            }
            out.set(key, value);
        }
        Ok(out)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v:e}");
        }
        s
    }
}
