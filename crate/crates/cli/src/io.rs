use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use toral_core::centralizer::GeneratorSet;
use toral_core::exact::ToralMatrix;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A matrix file (header `N`) or a generator-set file (header `n k`).
pub enum Input {
    Matrix(ToralMatrix),
    Set(GeneratorSet),
}

pub fn read_input(path: &Path) -> Result<Input> {
    let text = read(path)?;
    let header = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
    let ctx = || format!("parsing {}", path.display());
    if header.is_some_and(|h| h.split_whitespace().count() == 2) {
        Ok(Input::Set(GeneratorSet::parse(&text).with_context(ctx)?))
    } else {
        Ok(Input::Matrix(ToralMatrix::parse(&text).with_context(ctx)?))
    }
}

pub fn read_matrix(path: &Path) -> Result<ToralMatrix> {
    ToralMatrix::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON to `path`, or to stdout.
pub fn emit_json<T: Serialize>(report: &T, path: Option<&Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    match path {
        Some(p) => fs::write(p, s).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(s.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}
