//! CSV emission: every file carries one `#` comment line recording the full
//! parameterization, then a header row. Numbers are written with `{}` so
//! reruns under the same seed are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, params_comment: &str, header: &[&str]) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file =
            File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "# {params_comment}")?;
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn row_f64(&mut self, fields: &[f64]) -> Result<()> {
        let fields: Vec<String> = fields.iter().map(|x| x.to_string()).collect();
        self.row(&fields)
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Read one float per line, skipping blanks, `#` comments and a single
/// non-numeric header line.
pub fn read_floats(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    let mut header_allowance = 1;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // tolerate a trailing comma column (e.g. "wait," from exports)
        let field = line.split(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(x) => out.push(x),
            Err(_) if header_allowance > 0 => header_allowance -= 1,
            Err(e) => anyhow::bail!("bad value `{line}` in {}: {e}", path.display()),
        }
    }
    Ok(out)
}
