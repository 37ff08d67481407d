use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::args::Format;

/// Routing of results: data to `-o` or stdout, notes to stderr.
pub struct Output {
    pub path: Option<PathBuf>,
    /// Format for the main result; inferred from the `-o` extension if not given.
    pub format: Format,
    explicit: Option<Format>,
    pub quiet: bool,
}

impl Output {
    pub fn new(path: Option<PathBuf>, explicit: Option<Format>, quiet: bool) -> Self {
        let format = explicit.unwrap_or_else(|| match path.as_deref().and_then(Path::extension) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Human,
        });
        Self { path, format, explicit, quiet }
    }

    /// Format of a summary printed next to an artifact file.
    pub fn summary_format(&self) -> Format {
        self.explicit.unwrap_or(Format::Human)
    }

    /// Tabular result: goes to `-o` when given, else stdout.
    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => write_file(p, text.as_bytes()),
            None => print(text),
        }
    }

    /// Summary accompanying an artifact written elsewhere.
    pub fn summary(&self, text: &str) -> Result<()> {
        if self.quiet {
            Ok(())
        } else {
            print(text)
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
