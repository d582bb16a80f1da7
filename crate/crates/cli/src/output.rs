use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Writes `text` to `path` through a temporary file in the same directory, or to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return Ok(out.flush()?);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("cannot move output into {}", path.display()))?;
    Ok(())
}

/// Checks that the output directory exists before any computation starts.
pub fn check_target(path: Option<&Path>) -> Result<()> {
    if let Some(dir) = path.and_then(Path::parent).filter(|d| !d.as_os_str().is_empty()) {
        anyhow::ensure!(dir.is_dir(), "output directory {} does not exist", dir.display());
    }
    Ok(())
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Self { buf: format!("{}\n", columns.join(",")) }
    }

    /// Starts with a `# {...}` metadata line.
    pub fn with_meta(meta: &serde_json::Value, columns: &[&str]) -> Self {
        Self { buf: format!("# {meta}\n{}\n", columns.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
