//! Output location and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dscale_core::SweepTable;

use crate::cli::Format;

pub const OUT_DIR_ENV: &str = "DSCALE_OUT_DIR";

/// `--out`, or `<dir>/<subcommand>.<ext>` where dir is `--out` if it is a
/// directory, else `$DSCALE_OUT_DIR`, else the working directory.
pub fn resolve_path(out: Option<&Path>, subcommand: &str, format: Format) -> PathBuf {
    let file = format!("{subcommand}.{}", format.extension());
    match out {
        Some(p) if p.is_dir() => p.join(file),
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")).join(file),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot create a file in '{}'", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write '{}'", path.display()))?;
    Ok(())
}

/// `<dir>/<stem>.<suffix>` next to the main output.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Main table, plot files and (when needed) the errors sidecar; returns the
/// paths written.
pub fn emit(table: &SweepTable, format: Format, path: &Path, plots: &[(&str, &str)]) -> Result<Vec<PathBuf>> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    write_atomic(path, &body)?;
    let mut written = vec![path.to_path_buf()];
    for (x, y) in plots {
        let p = sibling(path, &format!("{y}_vs_{x}.dat"));
        write_atomic(&p, &table.plot_data(x, y)?)?;
        written.push(p);
    }
    let sidecar = sibling(path, "errors.csv");
    if table.errors().is_empty() {
        if sidecar.exists() {
            std::fs::remove_file(&sidecar).with_context(|| format!("cannot remove stale '{}'", sidecar.display()))?;
        }
    } else {
        write_atomic(&sidecar, &table.errors_sidecar())?;
        written.push(sidecar);
    }
    Ok(written)
}
