//! Number formatting and atomic file output.
//!
//! CSV numbers carry 17 significant digits so files round-trip doubles
//! exactly; human-readable stdout uses 6 decimal places. Files are staged
//! in a temporary sibling and renamed into place.

use std::io;
use std::path::Path;

/// Round-trippable formatting for CSV cells.
pub fn full(value: f64) -> String {
    format!("{value:.16e}")
}

/// Stdout formatting.
pub fn human(value: f64) -> String {
    format!("{value:.6}")
}

/// Writes via a temporary file in the destination directory, then renames.
pub fn write_atomic<F>(path: &Path, fill: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn io::Write) -> io::Result<()>,
{
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut staged = tempfile::NamedTempFile::new_in(dir)?;
    {
        use io::Write;
        let mut writer = io::BufWriter::new(staged.as_file_mut());
        fill(&mut writer)?;
        writer.flush()?;
    }
    staged.persist(path).map_err(|e| e.error)?;
    Ok(())
}
