//! Small filesystem helpers shared by the file-format modules.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{GlowError, Result};

/// Write `contents` to `path` atomically: write a sibling temp file, then
/// rename over the target. Readers never observe a partially written file.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension()
            .and_then(|e| e.to_str())
            .unwrap_or("out"),
        std::process::id()
    ));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| GlowError::io(parent, e))?;
        }
    }
    let mut f = fs::File::create(&tmp).map_err(|e| GlowError::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| GlowError::io(&tmp, e))?;
    f.sync_all().map_err(|e| GlowError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| GlowError::io(path, e))?;
    Ok(())
}

/// Read a whole file into a string with a path-carrying error.
pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| GlowError::io(path, e))
}
