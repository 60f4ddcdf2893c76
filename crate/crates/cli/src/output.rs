//! All-or-nothing writing of a set of output files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Writes every `(file name, contents)` pair into `dir`.
///
/// Each file goes to a hidden temporary first; only when all temporaries
/// are written are they renamed into place. On failure the temporaries and
/// any files already renamed are removed, so no partial output is left.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(files.len());
    let mut placed = 0;
    let result = (|| {
        for (name, contents) in files {
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, contents).with_context(|| format!("cannot write {}", tmp.display()))?;
            staged.push((tmp, dir.join(name)));
        }
        for (tmp, dest) in &staged {
            fs::rename(tmp, dest).with_context(|| format!("cannot create {}", dest.display()))?;
            placed += 1;
        }
        Ok(())
    })();
    if result.is_err() {
        for (i, (tmp, dest)) in staged.iter().enumerate() {
            let _ = fs::remove_file(if i < placed { dest } else { tmp });
        }
    }
    result
}
