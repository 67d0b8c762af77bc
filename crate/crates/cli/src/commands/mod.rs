pub mod bench;
pub mod extract;
pub mod invariance;
pub mod learn;
pub mod synth;

use std::path::{Path, PathBuf};

use anyhow::Context;

/// Prints `report` and, when asked, writes the same bytes to `out`.
pub fn emit(report: &str, out: Option<&Path>) -> anyhow::Result<()> {
    print!("{report}");
    if let Some(path) = out {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        std::fs::write(path, report).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Directory holding `manifest`, against which its paths are resolved.
pub fn base_dir(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}
