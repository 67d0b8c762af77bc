//! On-disk formats: PGM masks, JSON detection/feature/model documents and
//! the tab-separated dataset manifest.
//!
//! Every document carries a `schema` field; readers reject unknown versions
//! and inconsistent metadata instead of repairing them.

pub mod detections;
pub mod features;
pub mod hexfloat;
pub mod labels;
pub mod manifest;
pub mod model;
pub mod pgm;

pub use detections::{load_detections, parse_detections, write_detections, LoadedDetections};
pub use features::{read_features, write_features, ExtractionParams, FeatureRecord};
pub use labels::{read_labels, write_labels};
pub use manifest::{read_manifest, write_manifest, ManifestEntry, Split};
pub use model::{read_model, write_model};
pub use pgm::{load_mask, parse_pgm, write_mask, write_mask_plain};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn hex_vec(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| hexfloat::format(v)).collect()
}

pub(crate) fn parse_hex_vec(path: &Path, field: &str, values: &[String]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(i, s)| {
            hexfloat::parse(s).ok_or_else(|| {
                Error::format(path, format!("{field}[{i}]: malformed hex float {s:?}"))
            })
        })
        .collect()
}
