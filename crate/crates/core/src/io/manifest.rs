//! Dataset manifest: one tab-separated record per sample.
//!
//! Column order: `id split class class_name seed mask detections occluded`.
//! Paths are relative to the manifest's directory. Lines starting with `#`
//! are comments; the first line names the schema.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{read_bytes, write_bytes};

pub const MANIFEST_SCHEMA: &str = "# semfeat.manifest/1";
pub const MANIFEST_COLUMNS: &str =
    "# id\tsplit\tclass\tclass_name\tseed\tmask\tdetections\toccluded";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub split: Split,
    pub class: usize,
    pub class_name: String,
    pub seed: u64,
    pub mask: PathBuf,
    /// `None` when the sample has no detection file (`-`).
    pub detections: Option<PathBuf>,
    /// Rendered shapes with a detection whose pixels were fully overwritten.
    pub occluded: usize,
}

pub fn encode_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = format!("{MANIFEST_SCHEMA}\n{MANIFEST_COLUMNS}\n");
    for e in entries {
        let det = e
            .detections
            .as_ref()
            .map_or_else(|| "-".to_string(), |p| p.display().to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.id,
            e.split.as_str(),
            e.class,
            e.class_name,
            e.seed,
            e.mask.display(),
            det,
            e.occluded
        )
        .unwrap();
    }
    out
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    write_bytes(path.as_ref(), encode_manifest(entries).as_bytes())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = String::from_utf8(read_bytes(path)?)
        .map_err(|_| Error::format(path, "manifest is not UTF-8"))?;
    decode_manifest(&text, path)
}

pub fn decode_manifest(text: &str, path: &Path) -> Result<Vec<ManifestEntry>> {
    let mut lines = text.lines();
    if lines.next() != Some(MANIFEST_SCHEMA) {
        return Err(Error::format(
            path,
            format!("first line must be {MANIFEST_SCHEMA:?}"),
        ));
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate().map(|(i, l)| (i + 2, l)) {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::format(path, format!("line {lineno}: {reason}"));
        let cols: Vec<&str> = line.split('\t').collect();
        let [id, split, class, class_name, seed, mask, detections, occluded] = cols[..] else {
            return Err(bad(format!(
                "expected 8 tab-separated columns, found {}",
                cols.len()
            )));
        };
        entries.push(ManifestEntry {
            id: id.to_string(),
            split: split.parse().map_err(bad)?,
            class: class
                .parse()
                .map_err(|_| bad(format!("class {class:?} is not an index")))?,
            class_name: class_name.to_string(),
            seed: seed
                .parse()
                .map_err(|_| bad(format!("seed {seed:?} is not an integer")))?,
            mask: PathBuf::from(mask),
            detections: (detections != "-").then(|| PathBuf::from(detections)),
            occluded: occluded
                .parse()
                .map_err(|_| bad(format!("occluded {occluded:?} is not a count")))?,
        });
    }
    Ok(entries)
}
