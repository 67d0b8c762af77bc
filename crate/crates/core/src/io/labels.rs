//! Label vocabulary document: `{schema, seg_names, obj_names}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::LabelMap;

use super::{read_bytes, write_bytes};

pub const LABELS_SCHEMA: &str = "semfeat.labels/1";

#[derive(Serialize, Deserialize)]
struct LabelsDoc {
    schema: String,
    seg_names: Vec<String>,
    obj_names: Vec<String>,
}

pub fn encode_labels(labels: &LabelMap) -> Vec<u8> {
    let doc = LabelsDoc {
        schema: LABELS_SCHEMA.into(),
        seg_names: labels.seg_names.clone(),
        obj_names: labels.obj_names.clone(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("label document serializes");
    out.push(b'\n');
    out
}

pub fn write_labels(path: impl AsRef<Path>, labels: &LabelMap) -> Result<()> {
    write_bytes(path.as_ref(), &encode_labels(labels))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    let doc: LabelsDoc = serde_json::from_slice(&read_bytes(path)?)
        .map_err(|e| Error::format(path, format!("invalid label document: {e}")))?;
    if doc.schema != LABELS_SCHEMA {
        return Err(Error::format(
            path,
            format!(
                "unsupported schema {:?}, expected {LABELS_SCHEMA}",
                doc.schema
            ),
        ));
    }
    LabelMap::new(doc.seg_names, doc.obj_names)
}
