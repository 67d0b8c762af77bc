//! Detection documents:
//!
//! ```json
//! { "schema": "semfeat.detections/1", "image_width": 640, "image_height": 480,
//!   "obj_categories": 80,
//!   "detections": [ { "category": 57, "bbox": [10.0, 20.0, 110.0, 220.0], "confidence": 0.83 },
//!                   { "category": "tv", "bbox": [...], "confidence": 0.4 } ] }
//! ```
//!
//! Categories are 1-based indices or names resolved through a [`LabelMap`].

use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::types::{BoundingBox, Detection, DetectionSet, LabelMap};

use super::{read_bytes, write_bytes};

pub const DETECTIONS_SCHEMA: &str = "semfeat.detections/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionDoc {
    schema: String,
    image_width: usize,
    image_height: usize,
    obj_categories: u32,
    detections: Vec<Value>,
}

#[derive(Serialize)]
struct RecordOut {
    category: u32,
    bbox: [f64; 4],
    confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDetections {
    pub set: DetectionSet,
    /// Records below the confidence threshold.
    pub dropped: usize,
    /// Records whose boxes were clamped into the frame.
    pub clamped: usize,
}

pub fn load_detections(
    path: impl AsRef<Path>,
    confidence_threshold: f64,
    labels: Option<&LabelMap>,
) -> Result<LoadedDetections> {
    let path = path.as_ref();
    parse_detections(&read_bytes(path)?, confidence_threshold, labels, path)
}

/// Decodes a detection document, dropping records with confidence below
/// `confidence_threshold`.
pub fn parse_detections(
    bytes: &[u8],
    confidence_threshold: f64,
    labels: Option<&LabelMap>,
    path: &Path,
) -> Result<LoadedDetections> {
    let doc: DetectionDoc = serde_json::from_slice(bytes)
        .map_err(|e| Error::format(path, format!("invalid detection document: {e}")))?;
    if doc.schema != DETECTIONS_SCHEMA {
        return Err(Error::format(
            path,
            format!(
                "unsupported schema {:?}, expected {DETECTIONS_SCHEMA}",
                doc.schema
            ),
        ));
    }
    if let Some(labels) = labels {
        if labels.obj_categories() != doc.obj_categories {
            return Err(Error::format(
                path,
                format!(
                    "obj_categories {} disagrees with label map ({})",
                    doc.obj_categories,
                    labels.obj_categories()
                ),
            ));
        }
    }
    let (w, h) = (doc.image_width as f64, doc.image_height as f64);
    let mut kept = Vec::new();
    let (mut dropped, mut clamped) = (0, 0);
    for (index, value) in doc.detections.iter().enumerate() {
        let record = parse_record(value, labels)
            .map_err(|reason| Error::format(path, format!("record {index}: {reason}")))?;
        if record.confidence < confidence_threshold {
            dropped += 1;
            continue;
        }
        let (bbox, moved) = record.bbox.clamp_to(w, h);
        if moved {
            warn!(
                "{}: record {index}: box clamped into {}x{} frame",
                path.display(),
                doc.image_width,
                doc.image_height
            );
            clamped += 1;
        }
        kept.push(Detection { bbox, ..record });
    }
    let set = DetectionSet::new(kept, doc.image_width, doc.image_height, doc.obj_categories)
        .map_err(|e| Error::format(path, e.to_string()))?;
    Ok(LoadedDetections {
        set,
        dropped,
        clamped,
    })
}

fn parse_record(
    value: &Value,
    labels: Option<&LabelMap>,
) -> std::result::Result<Detection, String> {
    let obj = value.as_object().ok_or("expected an object")?;
    if let Some(extra) = obj
        .keys()
        .find(|k| !matches!(k.as_str(), "category" | "bbox" | "confidence"))
    {
        return Err(format!("unknown field {extra:?}"));
    }
    let category = match obj.get("category").ok_or("missing category")? {
        Value::Number(n) => {
            n.as_u64()
                .filter(|&c| c >= 1 && c <= u32::MAX as u64)
                .ok_or_else(|| format!("category {n} is not a positive index"))? as u32
        }
        Value::String(name) => labels
            .ok_or_else(|| format!("category name {name:?} needs a label map"))?
            .obj_index(name)
            .ok_or_else(|| format!("unknown category name {name:?}"))?,
        _ => return Err("category must be an index or a name".into()),
    };
    let bbox: Vec<f64> = obj
        .get("bbox")
        .and_then(Value::as_array)
        .ok_or("missing bbox array")?
        .iter()
        .map(|v| v.as_f64().ok_or("bbox entries must be numbers"))
        .collect::<std::result::Result<_, _>>()?;
    let [x_min, y_min, x_max, y_max] = bbox[..] else {
        return Err(format!("bbox needs 4 numbers, found {}", bbox.len()));
    };
    let bbox = BoundingBox::new(x_min, y_min, x_max, y_max);
    if !bbox.is_ordered() {
        return Err("bbox corners are inverted".into());
    }
    let confidence = obj
        .get("confidence")
        .and_then(Value::as_f64)
        .ok_or("missing confidence")?;
    if !(0.0..=1.0).contains(&confidence) {
        return Err(format!("confidence {confidence} outside [0, 1]"));
    }
    Ok(Detection {
        category,
        bbox,
        confidence,
    })
}

pub fn encode_detections(set: &DetectionSet) -> Vec<u8> {
    let doc = DetectionDoc {
        schema: DETECTIONS_SCHEMA.into(),
        image_width: set.image_width(),
        image_height: set.image_height(),
        obj_categories: set.categories(),
        detections: set
            .detections()
            .iter()
            .map(|d| {
                serde_json::to_value(RecordOut {
                    category: d.category,
                    bbox: [d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max],
                    confidence: d.confidence,
                })
                .expect("detection records serialize")
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("detection document serializes");
    out.push(b'\n');
    out
}

pub fn write_detections(path: impl AsRef<Path>, set: &DetectionSet) -> Result<()> {
    write_bytes(path.as_ref(), &encode_detections(set))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(records: &str) -> Vec<u8> {
        format!(
            r#"{{"schema": "semfeat.detections/1", "image_width": 100, "image_height": 50,
                "obj_categories": 3, "detections": [{records}]}}"#
        )
        .into_bytes()
    }

    const THREE: &str = r#"
        {"category": 1, "bbox": [0, 0, 10, 10], "confidence": 0.1},
        {"category": 2, "bbox": [5, 5, 20, 20], "confidence": 0.3},
        {"category": 3, "bbox": [50, 10, 60, 40], "confidence": 0.9}"#;

    #[test]
    fn threshold_drops_low_confidence() {
        let loaded = parse_detections(&doc(THREE), 0.2, None, Path::new("d.json")).unwrap();
        assert_eq!(loaded.set.len(), 2);
        assert_eq!(loaded.dropped, 1);
        let all = parse_detections(&doc(THREE), 0.0, None, Path::new("d.json")).unwrap();
        assert_eq!(all.set.len(), 3);
    }

    #[test]
    fn empty_record_list() {
        let loaded = parse_detections(&doc(""), 0.2, None, Path::new("d.json")).unwrap();
        assert!(loaded.set.is_empty());
        assert_eq!(loaded.dropped, 0);
    }

    #[test]
    fn names_resolve_through_labels() {
        let labels =
            LabelMap::new(vec![], vec!["chair".into(), "tv".into(), "bed".into()]).unwrap();
        let bytes = doc(r#"{"category": "tv", "bbox": [1, 1, 2, 2], "confidence": 0.5}"#);
        let loaded = parse_detections(&bytes, 0.2, Some(&labels), Path::new("d.json")).unwrap();
        assert_eq!(loaded.set.detections()[0].category, 2);
        let err = parse_detections(&bytes, 0.2, None, Path::new("d.json")).unwrap_err();
        assert!(err.to_string().contains("record 0"), "{err}");
    }

    #[test]
    fn schema_violations_name_the_record() {
        let bytes = doc(r#"{"category": 1, "bbox": [0, 0, 1, 1], "confidence": 0.5},
                          {"category": 9, "bbox": [0, 0, 1, 1], "confidence": 0.5}"#);
        let err = parse_detections(&bytes, 0.2, None, Path::new("d.json")).unwrap_err();
        assert!(err.to_string().contains("detection 1"), "{err}");
        let bytes = doc(r#"{"category": 1, "bbox": [0, 0, 1], "confidence": 0.5}"#);
        let err = parse_detections(&bytes, 0.2, None, Path::new("d.json")).unwrap_err();
        assert!(err.to_string().contains("record 0"), "{err}");
        let wrong = br#"{"schema": "other/2", "image_width": 1, "image_height": 1, "obj_categories": 1, "detections": []}"#;
        assert!(parse_detections(wrong, 0.2, None, Path::new("d.json")).is_err());
    }

    #[test]
    fn boxes_clamped_into_frame() {
        let bytes = doc(r#"{"category": 1, "bbox": [-5, 10, 120, 60], "confidence": 0.5}"#);
        let loaded = parse_detections(&bytes, 0.2, None, Path::new("d.json")).unwrap();
        assert_eq!(loaded.clamped, 1);
        assert_eq!(
            loaded.set.detections()[0].bbox,
            BoundingBox::new(0.0, 10.0, 100.0, 50.0)
        );
    }

    #[test]
    fn encode_then_parse() {
        let loaded = parse_detections(&doc(THREE), 0.0, None, Path::new("d.json")).unwrap();
        let again = parse_detections(
            &encode_detections(&loaded.set),
            0.0,
            None,
            Path::new("e.json"),
        )
        .unwrap();
        assert_eq!(again.set, loaded.set);
    }
}
