//! Persisted synthetic datasets.
//!
//! Layout under the output directory:
//! `manifest.tsv`, `labels.json`, `masks/<id>.pgm`, `detections/<id>.json`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::{write_detections, write_labels, write_manifest, write_mask, ManifestEntry, Split};
use crate::types::LabelMap;

use super::{derive_seed, generate_scene, SceneConfig, SceneTemplate};

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetConfig {
    pub scene: SceneConfig,
    /// One template per class, in class-index order.
    pub templates: Vec<SceneTemplate>,
    pub labels: LabelMap,
    pub train: usize,
    pub test: usize,
    pub seed: u64,
}

pub fn sample_id(index: usize) -> String {
    format!("s{index:05}")
}

/// Generates every sample and writes the dataset under `out_dir`.
///
/// Sample `k` belongs to class `k mod C` and uses seed
/// `derive_seed(config.seed, k)`; the first `train` samples form the
/// training split. Returns the manifest entries in sample order.
pub fn generate_dataset(
    config: &DatasetConfig,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<ManifestEntry>> {
    let out_dir = out_dir.as_ref();
    let classes = config.templates.len();
    if classes < 2 {
        return Err(Error::Config(format!(
            "a dataset needs at least 2 templates, got {classes}"
        )));
    }
    if config.labels.seg_categories() != config.scene.seg_categories
        || config.labels.obj_categories() != config.scene.obj_categories
    {
        return Err(Error::Config(format!(
            "label vocabularies ({}, {}) do not match the scene configuration ({}, {})",
            config.labels.seg_categories(),
            config.labels.obj_categories(),
            config.scene.seg_categories,
            config.scene.obj_categories
        )));
    }
    for t in &config.templates {
        t.validate(config.scene.seg_categories, config.scene.obj_categories)?;
    }

    let total = config.train + config.test;
    let entries = (0..total)
        .into_par_iter()
        .map(|k| {
            let class = k % classes;
            let template = &config.templates[class];
            let seed = derive_seed(config.seed, k as u64);
            let scene = generate_scene(template, &config.scene, seed)?;
            let id = sample_id(k);
            let mask = PathBuf::from("masks").join(format!("{id}.pgm"));
            let detections = PathBuf::from("detections").join(format!("{id}.json"));
            write_mask(out_dir.join(&mask), &scene.mask)?;
            write_detections(out_dir.join(&detections), &scene.detections)?;
            Ok(ManifestEntry {
                id,
                split: if k < config.train {
                    Split::Train
                } else {
                    Split::Test
                },
                class,
                class_name: template.name.clone(),
                seed,
                mask,
                detections: Some(detections),
                occluded: scene.occluded,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    write_labels(out_dir.join("labels.json"), &config.labels)?;
    write_manifest(out_dir.join("manifest.tsv"), &entries)?;
    Ok(entries)
}
