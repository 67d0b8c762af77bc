//! Feature documents. Any subset of the SHMF, SSF, SFV, SFM and global
//! blocks may be present; absent blocks are `null`. Reals are hex floats.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bundle::{FeatureBundle, FeatureShape};
use crate::config::RunConfig;
use crate::error::{Error, Result};

use super::{hex_vec, hexfloat, parse_hex_vec, read_bytes, write_bytes};

pub const FEATURES_SCHEMA: &str = "semfeat.features/1";

/// Parameters the blocks were extracted with.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionParams {
    pub image_width: usize,
    pub image_height: usize,
    pub bins: usize,
    pub rho: f64,
    pub conf_threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRecord {
    pub shape: FeatureShape,
    pub params: ExtractionParams,
    pub config: Option<RunConfig>,
    pub shmf: Option<Vec<[f64; 7]>>,
    pub ssf: Option<Vec<[f64; 5]>>,
    pub sfv: Option<Vec<u32>>,
    pub sfm: Option<Vec<u32>>,
    pub global: Option<Vec<f64>>,
}

impl FeatureRecord {
    pub fn from_bundle(
        bundle: &FeatureBundle,
        params: ExtractionParams,
        config: Option<RunConfig>,
    ) -> Self {
        FeatureRecord {
            shape: bundle.shape,
            params,
            config,
            shmf: Some(bundle.shmf.clone()),
            ssf: Some(bundle.ssf.clone()),
            sfv: Some(bundle.sfv.clone()),
            sfm: Some(bundle.sfm.clone()),
            global: bundle.global.clone(),
        }
    }

    /// Full bundle; every non-global block must be present.
    pub fn to_bundle(&self) -> Result<FeatureBundle> {
        let missing = |block: &str| Error::Config(format!("feature block {block} is absent"));
        Ok(FeatureBundle {
            shape: self.shape,
            shmf: self.shmf.clone().ok_or_else(|| missing("shmf"))?,
            ssf: self.ssf.clone().ok_or_else(|| missing("ssf"))?,
            sfv: self.sfv.clone().ok_or_else(|| missing("sfv"))?,
            sfm: self.sfm.clone().ok_or_else(|| missing("sfm"))?,
            global: self.global.clone(),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureDoc {
    schema: String,
    shape: FeatureShape,
    params: ParamsDoc,
    config: Option<ConfigDoc>,
    shmf: Option<Vec<Vec<String>>>,
    ssf: Option<Vec<Vec<String>>>,
    sfv: Option<Vec<u32>>,
    sfm: Option<Vec<u32>>,
    global: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    image_width: usize,
    image_height: usize,
    bins: usize,
    rho: String,
    conf_threshold: String,
    log_base: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ConfigDoc {
    seg_categories: u16,
    obj_categories: u32,
    bins: usize,
    rho: String,
    conf_threshold: String,
    seed: u64,
}

impl ConfigDoc {
    pub(crate) fn from_config(c: &RunConfig) -> Self {
        ConfigDoc {
            seg_categories: c.seg_categories,
            obj_categories: c.obj_categories,
            bins: c.bins,
            rho: hexfloat::format(c.rho),
            conf_threshold: hexfloat::format(c.conf_threshold),
            seed: c.seed,
        }
    }

    pub(crate) fn to_config(&self, path: &Path) -> Result<RunConfig> {
        let real = |field: &str, s: &str| {
            hexfloat::parse(s).ok_or_else(|| {
                Error::format(path, format!("config.{field}: malformed hex float {s:?}"))
            })
        };
        Ok(RunConfig {
            seg_categories: self.seg_categories,
            obj_categories: self.obj_categories,
            bins: self.bins,
            rho: real("rho", &self.rho)?,
            conf_threshold: real("conf_threshold", &self.conf_threshold)?,
            seed: self.seed,
        })
    }
}

const LOG_BASE: &str = "e";

pub fn encode_features(record: &FeatureRecord) -> Vec<u8> {
    let rows = |rows: &[&[f64]]| rows.iter().map(|r| hex_vec(r)).collect::<Vec<_>>();
    let doc = FeatureDoc {
        schema: FEATURES_SCHEMA.into(),
        shape: record.shape,
        params: ParamsDoc {
            image_width: record.params.image_width,
            image_height: record.params.image_height,
            bins: record.params.bins,
            rho: hexfloat::format(record.params.rho),
            conf_threshold: hexfloat::format(record.params.conf_threshold),
            log_base: LOG_BASE.into(),
        },
        config: record.config.as_ref().map(ConfigDoc::from_config),
        shmf: record
            .shmf
            .as_ref()
            .map(|m| rows(&m.iter().map(|r| &r[..]).collect::<Vec<_>>())),
        ssf: record
            .ssf
            .as_ref()
            .map(|m| rows(&m.iter().map(|r| &r[..]).collect::<Vec<_>>())),
        sfv: record.sfv.clone(),
        sfm: record.sfm.clone(),
        global: record.global.as_deref().map(hex_vec),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("feature document serializes");
    out.push(b'\n');
    out
}

pub fn write_features(path: impl AsRef<Path>, record: &FeatureRecord) -> Result<()> {
    write_bytes(path.as_ref(), &encode_features(record))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureRecord> {
    let path = path.as_ref();
    decode_features(&read_bytes(path)?, path)
}

pub fn decode_features(bytes: &[u8], path: &Path) -> Result<FeatureRecord> {
    let doc: FeatureDoc = serde_json::from_slice(bytes)
        .map_err(|e| Error::format(path, format!("invalid feature document: {e}")))?;
    let bad = |reason: String| Error::format(path, reason);
    if doc.schema != FEATURES_SCHEMA {
        return Err(bad(format!(
            "unsupported schema {:?}, expected {FEATURES_SCHEMA}",
            doc.schema
        )));
    }
    if doc.params.log_base != LOG_BASE {
        return Err(bad(format!(
            "params.log_base {:?} is not supported",
            doc.params.log_base
        )));
    }
    let shape = doc.shape;
    if doc.params.bins != shape.bins {
        return Err(bad(format!(
            "shape.bins {} disagrees with params.bins {}",
            shape.bins, doc.params.bins
        )));
    }

    fn matrix<const C: usize>(
        path: &Path,
        block: &str,
        rows: Option<&Vec<Vec<String>>>,
        expected_rows: usize,
    ) -> Result<Option<Vec<[f64; C]>>> {
        let Some(rows) = rows else { return Ok(None) };
        if rows.len() != expected_rows {
            return Err(Error::format(
                path,
                format!(
                    "shape.seg_categories is {expected_rows} but {block} has {} rows",
                    rows.len()
                ),
            ));
        }
        rows.iter()
            .enumerate()
            .map(|(r, row)| {
                let values = parse_hex_vec(path, &format!("{block}[{r}]"), row)?;
                <[f64; C]>::try_from(values).map_err(|v| {
                    Error::format(
                        path,
                        format!("{block}[{r}] has {} columns, expected {C}", v.len()),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    let shmf = matrix::<7>(path, "shmf", doc.shmf.as_ref(), shape.seg_categories)?;
    let ssf = matrix::<5>(path, "ssf", doc.ssf.as_ref(), shape.seg_categories)?;
    if let Some(v) = &doc.sfv {
        if v.len() != shape.sfv_len() {
            return Err(bad(format!(
                "shape.obj_categories is {} but sfv has {} entries",
                shape.obj_categories,
                v.len()
            )));
        }
    }
    if let Some(m) = &doc.sfm {
        if m.len() != shape.sfm_len() {
            return Err(bad(format!(
                "shape.obj_categories/shape.bins imply {} sfm entries, found {}",
                shape.sfm_len(),
                m.len()
            )));
        }
    }
    let global = match &doc.global {
        Some(g) => {
            if g.len() != shape.global {
                return Err(bad(format!(
                    "shape.global is {} but global has {} entries",
                    shape.global,
                    g.len()
                )));
            }
            Some(parse_hex_vec(path, "global", g)?)
        }
        None if shape.global > 0 => {
            return Err(bad(format!(
                "shape.global is {} but the global block is absent",
                shape.global
            )))
        }
        None => None,
    };
    let real = |field: &str, s: &str| {
        hexfloat::parse(s).ok_or_else(|| {
            Error::format(path, format!("params.{field}: malformed hex float {s:?}"))
        })
    };
    Ok(FeatureRecord {
        shape,
        params: ExtractionParams {
            image_width: doc.params.image_width,
            image_height: doc.params.image_height,
            bins: doc.params.bins,
            rho: real("rho", &doc.params.rho)?,
            conf_threshold: real("conf_threshold", &doc.params.conf_threshold)?,
        },
        config: doc.config.as_ref().map(|c| c.to_config(path)).transpose()?,
        shmf,
        ssf,
        sfv: doc.sfv,
        sfm: doc.sfm,
        global,
    })
}
