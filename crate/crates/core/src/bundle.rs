//! Flattened fusion input: SHMF, SSF, SFV, SFM and an optional external
//! global embedding, concatenated in a fixed order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::ShmfMatrix;
use crate::objfeat::{Sfm, Sfv};
use crate::ssf::SsfMatrix;

/// Dataset-wide block dimensions `(L, N, K, G)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureShape {
    pub seg_categories: usize,
    pub obj_categories: usize,
    pub bins: usize,
    /// Length of the global block; 0 when absent.
    pub global: usize,
}

impl FeatureShape {
    pub fn shmf_len(&self) -> usize {
        7 * self.seg_categories
    }

    pub fn ssf_len(&self) -> usize {
        5 * self.seg_categories
    }

    pub fn sfv_len(&self) -> usize {
        self.obj_categories
    }

    pub fn sfm_len(&self) -> usize {
        self.obj_categories * self.obj_categories * self.bins
    }

    pub fn flat_len(&self) -> usize {
        self.shmf_len() + self.ssf_len() + self.sfv_len() + self.sfm_len() + self.global
    }

    /// Length of the flattened vector restricted to `groups`.
    pub fn selected_len(&self, groups: FeatureGroups) -> usize {
        let mut len = 0;
        if groups.segmentation {
            len += self.shmf_len() + self.ssf_len();
        }
        if groups.object {
            len += self.sfv_len() + self.sfm_len();
        }
        if groups.global {
            len += self.global;
        }
        len
    }
}

/// Which feature groups enter a flattened vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroups {
    /// SHMF + SSF.
    pub segmentation: bool,
    /// SFV + SFM.
    pub object: bool,
    pub global: bool,
}

impl FeatureGroups {
    pub const ALL: FeatureGroups = FeatureGroups {
        segmentation: true,
        object: true,
        global: true,
    };
    pub const SEGMENTATION: FeatureGroups = FeatureGroups {
        segmentation: true,
        object: false,
        global: false,
    };
    pub const OBJECT: FeatureGroups = FeatureGroups {
        segmentation: false,
        object: true,
        global: false,
    };
    pub const SEMANTIC: FeatureGroups = FeatureGroups {
        segmentation: true,
        object: true,
        global: false,
    };

    /// Parses `sb`, `ob`, `global` joined by `+`, e.g. `sb+ob`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = FeatureGroups {
            segmentation: false,
            object: false,
            global: false,
        };
        for part in text.split('+').map(str::trim) {
            match part {
                "sb" => g.segmentation = true,
                "ob" => g.object = true,
                "global" => g.global = true,
                "all" => g = FeatureGroups::ALL,
                other => return Err(Error::Config(format!("unknown feature group {other:?}"))),
            }
        }
        if !(g.segmentation || g.object || g.global) {
            return Err(Error::Config("no feature group selected".into()));
        }
        Ok(g)
    }
}

impl std::fmt::Display for FeatureGroups {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<&str> = [
            (self.segmentation, "sb"),
            (self.object, "ob"),
            (self.global, "global"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        f.write_str(&parts.join("+"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureBundle {
    pub shape: FeatureShape,
    pub shmf: Vec<[f64; 7]>,
    pub ssf: Vec<[f64; 5]>,
    pub sfv: Vec<u32>,
    /// `(i, j, k)` lexicographic.
    pub sfm: Vec<u32>,
    pub global: Option<Vec<f64>>,
}

/// Assembles a bundle, checking every block against `shape`.
pub fn build_bundle(
    shape: FeatureShape,
    shmf: &ShmfMatrix,
    ssf: &SsfMatrix,
    sfv: &Sfv,
    sfm: &Sfm,
    global: Option<&[f64]>,
) -> Result<FeatureBundle> {
    let check = |block: &str, expected: usize, found: usize| {
        if expected == found {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                block: block.into(),
                expected,
                found,
            })
        }
    };
    check("shmf", shape.seg_categories, shmf.categories())?;
    check("ssf", shape.seg_categories, ssf.categories())?;
    check("sfv", shape.obj_categories, sfv.counts.len())?;
    check("sfm categories", shape.obj_categories, sfm.categories)?;
    check("sfm bins", shape.bins, sfm.bins)?;
    check("global", shape.global, global.map_or(0, <[f64]>::len))?;
    Ok(FeatureBundle {
        shape,
        shmf: shmf.rows.clone(),
        ssf: ssf.rows.clone(),
        sfv: sfv.counts.clone(),
        sfm: sfm.counts.clone(),
        global: global.map(<[f64]>::to_vec),
    })
}

impl FeatureBundle {
    /// All-zero bundle of the given shape.
    pub fn zeros(shape: FeatureShape) -> Self {
        FeatureBundle {
            shape,
            shmf: vec![[0.0; 7]; shape.seg_categories],
            ssf: vec![[0.0; 5]; shape.seg_categories],
            sfv: vec![0; shape.sfv_len()],
            sfm: vec![0; shape.sfm_len()],
            global: (shape.global > 0).then(|| vec![0.0; shape.global]),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.flatten_groups(FeatureGroups::ALL)
    }

    /// SHMF rows, SSF rows, SFV, SFM, global; skipping unselected groups.
    pub fn flatten_groups(&self, groups: FeatureGroups) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.shape.selected_len(groups));
        if groups.segmentation {
            out.extend(self.shmf.iter().flatten());
            out.extend(self.ssf.iter().flatten());
        }
        if groups.object {
            out.extend(self.sfv.iter().map(|&c| c as f64));
            out.extend(self.sfm.iter().map(|&c| c as f64));
        }
        if groups.global {
            if let Some(g) = &self.global {
                out.extend_from_slice(g);
            }
        }
        out
    }

    /// Inverse of [`FeatureBundle::flatten`].
    pub fn unflatten(shape: FeatureShape, flat: &[f64]) -> Result<Self> {
        if flat.len() != shape.flat_len() {
            return Err(Error::ShapeMismatch {
                block: "bundle".into(),
                expected: shape.flat_len(),
                found: flat.len(),
            });
        }
        let (shmf_part, rest) = flat.split_at(shape.shmf_len());
        let (ssf_part, rest) = rest.split_at(shape.ssf_len());
        let (sfv_part, rest) = rest.split_at(shape.sfv_len());
        let (sfm_part, global_part) = rest.split_at(shape.sfm_len());
        let count = |block: &str, v: f64| -> Result<u32> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::Config(format!("{block} entry {v} is not a count")))
            }
        };
        Ok(FeatureBundle {
            shape,
            shmf: shmf_part
                .chunks_exact(7)
                .map(|c| c.try_into().unwrap())
                .collect(),
            ssf: ssf_part
                .chunks_exact(5)
                .map(|c| c.try_into().unwrap())
                .collect(),
            sfv: sfv_part
                .iter()
                .map(|&v| count("sfv", v))
                .collect::<Result<_>>()?,
            sfm: sfm_part
                .iter()
                .map(|&v| count("sfm", v))
                .collect::<Result<_>>()?,
            global: (shape.global > 0).then(|| global_part.to_vec()),
        })
    }
}
