use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objfeat::SfmParams;

/// Detections below this confidence are discarded at load time.
pub const DEFAULT_CONFIDENCE_THRESHOLD: f64 = 0.2;

/// Extraction and training parameters echoed into every output artifact.
///
/// Thread count and file paths are not recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seg_categories: u16,
    pub obj_categories: u32,
    pub bins: usize,
    pub rho: f64,
    pub conf_threshold: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sfm = SfmParams::default();
        RunConfig {
            seg_categories: 37,
            obj_categories: 80,
            bins: sfm.bins,
            rho: sfm.rho,
            conf_threshold: DEFAULT_CONFIDENCE_THRESHOLD,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn sfm_params(&self) -> SfmParams {
        SfmParams {
            bins: self.bins,
            rho: self.rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seg_categories == 0 {
            return Err(Error::Config(
                "segmentation category count must be positive".into(),
            ));
        }
        if self.obj_categories == 0 {
            return Err(Error::Config(
                "object category count must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.conf_threshold) {
            return Err(Error::Config(format!(
                "confidence threshold {} outside [0, 1]",
                self.conf_threshold
            )));
        }
        self.sfm_params().validate()
    }
}
