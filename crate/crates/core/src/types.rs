//! Domain types shared by every feature family.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported mask side. Keeps the per-row moment sums inside `u64`.
pub const MAX_MASK_SIDE: usize = 65_535;

/// Dense grid of per-pixel segmentation-category indices.
///
/// Index 0 is void: it is accepted on input but never contributes to a
/// feature row. Labelled pixels carry `1..=categories`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentationMask {
    width: usize,
    height: usize,
    categories: u16,
    pixels: Vec<u16>,
}

impl SegmentationMask {
    /// Builds a mask from row-major pixels, validating every value against
    /// `categories`.
    pub fn new(width: usize, height: usize, pixels: Vec<u16>, categories: u16) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::MaskShape {
                width,
                height,
                reason: "both sides must be at least one pixel".into(),
            });
        }
        if width > MAX_MASK_SIDE || height > MAX_MASK_SIDE {
            return Err(Error::MaskShape {
                width,
                height,
                reason: format!("sides are limited to {MAX_MASK_SIDE} pixels"),
            });
        }
        if pixels.len() != width * height {
            return Err(Error::MaskShape {
                width,
                height,
                reason: format!("expected {} pixels, found {}", width * height, pixels.len()),
            });
        }
        check_range(width, &pixels, categories)?;
        Ok(SegmentationMask {
            width,
            height,
            categories,
            pixels,
        })
    }

    /// An all-void mask.
    pub fn void(width: usize, height: usize, categories: u16) -> Result<Self> {
        Self::new(width, height, vec![0; width * height], categories)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of segmentation-categories `L`.
    pub fn categories(&self) -> u16 {
        self.categories
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u16> {
        self.pixels
    }

    /// Pixel at zero-based column `x` and row `y`.
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u16]> {
        self.pixels.chunks_exact(self.width)
    }

    pub fn void_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == 0).count()
    }
}

fn check_range(width: usize, pixels: &[u16], categories: u16) -> Result<()> {
    match pixels.iter().position(|&p| p > categories) {
        Some(idx) => Err(Error::PixelOutOfRange {
            x: idx % width,
            y: idx / width,
            value: pixels[idx] as i64,
            max: categories as u32,
        }),
        None => Ok(()),
    }
}

/// Checks `mask` against a category count and returns it re-tagged with that
/// count. Validation is idempotent.
pub fn validate_mask(mask: SegmentationMask, categories: u16) -> Result<SegmentationMask> {
    check_range(mask.width, &mask.pixels, categories)?;
    Ok(SegmentationMask { categories, ..mask })
}

/// Axis-aligned box in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        BoundingBox {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }

    pub fn is_ordered(&self) -> bool {
        self.x_min <= self.x_max && self.y_min <= self.y_max
    }

    /// Clamps the box into `[0, width] x [0, height]`, reporting whether any
    /// coordinate moved.
    pub fn clamp_to(&self, width: f64, height: f64) -> (BoundingBox, bool) {
        let clamped = BoundingBox {
            x_min: self.x_min.clamp(0.0, width),
            y_min: self.y_min.clamp(0.0, height),
            x_max: self.x_max.clamp(0.0, width),
            y_max: self.y_max.clamp(0.0, height),
        };
        (clamped, clamped != *self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Object category in `1..=N`.
    pub category: u32,
    pub bbox: BoundingBox,
    pub confidence: f64,
}

/// Detections for one image together with the frame they live in.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionSet {
    detections: Vec<Detection>,
    image_width: usize,
    image_height: usize,
    categories: u32,
}

impl DetectionSet {
    pub fn new(
        detections: Vec<Detection>,
        image_width: usize,
        image_height: usize,
        categories: u32,
    ) -> Result<Self> {
        if image_width == 0 || image_height == 0 {
            return Err(Error::Config(format!(
                "image dimensions must be positive, got {image_width}x{image_height}"
            )));
        }
        for (index, d) in detections.iter().enumerate() {
            if d.category == 0 || d.category > categories {
                return Err(Error::InvalidDetection {
                    index,
                    reason: format!("category {} outside 1..={categories}", d.category),
                });
            }
            if !d.bbox.is_ordered() {
                return Err(Error::InvalidDetection {
                    index,
                    reason: "box corners are inverted".into(),
                });
            }
            if !(0.0..=1.0).contains(&d.confidence) {
                return Err(Error::InvalidDetection {
                    index,
                    reason: format!("confidence {} outside [0, 1]", d.confidence),
                });
            }
        }
        Ok(DetectionSet {
            detections,
            image_width,
            image_height,
            categories,
        })
    }

    pub fn empty(image_width: usize, image_height: usize, categories: u32) -> Result<Self> {
        Self::new(Vec::new(), image_width, image_height, categories)
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    pub fn image_width(&self) -> usize {
        self.image_width
    }

    pub fn image_height(&self) -> usize {
        self.image_height
    }

    /// Number of object categories `N`.
    pub fn categories(&self) -> u32 {
        self.categories
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }
}

/// Category names for both vocabularies, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub seg_names: Vec<String>,
    pub obj_names: Vec<String>,
}

impl LabelMap {
    pub fn new(seg_names: Vec<String>, obj_names: Vec<String>) -> Result<Self> {
        ensure_unique("segmentation", &seg_names)?;
        ensure_unique("object", &obj_names)?;
        Ok(LabelMap {
            seg_names,
            obj_names,
        })
    }

    pub fn seg_categories(&self) -> u16 {
        self.seg_names.len() as u16
    }

    pub fn obj_categories(&self) -> u32 {
        self.obj_names.len() as u32
    }

    pub fn obj_index(&self, name: &str) -> Option<u32> {
        self.obj_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32 + 1)
    }

    pub fn seg_index(&self, name: &str) -> Option<u16> {
        self.seg_names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u16 + 1)
    }
}

fn ensure_unique(vocab: &str, names: &[String]) -> Result<()> {
    let mut seen = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if let Some(prev) = seen.insert(name.as_str(), i) {
            return Err(Error::Config(format!(
                "{vocab} label {name:?} appears at indices {} and {}",
                prev + 1,
                i + 1
            )));
        }
    }
    Ok(())
}
