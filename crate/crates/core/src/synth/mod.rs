//! Seeded synthetic indoor scenes: category masks, detections and labels.
//!
//! Randomness comes from ChaCha8 streams. Each sample owns a stream seeded
//! with [`derive_seed`] of the dataset seed and its index, so samples can be
//! generated in any order or in parallel with identical results.

mod dataset;
mod defaults;
mod raster;
mod transform;

pub use dataset::{generate_dataset, sample_id, DatasetConfig};
pub use defaults::{default_dataset_config, default_labels, default_templates, DEFAULT_AMBIGUITY};
pub use raster::{Shape, ShapeFamily};
pub use transform::{transform_mask, Axis, MaskTransform};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BoundingBox, Detection, DetectionSet, SegmentationMask};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` within a dataset seeded with `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

/// Rectangle of the unit square, `x` rightwards and `y` downwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Region { x0, y0, x1, y1 }
    }

    pub const fn point(x: f64, y: f64) -> Self {
        Region {
            x0: x,
            y0: y,
            x1: x,
            y1: y,
        }
    }
}

/// A rendered shape may emit one detection of `category` with `probability`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectLink {
    pub category: u32,
    pub probability: f64,
}

/// Draws an instance under a different segmentation category.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relabel {
    pub category: u16,
    pub probability: f64,
}

/// One kind of segment a scene may contain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub seg_category: u16,
    pub presence: f64,
    /// Inclusive instance count range when present.
    pub count: (u32, u32),
    pub family: ShapeFamily,
    /// Extent along x as a fraction of the image width.
    pub width: (f64, f64),
    /// Extent along y as a fraction of the image height.
    pub height: (f64, f64),
    /// Where instance centres land.
    pub region: Region,
    pub object: Option<ObjectLink>,
    pub relabel: Option<Relabel>,
}

/// Elements are drawn in order, later ones overwriting earlier ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneTemplate {
    pub name: String,
    pub elements: Vec<ElementSpec>,
}

impl SceneTemplate {
    pub fn validate(&self, seg_categories: u16, obj_categories: u32) -> Result<()> {
        let bad = |i: usize, reason: String| {
            Error::Config(format!("template {:?} element {i}: {reason}", self.name))
        };
        let unit = |r: (f64, f64)| r.0 > 0.0 && r.0 <= r.1 && r.1 <= 1.0;
        for (i, e) in self.elements.iter().enumerate() {
            if e.seg_category == 0 || e.seg_category > seg_categories {
                return Err(bad(
                    i,
                    format!(
                        "segmentation category {} outside 1..={seg_categories}",
                        e.seg_category
                    ),
                ));
            }
            if !(0.0..=1.0).contains(&e.presence) {
                return Err(bad(i, format!("presence {} outside [0, 1]", e.presence)));
            }
            if e.count.0 > e.count.1 {
                return Err(bad(i, "count range is inverted".into()));
            }
            if !unit(e.width) || !unit(e.height) {
                return Err(bad(
                    i,
                    "size fractions must lie in (0, 1] and be ordered".into(),
                ));
            }
            let r = e.region;
            if !(0.0 <= r.x0
                && r.x0 <= r.x1
                && r.x1 <= 1.0
                && 0.0 <= r.y0
                && r.y0 <= r.y1
                && r.y1 <= 1.0)
            {
                return Err(bad(
                    i,
                    "placement region must lie within the unit square".into(),
                ));
            }
            if let Some(r) = e.relabel {
                if r.category == 0 || r.category > seg_categories {
                    return Err(bad(
                        i,
                        format!(
                            "relabel category {} outside 1..={seg_categories}",
                            r.category
                        ),
                    ));
                }
                if !(0.0..=1.0).contains(&r.probability) {
                    return Err(bad(
                        i,
                        format!("relabel probability {} outside [0, 1]", r.probability),
                    ));
                }
            }
            if let Some(link) = e.object {
                if link.category == 0 || link.category > obj_categories {
                    return Err(bad(
                        i,
                        format!(
                            "object category {} outside 1..={obj_categories}",
                            link.category
                        ),
                    ));
                }
                if !(0.0..=1.0).contains(&link.probability) {
                    return Err(bad(
                        i,
                        format!("emission probability {} outside [0, 1]", link.probability),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Frame and vocabulary sizes shared by every generated scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub seg_categories: u16,
    pub obj_categories: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub mask: SegmentationMask,
    pub detections: DetectionSet,
    /// Detected shapes with no pixel of their category left after drawing.
    pub occluded: usize,
}

/// Lowest confidence assigned to a synthetic detection.
const MIN_CONFIDENCE: f64 = 0.05;

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn place<R: Rng>(rng: &mut R, family: ShapeFamily, cx: f64, cy: f64, ex: f64, ey: f64) -> Shape {
    match family {
        ShapeFamily::Rectangle => Shape::Rectangle {
            x0: cx - ex / 2.0,
            y0: cy - ey / 2.0,
            x1: cx + ex / 2.0,
            y1: cy + ey / 2.0,
        },
        ShapeFamily::Ellipse => {
            let angle = rng.random_range(-0.3..0.3);
            Shape::Ellipse {
                cx,
                cy,
                rx: ex / 2.0,
                ry: ey / 2.0,
                angle,
            }
        }
        ShapeFamily::Triangle => {
            let mut vertex = |ux: (f64, f64), uy: (f64, f64)| {
                (cx + ex * uniform(rng, ux), cy + ey * uniform(rng, uy))
            };
            // apex on top, base corners left and right
            let apex = vertex((-0.2, 0.2), (-0.5, -0.3));
            let left = vertex((-0.5, -0.3), (0.3, 0.5));
            let right = vertex((0.3, 0.5), (0.3, 0.5));
            Shape::Triangle([apex, left, right])
        }
    }
}

/// Renders one scene from `template`. Deterministic in `(template, config, seed)`.
pub fn generate_scene(template: &SceneTemplate, config: &SceneConfig, seed: u64) -> Result<Scene> {
    template.validate(config.seg_categories, config.obj_categories)?;
    let (w, h) = (config.width, config.height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = vec![0u16; w * h];
    // (category drawn, pixels covered) of every shape that emitted a detection
    let mut emitted: Vec<(u16, Vec<(usize, usize)>)> = Vec::new();
    let mut detections = Vec::new();

    for e in &template.elements {
        if !rng.random_bool(e.presence) {
            continue;
        }
        let count = rng.random_range(e.count.0..=e.count.1);
        for _ in 0..count {
            let cx = uniform(&mut rng, (e.region.x0, e.region.x1)) * w as f64;
            let cy = uniform(&mut rng, (e.region.y0, e.region.y1)) * h as f64;
            let ex = uniform(&mut rng, e.width) * w as f64;
            let ey = uniform(&mut rng, e.height) * h as f64;
            let shape = place(&mut rng, e.family, cx, cy, ex, ey);
            let relabelled = rng.random_bool(e.relabel.map_or(0.0, |r| r.probability));
            let category = match e.relabel {
                Some(r) if relabelled => r.category,
                _ => e.seg_category,
            };
            let covered = shape.rasterize(w, h);
            for &(x, y) in &covered {
                pixels[y * w + x] = category;
            }
            let Some(link) = e.object else { continue };
            let emit = rng.random_bool(link.probability);
            let confidence = rng.random_range(MIN_CONFIDENCE..1.0);
            if !emit || covered.is_empty() {
                continue;
            }
            let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
            for &(x, y) in &covered {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x + 1);
                y1 = y1.max(y + 1);
            }
            detections.push(Detection {
                category: link.category,
                bbox: BoundingBox::new(x0 as f64, y0 as f64, x1 as f64, y1 as f64),
                confidence,
            });
            emitted.push((category, covered));
        }
    }

    let occluded = emitted
        .iter()
        .filter(|(cat, covered)| covered.iter().all(|&(x, y)| pixels[y * w + x] != *cat))
        .count();
    Ok(Scene {
        mask: SegmentationMask::new(w, h, pixels, config.seg_categories)?,
        detections: DetectionSet::new(detections, w, h, config.obj_categories)?,
        occluded,
    })
}

/// Side of the square canvas used by [`invariance_shape`].
pub const INVARIANCE_CANVAS: usize = 128;
/// Every labelled pixel of an invariance shape lies within this distance of
/// the canvas centre, so any rotation and shifts up to `±16` stay in frame.
pub const INVARIANCE_RADIUS: f64 = 40.0;

/// A mask with one to three asymmetric shapes near the canvas centre, for
/// invariance testing. Every present category covers at least 400 pixels.
pub fn invariance_shape(seed: u64, categories: u16) -> SegmentationMask {
    let n = INVARIANCE_CANVAS;
    let c = n as f64 / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut pixels = vec![0u16; n * n];
        let parts = rng.random_range(1..=3usize);
        for _ in 0..parts {
            let cat = rng.random_range(1..=categories);
            let shape = match rng.random_range(0..3) {
                0 => {
                    let pts = [(); 3].map(|_| {
                        let r = rng.random_range(12.0..INVARIANCE_RADIUS - 1.0);
                        let a = rng.random_range(0.0..std::f64::consts::TAU);
                        (c + r * a.cos(), c + r * a.sin())
                    });
                    Shape::Triangle(pts)
                }
                1 => {
                    let rx = rng.random_range(10.0..26.0);
                    let ry = rng.random_range(6.0..rx);
                    let off = INVARIANCE_RADIUS - rx - 1.0;
                    Shape::Ellipse {
                        cx: c + rng.random_range(-off..=off) * 0.7,
                        cy: c + rng.random_range(-off..=off) * 0.7,
                        rx,
                        ry,
                        angle: rng.random_range(0.0..std::f64::consts::PI),
                    }
                }
                _ => {
                    let half = rng.random_range(8.0..20.0);
                    let (x0, y0) = (
                        c + rng.random_range(-26.0..0.0),
                        c + rng.random_range(-26.0..0.0),
                    );
                    Shape::Rectangle {
                        x0,
                        y0,
                        x1: x0 + half * 1.3,
                        y1: y0 + half,
                    }
                }
            };
            for (x, y) in shape.rasterize(n, n) {
                let (dx, dy) = (x as f64 + 0.5 - c, y as f64 + 0.5 - c);
                if dx.hypot(dy) <= INVARIANCE_RADIUS {
                    pixels[y * n + x] = cat;
                }
            }
        }
        let big_enough = (1..=categories).all(|k| {
            let count = pixels.iter().filter(|&&p| p == k).count();
            count == 0 || count >= 400
        });
        if big_enough && pixels.iter().any(|&p| p != 0) {
            return SegmentationMask::new(n, n, pixels, categories)
                .expect("categories are in range");
        }
    }
}

/// A single scalene triangle of category 1 on the invariance canvas, with
/// interior angles in `[25°, 110°]`, consecutive sorted sides differing by at
/// least 15% and an area of at least 400 pixels.
pub fn scalene_triangle(seed: u64) -> SegmentationMask {
    let n = INVARIANCE_CANVAS;
    let c = n as f64 / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts = [(); 3].map(|_| {
            let r = rng.random_range(15.0..INVARIANCE_RADIUS - 2.0);
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            (c + r * a.cos(), c + r * a.sin())
        });
        let d = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
        let mut s = [d(pts[0], pts[1]), d(pts[1], pts[2]), d(pts[2], pts[0])];
        s.sort_by(f64::total_cmp);
        let angle = |a: f64, b: f64, c: f64| {
            ((b * b + c * c - a * a) / (2.0 * b * c))
                .acos()
                .to_degrees()
        };
        if angle(s[0], s[1], s[2]) < 25.0
            || angle(s[2], s[0], s[1]) > 110.0
            || s[1] < 1.15 * s[0]
            || s[2] < 1.15 * s[1]
        {
            continue;
        }
        let covered = Shape::Triangle(pts).rasterize(n, n);
        if covered.len() < 400 {
            continue;
        }
        let mut pixels = vec![0u16; n * n];
        for (x, y) in covered {
            pixels[y * n + x] = 1;
        }
        return SegmentationMask::new(n, n, pixels, 1).expect("category 1 is in range");
    }
}

/// A mask of overlapping random rectangles, one or more per category, over a
/// void background. Used as a throughput corpus.
pub fn random_mask(
    width: usize,
    height: usize,
    categories: u16,
    seed: u64,
) -> Result<SegmentationMask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = vec![0u16; width * height];
    if categories > 0 {
        for k in 0..2 * categories as usize {
            let cat = if k < categories as usize {
                k as u16 + 1
            } else {
                rng.random_range(1..=categories)
            };
            let (x0, x1) = ordered(&mut rng, width);
            let (y0, y1) = ordered(&mut rng, height);
            for row in pixels.chunks_exact_mut(width).take(y1).skip(y0) {
                row[x0..x1].fill(cat);
            }
        }
    }
    SegmentationMask::new(width, height, pixels, categories)
}

fn ordered<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    (a.min(b), a.max(b) + 1)
}
