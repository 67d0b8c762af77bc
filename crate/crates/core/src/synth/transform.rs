//! Geometric transforms of category masks for invariance checks.
//!
//! Translation, reflection and quarter-turn rotation are exact pixel
//! permutations; integer scaling replicates pixels; arbitrary rotation
//! resamples with nearest neighbour.

use crate::error::{Error, Result};
use crate::types::SegmentationMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Mirror columns: `x -> w - 1 - x`.
    Vertical,
    /// Mirror rows: `y -> h - 1 - y`.
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaskTransform {
    Translate {
        dx: i64,
        dy: i64,
    },
    /// `k` clockwise quarter turns; the frame's sides swap for odd `k`.
    Rotate90(u8),
    /// Rotation by `theta` radians about the frame centre, same frame.
    Rotate(f64),
    /// Each pixel becomes an `s x s` block.
    Scale(usize),
    Reflect(Axis),
}

pub fn transform_mask(
    mask: &SegmentationMask,
    transform: MaskTransform,
) -> Result<SegmentationMask> {
    let (w, h) = (mask.width(), mask.height());
    let l = mask.categories();
    match transform {
        MaskTransform::Translate { dx, dy } => {
            let mut out = vec![0u16; w * h];
            let mut lost = 0;
            for (y, row) in mask.rows().enumerate() {
                for (x, &c) in row.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        lost += 1;
                    } else {
                        out[ny as usize * w + nx as usize] = c;
                    }
                }
            }
            if lost > 0 {
                return Err(Error::Clipping { lost });
            }
            SegmentationMask::new(w, h, out, l)
        }
        MaskTransform::Rotate90(k) => {
            let mut cur = mask.clone();
            for _ in 0..k % 4 {
                cur = rotate_quarter(&cur)?;
            }
            Ok(cur)
        }
        MaskTransform::Reflect(axis) => {
            let mut out = vec![0u16; w * h];
            for (y, row) in mask.rows().enumerate() {
                for (x, &c) in row.iter().enumerate() {
                    let (nx, ny) = match axis {
                        Axis::Vertical => (w - 1 - x, y),
                        Axis::Horizontal => (x, h - 1 - y),
                    };
                    out[ny * w + nx] = c;
                }
            }
            SegmentationMask::new(w, h, out, l)
        }
        MaskTransform::Scale(s) => {
            if s == 0 {
                return Err(Error::Config("scale factor must be at least 1".into()));
            }
            let (nw, nh) = (w * s, h * s);
            let mut out = vec![0u16; nw * nh];
            for (ny, line) in out.chunks_exact_mut(nw).enumerate() {
                let src = &mask.pixels()[(ny / s) * w..(ny / s + 1) * w];
                for (nx, v) in line.iter_mut().enumerate() {
                    *v = src[nx / s];
                }
            }
            SegmentationMask::new(nw, nh, out, l)
        }
        MaskTransform::Rotate(theta) => rotate_nearest(mask, theta),
    }
}

fn rotate_quarter(mask: &SegmentationMask) -> Result<SegmentationMask> {
    let (w, h) = (mask.width(), mask.height());
    // clockwise: (x, y) -> (h - 1 - y, x) in a h x w frame
    let mut out = vec![0u16; w * h];
    for (y, row) in mask.rows().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            out[x * h + (h - 1 - y)] = c;
        }
    }
    SegmentationMask::new(h, w, out, mask.categories())
}

fn rotate_nearest(mask: &SegmentationMask, theta: f64) -> Result<SegmentationMask> {
    let (w, h) = (mask.width(), mask.height());
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let (s, c) = theta.sin_cos();

    let lost = mask
        .rows()
        .enumerate()
        .flat_map(|(y, row)| row.iter().enumerate().map(move |(x, &v)| (x, y, v)))
        .filter(|&(x, y, v)| {
            if v == 0 {
                return false;
            }
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            let (nx, ny) = (c * dx - s * dy + cx, s * dx + c * dy + cy);
            nx < 0.0 || ny < 0.0 || nx >= w as f64 || ny >= h as f64
        })
        .count();
    if lost > 0 {
        return Err(Error::Clipping { lost });
    }

    let mut out = vec![0u16; w * h];
    for (y, line) in out.chunks_exact_mut(w).enumerate() {
        for (x, v) in line.iter_mut().enumerate() {
            // inverse map of the output pixel centre
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            let (sx, sy) = (c * dx + s * dy + cx, -s * dx + c * dy + cy);
            if sx >= 0.0 && sy >= 0.0 && sx < w as f64 && sy < h as f64 {
                *v = mask.get(sx.floor() as usize, sy.floor() as usize);
            }
        }
    }
    SegmentationMask::new(w, h, out, mask.categories())
}
