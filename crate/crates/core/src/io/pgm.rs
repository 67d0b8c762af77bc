//! Portable graymap masks. Binary (P5) is written; plain (P2) is accepted
//! on input as well. Pixel value = category index, 0 = void.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::SegmentationMask;

use super::{read_bytes, write_bytes};

pub fn load_mask(path: impl AsRef<Path>, categories: u16) -> Result<SegmentationMask> {
    let path = path.as_ref();
    parse_pgm(&read_bytes(path)?, categories, path)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

/// Decodes P2 or P5 bytes, validating against `categories`.
pub fn parse_pgm(data: &[u8], categories: u16, path: &Path) -> Result<SegmentationMask> {
    let bad = |reason: String| Error::format(path, reason);
    let binary = match data.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(bad("not a PGM file (expected P2 or P5 magic)".into())),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur
        .number()
        .ok_or_else(|| bad("malformed header: width".into()))? as usize;
    let height = cur
        .number()
        .ok_or_else(|| bad("malformed header: height".into()))? as usize;
    let maxval = cur
        .number()
        .ok_or_else(|| bad("malformed header: maxval".into()))?;
    if maxval == 0 || maxval > 65_535 {
        return Err(bad(format!("maxval {maxval} outside 1..=65535")));
    }
    if maxval < categories as u64 {
        return Err(bad(format!(
            "maxval {maxval} is below the category count {categories}"
        )));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| bad(format!("dimensions {width}x{height} overflow")))?;

    let pixels: Vec<u16> = if binary {
        // exactly one whitespace byte separates header and raster
        if !data.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(bad(
                "malformed header: missing separator before raster".into()
            ));
        }
        let payload = &data[cur.pos + 1..];
        let wide = maxval > 255;
        let expected = count * if wide { 2 } else { 1 };
        if payload.len() != expected {
            return Err(bad(format!(
                "payload size mismatch: expected {expected} bytes, found {}",
                payload.len()
            )));
        }
        if wide {
            payload
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect()
        } else {
            payload.iter().map(|&b| b as u16).collect()
        }
    } else {
        let mut values = Vec::with_capacity(count);
        for k in 0..count {
            let v = cur.number().ok_or_else(|| {
                bad(format!(
                    "payload size mismatch: expected {count} values, found {k}"
                ))
            })?;
            values.push(v);
        }
        cur.skip_space_and_comments();
        if cur.pos != data.len() {
            return Err(bad(format!(
                "payload size mismatch: trailing data after {count} values"
            )));
        }
        if let Some(k) = values.iter().position(|&v| v > maxval) {
            return Err(bad(format!(
                "value {} at ({}, {}) exceeds maxval {maxval}",
                values[k],
                k % width,
                k / width
            )));
        }
        values.into_iter().map(|v| v as u16).collect()
    };
    if let Some(k) = pixels.iter().position(|&v| v as u64 > maxval) {
        return Err(bad(format!(
            "value {} at ({}, {}) exceeds maxval {maxval}",
            pixels[k],
            k % width,
            k / width
        )));
    }
    SegmentationMask::new(width, height, pixels, categories)
}

fn maxval_for(mask: &SegmentationMask) -> u16 {
    mask.categories().max(1)
}

/// Encodes `mask` as binary P5 with `maxval = max(L, 1)`.
pub fn encode_p5(mask: &SegmentationMask) -> Vec<u8> {
    let maxval = maxval_for(mask);
    let mut out = format!("P5\n{} {}\n{}\n", mask.width(), mask.height(), maxval).into_bytes();
    if maxval > 255 {
        out.extend(mask.pixels().iter().flat_map(|p| p.to_be_bytes()));
    } else {
        out.extend(mask.pixels().iter().map(|&p| p as u8));
    }
    out
}

pub fn encode_p2(mask: &SegmentationMask) -> Vec<u8> {
    let mut out = format!(
        "P2\n{} {}\n{}\n",
        mask.width(),
        mask.height(),
        maxval_for(mask)
    );
    for row in mask.rows() {
        let line: Vec<String> = row.iter().map(u16::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn write_mask(path: impl AsRef<Path>, mask: &SegmentationMask) -> Result<()> {
    write_bytes(path.as_ref(), &encode_p5(mask))
}

pub fn write_mask_plain(path: impl AsRef<Path>, mask: &SegmentationMask) -> Result<()> {
    write_bytes(path.as_ref(), &encode_p2(mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(path: &str) -> &Path {
        Path::new(path)
    }

    #[test]
    fn p5_two_by_two() {
        let bytes = b"P5\n2 2\n37\n\x00\x01\x01\x02";
        let mask = parse_pgm(bytes, 37, p("a.pgm")).unwrap();
        assert_eq!(mask.pixels(), &[0, 1, 1, 2]);
        assert_eq!(mask.categories(), 37);
        // range is checked against the configured L, not maxval
        let err = parse_pgm(b"P5\n2 2\n37\n\x00\x01\x01\x25", 2, p("a.pgm")).unwrap_err();
        assert!(
            matches!(
                err,
                Error::PixelOutOfRange {
                    x: 1,
                    y: 1,
                    value: 37,
                    max: 2
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn truncated_payload() {
        let err = parse_pgm(b"P5\n2 2\n37\n\x00\x01\x01", 37, p("t.pgm")).unwrap_err();
        assert!(err.to_string().contains("size mismatch"), "{err}");
        let err = parse_pgm(b"P2\n2 2\n37\n0 1 1", 37, p("t.pgm")).unwrap_err();
        assert!(err.to_string().contains("size mismatch"), "{err}");
    }

    #[test]
    fn plain_and_binary_twins() {
        let mask = SegmentationMask::new(3, 2, vec![0, 4, 2, 1, 1, 3], 5).unwrap();
        let a = parse_pgm(&encode_p5(&mask), 5, p("a")).unwrap();
        let b = parse_pgm(&encode_p2(&mask), 5, p("b")).unwrap();
        assert_eq!(a, mask);
        assert_eq!(b, mask);
        let commented = b"P2 # plain\n# size\n3 2\n5\n0 4 2\n1 1 3\n";
        assert_eq!(parse_pgm(commented, 5, p("c")).unwrap(), mask);
    }

    #[test]
    fn wide_maxval_round_trips() {
        let mask = SegmentationMask::new(2, 1, vec![300, 0], 300).unwrap();
        let bytes = encode_p5(&mask);
        assert_eq!(parse_pgm(&bytes, 300, p("w")).unwrap(), mask);
    }

    #[test]
    fn header_errors() {
        assert!(parse_pgm(b"P6\n1 1\n255\n\x00", 1, p("x")).is_err());
        assert!(parse_pgm(b"P5\n1\n", 1, p("x")).is_err());
        assert!(parse_pgm(b"P5\n1 1\n0\n\x00", 1, p("x")).is_err());
        assert!(parse_pgm(b"P5\n1 1\n3\n\x00", 5, p("x")).is_err());
        assert!(parse_pgm(b"P5\n1 1\n3\n\x09", 3, p("x")).is_err());
    }
}
