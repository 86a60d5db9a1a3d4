//! Netpbm graymap (PGM) codec: P2 (ASCII) and P5 (binary) reading, P5 writing.
//!
//! Only 8-bit graymaps (`maxval <= 255`) are supported.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A decoded graymap, samples in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub rows: usize,
    pub cols: usize,
    pub maxval: u16,
    pub samples: Vec<u8>,
}

impl Pgm {
    /// Gray levels scaled into `[0, 1]` by `maxval`.
    pub fn to_unit_matrix(&self) -> DMatrix<f64> {
        let scale = f64::from(self.maxval);
        DMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.samples.iter().map(|&s| f64::from(s) / scale),
        )
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Header<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            offset,
            message: message.into(),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if start >= self.bytes.len() {
                self.err(start, format!("unexpected end of file, expected {what}"))
            } else {
                self.err(start, format!("expected {what}, found byte 0x{:02x}", self.bytes[start]))
            });
        }
        // Digits are ASCII so the slice is valid UTF-8.
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err(start, format!("{what} out of range")))
    }
}

/// Decode a P2 or P5 graymap. `path` is only used for error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<Pgm> {
    let mut h = Header { bytes, pos: 0, path };
    let ascii = match bytes.get(..2) {
        Some(b"P2") => true,
        Some(b"P5") => false,
        _ => return Err(h.err(0, "missing P2/P5 magic number")),
    };
    h.pos = 2;
    h.skip_space_and_comments();
    let width_at = h.pos;
    let cols = h.number("width")? as usize;
    let rows = h.number("height")? as usize;
    if rows == 0 || cols == 0 {
        return Err(h.err(width_at, format!("degenerate dimensions {cols}x{rows}")));
    }
    h.skip_space_and_comments();
    let maxval_at = h.pos;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(h.err(maxval_at, format!("unsupported maxval {maxval} (need 1..=255)")));
    }
    let maxval = maxval as u16;
    let expected = rows * cols;

    let samples = if ascii {
        let mut samples = Vec::with_capacity(expected);
        while samples.len() < expected {
            h.skip_space_and_comments();
            if h.pos >= bytes.len() {
                return Err(Error::SizeMismatch {
                    path: path.to_path_buf(),
                    expected,
                    found: samples.len(),
                });
            }
            let at = h.pos;
            let v = h.number("sample")?;
            if v > u32::from(maxval) {
                return Err(h.err(at, format!("sample {v} exceeds maxval {maxval}")));
            }
            samples.push(v as u8);
        }
        samples
    } else {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(h.pos) {
            Some(c) if c.is_ascii_whitespace() => h.pos += 1,
            Some(_) => return Err(h.err(h.pos, "expected whitespace after maxval")),
            None => {
                return Err(Error::SizeMismatch {
                    path: path.to_path_buf(),
                    expected,
                    found: 0,
                })
            }
        }
        let payload = &bytes[h.pos..];
        if payload.len() < expected {
            return Err(Error::SizeMismatch {
                path: path.to_path_buf(),
                expected,
                found: payload.len(),
            });
        }
        let samples = payload[..expected].to_vec();
        if let Some(i) = samples.iter().position(|&s| u16::from(s) > maxval) {
            return Err(h.err(h.pos + i, format!("sample {} exceeds maxval {maxval}", samples[i])));
        }
        samples
    };

    Ok(Pgm {
        rows,
        cols,
        maxval,
        samples,
    })
}

/// Encode a `[0, 1]` matrix as an 8-bit binary P5 graymap.
///
/// Values are clamped to `[0, 1]` and rounded to the nearest of 256 levels.
pub fn encode(pixels: &DMatrix<f64>) -> Vec<u8> {
    let (rows, cols) = pixels.shape();
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.reserve(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = pixels[(r, c)].clamp(0.0, 1.0);
            out.push((v * 255.0).round() as u8);
        }
    }
    out
}

/// Linearly rescale an arbitrary real matrix onto `[0, 1]` for viewing.
///
/// Lossy, diagnostic output only. A constant matrix maps to mid-gray.
pub fn rescale_for_display(values: &DMatrix<f64>) -> DMatrix<f64> {
    let lo = values.min();
    let hi = values.max();
    if hi - lo <= 0.0 || !(hi - lo).is_finite() {
        return DMatrix::from_element(values.nrows(), values.ncols(), 0.5);
    }
    values.map(|v| (v - lo) / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bytes: &[u8]) -> Result<Pgm> {
        decode(bytes, Path::new("test.pgm"))
    }

    #[test]
    fn ascii_two_by_two() {
        let pgm = p(b"P2\n2 2\n255\n0 255\n255 0\n").unwrap();
        assert_eq!((pgm.rows, pgm.cols), (2, 2));
        let m = pgm.to_unit_matrix();
        assert_eq!(m.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 1)], 0.0);
    }

    #[test]
    fn comments_and_scaling() {
        let pgm = p(b"P2\n# made by hand\n3 1 # trailing\n15\n0 5 15\n").unwrap();
        let m = pgm.to_unit_matrix();
        assert_eq!(m.shape(), (1, 3));
        assert!((m[(0, 1)] - 5.0 / 15.0).abs() < 1e-15);
        assert_eq!(m[(0, 2)], 1.0);
    }

    #[test]
    fn binary_rows_are_row_major() {
        let mut bytes = b"P5 3 2 255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let pgm = p(&bytes).unwrap();
        assert_eq!((pgm.rows, pgm.cols), (2, 3));
        let m = pgm.to_unit_matrix();
        assert_eq!(m[(0, 2)] * 255.0, 3.0);
        assert_eq!(m[(1, 0)] * 255.0, 4.0);
    }

    #[test]
    fn truncated_binary_payload() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        match p(&bytes) {
            Err(Error::SizeMismatch { expected, found, .. }) => {
                assert_eq!((expected, found), (4, 3));
            }
            other => panic!("expected size mismatch, got {other:?}"),
        }
    }

    #[test]
    fn truncated_ascii_payload() {
        assert!(matches!(
            p(b"P2 2 2 255 1 2 3"),
            Err(Error::SizeMismatch { expected: 4, found: 3, .. })
        ));
    }

    #[test]
    fn malformed_header_reports_offset() {
        match p(b"P5\n12 x\n255\n") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(p(b"P6\n1 1\n255\n\0"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(p(b"P2 1 1 65535 0"), Err(Error::Parse { offset: 7, .. })));
        assert!(matches!(p(b"P2 1 1 10 11"), Err(Error::Parse { offset: 10, .. })));
    }

    #[test]
    fn encode_then_decode_is_exact_on_8bit_levels() {
        let m = DMatrix::from_fn(3, 5, |r, c| ((r * 5 + c) * 17 % 256) as f64 / 255.0);
        let back = p(&encode(&m)).unwrap().to_unit_matrix();
        assert_eq!(m, back);
    }

    #[test]
    fn display_rescale() {
        let m = DMatrix::from_row_slice(1, 3, &[-2.0, 0.0, 2.0]);
        assert_eq!(rescale_for_display(&m).as_slice(), &[0.0, 0.5, 1.0]);
        let c = DMatrix::from_element(2, 2, 7.0);
        assert!(rescale_for_display(&c).iter().all(|&v| v == 0.5));
    }
}
