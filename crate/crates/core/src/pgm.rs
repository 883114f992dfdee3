//! Binary PGM (P5) decode and encode. This is the only image format the
//! library reads or writes; maxval above 255 is rejected.

use crate::error::{Error, Result};
use crate::image::GrayImage;

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        HeaderReader { bytes, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .token()
            .ok_or_else(|| Error::PgmHeader(format!("missing {what}")))?;
        let s = std::str::from_utf8(tok)
            .map_err(|_| Error::PgmHeader(format!("non-ASCII {what}")))?;
        s.parse::<u32>()
            .map_err(|_| Error::PgmHeader(format!("bad {what}: {s:?}")))
    }
}

/// Decodes a binary PGM. `#` comment lines are permitted anywhere in the
/// header; bytes beyond the pixel raster are ignored.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut reader = HeaderReader::new(bytes);
    match reader.token() {
        Some(b"P5") => {}
        _ => return Err(Error::PgmMagic),
    }
    let width = reader.number("width")?;
    let height = reader.number("height")?;
    let maxval = reader.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::PgmMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let b = reader
        .bytes
        .get(reader.pos)
        .ok_or_else(|| Error::PgmHeader("missing raster separator".into()))?;
    if !b.is_ascii_whitespace() {
        return Err(Error::PgmHeader("missing raster separator".into()));
    }
    let start = reader.pos + 1;

    let expected = width as usize * height as usize;
    let available = bytes.len().saturating_sub(start);
    if available < expected {
        return Err(Error::PgmTruncated {
            expected,
            found: available,
        });
    }
    GrayImage::new(width, height, bytes[start..start + expected].to_vec())
}

/// Encodes as binary P5 with maxval 255. `load_pgm` inverts this exactly.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}
