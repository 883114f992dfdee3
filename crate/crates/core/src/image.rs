//! Grayscale raster type plus the cropping and resizing primitives the rest
//! of the pipeline is built on.

use crate::error::{Error, Result};

/// Axis-aligned rectangle in pixel coordinates: `(x, y)` is the top-left
/// corner, `w`/`h` extend right and down.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Rect {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> u64 {
        self.x as u64 + self.w as u64
    }

    pub fn bottom(&self) -> u64 {
        self.y as u64 + self.h as u64
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// True when the rect lies entirely inside a `width` x `height` image.
    pub fn within(&self, width: u32, height: u32) -> bool {
        self.right() <= width as u64 && self.bottom() <= height as u64
    }

    /// Intersection-over-union of two rects; 0.0 when either has zero area.
    pub fn iou(&self, other: &Rect) -> f64 {
        let ix = self.x.max(other.x) as u64;
        let iy = self.y.max(other.y) as u64;
        let ix2 = self.right().min(other.right());
        let iy2 = self.bottom().min(other.bottom());
        if ix2 <= ix || iy2 <= iy {
            return 0.0;
        }
        let inter = (ix2 - ix) * (iy2 - iy);
        let union = self.area() + other.area() - inter;
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// 8-bit single-channel image, row-major. `pixels.len() == width * height`
/// always holds; constructors reject anything else.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<GrayImage> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig(
                "image dimensions must be at least 1x1".into(),
            ));
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch {
                context: "image pixel buffer",
                expected,
                got: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> GrayImage {
        assert!(width >= 1 && height >= 1);
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    pub fn constant(width: u32, height: u32, value: u8) -> GrayImage {
        GrayImage::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// Reads with replicated borders: out-of-range coordinates clamp to the
    /// nearest edge pixel.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(cx, cy)
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.pixels[start..start + w]
    }
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

/// Copies the sub-rectangle `r` out of `img`.
pub fn crop(img: &GrayImage, r: Rect) -> Result<GrayImage> {
    if r.w == 0 || r.h == 0 || !r.within(img.width(), img.height()) {
        return Err(Error::RectOutOfBounds {
            rect: r,
            width: img.width(),
            height: img.height(),
        });
    }
    let mut pixels = Vec::with_capacity(r.w as usize * r.h as usize);
    for y in r.y..r.y + r.h {
        let row = img.row(y);
        pixels.extend_from_slice(&row[r.x as usize..(r.x + r.w) as usize]);
    }
    GrayImage::new(r.w, r.h, pixels)
}

/// Bilinear resize under the pixel-center convention: output pixel (i, j)
/// samples source coordinate ((i + 0.5) * src/dst - 0.5) per axis, clamped
/// to the valid range. Results round to nearest, ties away from zero.
pub fn resize_bilinear(img: &GrayImage, out_w: u32, out_h: u32) -> GrayImage {
    assert!(out_w >= 1 && out_h >= 1, "target dimensions must be >= 1");
    let sx_ratio = img.width() as f64 / out_w as f64;
    let sy_ratio = img.height() as f64 / out_h as f64;
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;

    GrayImage::from_fn(out_w, out_h, |i, j| {
        let sx = ((i as f64 + 0.5) * sx_ratio - 0.5).clamp(0.0, max_x);
        let sy = ((j as f64 + 0.5) * sy_ratio - 0.5).clamp(0.0, max_y);
        let x0 = sx.floor() as u32;
        let y0 = sy.floor() as u32;
        let x1 = (x0 + 1).min(img.width() - 1);
        let y1 = (y0 + 1).min(img.height() - 1);
        let fx = sx - x0 as f64;
        let fy = sy - y0 as f64;

        let top = (1.0 - fx) * img.get(x0, y0) as f64 + fx * img.get(x1, y0) as f64;
        let bottom = (1.0 - fx) * img.get(x0, y1) as f64 + fx * img.get(x1, y1) as f64;
        let value = (1.0 - fy) * top + fy * bottom;
        value.round() as u8
    })
}
