//! Integral images for O(1) rectangle sums, carried alongside a
//! squared-intensity table for window variance queries.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Rect};

/// Cumulative-sum tables of size `(width + 1) x (height + 1)`, zero-padded in
/// the first row and column so `rect_sum` needs no border branches. All
/// arithmetic is exact in `u64`; a 4096x4096 image of 255s stays far below
/// overflow even in the squared table.
pub struct IntegralImage {
    width: u32,
    height: u32,
    sums: Vec<u64>,
    sq_sums: Vec<u64>,
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> IntegralImage {
        let w = img.width() as usize;
        let h = img.height() as usize;
        let stride = w + 1;
        let mut sums = vec![0u64; stride * (h + 1)];
        let mut sq_sums = vec![0u64; stride * (h + 1)];

        for y in 0..h {
            let mut run = 0u64;
            let mut sq_run = 0u64;
            for (x, &pixel) in img.row(y as u32).iter().enumerate() {
                let v = pixel as u64;
                run += v;
                sq_run += v * v;
                let idx = (y + 1) * stride + (x + 1);
                sums[idx] = sums[idx - stride] + run;
                sq_sums[idx] = sq_sums[idx - stride] + sq_run;
            }
        }

        IntegralImage {
            width: img.width(),
            height: img.height(),
            sums,
            sq_sums,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    fn table_sum(table: &[u64], stride: usize, r: Rect) -> u64 {
        let (x, y) = (r.x as usize, r.y as usize);
        let (x2, y2) = (x + r.w as usize, y + r.h as usize);
        table[y2 * stride + x2] + table[y * stride + x]
            - table[y * stride + x2]
            - table[y2 * stride + x]
    }

    fn check(&self, r: Rect) -> Result<()> {
        if r.within(self.width, self.height) {
            Ok(())
        } else {
            Err(Error::RectOutOfBounds {
                rect: r,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Exact sum of the pixels in `r`. Zero-area rects sum to 0.
    pub fn rect_sum(&self, r: Rect) -> Result<u64> {
        self.check(r)?;
        Ok(Self::table_sum(&self.sums, self.width as usize + 1, r))
    }

    /// Exact sum of squared pixel intensities in `r`.
    pub fn rect_sq_sum(&self, r: Rect) -> Result<u64> {
        self.check(r)?;
        Ok(Self::table_sum(&self.sq_sums, self.width as usize + 1, r))
    }

    /// Raw cumulative sum at table coordinates (for tests and diagnostics).
    pub fn sum_at(&self, tx: u32, ty: u32) -> u64 {
        self.sums[ty as usize * (self.width as usize + 1) + tx as usize]
    }

    pub fn sq_sum_at(&self, tx: u32, ty: u32) -> u64 {
        self.sq_sums[ty as usize * (self.width as usize + 1) + tx as usize]
    }
}
