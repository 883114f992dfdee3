//! Face normalization between detection and feature extraction: crop,
//! resize to the working resolution, then edge-preserving noise removal.

use crate::error::{Error, Result};
use crate::image::{crop, resize_bilinear, GrayImage, Rect};

/// Bilateral filter parameters. The window is `(2 * radius + 1)` squared;
/// `sigma_spatial` is in pixels, `sigma_range` in intensity units.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BilateralParams {
    pub radius: u32,
    pub sigma_spatial: f64,
    pub sigma_range: f64,
}

impl Default for BilateralParams {
    fn default() -> Self {
        BilateralParams {
            radius: 2,
            sigma_spatial: 2.0,
            sigma_range: 25.0,
        }
    }
}

impl BilateralParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidConfig("bilateral radius must be >= 1".into()));
        }
        // Also rejects NaN sigmas.
        if self.sigma_spatial.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || self.sigma_range.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        {
            return Err(Error::InvalidConfig(
                "bilateral sigmas must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Geometry and smoothing applied to every face before feature extraction.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PreprocessConfig {
    pub face_w: u32,
    pub face_h: u32,
    pub bilateral: BilateralParams,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            face_w: 40,
            face_h: 40,
            bilateral: BilateralParams::default(),
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.face_w < 8 || self.face_h < 8 {
            return Err(Error::InvalidConfig(
                "face dimensions must be at least 8x8".into(),
            ));
        }
        self.bilateral.validate()
    }
}

/// Edge-preserving smoothing: each pixel becomes the normalized
/// space-and-range weighted average of its window, with
/// `weight = exp(-d^2 / 2*sigma_s^2) * exp(-dI^2 / 2*sigma_r^2)`.
/// Borders replicate, so output dimensions equal input dimensions.
pub fn bilateral_filter(img: &GrayImage, p: &BilateralParams) -> GrayImage {
    let radius = p.radius as i64;
    let side = (2 * radius + 1) as usize;

    let mut spatial = vec![0.0f64; side * side];
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let d2 = (dx * dx + dy * dy) as f64;
            spatial[((dy + radius) as usize) * side + (dx + radius) as usize] =
                (-d2 / (2.0 * p.sigma_spatial * p.sigma_spatial)).exp();
        }
    }
    // Range weights only depend on |dI|, which lives in 0..=255.
    let range: Vec<f64> = (0..=255u32)
        .map(|d| {
            let d = d as f64;
            (-(d * d) / (2.0 * p.sigma_range * p.sigma_range)).exp()
        })
        .collect();

    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let center = img.get(x, y);
        let mut weight_sum = 0.0;
        let mut value_sum = 0.0;
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let v = img.get_clamped(x as i64 + dx, y as i64 + dy);
                let diff = (v as i32 - center as i32).unsigned_abs() as usize;
                let w = spatial[((dy + radius) as usize) * side + (dx + radius) as usize]
                    * range[diff];
                weight_sum += w;
                value_sum += w * v as f64;
            }
        }
        (value_sum / weight_sum).round() as u8
    })
}

/// Full normalization: crop the face rect, bilinear-resize to the configured
/// working size, then bilateral-filter. Output is always
/// `(cfg.face_w, cfg.face_h)` regardless of input size.
pub fn preprocess_face(img: &GrayImage, face: Rect, cfg: &PreprocessConfig) -> Result<GrayImage> {
    let cropped = crop(img, face)?;
    let resized = resize_bilinear(&cropped, cfg.face_w, cfg.face_h);
    Ok(bilateral_filter(&resized, &cfg.bilateral))
}
