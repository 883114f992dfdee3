//! Block LBP histogram descriptor: the LBP map is partitioned into a grid of
//! blocks per level, each block contributes an L1-normalized histogram of its
//! codes, and all histograms concatenate into one global feature vector.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Rect};
use crate::lbp::{lbp_map, LbpMap};

/// One partition level: block geometry plus the histogram bin count.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub block_h: u32,
    pub block_w: u32,
    pub bins: u32,
}

impl BlockSpec {
    pub fn new(block_h: u32, block_w: u32, bins: u32) -> BlockSpec {
        BlockSpec {
            block_h,
            block_w,
            bins,
        }
    }
}

/// Descriptor geometry: working face size and the ordered block levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureConfig {
    pub face_w: u32,
    pub face_h: u32,
    pub levels: Vec<BlockSpec>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            face_w: 40,
            face_h: 40,
            levels: vec![BlockSpec::new(6, 6, 8), BlockSpec::new(8, 10, 16)],
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::InvalidConfig("at least one block level".into()));
        }
        for (i, level) in self.levels.iter().enumerate() {
            if level.block_h < 1 || level.block_h > self.face_h {
                return Err(Error::InvalidConfig(format!(
                    "level {i}: block_h {} not in 1..={}",
                    level.block_h, self.face_h
                )));
            }
            if level.block_w < 1 || level.block_w > self.face_w {
                return Err(Error::InvalidConfig(format!(
                    "level {i}: block_w {} not in 1..={}",
                    level.block_w, self.face_w
                )));
            }
            if level.bins < 1 || level.bins > 256 {
                return Err(Error::InvalidConfig(format!(
                    "level {i}: bins {} not in 1..=256",
                    level.bins
                )));
            }
        }
        Ok(())
    }

    /// Total descriptor length over all levels.
    pub fn feature_dim(&self) -> usize {
        self.levels
            .iter()
            .map(|l| {
                (self.face_h / l.block_h) as usize
                    * (self.face_w / l.block_w) as usize
                    * l.bins as usize
            })
            .sum()
    }

    /// Stable fingerprint binding feature vectors to the config that produced
    /// them (FNV-1a over the geometry fields).
    pub fn id(&self) -> u64 {
        let mut hash = 0xcbf29ce484222325u64;
        let mut eat = |v: u64| {
            for byte in v.to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.face_w as u64);
        eat(self.face_h as u64);
        for l in &self.levels {
            eat(l.block_h as u64);
            eat(l.block_w as u64);
            eat(l.bins as u64);
        }
        hash
    }
}

/// Concatenated block histograms, tagged with the producing config's id.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub config_id: u64,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, config_id: u64) -> FeatureVector {
        FeatureVector { values, config_id }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Splits a `w x h` area into a floor-grid of blocks, row-major. Interior
/// blocks are exactly `block_h x block_w`; remainder pixels merge into the
/// last block of each row and column so every pixel lands in exactly one
/// block.
pub fn block_partition(w: u32, h: u32, spec: &BlockSpec) -> Vec<Rect> {
    let rows = h / spec.block_h;
    let cols = w / spec.block_w;
    let mut blocks = Vec::with_capacity((rows * cols) as usize);
    for by in 0..rows {
        let y = by * spec.block_h;
        let bh = if by == rows - 1 { h - y } else { spec.block_h };
        for bx in 0..cols {
            let x = bx * spec.block_w;
            let bw = if bx == cols - 1 { w - x } else { spec.block_w };
            blocks.push(Rect::new(x, y, bw, bh));
        }
    }
    blocks
}

/// `bins`-bin histogram of the LBP codes inside `r`, L1-normalized to sum 1.
/// Codes bin uniformly: code `v` falls in bin `v * bins / 256`.
pub fn block_histogram(map: &LbpMap, r: Rect, bins: u32) -> Result<Vec<f64>> {
    if !r.within(map.width(), map.height()) {
        return Err(Error::RectOutOfBounds {
            rect: r,
            width: map.width(),
            height: map.height(),
        });
    }
    if r.area() == 0 {
        return Err(Error::EmptyRect);
    }
    let mut counts = vec![0u64; bins as usize];
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            let code = map.get(x, y) as u32;
            counts[(code * bins / 256) as usize] += 1;
        }
    }
    let area = r.area() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / area).collect())
}

/// Computes the full descriptor: one LBP map, then per level, per block in
/// row-major order, the normalized block histogram.
pub fn extract_features(face: &GrayImage, cfg: &FeatureConfig) -> Result<FeatureVector> {
    if face.width() != cfg.face_w || face.height() != cfg.face_h {
        return Err(Error::LengthMismatch {
            context: "face image pixels",
            expected: (cfg.face_w * cfg.face_h) as usize,
            got: (face.width() * face.height()) as usize,
        });
    }
    cfg.validate()?;
    let map = lbp_map(face);
    let mut values = Vec::with_capacity(cfg.feature_dim());
    for level in &cfg.levels {
        for block in block_partition(cfg.face_w, cfg.face_h, level) {
            values.extend(block_histogram(&map, block, level.bins)?);
        }
    }
    debug_assert_eq!(values.len(), cfg.feature_dim());
    Ok(FeatureVector::new(values, cfg.id()))
}
