//! Multi-scale sliding-window face detection: Haar feature values from
//! integral images, variance-normalized, evaluated stage by stage, with raw
//! hits merged by overlap clustering.

use crate::cascade::HaarCascade;
use crate::error::{Error, Result};
use crate::image::{GrayImage, Rect};
use crate::integral::IntegralImage;

/// Scan-loop parameters. `min_size` of 0 means "the cascade base window".
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DetectParams {
    /// Ratio between successive window scales; must exceed 1.
    pub scale_factor: f64,
    /// Slide step in pixels at base scale, grown proportionally with scale.
    pub step: u32,
    /// Minimum raw hits a cluster needs to survive grouping.
    pub min_neighbors: u32,
    /// Smallest window side searched; 0 defers to the cascade base window.
    pub min_size: u32,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            scale_factor: 1.2,
            step: 2,
            min_neighbors: 3,
            min_size: 0,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        // Also rejects NaN.
        if self.scale_factor.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidConfig("scale_factor must be > 1".into()));
        }
        if self.step < 1 {
            return Err(Error::InvalidConfig("step must be >= 1".into()));
        }
        Ok(())
    }
}

/// A grouped detection: the merged rect and how many raw hits it absorbed.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Detection {
    pub rect: Rect,
    pub neighbors: u32,
}

/// Evaluates the cascade on a single window of the integral image.
///
/// Feature rects scale by `window.w / base_w`, with each rect's weight
/// compensated by its base-to-scaled area ratio so rounding drift does not
/// change feature magnitudes. Feature values are normalized by window area
/// times the window's intensity standard deviation (clamped below at 1).
pub fn eval_window(cascade: &HaarCascade, ii: &IntegralImage, window: Rect) -> Result<bool> {
    if !window.within(ii.width(), ii.height()) {
        return Err(Error::RectOutOfBounds {
            rect: window,
            width: ii.width(),
            height: ii.height(),
        });
    }
    if window.w < cascade.base_w || window.h < cascade.base_h {
        return Err(Error::InvalidConfig(format!(
            "window {}x{} smaller than cascade base {}x{}",
            window.w, window.h, cascade.base_w, cascade.base_h
        )));
    }

    let scale = window.w as f64 / cascade.base_w as f64;
    let area = window.area() as f64;
    let mean = ii.rect_sum(window)? as f64 / area;
    let sq_mean = ii.rect_sq_sum(window)? as f64 / area;
    let stddev = (sq_mean - mean * mean).max(0.0).sqrt().max(1.0);
    let norm = area * stddev;

    for stage in &cascade.stages {
        let mut total = 0.0;
        for weak in &stage.weak {
            let mut value = 0.0;
            for r in &weak.feature.rects {
                // Scaled rects clamp into the window: rounding can push
                // coordinates past the edge when base and window aspect
                // ratios disagree.
                let sx = ((r.x as f64 * scale).round() as u32).min(window.w - 1);
                let sy = ((r.y as f64 * scale).round() as u32).min(window.h - 1);
                let mut sw = ((r.w as f64 * scale).round() as u32).max(1);
                let mut sh = ((r.h as f64 * scale).round() as u32).max(1);
                sw = sw.min(window.w - sx);
                sh = sh.min(window.h - sy);
                let scaled = Rect::new(window.x + sx, window.y + sy, sw, sh);
                let compensation = (r.w as f64 * r.h as f64) / (sw as f64 * sh as f64);
                value += r.weight * compensation * ii.rect_sum(scaled)? as f64;
            }
            value /= norm;
            total += if value < weak.threshold {
                weak.left
            } else {
                weak.right
            };
        }
        if total < stage.threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scans the image at every scale `scale_factor^t`, sliding by
/// `round(step * scale)`, then groups accepted windows. Output is sorted by
/// (y, x, size) and always lies within the image; an image smaller than the
/// base window yields an empty result.
pub fn detect_faces(img: &GrayImage, cascade: &HaarCascade, p: &DetectParams) -> Vec<Detection> {
    let ii = IntegralImage::new(img);
    let min_side = p.min_size.max(1);
    let mut raw = Vec::new();

    let mut scale = 1.0f64;
    loop {
        let win_w = (cascade.base_w as f64 * scale).round() as u32;
        let win_h = (cascade.base_h as f64 * scale).round() as u32;
        if win_w > img.width() || win_h > img.height() {
            break;
        }
        if win_w >= min_side.max(cascade.base_w) && win_h >= min_side.max(cascade.base_h) {
            let step = ((p.step as f64 * scale).round() as u32).max(1);
            let mut y = 0;
            while y + win_h <= img.height() {
                let mut x = 0;
                while x + win_w <= img.width() {
                    let window = Rect::new(x, y, win_w, win_h);
                    let hit = eval_window(cascade, &ii, window)
                        .expect("scan windows are constructed in bounds");
                    if hit {
                        raw.push(window);
                    }
                    x += step;
                }
                y += step;
            }
        }
        scale *= p.scale_factor;
    }

    let mut detections = group_detections(&raw, p.min_neighbors);
    detections.sort_by_key(|d| (d.rect.y, d.rect.x, d.rect.area()));
    detections
}

/// Merges raw hits by transitive clustering: rects with pairwise IoU of at
/// least 0.5 join the same cluster, clusters smaller than `min_neighbors`
/// are dropped, and each survivor is reported as the component-wise mean
/// rect (rounded) with its member count.
pub fn group_detections(raw: &[Rect], min_neighbors: u32) -> Vec<Detection> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if raw[i].iou(&raw[j]) >= 0.5 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    // Accumulate clusters keyed by root, keeping first-member order.
    let mut order: Vec<usize> = Vec::new();
    let mut sums: std::collections::HashMap<usize, ([u64; 4], u32)> =
        std::collections::HashMap::new();
    for (i, rect) in raw.iter().enumerate() {
        let root = find(&mut parent, i);
        let entry = sums.entry(root).or_insert_with(|| {
            order.push(root);
            ([0; 4], 0)
        });
        entry.0[0] += rect.x as u64;
        entry.0[1] += rect.y as u64;
        entry.0[2] += rect.w as u64;
        entry.0[3] += rect.h as u64;
        entry.1 += 1;
    }

    order
        .into_iter()
        .filter_map(|root| {
            let ([sx, sy, sw, sh], count) = sums[&root];
            if count < min_neighbors.max(1) {
                return None;
            }
            let avg = |s: u64| (s as f64 / count as f64).round() as u32;
            Some(Detection {
                rect: Rect::new(avg(sx), avg(sy), avg(sw), avg(sh)),
                neighbors: count,
            })
        })
        .collect()
}
