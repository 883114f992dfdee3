//! Local binary pattern codes: each pixel's 3x3 neighborhood is thresholded
//! against the center and read as an 8-bit number. Codes depend only on the
//! sign of intensity differences, which is what makes the descriptor robust
//! to global illumination shifts.

use crate::image::GrayImage;

/// Neighbor offsets in canonical order: clockwise from top-left, so bit `n`
/// of a code corresponds to `NEIGHBOR_OFFSETS[n]` with weight `2^n`.
pub const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [
    (-1, -1), // top-left
    (0, -1),  // top
    (1, -1),  // top-right
    (1, 0),   // right
    (1, 1),   // bottom-right
    (0, 1),   // bottom
    (-1, 1),  // bottom-left
    (-1, 0),  // left
];

/// Per-pixel LBP codes for an image, same dimensions as the source.
pub struct LbpMap {
    width: u32,
    height: u32,
    codes: Vec<u8>,
}

impl LbpMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.codes[y as usize * self.width as usize + x as usize]
    }
}

/// Code for one pixel given its neighbors in canonical order. The threshold
/// is `>=`, so equal intensities set the bit (a constant patch codes to 255).
#[inline]
pub fn lbp_code(center: u8, neighbors: [u8; 8]) -> u8 {
    let mut code = 0u8;
    for (n, &v) in neighbors.iter().enumerate() {
        if v >= center {
            code |= 1 << n;
        }
    }
    code
}

/// LBP codes for every pixel, reading out-of-bounds neighbors through
/// border replication so the map keeps the full image geometry.
pub fn lbp_map(img: &GrayImage) -> LbpMap {
    let mut codes = Vec::with_capacity(img.width() as usize * img.height() as usize);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let center = img.get(x, y);
            let mut code = 0u8;
            for (n, &(dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                if img.get_clamped(x as i64 + dx, y as i64 + dy) >= center {
                    code |= 1 << n;
                }
            }
            codes.push(code);
        }
    }
    LbpMap {
        width: img.width(),
        height: img.height(),
        codes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent per-pixel oracle: gathers the neighborhood explicitly and
    /// sums weighted sign bits.
    fn lbp_map_oracle(img: &GrayImage) -> Vec<u8> {
        let mut out = Vec::new();
        for y in 0..img.height() as i64 {
            for x in 0..img.width() as i64 {
                let center = img.get_clamped(x, y);
                let mut code = 0u32;
                for (n, (dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                    let diff = img.get_clamped(x + dx, y + dy) as i32 - center as i32;
                    let s = if diff >= 0 { 1u32 } else { 0 };
                    code += s * (1 << n);
                }
                out.push(code as u8);
            }
        }
        out
    }

    #[test]
    fn equal_neighbors_code_to_255() {
        assert_eq!(lbp_code(7, [7; 8]), 255);
    }

    #[test]
    fn all_darker_neighbors_code_to_zero() {
        assert_eq!(lbp_code(9, [0; 8]), 0);
    }

    #[test]
    fn single_bit_follows_canonical_order() {
        // Only the top-left neighbor (bit 0) is >= center.
        assert_eq!(lbp_code(5, [6, 4, 4, 4, 4, 4, 4, 4]), 1);
        // Only the left neighbor (bit 7) qualifies.
        assert_eq!(lbp_code(5, [4, 4, 4, 4, 4, 4, 4, 6]), 128);
    }

    #[test]
    fn constant_image_maps_to_all_255() {
        let map = lbp_map(&GrayImage::constant(6, 4, 42));
        assert!(map.codes().iter().all(|&c| c == 255));
    }

    #[test]
    fn map_matches_oracle_on_random_images() {
        let mut state = 0x1234_5678u64;
        for _ in 0..50 {
            let img = GrayImage::from_fn(8, 8, |_, _| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 56) as u8
            });
            assert_eq!(lbp_map(&img).codes(), lbp_map_oracle(&img).as_slice());
        }
    }

    proptest! {
        #[test]
        fn invariant_under_brightness_shift(
            w in 1u32..12, h in 1u32..12,
            data in proptest::collection::vec(0u8..200, 1..144),
            shift in 1u8..55,
        ) {
            prop_assume!(data.len() >= (w * h) as usize);
            let base = GrayImage::new(w, h, data[..(w * h) as usize].to_vec()).unwrap();
            let shifted = GrayImage::from_fn(w, h, |x, y| base.get(x, y) + shift);
            let (map_base, map_shifted) = (lbp_map(&base), lbp_map(&shifted));
            prop_assert_eq!(map_base.codes(), map_shifted.codes());
        }
    }
}
