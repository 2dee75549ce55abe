//! Adaptive palette sizing.
//!
//! For each candidate size 2^i (i = 0 ..= log2(max size)) the predicted
//! frame size is `sum * i + (frame_pixels - sum) * pixel_bits`, where `sum`
//! is the pixel mass of the top 2^i ranked colors. The smallest prediction
//! wins; the initial candidate is the uncompressed frame and only a strictly
//! smaller prediction replaces it, so ties keep the smaller palette.

use crate::palette::pow2_floor;

/// Returns the palette size (a power of two) minimizing the predicted frame
/// size, or 0 when `ranked` is empty.
pub fn optimal_ccd_size(
    ranked: &[(u32, u64)],
    frame_size_pixels: u64,
    pixel_size_bits: u64,
    max_size: usize,
) -> usize {
    if ranked.is_empty() || max_size == 0 {
        return 0;
    }
    let max_exp = pow2_floor(max_size).trailing_zeros();
    let mut expected = u128::from(frame_size_pixels) * u128::from(pixel_size_bits);
    let mut best = 0u32;
    for i in 0..=max_exp {
        let sum: u64 = ranked.iter().take(1 << i).map(|&(_, f)| f).sum();
        let sum = sum.min(frame_size_pixels);
        let size = u128::from(sum) * u128::from(i)
            + u128::from(frame_size_pixels - sum) * u128::from(pixel_size_bits);
        if size < expected {
            expected = size;
            best = i;
        }
    }
    1 << best
}

/// Scales sampled frequencies by the sampling divisor and clamps their total
/// to `frame_size_pixels`, preserving order.
pub fn scale_sampled(
    ranked: &[(u32, u64)],
    divisor: u32,
    frame_size_pixels: u64,
) -> Vec<(u32, u64)> {
    let mut budget = frame_size_pixels;
    ranked
        .iter()
        .map(|&(c, f)| {
            let scaled = f.saturating_mul(u64::from(divisor)).min(budget);
            budget -= scaled;
            (c, scaled)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_distribution_picks_two() {
        // 80% / 18% / 1% / 1% of 100 pixels
        let ranked = [(1, 80), (2, 18), (3, 1), (4, 1)];
        assert_eq!(optimal_ccd_size(&ranked, 100, 32, 64), 2);
    }

    #[test]
    fn single_color_picks_one() {
        assert_eq!(optimal_ccd_size(&[(9, 500)], 500, 32, 64), 1);
    }

    #[test]
    fn empty_disables() {
        assert_eq!(optimal_ccd_size(&[], 100, 32, 64), 0);
    }

    #[test]
    fn flat_and_skewed_tails() {
        let ranked: Vec<_> = (0..64).map(|c| (c, 1)).collect();
        assert_eq!(optimal_ccd_size(&ranked, 64, 32, 64), 64);
        // the second color is too rare to pay for the extra code bit
        assert_eq!(optimal_ccd_size(&[(1, 50), (2, 1)], 100, 32, 64), 1);
    }

    #[test]
    fn sampled_scaling_clamps() {
        let scaled = scale_sampled(&[(1, 10), (2, 5)], 4, 50);
        assert_eq!(scaled, vec![(1, 40), (2, 10)]);
    }
}
