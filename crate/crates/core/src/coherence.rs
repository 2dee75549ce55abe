//! Temporal-coherence metrics over frames and frame pairs.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::surface::Frame;

/// Exact color histogram of a frame.
pub fn histogram(frame: &Frame) -> HashMap<u32, u64> {
    let mut hist = HashMap::new();
    for &p in frame.pixels() {
        *hist.entry(p).or_insert(0) += 1;
    }
    hist
}

fn check_pair(a: &Frame, b: &Frame) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch {
            file: "frame pair".into(),
            width: b.width(),
            height: b.height(),
            expected_width: a.width(),
            expected_height: a.height(),
        });
    }
    Ok(())
}

/// Fraction of positions whose color differs between the two frames.
pub fn pixel_change(a: &Frame, b: &Frame) -> Result<f64> {
    check_pair(a, b)?;
    let changed = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .filter(|(x, y)| x != y)
        .count();
    Ok(changed as f64 / a.pixel_count() as f64)
}

/// Histogram L1 distance normalized by 2N, so location-only changes score 0
/// and replacing every pixel with a new color scores 1.
pub fn color_change(a: &Frame, b: &Frame) -> Result<f64> {
    check_pair(a, b)?;
    let mut delta: HashMap<u32, i64> = HashMap::new();
    for (&x, &y) in a.pixels().iter().zip(b.pixels()) {
        if x != y {
            *delta.entry(x).or_insert(0) += 1;
            *delta.entry(y).or_insert(0) -= 1;
        }
    }
    let l1: u64 = delta.values().map(|d| d.unsigned_abs()).sum();
    Ok(l1 as f64 / (2.0 * a.pixel_count() as f64))
}

/// Shannon entropy of the color distribution, in bits per pixel.
pub fn entropy(frame: &Frame) -> f64 {
    let n = frame.pixel_count() as f64;
    histogram(frame)
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Pixel mass covered by the `k` most frequent colors.
pub fn color_cdf(frame: &Frame, k: usize) -> f64 {
    let mut counts: Vec<u64> = histogram(frame).into_values().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts.iter().take(k).sum::<u64>() as f64 / frame.pixel_count() as f64
}

/// CDF sampled at `points` (the report's column set).
pub fn color_cdf_points(frame: &Frame, points: &[usize]) -> Vec<f64> {
    let mut counts: Vec<u64> = histogram(frame).into_values().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let n = frame.pixel_count() as f64;
    points
        .iter()
        .map(|&k| counts.iter().take(k).sum::<u64>() as f64 / n)
        .collect()
}
