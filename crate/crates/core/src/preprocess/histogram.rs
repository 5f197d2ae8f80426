use crate::color::to_u8;
use crate::error::{Error, Result};
use crate::image::GrayImage;

pub fn histogram(g: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in g.as_slice() {
        hist[v as usize] += 1;
    }
    hist
}

#[inline]
fn identity_map() -> [u8; 256] {
    core::array::from_fn(|v| v as u8)
}

/// CDF remap `round((cdf(v) - cdf_min) * 255 / (n - cdf_min))` where
/// `cdf_min` is the cumulative count at the first occupied bin. Falls back
/// to the identity when the remap is undefined.
pub(crate) fn cdf_map(hist: &[u64; 256]) -> [u8; 256] {
    let n: u64 = hist.iter().sum();
    let cdf_min = hist.iter().copied().find(|&c| c > 0).unwrap_or(0);
    let den = n - cdf_min;
    if den == 0 {
        return identity_map();
    }
    let mut map = [0u8; 256];
    let mut cdf = 0u64;
    for (v, &c) in hist.iter().enumerate() {
        cdf += c;
        let num = cdf.saturating_sub(cdf_min);
        map[v] = ((2 * num * 255 + den) / (2 * den)).min(255) as u8;
    }
    map
}

/// Equalization lookup table for a histogram. A histogram with a single
/// occupied bin maps to the identity.
pub fn equalization_map(hist: &[u64; 256]) -> [u8; 256] {
    if hist.iter().filter(|&&c| c > 0).count() <= 1 {
        identity_map()
    } else {
        cdf_map(hist)
    }
}

pub fn histogram_equalize(g: &GrayImage) -> GrayImage {
    let map = equalization_map(&histogram(g));
    g.map(|&v| map[v as usize])
}

/// `min(255, round(c * value))` for a gain `c` in `[1, 3]`.
pub fn contrast_correct(g: &GrayImage, c: f64) -> Result<GrayImage> {
    if !(1.0..=3.0).contains(&c) {
        return Err(Error::InvalidParameter {
            name: "contrast gain",
            reason: "must lie in [1, 3]",
        });
    }
    Ok(g.map(|&v| to_u8(c * f64::from(v))))
}
