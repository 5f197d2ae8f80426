use alloc::vec::Vec;

use super::histogram::{cdf_map, equalization_map};
use crate::color::to_u8;
use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ClaheParams {
    pub tiles_x: usize,
    pub tiles_y: usize,
    /// Bin cap as a multiple of the uniform bin height `area / 256`.
    /// `f64::INFINITY` disables clipping.
    pub clip_limit: f64,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self {
            tiles_x: 8,
            tiles_y: 8,
            clip_limit: 2.0,
        }
    }
}

impl ClaheParams {
    pub fn validate(&self) -> Result<()> {
        if self.tiles_x == 0 || self.tiles_y == 0 {
            return Err(Error::InvalidParameter {
                name: "tiles",
                reason: "tile grid must be at least 1x1",
            });
        }
        if self.clip_limit.is_nan() || self.clip_limit < 1.0 {
            return Err(Error::InvalidParameter {
                name: "clip_limit",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Caps every bin at `limit` and spreads the excess uniformly; the remainder
/// goes one count at a time to evenly spaced bins.
fn clip_histogram(hist: &mut [u64; 256], limit: u64) {
    let mut excess = 0u64;
    for h in hist.iter_mut() {
        if *h > limit {
            excess += *h - limit;
            *h = limit;
        }
    }
    let base = excess / 256;
    let mut residual = excess % 256;
    for h in hist.iter_mut() {
        *h += base;
    }
    if residual > 0 {
        let step = (256 / residual as usize).max(1);
        for h in hist.iter_mut().step_by(step) {
            if residual == 0 {
                break;
            }
            *h += 1;
            residual -= 1;
        }
    }
}

/// Tile edges `i * n / tiles` for `i in 0..=tiles`.
fn tile_edges(n: usize, tiles: usize) -> Vec<usize> {
    (0..=tiles).map(|i| i * n / tiles).collect()
}

/// For every coordinate along one axis: the two tiles whose centers bracket
/// it and the weight of the second one.
fn axis_weights(n: usize, edges: &[usize]) -> Vec<(usize, usize, f64)> {
    let centers: Vec<f64> = edges
        .windows(2)
        .map(|e| (e[0] + e[1] - 1) as f64 / 2.0)
        .collect();
    let last = centers.len() - 1;
    (0..n)
        .map(|p| {
            let p = p as f64;
            if p <= centers[0] {
                (0, 0, 0.0)
            } else if p >= centers[last] {
                (last, last, 0.0)
            } else {
                let i = centers.iter().rposition(|&c| c <= p).unwrap();
                (i, i + 1, (p - centers[i]) / (centers[i + 1] - centers[i]))
            }
        })
        .collect()
}

/// Contrast-limited adaptive histogram equalization.
///
/// Each tile gets its own clipped equalization map; every output pixel
/// blends the maps of the four tiles whose centers surround it. Tiles
/// holding a single intensity keep the identity map.
pub fn clahe(g: &GrayImage, p: &ClaheParams) -> Result<GrayImage> {
    p.validate()?;
    let (w, h) = g.dims();
    if p.tiles_x > w || p.tiles_y > h {
        return Err(Error::InvalidParameter {
            name: "tiles",
            reason: "tile grid is larger than the image",
        });
    }
    let xe = tile_edges(w, p.tiles_x);
    let ye = tile_edges(h, p.tiles_y);
    let px = g.as_slice();

    let mut maps: Vec<[u8; 256]> = Vec::with_capacity(p.tiles_x * p.tiles_y);
    for ty in 0..p.tiles_y {
        for tx in 0..p.tiles_x {
            let mut hist = [0u64; 256];
            for y in ye[ty]..ye[ty + 1] {
                for &v in &px[y * w + xe[tx]..y * w + xe[tx + 1]] {
                    hist[v as usize] += 1;
                }
            }
            let map = if hist.iter().filter(|&&c| c > 0).count() <= 1 {
                equalization_map(&hist)
            } else if p.clip_limit.is_finite() {
                let area = ((xe[tx + 1] - xe[tx]) * (ye[ty + 1] - ye[ty])) as f64;
                let limit = libm::floor(p.clip_limit * area / 256.0).max(1.0) as u64;
                clip_histogram(&mut hist, limit);
                cdf_map(&hist)
            } else {
                cdf_map(&hist)
            };
            maps.push(map);
        }
    }

    let wx = axis_weights(w, &xe);
    let wy = axis_weights(h, &ye);
    let mut out = Vec::with_capacity(w * h);
    for (y, &(ty0, ty1, fy)) in wy.iter().enumerate() {
        for (x, &(tx0, tx1, fx)) in wx.iter().enumerate() {
            let v = px[y * w + x] as usize;
            let m = |tx: usize, ty: usize| f64::from(maps[ty * p.tiles_x + tx][v]);
            let top = (1.0 - fx) * m(tx0, ty0) + fx * m(tx1, ty0);
            let bottom = (1.0 - fx) * m(tx0, ty1) + fx * m(tx1, ty1);
            out.push(to_u8((1.0 - fy) * top + fy * bottom));
        }
    }
    Ok(g.with_data(out))
}
