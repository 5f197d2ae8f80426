//! Seeded synthetic corpora of bright blue-tinted disks on a darker
//! background, with exact ground truth.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spotseg_core::{LabelMask, RgbImage};

use crate::error::{Error, Result};
use crate::io::{save_mask, save_rgb};

/// Horizontal illumination falloff: intensities are multiplied by
/// `1 - strength` at the left edge, rising linearly to 1 at the right edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub width: usize,
    pub height: usize,
    /// Inclusive range of spots per image.
    pub spots: [usize; 2],
    /// Inclusive range of spot radii in pixels.
    pub radius: [f64; 2],
    pub spot_color: [u8; 3],
    pub background: [u8; 3],
    /// Radial shading of each spot: the color blends towards the background
    /// by `falloff * (d / r)^2` at distance `d` from the center. In `[0, 1]`.
    pub spot_falloff: f64,
    pub gradient: Option<Gradient>,
    /// Standard deviation of additive Gaussian noise per channel.
    pub noise_sigma: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            spots: [8, 16],
            radius: [5.0, 12.0],
            spot_color: [150, 190, 250],
            background: [60, 50, 40],
            spot_falloff: 0.0,
            gradient: None,
            noise_sigma: 0.0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::Config(s.to_string()));
        let [r0, r1] = self.radius;
        if self.width == 0 || self.height == 0 {
            return bad("image dimensions must be positive");
        }
        if self.spots[0] > self.spots[1] {
            return bad("spot count range is empty");
        }
        if !(r0 > 0.0 && r0 <= r1) {
            return bad("radius range must be positive and non-empty");
        }
        if 2.0 * r1 + 1.0 > self.width.min(self.height) as f64 {
            return bad("spot diameter exceeds the image");
        }
        if let Some(g) = self.gradient {
            if !(0.0..1.0).contains(&g.strength) {
                return bad("gradient strength must lie in [0, 1)");
            }
        }
        if !(0.0..=1.0).contains(&self.spot_falloff) {
            return bad("spot falloff must lie in [0, 1]");
        }
        if self.noise_sigma.is_nan() || self.noise_sigma < 0.0 {
            return bad("noise sigma must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Disk {
    /// Pixel centers within distance `r` belong to the disk.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let (dx, dy) = (x as f64 - self.cx, y as f64 - self.cy);
        dx * dx + dy * dy <= self.r * self.r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticImage {
    pub name: String,
    pub image: RgbImage,
    pub gt: LabelMask,
    pub disks: Vec<Disk>,
}

const PLACEMENT_ATTEMPTS: usize = 1000;

fn place_disks(p: &SynthParams, rng: &mut ChaCha8Rng) -> Vec<Disk> {
    let n = rng.random_range(p.spots[0]..=p.spots[1]);
    let mut disks: Vec<Disk> = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..PLACEMENT_ATTEMPTS {
            let r = if p.radius[0] < p.radius[1] {
                rng.random_range(p.radius[0]..=p.radius[1])
            } else {
                p.radius[0]
            };
            let cx = rng.random_range(r..=(p.width as f64 - 1.0 - r));
            let cy = rng.random_range(r..=(p.height as f64 - 1.0 - r));
            // Keep at least two background pixels between spots.
            let free = disks.iter().all(|d| {
                let dist = ((d.cx - cx).powi(2) + (d.cy - cy).powi(2)).sqrt();
                dist > d.r + r + 2.0
            });
            if free {
                disks.push(Disk { cx, cy, r });
                break;
            }
        }
    }
    disks
}

fn render(p: &SynthParams, disks: &[Disk], rng: &mut ChaCha8Rng) -> (RgbImage, LabelMask) {
    let gt = LabelMask::from_fn(p.width, p.height, |x, y| {
        disks.iter().any(|d| d.contains(x, y))
    })
    .expect("valid dims");
    let noise = Normal::new(0.0, p.noise_sigma).expect("sigma validated");
    let mut data = Vec::with_capacity(p.width * p.height);
    for y in 0..p.height {
        for x in 0..p.width {
            let base: [f64; 3] = match disks.iter().find(|d| d.contains(x, y)) {
                Some(d) => {
                    let rho2 =
                        ((x as f64 - d.cx).powi(2) + (y as f64 - d.cy).powi(2)) / (d.r * d.r);
                    let t = p.spot_falloff * rho2;
                    std::array::from_fn(|k| {
                        p.spot_color[k] as f64 * (1.0 - t) + p.background[k] as f64 * t
                    })
                }
                None => p.background.map(f64::from),
            };
            let gain = match p.gradient {
                Some(g) if p.width > 1 => {
                    1.0 - g.strength * (1.0 - x as f64 / (p.width - 1) as f64)
                }
                Some(g) => 1.0 - g.strength,
                None => 1.0,
            };
            data.push(base.map(|c| {
                let mut v = c * gain;
                if p.noise_sigma > 0.0 {
                    v += noise.sample(rng);
                }
                v.round().clamp(0.0, 255.0) as u8
            }));
        }
    }
    (
        RgbImage::new(p.width, p.height, data).expect("valid dims"),
        gt,
    )
}

/// Generates `count` images. Image `i` draws from its own ChaCha stream of
/// `seed`, so the corpus is reproducible and independent of thread count.
pub fn make_synthetic(
    count: usize,
    params: &SynthParams,
    seed: u64,
) -> Result<Vec<SyntheticImage>> {
    params.validate()?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let disks = place_disks(params, &mut rng);
            let (image, gt) = render(params, &disks, &mut rng);
            SyntheticImage {
                name: format!("synth_{i:03}"),
                image,
                gt,
                disks,
            }
        })
        .collect())
}

/// Writes `images/<name>.png` and `gt/<name>.png` under `dir`.
pub fn write_corpus(dir: &Path, corpus: &[SyntheticImage]) -> Result<()> {
    for sub in ["images", "gt"] {
        let d = dir.join(sub);
        fs::create_dir_all(&d).map_err(Error::io(&d))?;
    }
    for s in corpus {
        save_rgb(
            &dir.join("images").join(format!("{}.png", s.name)),
            &s.image,
        )?;
        save_mask(&dir.join("gt").join(format!("{}.png", s.name)), &s.gt)?;
    }
    Ok(())
}
