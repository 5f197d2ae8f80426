//! Region-contour refinement of MRF seed masks.
//!
//! Each iteration moves the boundary of the region by a front speed made of
//! a two-phase data force (pixels prefer the region whose mean intensity is
//! closer) minus the contraction bias, then applies morphological curvature
//! smoothing. Negative bias inflates the region, positive bias deflates it.
//!
//! Speeds below one pixel per iteration are accumulated per boundary pixel,
//! so a bias of `-0.4` on a featureless image advances the front by one
//! pixel every three iterations.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_same_size, Error, Result};
use crate::image::{GrayImage, LabelMask};
use crate::regions::{connected_components, Connectivity};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SnakeConfig {
    /// In `[-1, 1]`; negative expands.
    pub contraction_bias: f64,
    pub max_iterations: usize,
    pub smoothing_passes: usize,
}

impl Default for SnakeConfig {
    fn default() -> Self {
        Self {
            contraction_bias: -0.4,
            max_iterations: 100,
            smoothing_passes: 1,
        }
    }
}

impl SnakeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.contraction_bias) {
            return Err(Error::InvalidParameter {
                name: "contraction_bias",
                reason: "must lie in [-1, 1]",
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Iterations with an unchanged mask and no pending front motion needed to
/// declare convergence.
const STABLE_ITERATIONS: usize = 3;

/// Evolves `seeds` as a single region against the rest of the image.
pub fn refine(gray: &GrayImage, seeds: &LabelMask, cfg: &SnakeConfig) -> Result<LabelMask> {
    ensure_same_size(gray.dims(), seeds.dims())?;
    cfg.validate()?;
    let mut out = LabelMask::filled(gray.width(), gray.height(), false)?;
    if seeds.count_foreground() > 0 {
        let ignore = vec![false; gray.len()];
        Evolution::new(gray, seeds.as_slice().to_vec(), &ignore, cfg).run(out.as_mut_slice());
    }
    Ok(out)
}

/// Evolves every 8-connected component of `seeds` on its own and returns
/// the union. While a component evolves, pixels of the other components are
/// left out of its background statistics.
pub fn refine_per_region(
    gray: &GrayImage,
    seeds: &LabelMask,
    cfg: &SnakeConfig,
) -> Result<LabelMask> {
    ensure_same_size(gray.dims(), seeds.dims())?;
    cfg.validate()?;
    let regions = connected_components(seeds, Connectivity::Eight);
    let mut out = LabelMask::filled(gray.width(), gray.height(), false)?;
    if regions.region_count() <= 1 {
        return refine(gray, seeds, cfg);
    }
    let ids = regions.ids().as_slice();
    for id in 1..=regions.region_count() as u32 {
        let mask: Vec<bool> = ids.iter().map(|&v| v == id).collect();
        let ignore: Vec<bool> = ids.iter().map(|&v| v != 0 && v != id).collect();
        Evolution::new(gray, mask, &ignore, cfg).run(out.as_mut_slice());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Window {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
}

struct Evolution<'a> {
    width: usize,
    height: usize,
    gray: &'a [u8],
    ignore: &'a [bool],
    mask: Vec<bool>,
    acc: Vec<f64>,
    cfg: &'a SnakeConfig,
    /// Sum and count of intensities outside `ignore`.
    base: (f64, usize),
    bbox: Option<Window>,
    smoothing_parity: bool,
}

impl<'a> Evolution<'a> {
    fn new(gray: &'a GrayImage, mask: Vec<bool>, ignore: &'a [bool], cfg: &'a SnakeConfig) -> Self {
        let g = gray.as_slice();
        let mut base = (0.0, 0);
        for (&v, &ig) in g.iter().zip(ignore) {
            if !ig {
                base.0 += v as f64;
                base.1 += 1;
            }
        }
        let mut e = Self {
            width: gray.width(),
            height: gray.height(),
            gray: g,
            ignore,
            acc: vec![0.0; mask.len()],
            mask,
            cfg,
            base,
            bbox: None,
            smoothing_parity: false,
        };
        e.bbox = e.bbox_within(Window {
            x0: 0,
            y0: 0,
            x1: e.width - 1,
            y1: e.height - 1,
        });
        e
    }

    fn run(mut self, out: &mut [bool]) {
        let mut stable = 0;
        for _ in 0..self.cfg.max_iterations {
            if self.bbox.is_none() {
                break;
            }
            let changed = self.iterate();
            let pending = self.acc.iter().any(|&a| a != 0.0);
            stable = if changed || pending { 0 } else { stable + 1 };
            if stable >= STABLE_ITERATIONS {
                break;
            }
        }
        for (o, &m) in out.iter_mut().zip(&self.mask) {
            *o |= m;
        }
    }

    fn expand(&self, w: Window) -> Window {
        Window {
            x0: w.x0.saturating_sub(1),
            y0: w.y0.saturating_sub(1),
            x1: (w.x1 + 1).min(self.width - 1),
            y1: (w.y1 + 1).min(self.height - 1),
        }
    }

    fn bbox_within(&self, w: Window) -> Option<Window> {
        let mut b: Option<Window> = None;
        for y in w.y0..=w.y1 {
            for x in w.x0..=w.x1 {
                if self.mask[y * self.width + x] {
                    let nb = b.get_or_insert(Window {
                        x0: x,
                        y0: y,
                        x1: x,
                        y1: y,
                    });
                    nb.x0 = nb.x0.min(x);
                    nb.x1 = nb.x1.max(x);
                    nb.y0 = nb.y0.min(y);
                    nb.y1 = nb.y1.max(y);
                }
            }
        }
        b
    }

    /// Region mean and complement mean, or `None` when either side is empty.
    fn means(&self, w: Window) -> Option<(f64, f64)> {
        let (mut sum, mut n, mut sum_free, mut n_free) = (0.0, 0usize, 0.0, 0usize);
        for y in w.y0..=w.y1 {
            for x in w.x0..=w.x1 {
                let i = y * self.width + x;
                if self.mask[i] {
                    let v = self.gray[i] as f64;
                    sum += v;
                    n += 1;
                    if !self.ignore[i] {
                        sum_free += v;
                        n_free += 1;
                    }
                }
            }
        }
        let n_out = self.base.1 - n_free;
        if n == 0 || n_out == 0 {
            return None;
        }
        Some((sum / n as f64, (self.base.0 - sum_free) / n_out as f64))
    }

    fn on_boundary(&self, x: usize, y: usize) -> bool {
        let i = y * self.width + x;
        let m = self.mask[i];
        (x > 0 && self.mask[i - 1] != m)
            || (x + 1 < self.width && self.mask[i + 1] != m)
            || (y > 0 && self.mask[i - self.width] != m)
            || (y + 1 < self.height && self.mask[i + self.width] != m)
    }

    /// Front speed at pixel `i`; positive pushes the front outwards.
    fn speed(&self, i: usize, force: Option<(f64, f64)>) -> f64 {
        let f = match force {
            Some((c1, c0)) => {
                let v = self.gray[i] as f64;
                let d = ((v - c0) * (v - c0) - (v - c1) * (v - c1)) / ((c1 - c0) * (c1 - c0));
                d.clamp(-1.0, 1.0)
            }
            None => 0.0,
        };
        f - self.cfg.contraction_bias
    }

    fn iterate(&mut self) -> bool {
        let bbox = self.bbox.expect("non-empty region");
        let w = self.expand(bbox);
        let force = self.means(bbox).filter(|(c1, c0)| c1 != c0);
        let bias = self.cfg.contraction_bias;
        let mut flips = Vec::new();
        for y in w.y0..=w.y1 {
            for x in w.x0..=w.x1 {
                let i = y * self.width + x;
                if !self.on_boundary(x, y) {
                    self.acc[i] = 0.0;
                    continue;
                }
                let speed = self.speed(i, force);
                let push = if self.mask[i] { -speed } else { speed };
                if push > 0.0 {
                    self.acc[i] += push;
                    if self.acc[i] >= 1.0 {
                        flips.push(i);
                    }
                } else {
                    self.acc[i] = 0.0;
                }
            }
        }
        let mut changed = !flips.is_empty();
        for i in flips {
            self.mask[i] = !self.mask[i];
            self.acc[i] = 0.0;
        }
        let mut reach = w;

        for _ in 0..self.cfg.smoothing_passes {
            let Some(b) = self.bbox_within(reach) else {
                break;
            };
            let w = self.expand(b);
            if bias < 0.0 {
                changed |= self.smooth(w, Op::Is, force);
            } else if bias > 0.0 {
                changed |= self.smooth(w, Op::Si, force);
            } else {
                let (a, b) = if self.smoothing_parity {
                    (Op::Si, Op::Is)
                } else {
                    (Op::Is, Op::Si)
                };
                self.smoothing_parity = !self.smoothing_parity;
                changed |= self.smooth(w, a, force);
                changed |= self.smooth(w, b, force);
            }
            reach = self.expand(w);
        }
        self.bbox = self.bbox_within(reach);
        if changed {
            // Boundary pixels moved by smoothing restart their accumulation.
            for y in reach.y0..=reach.y1 {
                for x in reach.x0..=reach.x1 {
                    let i = y * self.width + x;
                    if self.acc[i] != 0.0 && !self.on_boundary(x, y) {
                        self.acc[i] = 0.0;
                    }
                }
            }
        }
        changed
    }

    /// One curvature pass. A pixel is only added where the front speed is
    /// non-negative and only removed where it is non-positive, so smoothing
    /// never works against the image force.
    fn smooth(&mut self, w: Window, op: Op, force: Option<(f64, f64)>) -> bool {
        let snap = Snapshot::new(&self.mask, self.width, self.height, w);
        let mut changed = false;
        for y in w.y0..=w.y1 {
            for x in w.x0..=w.x1 {
                let (xi, yi) = (x as isize, y as isize);
                let seg = |(dx, dy): (isize, isize), all: bool| {
                    let a = snap.get(xi - dx, yi - dy);
                    let c = snap.get(xi, yi);
                    let b = snap.get(xi + dx, yi + dy);
                    if all {
                        a && b && c
                    } else {
                        a || b || c
                    }
                };
                let v = match op {
                    Op::Si => DIRECTIONS.iter().any(|&d| seg(d, true)),
                    Op::Is => DIRECTIONS.iter().all(|&d| seg(d, false)),
                };
                let i = y * self.width + x;
                if self.mask[i] == v {
                    continue;
                }
                let speed = self.speed(i, force);
                if (v && speed >= 0.0) || (!v && speed <= 0.0) {
                    self.mask[i] = v;
                    changed = true;
                }
            }
        }
        changed
    }
}

#[derive(Clone, Copy)]
enum Op {
    /// Supremum of erosions along line segments: removes thin protrusions.
    Si,
    /// Infimum of dilations along line segments: fills thin gaps.
    Is,
}

const DIRECTIONS: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Copy of a mask window padded by one pixel; reads outside the image or the
/// padded window are background.
struct Snapshot {
    x0: isize,
    y0: isize,
    w: isize,
    h: isize,
    data: Vec<bool>,
}

impl Snapshot {
    fn new(mask: &[bool], width: usize, height: usize, win: Window) -> Self {
        let x0 = win.x0 as isize - 1;
        let y0 = win.y0 as isize - 1;
        let w = (win.x1 - win.x0 + 3) as isize;
        let h = (win.y1 - win.y0 + 3) as isize;
        let mut data = vec![false; (w * h) as usize];
        for yy in 0..h {
            let y = y0 + yy;
            if y < 0 || y >= height as isize {
                continue;
            }
            for xx in 0..w {
                let x = x0 + xx;
                if x >= 0 && x < width as isize {
                    data[(yy * w + xx) as usize] = mask[y as usize * width + x as usize];
                }
            }
        }
        Self { x0, y0, w, h, data }
    }

    fn get(&self, x: isize, y: isize) -> bool {
        let (xx, yy) = (x - self.x0, y - self.y0);
        xx >= 0 && yy >= 0 && xx < self.w && yy < self.h && self.data[(yy * self.w + xx) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Raster;

    fn disk(w: usize, h: usize, cx: f64, cy: f64, r: f64) -> LabelMask {
        Raster::from_fn(w, h, |x, y| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx * dx + dy * dy <= r * r
        })
        .unwrap()
    }

    fn paint(m: &LabelMask, on: u8, off: u8) -> GrayImage {
        m.map(|&b| if b { on } else { off })
    }

    fn jaccard(a: &LabelMask, b: &LabelMask) -> f64 {
        let mut inter = 0;
        let mut uni = 0;
        for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
            inter += (x && y) as usize;
            uni += (x || y) as usize;
        }
        inter as f64 / uni as f64
    }

    fn cfg(bias: f64, smoothing: usize) -> SnakeConfig {
        SnakeConfig {
            contraction_bias: bias,
            max_iterations: 100,
            smoothing_passes: smoothing,
        }
    }

    #[test]
    fn config_validation() {
        assert!(SnakeConfig::default().validate().is_ok());
        assert!(cfg(1.5, 1).validate().is_err());
        assert!(SnakeConfig {
            max_iterations: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn empty_seed_stays_empty() {
        let g = GrayImage::filled(8, 8, 100).unwrap();
        let seed = LabelMask::filled(8, 8, false).unwrap();
        assert_eq!(
            refine(&g, &seed, &SnakeConfig::default())
                .unwrap()
                .count_foreground(),
            0
        );
        assert_eq!(
            refine_per_region(&g, &seed, &SnakeConfig::default())
                .unwrap()
                .count_foreground(),
            0
        );
    }

    #[test]
    fn dimension_mismatch() {
        let g = GrayImage::filled(8, 8, 100).unwrap();
        let seed = LabelMask::filled(8, 7, false).unwrap();
        assert!(refine(&g, &seed, &SnakeConfig::default()).is_err());
    }

    #[test]
    fn exact_disk_is_stable() {
        let d = disk(64, 64, 32.0, 32.0, 14.0);
        let g = paint(&d, 255, 0);
        let out = refine(&g, &d, &cfg(0.0, 1)).unwrap();
        assert!(jaccard(&out, &d) >= 0.95);
    }

    #[test]
    fn half_disk_grows_towards_full_disk() {
        let d = disk(64, 64, 32.0, 32.0, 14.0);
        let g = paint(&d, 255, 0);
        let half = Raster::from_fn(64, 64, |x, y| *d.get(x, y) && x < 32).unwrap();
        let out = refine(&g, &half, &SnakeConfig::default()).unwrap();
        assert!(jaccard(&out, &d) > jaccard(&half, &d));
    }

    #[test]
    fn step_edge_is_fixed_point() {
        let m = Raster::from_fn(20, 10, |x, _| x >= 8).unwrap();
        let g = paint(&m, 200, 30);
        assert_eq!(refine(&g, &m, &cfg(0.0, 0)).unwrap(), m);
    }

    #[test]
    fn two_fragments_merge() {
        let d = disk(64, 64, 32.0, 32.0, 16.0);
        let g = paint(&d, 220, 40);
        let seeds = Raster::from_fn(64, 64, |x, y| {
            let a = (x as isize - 26).abs() <= 2 && (y as isize - 32).abs() <= 2;
            let b = (x as isize - 38).abs() <= 2 && (y as isize - 32).abs() <= 2;
            a || b
        })
        .unwrap();
        let out = refine_per_region(&g, &seeds, &SnakeConfig::default()).unwrap();
        assert_eq!(
            connected_components(&out, Connectivity::Eight).region_count(),
            1
        );
    }

    #[test]
    fn single_region_matches_refine() {
        let d = disk(40, 40, 20.0, 20.0, 8.0);
        let g = paint(&d, 200, 50);
        let seed = disk(40, 40, 20.0, 20.0, 4.0);
        let c = SnakeConfig::default();
        assert_eq!(
            refine(&g, &seed, &c).unwrap(),
            refine_per_region(&g, &seed, &c).unwrap()
        );
    }

    #[test]
    fn featureless_growth_is_bounded() {
        let g = GrayImage::filled(80, 80, 90).unwrap();
        let seed = Raster::from_fn(80, 80, |x, y| {
            (38..42).contains(&x) && (38..42).contains(&y)
        })
        .unwrap();
        let c = SnakeConfig {
            max_iterations: 30,
            ..Default::default()
        };
        let out = refine_per_region(&g, &seed, &c).unwrap();
        let bound = (0.4 * 30.0) as usize;
        for (x, y, &v) in out.enumerate() {
            if v {
                let dx = if x < 38 { 38 - x } else { x.saturating_sub(41) };
                let dy = if y < 38 { 38 - y } else { y.saturating_sub(41) };
                assert!(dx.max(dy) <= bound, "({x},{y})");
            }
        }
        assert!(out.count_foreground() > seed.count_foreground());
    }

    #[test]
    fn single_pixel_noise_vanishes() {
        let g = GrayImage::filled(16, 16, 20).unwrap();
        let mut seed = LabelMask::filled(16, 16, false).unwrap();
        *seed.get_mut(7, 7) = true;
        for bias in [0.0, 0.4] {
            assert_eq!(
                refine(&g, &seed, &cfg(bias, 1)).unwrap().count_foreground(),
                0
            );
        }
    }
}
