use alloc::vec;
use alloc::vec::Vec;

use super::histogram::histogram;
use crate::error::{Error, Result};
use crate::image::{GrayImage, LabelMask};

/// Label 1 where `value > t`.
pub fn global_threshold(g: &GrayImage, t: u8) -> LabelMask {
    g.map(|&v| v > t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Otsu {
    pub threshold: u8,
    /// The image holds a single intensity; `threshold` is that value.
    pub degenerate: bool,
}

/// Between-class variance `w0 w1 (mu0 - mu1)^2` of splitting `hist` into
/// `[0, t]` and `(t, 255]`. Zero when either class is empty.
pub fn between_class_variance(hist: &[u64; 256], t: u8) -> f64 {
    let (mut n0, mut s0, mut n, mut s) = (0u64, 0u64, 0u64, 0u64);
    for (v, &c) in hist.iter().enumerate() {
        if v <= t as usize {
            n0 += c;
            s0 += c * v as u64;
        }
        n += c;
        s += c * v as u64;
    }
    split_variance(n0, s0, n, s)
}

#[inline]
fn split_variance(n0: u64, s0: u64, n: u64, s: u64) -> f64 {
    let n1 = n - n0;
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let (n0, n1, n) = (n0 as f64, n1 as f64, n as f64);
    let mu0 = s0 as f64 / n0;
    let mu1 = (s - s0) as f64 / n1;
    (n0 / n) * (n1 / n) * (mu0 - mu1) * (mu0 - mu1)
}

/// Otsu's threshold over the 256-bin histogram: the smallest `t` that
/// maximizes between-class variance.
pub fn otsu_threshold(g: &GrayImage) -> Otsu {
    let hist = histogram(g);
    let first = hist.iter().position(|&c| c > 0).expect("non-empty image");
    if hist.iter().filter(|&&c| c > 0).count() == 1 {
        return Otsu {
            threshold: first as u8,
            degenerate: true,
        };
    }
    let n: u64 = hist.iter().sum();
    let s: u64 = hist.iter().enumerate().map(|(v, &c)| c * v as u64).sum();
    let (mut n0, mut s0) = (0u64, 0u64);
    let mut best = (0u8, -1.0f64);
    for (t, &c) in hist.iter().enumerate().take(255) {
        n0 += c;
        s0 += c * t as u64;
        let var = split_variance(n0, s0, n, s);
        if var > best.1 {
            best = (t as u8, var);
        }
    }
    Otsu {
        threshold: best.0,
        degenerate: false,
    }
}

/// Maps any integer offset into `[0, n)` by reflecting at the borders
/// (`... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...`).
#[inline]
pub(crate) fn mirror(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Label 1 where `value > local_mean - offset`, the mean taken over a
/// `window × window` neighbourhood with mirrored borders.
pub fn adaptive_threshold(g: &GrayImage, window: usize, offset: i32) -> Result<LabelMask> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "must be odd and at least 3",
        });
    }
    let (w, h) = g.dims();
    let r = (window / 2) as isize;
    let px = g.as_slice();

    // Horizontal window sums, then vertical sums of those.
    let mut rows = vec![0i64; w * h];
    for y in 0..h {
        let line = &px[y * w..(y + 1) * w];
        for x in 0..w {
            let xi = x as isize;
            rows[y * w + x] = (xi - r..=xi + r)
                .map(|k| i64::from(line[mirror(k, w)]))
                .sum();
        }
    }
    let area = (window * window) as i64;
    let offset = i64::from(offset);
    let mut out: Vec<bool> = Vec::with_capacity(w * h);
    for y in 0..h {
        let yi = y as isize;
        for x in 0..w {
            let sum: i64 = (yi - r..=yi + r).map(|k| rows[mirror(k, h) * w + x]).sum();
            // value > sum/area - offset, kept in integers.
            out.push(i64::from(px[y * w + x]) * area > sum - offset * area);
        }
    }
    Ok(g.with_data(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Raster;

    #[test]
    fn global_threshold_is_strict() {
        let g = GrayImage::filled(3, 2, 100).unwrap();
        assert!(global_threshold(&g, 99).as_slice().iter().all(|&b| b));
        assert!(global_threshold(&g, 100).as_slice().iter().all(|&b| !b));
        let g = GrayImage::new(3, 1, vec![50, 150, 250]).unwrap();
        assert_eq!(global_threshold(&g, 100).as_slice(), &[false, true, true]);
    }

    #[test]
    fn otsu_degenerate() {
        let o = otsu_threshold(&GrayImage::filled(4, 4, 77).unwrap());
        assert_eq!(
            o,
            Otsu {
                threshold: 77,
                degenerate: true
            }
        );
    }

    #[test]
    fn otsu_two_level_picks_lowest_tie() {
        let g = Raster::from_fn(10, 10, |x, _| if x < 5 { 0 } else { 255 }).unwrap();
        assert_eq!(otsu_threshold(&g).threshold, 0);
    }

    #[test]
    fn otsu_bimodal_separates_modes() {
        let g = Raster::from_fn(10, 10, |x, y| if y * 10 + x < 40 { 10 } else { 200 }).unwrap();
        let t = otsu_threshold(&g).threshold;
        assert!((10..200).contains(&t));
        assert_eq!(global_threshold(&g, t).count_foreground(), 60);
    }

    #[test]
    fn mirror_indexing() {
        let got: Vec<_> = (-3..8).map(|i| mirror(i, 4)).collect();
        assert_eq!(got, vec![2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0]);
        assert_eq!(mirror(-5, 1), 0);
    }

    #[test]
    fn adaptive_constant_image() {
        let g = GrayImage::filled(5, 4, 90).unwrap();
        assert!(adaptive_threshold(&g, 3, 1)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&b| b));
        assert!(adaptive_threshold(&g, 3, -1)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&b| !b));
        assert!(adaptive_threshold(&g, 4, 0).is_err());
        assert!(adaptive_threshold(&g, 1, 0).is_err());
    }

    /// Direct O(n w^2) sliding window with explicit mirror padding.
    fn naive_adaptive(g: &GrayImage, window: usize, offset: i32) -> Vec<bool> {
        let (w, h) = g.dims();
        let r = (window / 2) as isize;
        let mut out = Vec::new();
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut sum = 0.0;
                for dy in -r..=r {
                    for dx in -r..=r {
                        sum += f64::from(*g.get(mirror(x + dx, w), mirror(y + dy, h)));
                    }
                }
                let mean = sum / (window * window) as f64;
                out.push(f64::from(*g.get(x as usize, y as usize)) > mean - f64::from(offset));
            }
        }
        out
    }

    #[test]
    fn adaptive_step_edge_matches_naive() {
        let g = Raster::from_fn(8, 5, |x, _| if x < 4 { 0 } else { 255 }).unwrap();
        let got = adaptive_threshold(&g, 3, 0).unwrap();
        assert_eq!(got.as_slice(), naive_adaptive(&g, 3, 0).as_slice());
        // With offset 0 a flat bright pixel equals its window mean, so only the
        // bright column touching the edge fires.
        for y in 0..5 {
            for x in 0..8 {
                assert_eq!(*got.get(x, y), x == 4, "({x},{y})");
            }
        }
    }

    #[test]
    fn adaptive_random_matches_naive() {
        let mut state = 12345u32;
        let g = Raster::from_fn(13, 9, |_, _| {
            state = state.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
            (state >> 24) as u8
        })
        .unwrap();
        for (win, off) in [(3, 0), (5, 4), (7, -3), (15, 2)] {
            assert_eq!(
                adaptive_threshold(&g, win, off).unwrap().as_slice(),
                naive_adaptive(&g, win, off).as_slice()
            );
        }
    }
}
