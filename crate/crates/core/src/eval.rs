//! Pixel-level confusion/efficiency and Hoover region metrics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_same_size, Error, Result};
use crate::image::LabelMask;
use crate::regions::RegionMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

pub fn confusion(mask: &LabelMask, gt: &LabelMask) -> Result<ConfusionMatrix> {
    ensure_same_size(gt.dims(), mask.dims())?;
    let mut cm = ConfusionMatrix::default();
    for (&m, &g) in mask.as_slice().iter().zip(gt.as_slice()) {
        match (m, g) {
            (true, true) => cm.true_pos += 1,
            (false, false) => cm.true_neg += 1,
            (true, false) => cm.false_pos += 1,
            (false, true) => cm.false_neg += 1,
        }
    }
    Ok(cm)
}

/// Percentage of correctly labeled pixels, `100 (tp + tn) / total`.
pub fn efficiency(cm: &ConfusionMatrix) -> f64 {
    let total = cm.total();
    if total == 0 {
        return 0.0;
    }
    100.0 * (cm.true_pos + cm.true_neg) as f64 / total as f64
}

/// Region counts for one machine-segmented / ground-truth pair.
///
/// `over_segmented` counts ground-truth regions and `under_segmented`
/// counts machine regions; the `*_participants` fields count the regions
/// on the other side consumed by those classifications, so that
///
/// - `correct + over_segmented + under_participants + missed == gt_regions`
/// - `correct + over_participants + under_segmented + noise == ms_regions`
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HooverCounts {
    pub tolerance: f64,
    pub correct: usize,
    pub over_segmented: usize,
    pub under_segmented: usize,
    pub missed: usize,
    pub noise: usize,
    /// Machine regions taking part in over-segmentations.
    pub over_participants: usize,
    /// Ground-truth regions taking part in under-segmentations.
    pub under_participants: usize,
    pub gt_regions: usize,
    pub ms_regions: usize,
}

fn check_tolerance(t: f64) -> Result<()> {
    if t > 0.5 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tolerance",
            reason: "must lie in (0.5, 1]",
        })
    }
}

/// Classifies regions as correct, over-segmented, under-segmented, missed
/// or noise at tolerance `t`.
///
/// Classes are assigned in that order and each region is consumed at most
/// once; whatever ground-truth region is left is missed and whatever
/// machine region is left is noise.
pub fn hoover_classify(ms: &RegionMap, gt: &RegionMap, t: f64) -> Result<HooverCounts> {
    check_tolerance(t)?;
    ensure_same_size(gt.dims(), ms.dims())?;

    let mut overlap: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (&m, &g) in ms.ids().as_slice().iter().zip(gt.ids().as_slice()) {
        if m != 0 && g != 0 {
            *overlap.entry((m, g)).or_insert(0) += 1;
        }
    }
    let (n_ms, n_gt) = (ms.region_count(), gt.region_count());
    let mut by_gt: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n_gt + 1];
    let mut by_ms: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n_ms + 1];
    for (&(m, g), &o) in &overlap {
        by_ms[m as usize].push((g, o));
        by_gt[g as usize].push((m, o));
    }

    let covers = |o: usize, size: usize| o as f64 >= t * size as f64;
    let mut ms_used = vec![false; n_ms + 1];
    let mut gt_used = vec![false; n_gt + 1];
    let mut c = HooverCounts {
        tolerance: t,
        gt_regions: n_gt,
        ms_regions: n_ms,
        ..Default::default()
    };

    for (&(m, g), &o) in &overlap {
        let (mi, gi) = (m as usize, g as usize);
        if !ms_used[mi] && !gt_used[gi] && covers(o, ms.size(m)) && covers(o, gt.size(g)) {
            ms_used[mi] = true;
            gt_used[gi] = true;
            c.correct += 1;
        }
    }

    for g in 1..=n_gt as u32 {
        if gt_used[g as usize] {
            continue;
        }
        let parts: Vec<(u32, usize)> = by_gt[g as usize]
            .iter()
            .copied()
            .filter(|&(m, o)| !ms_used[m as usize] && covers(o, ms.size(m)))
            .collect();
        let sum: usize = parts.iter().map(|p| p.1).sum();
        if parts.len() >= 2 && covers(sum, gt.size(g)) {
            gt_used[g as usize] = true;
            for (m, _) in &parts {
                ms_used[*m as usize] = true;
            }
            c.over_segmented += 1;
            c.over_participants += parts.len();
        }
    }

    for m in 1..=n_ms as u32 {
        if ms_used[m as usize] {
            continue;
        }
        let parts: Vec<(u32, usize)> = by_ms[m as usize]
            .iter()
            .copied()
            .filter(|&(g, o)| !gt_used[g as usize] && covers(o, gt.size(g)))
            .collect();
        let sum: usize = parts.iter().map(|p| p.1).sum();
        if parts.len() >= 2 && covers(sum, ms.size(m)) {
            ms_used[m as usize] = true;
            for (g, _) in &parts {
                gt_used[*g as usize] = true;
            }
            c.under_segmented += 1;
            c.under_participants += parts.len();
        }
    }

    c.missed = gt_used[1..].iter().filter(|&&u| !u).count();
    c.noise = ms_used[1..].iter().filter(|&&u| !u).count();
    Ok(c)
}

/// How per-pair counts are combined into curve fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Pooling {
    /// Fractions per pair, then the mean over pairs.
    #[default]
    PerImage,
    /// Counts summed over pairs, then one fraction.
    Corpus,
}

/// One tolerance row. `correct`, `over` and `missed` are fractions of
/// ground-truth regions; `under` and `noise` fractions of machine regions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HooverRow {
    pub tolerance: f64,
    pub correct: f64,
    pub over: f64,
    pub under: f64,
    pub missed: f64,
    pub noise: f64,
}

/// `0.55, 0.60, ..., 0.95`.
pub fn default_tolerances() -> Vec<f64> {
    (0..9).map(|k| (55 + 5 * k) as f64 / 100.0).collect()
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Combines the counts of several pairs classified at one tolerance.
pub fn summarize(counts: &[HooverCounts], pooling: Pooling) -> Result<HooverRow> {
    let Some(first) = counts.first() else {
        return Err(Error::EmptyInput);
    };
    let t = first.tolerance;
    Ok(match pooling {
        Pooling::PerImage => {
            let k = counts.len() as f64;
            let mean = |f: &dyn Fn(&HooverCounts) -> f64| counts.iter().map(f).sum::<f64>() / k;
            HooverRow {
                tolerance: t,
                correct: mean(&|c| ratio(c.correct, c.gt_regions)),
                over: mean(&|c| ratio(c.over_segmented, c.gt_regions)),
                under: mean(&|c| ratio(c.under_segmented, c.ms_regions)),
                missed: mean(&|c| ratio(c.missed, c.gt_regions)),
                noise: mean(&|c| ratio(c.noise, c.ms_regions)),
            }
        }
        Pooling::Corpus => {
            let sum = |f: &dyn Fn(&HooverCounts) -> usize| counts.iter().map(f).sum::<usize>();
            let gt = sum(&|c| c.gt_regions);
            let ms = sum(&|c| c.ms_regions);
            HooverRow {
                tolerance: t,
                correct: ratio(sum(&|c| c.correct), gt),
                over: ratio(sum(&|c| c.over_segmented), gt),
                under: ratio(sum(&|c| c.under_segmented), ms),
                missed: ratio(sum(&|c| c.missed), gt),
                noise: ratio(sum(&|c| c.noise), ms),
            }
        }
    })
}

/// One row per tolerance, combining all pairs as selected by `pooling`.
pub fn hoover_curve(
    pairs: &[(RegionMap, RegionMap)],
    tolerances: &[f64],
    pooling: Pooling,
) -> Result<Vec<HooverRow>> {
    if pairs.is_empty() || tolerances.is_empty() {
        return Err(Error::EmptyInput);
    }
    tolerances
        .iter()
        .map(|&t| {
            let counts = pairs
                .iter()
                .map(|(ms, gt)| hoover_classify(ms, gt, t))
                .collect::<Result<Vec<_>>>()?;
            summarize(&counts, pooling)
        })
        .collect()
}
