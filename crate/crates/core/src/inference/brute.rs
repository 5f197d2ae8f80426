use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::LabelMask;
use crate::mrf::EnergyModel;

pub const MAX_BRUTE_FORCE_PIXELS: usize = 20;

/// Exhaustive minimum over all `2^(w h)` labelings. Ties go to the
/// lexicographically smallest labeling in raster order (0 < 1).
pub fn brute_force(model: &EnergyModel) -> Result<LabelMask> {
    let n = model.len();
    if n > MAX_BRUTE_FORCE_PIXELS {
        return Err(Error::TooLarge {
            pixels: n,
            limit: MAX_BRUTE_FORCE_PIXELS,
        });
    }
    let mut labels: Vec<bool> = alloc::vec![false; n];
    let mut best = (model.energy_of(&labels), 0u32);
    // Pixel 0 is the most significant bit, so counting up visits labelings
    // in lexicographic order.
    for code in 1u32..(1u32 << n) {
        for (i, l) in labels.iter_mut().enumerate() {
            *l = code >> (n - 1 - i) & 1 == 1;
        }
        let e = model.energy_of(&labels);
        if e < best.0 {
            best = (e, code);
        }
    }
    let labels = (0..n).map(|i| best.1 >> (n - 1 - i) & 1 == 1).collect();
    LabelMask::new(model.width(), model.height(), labels)
}
