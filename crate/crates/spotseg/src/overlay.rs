use spotseg_core::{LabelMask, RgbImage};

use crate::error::{Error, Result, Stage};

pub const FALSE_POSITIVE: [u8; 3] = [0, 255, 0];
pub const FALSE_NEGATIVE: [u8; 3] = [255, 0, 0];
pub const TRUE_POSITIVE: [u8; 3] = [255, 255, 0];

/// Colors disagreements between `mask` and `gt` over `base`: spurious spot
/// pixels green, missed ones red, agreeing spot pixels yellow. Agreeing
/// background keeps the base pixel.
pub fn render_overlay(mask: &LabelMask, gt: &LabelMask, base: &RgbImage) -> Result<RgbImage> {
    for dims in [gt.dims(), base.dims()] {
        if dims != mask.dims() {
            return Err(Error::Stage {
                stage: Stage::Evaluate,
                source: spotseg_core::Error::DimensionMismatch {
                    expected: mask.dims(),
                    found: dims,
                },
            });
        }
    }
    let data = mask
        .as_slice()
        .iter()
        .zip(gt.as_slice())
        .zip(base.as_slice())
        .map(|((&m, &g), &p)| match (m, g) {
            (true, true) => TRUE_POSITIVE,
            (true, false) => FALSE_POSITIVE,
            (false, true) => FALSE_NEGATIVE,
            (false, false) => p,
        })
        .collect();
    Ok(RgbImage::new(mask.width(), mask.height(), data).expect("same dims"))
}
