use alloc::vec::Vec;

use super::clahe::{clahe, ClaheParams};
use crate::color::{hsi_pixel_to_rgb, lab_pixel_to_rgb, rgb_pixel_to_hsi, rgb_pixel_to_lab, to_u8};
use crate::error::{Error, Result};
use crate::image::{GrayImage, Hsi, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PreprocessConfig {
    pub clahe: ClaheParams,
    /// Multiplier on HSI saturation, in `(0, 4]`.
    pub saturation_gain: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            clahe: ClaheParams::default(),
            saturation_gain: 1.5,
        }
    }
}

fn check_gain(gain: f64) -> Result<()> {
    if gain > 0.0 && gain <= 4.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "saturation_gain",
            reason: "must lie in (0, 4]",
        })
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        self.clahe.validate()?;
        check_gain(self.saturation_gain)
    }
}

/// Scales HSI saturation by `gain` (capped at 1) and converts back to RGB.
pub fn saturation_correct(img: &RgbImage, gain: f64) -> Result<RgbImage> {
    check_gain(gain)?;
    Ok(img.map(|&p| {
        let hsi = rgb_pixel_to_hsi(p);
        if hsi.s == 0.0 {
            return p;
        }
        hsi_pixel_to_rgb(Hsi {
            s: (gain * hsi.s).min(1.0),
            ..hsi
        })
    }))
}

/// CLAHE on the L\* channel followed by a saturation boost.
///
/// L\* is rescaled to `[0, 255]` for the integer CLAHE; the correction is
/// applied back as a delta so pixels whose level CLAHE leaves alone keep
/// their exact L\*.
pub fn preprocess_pipeline(img: &RgbImage, cfg: &PreprocessConfig) -> Result<RgbImage> {
    cfg.validate()?;
    let lab: Vec<_> = img
        .as_slice()
        .iter()
        .map(|&p| rgb_pixel_to_lab(p))
        .collect();
    let levels: Vec<u8> = lab.iter().map(|c| to_u8(c.l * 255.0 / 100.0)).collect();
    let l8 = GrayImage::new(img.width(), img.height(), levels)?;
    let eq = clahe(&l8, &cfg.clahe)?;
    let rgb = lab
        .iter()
        .zip(l8.as_slice().iter().zip(eq.as_slice()))
        .map(|(&c, (&before, &after))| {
            let dl = (f64::from(after) - f64::from(before)) * 100.0 / 255.0;
            let mut c = c;
            c.l = (c.l + dl).clamp(0.0, 100.0);
            lab_pixel_to_rgb(c)
        })
        .collect();
    saturation_correct(&img.with_data(rgb), cfg.saturation_gain)
}
