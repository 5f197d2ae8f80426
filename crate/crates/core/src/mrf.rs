//! Binary Markov random field with per-pixel data costs and a Potts
//! smoothness term on the 4-connected grid.
//!
//! All three data terms share the spot cost `250 - gray`; they differ in the
//! background cost: `gray`, `gray * level_bit` or `gray * color_bit`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{ensure_same_size, Error, Result};
use crate::image::{GrayImage, LabelMask, Raster, RgbImage};
use crate::preprocess::otsu_threshold;

/// Energy cost. Data terms are integer-valued on 8-bit input, so the whole
/// energy stays exact.
pub type Cost = i64;

/// Binary per-pixel plane (`true` = 1).
pub type BitPlane = Raster<bool>;

/// Constant in the spot data cost `SPOT_BASE - gray`.
pub const SPOT_BASE: Cost = 250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub enum EnergyFunction {
    /// Background cost `gray`.
    Intensity = 1,
    /// Background cost `gray * level_bit`.
    Quantized = 2,
    /// Background cost `gray * color_bit`.
    Color = 3,
}

impl EnergyFunction {
    pub const ALL: [EnergyFunction; 3] = [Self::Intensity, Self::Quantized, Self::Color];

    pub fn id(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for EnergyFunction {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Self::Intensity),
            2 => Ok(Self::Quantized),
            3 => Ok(Self::Color),
            _ => Err(Error::InvalidParameter {
                name: "energy_function",
                reason: "must be 1, 2 or 3",
            }),
        }
    }
}

impl From<EnergyFunction> for u8 {
    fn from(f: EnergyFunction) -> u8 {
        f.id()
    }
}

impl fmt::Display for EnergyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.id())
    }
}

/// How the two-level bit for [`EnergyFunction::Quantized`] is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LevelRule {
    /// Otsu split; the upper class is the "255" level.
    #[default]
    Otsu,
    /// Bit set only where the gray value is exactly 255.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyModel {
    width: usize,
    height: usize,
    /// `[cost_label0, cost_label1]` per pixel, row-major.
    unary: Vec<[Cost; 2]>,
    potts: Cost,
}

impl EnergyModel {
    pub fn new(width: usize, height: usize, unary: Vec<[Cost; 2]>, potts: Cost) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(unary.len()) {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: unary.len(),
            });
        }
        if potts < 0 {
            return Err(Error::InvalidParameter {
                name: "potts_weight",
                reason: "must be non-negative",
            });
        }
        Ok(Self {
            width,
            height,
            unary,
            potts,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.unary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty()
    }

    pub fn unary(&self) -> &[[Cost; 2]] {
        &self.unary
    }

    pub fn potts_weight(&self) -> Cost {
        self.potts
    }

    /// Energy of a labeling given as one bool per pixel.
    pub fn energy_of(&self, labels: &[bool]) -> Cost {
        debug_assert_eq!(labels.len(), self.unary.len());
        let w = self.width;
        let mut e: Cost = self
            .unary
            .iter()
            .zip(labels)
            .map(|(u, &l)| u[l as usize])
            .sum();
        let mut cuts = 0;
        for (i, &l) in labels.iter().enumerate() {
            let x = i % w;
            if x + 1 < w && labels[i + 1] != l {
                cuts += 1;
            }
            if i + w < labels.len() && labels[i + w] != l {
                cuts += 1;
            }
        }
        e += self.potts * cuts;
        e
    }

    /// Labeling that takes the cheaper data cost per pixel, ties to label 0.
    pub fn unary_argmin(&self) -> LabelMask {
        let labels = self.unary.iter().map(|u| u[1] < u[0]).collect();
        LabelMask::new(self.width, self.height, labels).expect("model dims are valid")
    }
}

/// Otsu two-level quantization. Returns the bit plane and whether the image
/// was constant (then every bit is 0).
pub fn quantize_two_levels(g: &GrayImage) -> (BitPlane, bool) {
    let otsu = otsu_threshold(g);
    if otsu.degenerate {
        return (g.map(|_| false), true);
    }
    (g.map(|&v| v > otsu.threshold), false)
}

/// Set where red and green are both strictly below blue.
pub fn color_indicator(img: &RgbImage) -> BitPlane {
    img.map(|&[r, g, b]| r < b && g < b)
}

/// Builds the data and smoothness terms for one of the three energy
/// functions. `gray` is the intensity plane used by the data terms; `img`
/// only feeds the color indicator.
pub fn build_energy(
    img: &RgbImage,
    gray: &GrayImage,
    function: EnergyFunction,
    potts_weight: Cost,
    level_rule: LevelRule,
) -> Result<EnergyModel> {
    ensure_same_size(img.dims(), gray.dims())?;
    let g = gray.as_slice();
    let background: Vec<Cost> = match function {
        EnergyFunction::Intensity => g.iter().map(|&v| Cost::from(v)).collect(),
        EnergyFunction::Quantized => {
            let bits = match level_rule {
                LevelRule::Otsu => quantize_two_levels(gray).0,
                LevelRule::Literal => gray.map(|&v| v == 255),
            };
            gated(g, bits.as_slice())
        }
        EnergyFunction::Color => gated(g, color_indicator(img).as_slice()),
    };
    let unary = background
        .into_iter()
        .zip(g)
        .map(|(c0, &v)| [c0, SPOT_BASE - Cost::from(v)])
        .collect();
    EnergyModel::new(gray.width(), gray.height(), unary, potts_weight)
}

fn gated(g: &[u8], bits: &[bool]) -> Vec<Cost> {
    g.iter()
        .zip(bits)
        .map(|(&v, &b)| if b { Cost::from(v) } else { 0 })
        .collect()
}

/// Data cost of `mask` plus `potts_weight` times the number of 4-neighbour
/// pairs with different labels.
pub fn total_energy(model: &EnergyModel, mask: &LabelMask) -> Result<Cost> {
    ensure_same_size(model.dims(), mask.dims())?;
    Ok(model.energy_of(mask.as_slice()))
}
