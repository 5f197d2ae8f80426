//! Row-major raster containers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A `width × height` grid of samples stored row-major.
///
/// Both dimensions are at least 1 and `data.len() == width * height`; every
/// constructor checks this, so the accessors never need to.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

/// 8-bit RGB input image.
pub type RgbImage = Raster<[u8; 3]>;
/// Single-channel 8-bit intensity plane.
pub type GrayImage = Raster<u8>;
/// CIE L\*a\*b\* image, D65 white.
pub type LabImage = Raster<Lab>;
/// Hue/saturation/intensity image.
pub type HsiImage = Raster<Hsi>;
/// Binary labeling: `true` is spot (label 1), `false` is background (label 0).
pub type LabelMask = Raster<bool>;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// `h` in degrees `[0, 360)`, `s` and `i` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hsi {
    pub h: f64,
    pub s: f64,
    pub i: f64,
}

impl<T> Raster<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(data.len()) {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false; kept for API symmetry with slices.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[self.index(x, y)]
    }

    #[inline]
    pub fn get_mut(&mut self, x: usize, y: usize) -> &mut T {
        let i = self.index(x, y);
        &mut self.data[i]
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Raster<U> {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Wraps `data` with this raster's dimensions.
    pub(crate) fn with_data<U>(&self, data: Vec<U>) -> Raster<U> {
        debug_assert_eq!(data.len(), self.data.len());
        Raster {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Iterates `(x, y, &value)` in raster order.
    pub fn enumerate(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| (i % w, i / w, v))
    }
}

impl<T: Clone> Raster<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Copies the `w × h` window whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::InvalidParameter {
                name: "crop",
                reason: "window exceeds raster bounds",
            });
        }
        Self::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y).clone())
    }
}

impl LabelMask {
    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn complement(&self) -> Self {
        self.map(|&v| !v)
    }

    /// Pixelwise union; sizes must agree.
    pub fn union(&self, other: &Self) -> Result<Self> {
        crate::error::ensure_same_size(self.dims(), other.dims())?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a || b)
            .collect();
        Ok(self.with_data(data))
    }
}

impl GrayImage {
    /// Replicates the gray level into all three channels.
    pub fn to_rgb(&self) -> RgbImage {
        self.map(|&v| [v, v, v])
    }
}
