//! Unsupervised segmentation of animal spot patterns.
//!
//! The pipeline is: optional color preprocessing (CLAHE on L\*, saturation
//! boost in HSI), a binary Markov random field whose data term comes from the
//! gray level, a two-level quantization or a color indicator, exact (graph
//! cut) or approximate (loopy belief propagation) energy minimization, and an
//! optional region-contour refinement seeded by the MRF mask. Confusion-matrix
//! efficiency and Hoover region metrics score the result.
//!
//! Everything here is an in-memory transform. File formats, the experiment
//! runner and the CLI live in the `spotseg` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod color;
pub mod contours;
mod error;
pub mod eval;
pub mod image;
pub mod inference;
pub mod mrf;
pub mod preprocess;
pub mod regions;

pub use error::{Error, Result};
pub use image::{GrayImage, HsiImage, LabImage, LabelMask, RgbImage};
pub use regions::{connected_components, Connectivity, RegionMap};
