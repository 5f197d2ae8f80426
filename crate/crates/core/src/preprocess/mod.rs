//! Contrast and color enhancement, plus the classic threshold baselines.

mod clahe;
mod histogram;
mod pipeline;
mod threshold;

pub use clahe::{clahe, ClaheParams};
pub use histogram::{contrast_correct, equalization_map, histogram, histogram_equalize};
pub use pipeline::{preprocess_pipeline, saturation_correct, PreprocessConfig};
pub use threshold::{
    adaptive_threshold, between_class_variance, global_threshold, otsu_threshold, Otsu,
};
