//! File formats, experiment runner and synthetic corpora for `spotseg-core`.
//!
//! A corpus directory holds `images/*.png` and same-named ground-truth
//! masks in `gt/*.png`. Masks are single-channel PNGs with values 0 and
//! 255; anything above 127 reads as foreground.

pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod overlay;
pub mod segment;
pub mod synth;

pub use error::{Error, Result, Stage};
pub use experiment::{
    experiment_grid, Experiment, ExperimentSpec, Inference, Postprocessing, Preprocessing,
};
pub use grid::{run_grid, write_reports, Corpus, GridOptions, RunReport};
pub use overlay::render_overlay;
pub use segment::{segment, segment_image, Segmentation};
pub use synth::{make_synthetic, write_corpus, Gradient, SynthParams, SyntheticImage};
