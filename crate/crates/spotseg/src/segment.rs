//! One image through preprocessing, energy construction, inference and
//! optional contour refinement.

use std::path::Path;
use std::time::{Duration, Instant};

use spotseg_core::color::to_gray;
use spotseg_core::contours::{refine, refine_per_region};
use spotseg_core::inference::{graphcut_with_stats, lbp_with_stats, FlowStats, LbpStats};
use spotseg_core::mrf::{build_energy, total_energy, Cost};
use spotseg_core::preprocess::preprocess_pipeline;
use spotseg_core::{LabelMask, RgbImage};

use crate::error::{Error, Result, Stage};
use crate::experiment::{ExperimentSpec, Inference, Postprocessing, Preprocessing};
use crate::io::load_rgb;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverStats {
    GraphCut(FlowStats),
    Lbp(LbpStats),
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub mask: LabelMask,
    /// MRF energy of the solver output, before contour refinement.
    pub energy: Cost,
    pub solver: SolverStats,
    pub timings: Vec<(Stage, Duration)>,
}

pub fn segment_image(img: &RgbImage, spec: &ExperimentSpec) -> Result<Segmentation> {
    spec.validate()?;
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |stage: Stage, timings: &mut Vec<(Stage, Duration)>| {
        let now = Instant::now();
        timings.push((stage, now - clock));
        clock = now;
    };

    let enhanced;
    let rgb = match spec.preprocessing {
        Preprocessing::None => img,
        Preprocessing::Proposed => {
            enhanced =
                preprocess_pipeline(img, &spec.preprocess).map_err(Error::at(Stage::Preprocess))?;
            lap(Stage::Preprocess, &mut timings);
            &enhanced
        }
    };
    let gray = to_gray(rgb);
    let model = build_energy(
        rgb,
        &gray,
        spec.energy_function,
        spec.lambda,
        spec.level_rule,
    )
    .map_err(Error::at(Stage::Energy))?;
    lap(Stage::Energy, &mut timings);

    let (mut mask, solver) = match spec.inference {
        Inference::Graphcut => {
            let (m, s) = graphcut_with_stats(&model);
            (m, SolverStats::GraphCut(s))
        }
        Inference::Lbp => {
            let (m, s) = lbp_with_stats(&model, &spec.lbp).map_err(Error::at(Stage::Inference))?;
            (m, SolverStats::Lbp(s))
        }
    };
    let energy = total_energy(&model, &mask).map_err(Error::at(Stage::Inference))?;
    lap(Stage::Inference, &mut timings);

    if spec.postprocessing == Postprocessing::ActiveContours {
        let evolve = if spec.per_region {
            refine_per_region
        } else {
            refine
        };
        mask = evolve(&gray, &mask, &spec.snake).map_err(Error::at(Stage::Contours))?;
        lap(Stage::Contours, &mut timings);
    }
    Ok(Segmentation {
        mask,
        energy,
        solver,
        timings,
    })
}

pub fn segment(path: &Path, spec: &ExperimentSpec) -> Result<Segmentation> {
    let start = Instant::now();
    let img = load_rgb(path)?;
    let load = start.elapsed();
    let mut seg = segment_image(&img, spec)?;
    seg.timings.insert(0, (Stage::Load, load));
    Ok(seg)
}

/// `key = value` lines describing one segmentation.
pub fn diagnostics_text(spec: &ExperimentSpec, seg: &Segmentation) -> String {
    let mut out = String::new();
    out.push_str(&format!("spec = {spec}\n"));
    out.push_str(&format!(
        "foreground_pixels = {}\n",
        seg.mask.count_foreground()
    ));
    out.push_str(&format!("energy = {}\n", seg.energy));
    match seg.solver {
        SolverStats::GraphCut(s) => {
            out.push_str(&format!("max_flow = {}\n", s.flow));
            out.push_str(&format!(
                "pushes = {}\nrelabels = {}\n",
                s.pushes, s.relabels
            ));
            out.push_str(&format!(
                "global_relabels = {}\ngaps = {}\n",
                s.global_relabels, s.gaps
            ));
        }
        SolverStats::Lbp(s) => {
            out.push_str(&format!(
                "lbp_iterations = {}\nlbp_converged = {}\n",
                s.iterations, s.converged
            ));
            out.push_str(&format!("lbp_final_change = {:e}\n", s.final_change));
        }
    }
    for (stage, d) in &seg.timings {
        out.push_str(&format!("time_{stage}_ms = {:.3}\n", d.as_secs_f64() * 1e3));
    }
    out
}
