//! Runs a set of experiments over a corpus and writes the reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use spotseg_core::eval::{
    confusion, efficiency, hoover_classify, summarize, ConfusionMatrix, HooverCounts, HooverRow,
    Pooling,
};
use spotseg_core::{connected_components, Connectivity};

use crate::error::{Error, Result, Stage};
use crate::experiment::{Experiment, Inference};
use crate::io::{load_mask, load_rgb, save_mask};
use crate::segment::{segment_image, SolverStats};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub stem: String,
    pub image: PathBuf,
    /// `None` when the ground-truth mask is missing.
    pub gt: Option<PathBuf>,
}

/// Images of a corpus directory, sorted by file stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn open(dir: &Path) -> Result<Self> {
        let images = dir.join("images");
        let mut entries = Vec::new();
        for item in fs::read_dir(&images).map_err(Error::io(&images))? {
            let path = item.map_err(Error::io(&images))?.path();
            if path
                .extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case("png"))
                != Some(true)
            {
                continue;
            }
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            let gt = dir.join("gt").join(format!("{stem}.png"));
            entries.push(CorpusEntry {
                stem,
                image: path,
                gt: gt.is_file().then_some(gt),
            });
        }
        entries.sort_by(|a, b| a.stem.cmp(&b.stem));
        Ok(Self { entries })
    }

    pub fn skipped(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.gt.is_none())
            .map(|e| e.stem.clone())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    pub tolerances: Vec<f64>,
    pub pooling: Pooling,
    /// Where to write `exp<N>_<lbp|gc>/<stem>.png` masks, if anywhere.
    pub masks_dir: Option<PathBuf>,
    /// Seed the corpus was generated with, recorded in the diagnostics.
    pub seed: Option<u64>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            tolerances: spotseg_core::eval::default_tolerances(),
            pooling: Pooling::PerImage,
            masks_dir: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImageResult {
    pub stem: String,
    pub confusion: ConfusionMatrix,
    pub efficiency: f64,
    /// One entry per tolerance.
    pub hoover: Vec<HooverCounts>,
    pub energy: i64,
    pub solver: SolverStats,
    pub timings: Vec<(Stage, Duration)>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub experiment: Experiment,
    /// In corpus (stem) order.
    pub images: Vec<ImageResult>,
    pub mean_efficiency: f64,
    pub hoover: Vec<HooverRow>,
    /// Images left out for lack of ground truth.
    pub skipped: Vec<String>,
}

impl RunReport {
    pub fn total_time(&self, stage: Stage) -> Duration {
        self.images
            .iter()
            .flat_map(|r| &r.timings)
            .filter(|(s, _)| *s == stage)
            .map(|(_, d)| *d)
            .sum()
    }
}

fn mask_path(dir: &Path, exp: &Experiment, stem: &str) -> PathBuf {
    dir.join(format!("exp{}_{}", exp.number, exp.spec.inference.tag()))
        .join(format!("{stem}.png"))
}

fn run_image(
    entry: &CorpusEntry,
    gt_path: &Path,
    experiments: &[Experiment],
    opts: &GridOptions,
) -> Result<Vec<ImageResult>> {
    let img = load_rgb(&entry.image)?;
    let gt = load_mask(gt_path)?;
    let gt_regions = connected_components(&gt, Connectivity::Eight);
    let mut out = Vec::with_capacity(experiments.len());
    for exp in experiments {
        let seg = segment_image(&img, &exp.spec)?;
        let cm = confusion(&seg.mask, &gt).map_err(Error::at(Stage::Evaluate))?;
        let ms_regions = connected_components(&seg.mask, Connectivity::Eight);
        let hoover = opts
            .tolerances
            .iter()
            .map(|&t| hoover_classify(&ms_regions, &gt_regions, t))
            .collect::<spotseg_core::Result<Vec<_>>>()
            .map_err(Error::at(Stage::Evaluate))?;
        if let Some(dir) = &opts.masks_dir {
            let p = mask_path(dir, exp, &entry.stem);
            save_mask(&p, &seg.mask)?;
        }
        out.push(ImageResult {
            stem: entry.stem.clone(),
            confusion: cm,
            efficiency: efficiency(&cm),
            hoover,
            energy: seg.energy,
            solver: seg.solver,
            timings: seg.timings,
        });
    }
    Ok(out)
}

/// Segments and scores every image that has ground truth under every
/// experiment. Images run in parallel; results are merged in stem order.
pub fn run_grid(
    corpus: &Corpus,
    experiments: &[Experiment],
    opts: &GridOptions,
) -> Result<Vec<RunReport>> {
    if experiments.is_empty() {
        return Err(Error::Config("no experiments to run".into()));
    }
    for exp in experiments {
        exp.spec.validate()?;
    }
    for &t in &opts.tolerances {
        if !(t > 0.5 && t <= 1.0) {
            return Err(Error::Config(format!("tolerance {t} outside (0.5, 1]")));
        }
    }
    let usable: Vec<(&CorpusEntry, &Path)> = corpus
        .entries
        .iter()
        .filter_map(|e| e.gt.as_deref().map(|g| (e, g)))
        .collect();
    if usable.is_empty() {
        return Err(Error::Config(
            "corpus has no images with ground truth".into(),
        ));
    }
    if let Some(dir) = &opts.masks_dir {
        for exp in experiments {
            let d = mask_path(dir, exp, "x");
            let d = d.parent().expect("has parent");
            fs::create_dir_all(d).map_err(Error::io(d))?;
        }
    }

    let per_image: Vec<Vec<ImageResult>> = usable
        .par_iter()
        .map(|(e, g)| run_image(e, g, experiments, opts))
        .collect::<Result<_>>()?;

    let skipped = corpus.skipped();
    let mut reports = Vec::with_capacity(experiments.len());
    for (k, exp) in experiments.iter().enumerate() {
        let images: Vec<ImageResult> = per_image.iter().map(|r| r[k].clone()).collect();
        let mean = images.iter().map(|r| r.efficiency).sum::<f64>() / images.len() as f64;
        let hoover = (0..opts.tolerances.len())
            .map(|j| {
                let counts: Vec<HooverCounts> = images.iter().map(|r| r.hoover[j]).collect();
                summarize(&counts, opts.pooling).map_err(Error::at(Stage::Evaluate))
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(RunReport {
            experiment: *exp,
            images,
            mean_efficiency: mean,
            hoover,
            skipped: skipped.clone(),
        });
    }
    Ok(reports)
}

/// `experiment,lbp,gc` with one row per experiment number.
pub fn efficiency_csv(reports: &[RunReport]) -> String {
    let mut table: BTreeMap<u8, [Option<f64>; 2]> = BTreeMap::new();
    for r in reports {
        let slot = match r.experiment.spec.inference {
            Inference::Lbp => 0,
            Inference::Graphcut => 1,
        };
        table.entry(r.experiment.number).or_default()[slot] = Some(r.mean_efficiency);
    }
    let cell = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_default();
    let mut out = String::from("experiment,lbp,gc\n");
    for (n, [lbp, gc]) in table {
        writeln!(out, "{n},{},{}", cell(lbp), cell(gc)).unwrap();
    }
    out
}

pub fn per_image_csv(reports: &[RunReport]) -> String {
    let mut out = String::from("experiment,inference,image,efficiency,tp,tn,fp,fn\n");
    for r in reports {
        for i in &r.images {
            let c = i.confusion;
            writeln!(
                out,
                "{},{},{},{:.4},{},{},{},{}",
                r.experiment.number,
                r.experiment.spec.inference.tag(),
                i.stem,
                i.efficiency,
                c.true_pos,
                c.true_neg,
                c.false_pos,
                c.false_neg
            )
            .unwrap();
        }
    }
    out
}

pub fn hoover_csv(rows: &[HooverRow]) -> String {
    let mut out = String::from("tolerance,correct,over,under,missed,noise\n");
    for r in rows {
        writeln!(
            out,
            "{:.2},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.tolerance, r.correct, r.over, r.under, r.missed, r.noise
        )
        .unwrap();
    }
    out
}

/// `key = value` run diagnostics, including wall-clock timings.
pub fn diagnostics_text(reports: &[RunReport], opts: &GridOptions) -> String {
    let mut out = String::new();
    match opts.seed {
        Some(s) => writeln!(out, "seed = {s}").unwrap(),
        None => writeln!(out, "seed = none").unwrap(),
    }
    if let Some(r) = reports.first() {
        writeln!(out, "images = {}", r.images.len()).unwrap();
        writeln!(out, "skipped = {}", r.skipped.join(" ")).unwrap();
    }
    writeln!(out, "pooling = {:?}", opts.pooling).unwrap();
    for r in reports {
        let key = format!(
            "exp{}_{}",
            r.experiment.number,
            r.experiment.spec.inference.tag()
        );
        writeln!(out, "{key}.spec = {}", r.experiment.spec).unwrap();
        writeln!(out, "{key}.mean_efficiency = {:.4}", r.mean_efficiency).unwrap();
        let mut converged = 0;
        let mut iterations = 0;
        let mut pushes = 0u64;
        for i in &r.images {
            match i.solver {
                SolverStats::Lbp(s) => {
                    converged += s.converged as usize;
                    iterations += s.iterations;
                }
                SolverStats::GraphCut(s) => pushes += s.pushes,
            }
        }
        match r.experiment.spec.inference {
            Inference::Lbp => {
                writeln!(out, "{key}.lbp_converged = {converged}/{}", r.images.len()).unwrap();
                writeln!(
                    out,
                    "{key}.lbp_mean_iterations = {:.2}",
                    iterations as f64 / r.images.len() as f64
                )
                .unwrap();
            }
            Inference::Graphcut => writeln!(out, "{key}.pushes = {pushes}").unwrap(),
        }
        for stage in Stage::ALL {
            let t = r.total_time(stage);
            if !t.is_zero() {
                writeln!(out, "{key}.time_{stage}_ms = {:.3}", t.as_secs_f64() * 1e3).unwrap();
            }
        }
    }
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(Error::io(path))
}

/// Writes `efficiency.csv`, `per_image.csv`, `hoover/exp<N>_<inf>.csv` and
/// `diagnostics.txt` under `dir`. Everything except the diagnostics is a
/// pure function of the corpus and the experiment parameters.
pub fn write_reports(dir: &Path, reports: &[RunReport], opts: &GridOptions) -> Result<()> {
    let hoover_dir = dir.join("hoover");
    fs::create_dir_all(&hoover_dir).map_err(Error::io(&hoover_dir))?;
    write(&dir.join("efficiency.csv"), &efficiency_csv(reports))?;
    write(&dir.join("per_image.csv"), &per_image_csv(reports))?;
    for r in reports {
        let name = format!(
            "exp{}_{}.csv",
            r.experiment.number,
            r.experiment.spec.inference.tag()
        );
        write(&hoover_dir.join(name), &hoover_csv(&r.hoover))?;
    }
    write(
        &dir.join("diagnostics.txt"),
        &diagnostics_text(reports, opts),
    )
}
