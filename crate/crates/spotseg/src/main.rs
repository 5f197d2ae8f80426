use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spotseg::experiment::{
    experiment_grid, ExperimentSpec, Inference, Postprocessing, Preprocessing,
};
use spotseg::grid::{self, Corpus, GridOptions};
use spotseg::io::{load_mask, load_rgb, save_mask, save_rgb};
use spotseg::segment::diagnostics_text;
use spotseg::synth::{make_synthetic, write_corpus, Gradient, SynthParams};
use spotseg_core::eval::{
    confusion, default_tolerances, efficiency, hoover_classify, summarize, Pooling,
};
use spotseg_core::mrf::{EnergyFunction, LevelRule};
use spotseg_core::{connected_components, Connectivity};

#[derive(Parser)]
#[command(
    name = "spotseg",
    version,
    about = "MRF + active contour segmentation of animal spot patterns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one image and write the mask.
    Segment {
        image: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write key = value diagnostics here.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Run the 12 experiments under LBP and graph cuts over a corpus.
    Grid {
        /// Corpus directory with images/ and gt/.
        #[arg(long, conflicts_with = "synthetic")]
        corpus: Option<PathBuf>,
        /// Generate a synthetic corpus of this many images into <out>/corpus.
        #[arg(long)]
        synthetic: Option<usize>,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PoolingArg::PerImage)]
        pooling: PoolingArg,
        /// Skip writing per-experiment masks.
        #[arg(long)]
        no_masks: bool,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Generate a synthetic corpus with ground truth.
    Synth {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Score masks against ground truth (two files or two directories).
    Eval {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_delimiter = ',')]
        tolerances: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = PoolingArg::PerImage)]
        pooling: PoolingArg,
        /// Write the Hoover curve CSV here instead of stdout.
        #[arg(long)]
        hoover_out: Option<PathBuf>,
    },
    /// Color a mask against ground truth over the input image.
    Overlay {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolingArg {
    PerImage,
    Corpus,
}

impl From<PoolingArg> for Pooling {
    fn from(p: PoolingArg) -> Self {
        match p {
            PoolingArg::PerImage => Pooling::PerImage,
            PoolingArg::Corpus => Pooling::Corpus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelRuleArg {
    Otsu,
    Literal,
}

/// Experiment parameters; flags override values from `--config`.
#[derive(Args)]
struct SpecArgs {
    /// JSON document with ExperimentSpec fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preprocessing: Option<Preprocessing>,
    /// Energy function 1, 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    energy_function: Option<u8>,
    #[arg(long, value_enum)]
    inference: Option<Inference>,
    #[arg(long, value_enum)]
    postprocessing: Option<Postprocessing>,
    /// Potts weight.
    #[arg(long)]
    lambda: Option<i64>,
    #[arg(long, value_enum)]
    level_rule: Option<LevelRuleArg>,
    #[arg(long, allow_hyphen_values = true)]
    bias: Option<f64>,
    #[arg(long)]
    snake_iterations: Option<usize>,
    #[arg(long)]
    smoothing: Option<usize>,
    #[arg(long)]
    per_region: Option<bool>,
    #[arg(long)]
    clahe_tiles: Option<usize>,
    #[arg(long)]
    clip_limit: Option<f64>,
    #[arg(long)]
    saturation_gain: Option<f64>,
    #[arg(long)]
    lbp_iterations: Option<usize>,
    #[arg(long)]
    damping: Option<f64>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<ExperimentSpec> {
        let mut s = match &self.config {
            Some(p) => {
                let text =
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                ExperimentSpec::from_json(&text)?
            }
            None => ExperimentSpec::default(),
        };
        if let Some(v) = self.preprocessing {
            s.preprocessing = v;
        }
        if let Some(v) = self.energy_function {
            s.energy_function = EnergyFunction::try_from(v)?;
        }
        if let Some(v) = self.inference {
            s.inference = v;
        }
        if let Some(v) = self.postprocessing {
            s.postprocessing = v;
        }
        if let Some(v) = self.lambda {
            s.lambda = v;
        }
        if let Some(v) = self.level_rule {
            s.level_rule = match v {
                LevelRuleArg::Otsu => LevelRule::Otsu,
                LevelRuleArg::Literal => LevelRule::Literal,
            };
        }
        if let Some(v) = self.bias {
            s.snake.contraction_bias = v;
        }
        if let Some(v) = self.snake_iterations {
            s.snake.max_iterations = v;
        }
        if let Some(v) = self.smoothing {
            s.snake.smoothing_passes = v;
        }
        if let Some(v) = self.per_region {
            s.per_region = v;
        }
        if let Some(v) = self.clahe_tiles {
            s.preprocess.clahe.tiles_x = v;
            s.preprocess.clahe.tiles_y = v;
        }
        if let Some(v) = self.clip_limit {
            s.preprocess.clahe.clip_limit = v;
        }
        if let Some(v) = self.saturation_gain {
            s.preprocess.saturation_gain = v;
        }
        if let Some(v) = self.lbp_iterations {
            s.lbp.max_iterations = v;
        }
        if let Some(v) = self.damping {
            s.lbp.damping = v;
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 8)]
    min_spots: usize,
    #[arg(long, default_value_t = 16)]
    max_spots: usize,
    #[arg(long, default_value_t = 5.0)]
    min_radius: f64,
    #[arg(long, default_value_t = 12.0)]
    max_radius: f64,
    /// Radial dimming of spot rims towards the background, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    falloff: f64,
    /// Left-edge darkening in [0, 1).
    #[arg(long)]
    gradient: Option<f64>,
    /// Gaussian noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

impl SynthArgs {
    fn params(&self) -> SynthParams {
        SynthParams {
            width: self.width,
            height: self.height,
            spots: [self.min_spots, self.max_spots],
            radius: [self.min_radius, self.max_radius],
            spot_falloff: self.falloff,
            gradient: self.gradient.map(|strength| Gradient { strength }),
            noise_sigma: self.noise,
            ..Default::default()
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Segment {
            image,
            out,
            diagnostics,
            spec,
        } => {
            let spec = spec.resolve()?;
            let seg = spotseg::segment(&image, &spec)?;
            save_mask(&out, &seg.mask)?;
            if let Some(p) = diagnostics {
                fs::write(&p, diagnostics_text(&spec, &seg))
                    .with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Grid {
            corpus,
            synthetic,
            out,
            seed,
            pooling,
            no_masks,
            spec,
            synth,
        } => {
            let base = spec.resolve()?;
            let corpus_dir = match (corpus, synthetic) {
                (Some(dir), None) => dir,
                (None, Some(n)) => {
                    let dir = out.join("corpus");
                    write_corpus(&dir, &make_synthetic(n, &synth.params(), seed)?)?;
                    dir
                }
                _ => bail!("pass exactly one of --corpus or --synthetic"),
            };
            let corpus = Corpus::open(&corpus_dir)?;
            for stem in corpus.skipped() {
                eprintln!("warning: no ground truth for {stem}, skipped");
            }
            let opts = GridOptions {
                pooling: pooling.into(),
                masks_dir: (!no_masks).then(|| out.join("masks")),
                seed: Some(seed),
                ..Default::default()
            };
            let reports = spotseg::run_grid(&corpus, &experiment_grid(&base), &opts)?;
            spotseg::write_reports(&out, &reports, &opts)?;
            print!("{}", grid::efficiency_csv(&reports));
        }
        Command::Synth {
            out,
            count,
            seed,
            synth,
        } => {
            write_corpus(&out, &make_synthetic(count, &synth.params(), seed)?)?;
        }
        Command::Eval {
            mask,
            gt,
            tolerances,
            pooling,
            hoover_out,
        } => {
            let tolerances = tolerances.unwrap_or_else(default_tolerances);
            let pairs = pair_masks(&mask, &gt)?;
            let mut counts = vec![Vec::new(); tolerances.len()];
            let mut effs = Vec::new();
            for (name, m, g) in &pairs {
                let (m, g) = (load_mask(m)?, load_mask(g)?);
                let eff = efficiency(&confusion(&m, &g)?);
                println!("{name}\tefficiency={eff:.4}");
                effs.push(eff);
                let (mr, gr) = (
                    connected_components(&m, Connectivity::Eight),
                    connected_components(&g, Connectivity::Eight),
                );
                for (j, &t) in tolerances.iter().enumerate() {
                    counts[j].push(hoover_classify(&mr, &gr, t)?);
                }
            }
            println!(
                "mean_efficiency={:.4}",
                effs.iter().sum::<f64>() / effs.len() as f64
            );
            let rows = counts
                .iter()
                .map(|c| summarize(c, pooling.into()))
                .collect::<Result<Vec<_>, _>>()?;
            let csv = grid::hoover_csv(&rows);
            match hoover_out {
                Some(p) => {
                    fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{csv}"),
            }
        }
        Command::Overlay {
            image,
            mask,
            gt,
            out,
        } => {
            let img = load_rgb(&image)?;
            let over = spotseg::render_overlay(&load_mask(&mask)?, &load_mask(&gt)?, &img)?;
            save_rgb(&out, &over)?;
        }
    }
    Ok(())
}

/// Matches mask and ground-truth files by name when both paths are
/// directories.
fn pair_masks(mask: &Path, gt: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if mask.is_file() && gt.is_file() {
        let name = mask
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(vec![(name, mask.to_path_buf(), gt.to_path_buf())]);
    }
    if !(mask.is_dir() && gt.is_dir()) {
        bail!("--mask and --gt must both be files or both be directories");
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(mask)? {
        let p = entry?.path();
        if p.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let name = p.file_name().expect("file").to_owned();
        let g = gt.join(&name);
        if g.is_file() {
            out.push((
                Path::new(&name)
                    .file_stem()
                    .unwrap()
                    .to_string_lossy()
                    .into_owned(),
                p,
                g,
            ));
        } else {
            eprintln!(
                "warning: no ground truth for {}, skipped",
                name.to_string_lossy()
            );
        }
    }
    if out.is_empty() {
        bail!("no mask/ground-truth pairs found");
    }
    out.sort();
    Ok(out)
}
