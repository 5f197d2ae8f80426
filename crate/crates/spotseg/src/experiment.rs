//! Experiment descriptions and the twelve-experiment grid.

use std::fmt;

use serde::{Deserialize, Serialize};
use spotseg_core::contours::SnakeConfig;
use spotseg_core::inference::LbpConfig;
use spotseg_core::mrf::{Cost, EnergyFunction, LevelRule};
use spotseg_core::preprocess::PreprocessConfig;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preprocessing {
    None,
    /// CLAHE on L* followed by a saturation boost.
    Proposed,
}

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum Inference {
    Lbp,
    Graphcut,
}

impl Inference {
    /// Short tag used in file names and CSV headers.
    pub fn tag(self) -> &'static str {
        match self {
            Inference::Lbp => "lbp",
            Inference::Graphcut => "gc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Postprocessing {
    None,
    ActiveContours,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub preprocessing: Preprocessing,
    pub energy_function: EnergyFunction,
    pub inference: Inference,
    pub postprocessing: Postprocessing,
    /// Potts weight λ.
    pub lambda: Cost,
    pub level_rule: LevelRule,
    pub preprocess: PreprocessConfig,
    pub lbp: LbpConfig,
    pub snake: SnakeConfig,
    /// Evolve each seed component separately instead of the mask as a whole.
    pub per_region: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            preprocessing: Preprocessing::None,
            energy_function: EnergyFunction::Intensity,
            inference: Inference::Graphcut,
            postprocessing: Postprocessing::None,
            lambda: 50,
            level_rule: LevelRule::Otsu,
            preprocess: PreprocessConfig::default(),
            lbp: LbpConfig::default(),
            snake: SnakeConfig::default(),
            per_region: true,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: spotseg_core::Error| Error::Config(e.to_string());
        if self.lambda < 0 {
            return Err(Error::Config("lambda must be non-negative".into()));
        }
        self.preprocess.validate().map_err(cfg)?;
        self.lbp.validate().map_err(cfg)?;
        self.snake.validate().map_err(cfg)?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = match self.preprocessing {
            Preprocessing::None => "none",
            Preprocessing::Proposed => "proposed",
        };
        let post = match self.postprocessing {
            Postprocessing::None => "none",
            Postprocessing::ActiveContours => "contours",
        };
        write!(
            f,
            "({pre}, {}, {}, {post}, λ={})",
            self.energy_function,
            self.inference.tag(),
            self.lambda
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    /// 1 to 12.
    pub number: u8,
    pub spec: ExperimentSpec,
}

/// The twelve experiments under both inference algorithms, ordered by
/// experiment number and then LBP before graph cut. Parameters not varied by
/// the grid are taken from `base`.
pub fn experiment_grid(base: &ExperimentSpec) -> Vec<Experiment> {
    let mut out = Vec::with_capacity(24);
    let mut number = 0;
    for pre in [Preprocessing::None, Preprocessing::Proposed] {
        for post in [Postprocessing::None, Postprocessing::ActiveContours] {
            for f in EnergyFunction::ALL {
                number += 1;
                for inference in [Inference::Lbp, Inference::Graphcut] {
                    let spec = ExperimentSpec {
                        preprocessing: pre,
                        energy_function: f,
                        inference,
                        postprocessing: post,
                        ..*base
                    };
                    out.push(Experiment { number, spec });
                }
            }
        }
    }
    out
}
