//! The JSON run configuration shared by `trace`, `disc` and `mc`.
//!
//! ```json
//! { "target": {"lil": 1.0},
//!   "functions": [{"cos": 1}, {"indicator": [0, 0.5]}],
//!   "limit": 10000000,
//!   "checkpoints": {"geometric": 1.25},
//!   "num_x": 16, "num_seeds": 2, "master_seed": 42 }
//! ```

use std::path::Path;

use gaplab::kernels::{CenteredIndicator, PeriodicFunction, TrigPoly, UnitPoint};
use gaplab::montecarlo::{ExperimentConfig, Target};
use gaplab::statistics::geometric_checkpoints;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetEntry {
    Explicit { lambda: u64, p: f64 },
    Lil { lil: f64 },
    Disc { disc: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionEntry {
    Cos(usize),
    Sin(usize),
    Indicator([f64; 2]),
    /// General trigonometric polynomial; coefficient `i` belongs to frequency `i + 1`.
    Trig {
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckpointEntry {
    Geometric { geometric: f64 },
    List(Vec<u64>),
}

impl Default for CheckpointEntry {
    fn default() -> Self {
        Self::Geometric { geometric: 1.25 }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: TargetEntry,
    #[serde(default)]
    pub functions: Vec<FunctionEntry>,
    pub limit: u64,
    #[serde(default)]
    pub checkpoints: CheckpointEntry,
    #[serde(default = "one")]
    pub num_x: usize,
    #[serde(default = "one")]
    pub num_seeds: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Fixed evaluation point in `[0, 1)`; drawn per trajectory when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    /// Exact 128-bit evaluation point as 32 hex digits; overrides `x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_bits: Option<String>,
}

impl FunctionEntry {
    pub fn build(&self) -> Result<PeriodicFunction, CliError> {
        let f: PeriodicFunction = match self {
            Self::Cos(j) | Self::Sin(j) if *j == 0 => {
                return Err(CliError::Config("function frequency must be at least 1".into()))
            }
            Self::Cos(j) => TrigPoly::cosine(*j).into(),
            Self::Sin(j) => TrigPoly::sine(*j).into(),
            Self::Indicator([a, b]) => CenteredIndicator::new(*a, *b)?.into(),
            Self::Trig { cos, sin } => TrigPoly::new(cos.clone(), sin.clone())?.into(),
        };
        Ok(f)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses a config document, or the `config` member of a run manifest.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
        let (value, prefix) = match value.get("config") {
            Some(inner) if value.get("tool").is_some() => (inner.clone(), "config."),
            _ => (value, ""),
        };
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{prefix}{path}`: {}", e.into_inner()))
        })
    }

    pub fn target(&self) -> Target {
        match self.target {
            TargetEntry::Explicit { lambda, p } => Target::Explicit { lambda, p },
            TargetEntry::Lil { lil } => Target::Lil(lil),
            TargetEntry::Disc { disc } => Target::Discrepancy(disc),
        }
    }

    pub fn functions(&self) -> Result<Vec<PeriodicFunction>, CliError> {
        self.functions
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.build().map_err(|e| match e {
                    CliError::Core(inner) => CliError::Config(format!("at `functions[{i}]`: {inner}")),
                    CliError::Config(msg) => CliError::Config(format!("at `functions[{i}]`: {msg}")),
                    other => other,
                })
            })
            .collect()
    }

    /// Checkpoints as term counts. Geometric spacing stops at `ceil(limit/2)`,
    /// the number of odd values, which every stream is guaranteed to reach.
    pub fn checkpoint_list(&self) -> Result<Vec<u64>, CliError> {
        match &self.checkpoints {
            CheckpointEntry::Geometric { geometric } => {
                Ok(geometric_checkpoints(*geometric, self.limit.div_ceil(2))?)
            }
            CheckpointEntry::List(list) => Ok(list.clone()),
        }
    }

    pub fn point(&self) -> Result<Option<UnitPoint>, CliError> {
        if let Some(bits) = &self.x_bits {
            let value = u128::from_str_radix(bits, 16)
                .map_err(|e| CliError::Config(format!("at `x_bits`: {e}")))?;
            return Ok(Some(UnitPoint::from_bits(value)));
        }
        match self.x {
            Some(x) if !(0.0..1.0).contains(&x) => Err(CliError::Config(format!("at `x`: {x} outside [0, 1)"))),
            x => Ok(x.map(UnitPoint::from_f64)),
        }
    }

    pub fn experiment(&self, max_elements: u64, threads: Option<usize>) -> Result<ExperimentConfig, CliError> {
        let mut c = ExperimentConfig::new(self.target(), self.functions()?, self.limit);
        c.checkpoints = self.checkpoint_list()?;
        c.num_x = self.num_x;
        c.num_seeds = self.num_seeds;
        c.master_seed = self.master_seed;
        c.x = self.point()?;
        c.threads = threads;
        c.max_elements = max_elements;
        Ok(c)
    }

    /// The same run with the target pinned to explicit `(lambda, p)` and the
    /// checkpoints expanded, as recorded in manifests.
    pub fn resolved(&self, lambda: u64, p: f64) -> Result<Self, CliError> {
        Ok(Self {
            target: TargetEntry::Explicit { lambda, p },
            checkpoints: CheckpointEntry::List(self.checkpoint_list()?),
            ..self.clone()
        })
    }
}
