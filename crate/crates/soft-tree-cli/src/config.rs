//! JSON config schemas for the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use soft_tree::data::{letter_standard_split, load_connect4, load_letter, load_mnist, split, Dataset};
use soft_tree::mlp::MlpTrainConfig;
use soft_tree::train::TrainConfig;

use crate::CliError;

/// Which dataset to load and how to split it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    /// MNIST-format IDX file pairs for both splits.
    Mnist {
        train_images: PathBuf,
        train_labels: PathBuf,
        test_images: PathBuf,
        test_labels: PathBuf,
    },
    /// UCI connect-4 file with a seeded train/test split.
    Connect4 {
        path: PathBuf,
        #[serde(default = "default_fraction")]
        split_fraction: f64,
        #[serde(default = "default_split_seed")]
        split_seed: u64,
    },
    /// UCI letter-recognition file, first 16k train / last 4k test.
    Letter { path: PathBuf },
}

fn default_fraction() -> f64 {
    0.8
}

fn default_split_seed() -> u64 {
    20
}

impl DatasetSpec {
    /// Files the spec reads, for manifest checksums.
    pub fn files(&self) -> Vec<PathBuf> {
        match self {
            DatasetSpec::Mnist {
                train_images,
                train_labels,
                test_images,
                test_labels,
            } => vec![
                train_images.clone(),
                train_labels.clone(),
                test_images.clone(),
                test_labels.clone(),
            ],
            DatasetSpec::Connect4 { path, .. } | DatasetSpec::Letter { path } => {
                vec![path.clone()]
            }
        }
    }

    /// Loads `(train, test)`.
    pub fn load(&self) -> Result<(Dataset, Dataset), CliError> {
        match self {
            DatasetSpec::Mnist {
                train_images,
                train_labels,
                test_images,
                test_labels,
            } => {
                let train = load_mnist(train_images, train_labels)?;
                let test = load_mnist(test_images, test_labels)?;
                Ok((train, test))
            }
            DatasetSpec::Connect4 {
                path,
                split_fraction,
                split_seed,
            } => {
                let full = load_connect4(path)?;
                Ok(split(&full, *split_fraction, *split_seed)?)
            }
            DatasetSpec::Letter { path } => {
                let full = load_letter(path)?;
                Ok(letter_standard_split(&full)?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeTrainCmdConfig {
    pub dataset: DatasetSpec,
    /// Soft-target file for the train split; defaults to one-hot labels.
    #[serde(default)]
    pub targets: Option<PathBuf>,
    #[serde(default)]
    pub train: TrainConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeacherTrainCmdConfig {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub mlp: MlpTrainConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetProvenance {
    Hard,
    Teacher,
    Composite,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistillCmdConfig {
    pub dataset: DatasetSpec,
    /// Teacher model files; probabilities are averaged when several are
    /// given. Unused for hard provenance.
    #[serde(default)]
    pub teachers: Vec<PathBuf>,
    pub provenance: TargetProvenance,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

fn default_temperature() -> f64 {
    1.0
}

fn default_rho() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SplitChoice {
    Train,
    #[default]
    Test,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateCmdConfig {
    pub dataset: DatasetSpec,
    pub model: PathBuf,
    #[serde(default)]
    pub split: SplitChoice,
}

pub fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {} violates schema: {e}", path.display())))
}
