//! Dataset ingestion: MNIST IDX files, the UCI Connect-4 and Letter
//! corpora, seeded splits and per-epoch batch plans.

mod idx;
mod uci;

pub use idx::load_mnist;
pub use uci::{load_connect4, load_letter, letter_standard_split, CONNECT4_CLASSES};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An immutable labeled dataset with flat row-major feature storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    input_dim: usize,
    num_classes: usize,
    features: Vec<f64>,
    labels: Vec<u32>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        input_dim: usize,
        num_classes: usize,
        features: Vec<f64>,
        labels: Vec<u32>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if input_dim == 0 || num_classes < 2 {
            return Err(Error::InvalidConfig(
                "dataset needs input_dim >= 1 and num_classes >= 2".into(),
            ));
        }
        if features.len() != labels.len() * input_dim {
            return Err(Error::DimensionMismatch {
                what: "feature buffer",
                expected: labels.len() * input_dim,
                actual: features.len(),
            });
        }
        if class_names.len() != num_classes {
            return Err(Error::DimensionMismatch {
                what: "class name list",
                expected: num_classes,
                actual: class_names.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= num_classes) {
            return Err(Error::LabelOutOfRange {
                label: bad as usize,
                num_classes,
            });
        }
        Ok(Dataset {
            name: name.into(),
            input_dim,
            num_classes,
            features,
            labels,
            class_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// New dataset containing the given rows, in order.
    pub fn subset(&self, indices: &[usize], name: impl Into<String>) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.input_dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.features(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            name: name.into(),
            input_dim: self.input_dim,
            num_classes: self.num_classes,
            features,
            labels,
            class_names: self.class_names.clone(),
        }
    }
}

/// Splits into `(train, test)` by a seeded permutation; the train side
/// gets `floor(n * fraction)` examples and the sides are disjoint and
/// exhaustive.
pub fn split(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    let n = dataset.len();
    let train_n = (n as f64 * fraction).floor() as usize;
    if train_n == 0 || train_n == n {
        return Err(Error::InvalidConfig(format!(
            "split of {n} examples at fraction {fraction} leaves an empty side"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train = dataset.subset(&indices[..train_n], format!("{}-train", dataset.name));
    let test = dataset.subset(&indices[train_n..], format!("{}-test", dataset.name));
    Ok((train, test))
}

/// A seeded permutation of example indices for one epoch, chunked into
/// batches. The permutation is a pure function of `(seed, epoch)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchPlan {
    pub seed: u64,
    pub batch_size: usize,
    pub epoch: usize,
    pub permutation: Vec<usize>,
}

impl BatchPlan {
    pub fn new(num_examples: usize, batch_size: usize, seed: u64, epoch: usize) -> Result<Self> {
        if num_examples == 0 {
            return Err(Error::EmptyDataset);
        }
        if batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        let mut permutation: Vec<usize> = (0..num_examples).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Stream 0 is reserved for parameter initialization.
        rng.set_stream(1 + epoch as u64);
        permutation.shuffle(&mut rng);
        Ok(BatchPlan {
            seed,
            batch_size,
            epoch,
            permutation,
        })
    }

    /// Index slices covering the permutation exactly once; the final batch
    /// may be short.
    pub fn batches(&self) -> impl Iterator<Item = &[usize]> {
        self.permutation.chunks(self.batch_size)
    }
}
