//! Training: the loss, the balance penalty with depth-decayed strength,
//! analytic gradients, the mini-batch SGD loop and evaluation.

mod grad;
mod loss;
mod stats;

pub use grad::{batch_gradients, gradient_check, Gradients};
pub use loss::example_loss;
pub use stats::{balance_penalty, penalty_strength, update_node_stats, NodeStats};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{BatchPlan, Dataset};
use crate::distill::SoftTargetSet;
use crate::error::{Error, Result};
use crate::exec;
use crate::tree::{argmax, SoftTree};

/// How a single example's loss combines the leaves.
///
/// `WeightedCe` is the path-probability-weighted sum of per-leaf cross
/// entropies; `MixtureNll` is the negative log of the path-probability-
/// weighted mixture of per-leaf target likelihoods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossVariant {
    WeightedCe,
    MixtureNll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    MaxPath,
    Mixture,
}

/// Every knob of a tree training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub depth: usize,
    pub input_dim: usize,
    pub num_classes: usize,
    /// Inverse temperature multiplying every gate activation.
    pub beta: f64,
    /// Base strength of the balance penalty; 0 disables it.
    pub lambda0: f64,
    /// Per-depth decay of the penalty: strength at depth d is
    /// `lambda0 * penalty_decay_base^(-d)`.
    pub penalty_decay_base: f64,
    /// Half-life, in batches, of the node-usage running average at the
    /// root; it doubles with every level of depth.
    pub ema_halflife0: f64,
    pub loss_variant: LossVariant,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Prediction mode used for train accuracy and best-model selection.
    pub eval_mode: EvalMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            depth: 4,
            input_dim: 2,
            num_classes: 2,
            beta: 1.0,
            lambda0: 0.1,
            penalty_decay_base: 2.0,
            ema_halflife0: 8.0,
            loss_variant: LossVariant::WeightedCe,
            learning_rate: 0.1,
            momentum: 0.9,
            batch_size: 64,
            epochs: 10,
            seed: 0,
            eval_mode: EvalMode::MaxPath,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.depth < 1 || self.depth > 24 {
            return fail(format!("depth must be in 1..=24, got {}", self.depth));
        }
        if self.input_dim < 1 {
            return fail("input_dim must be >= 1".into());
        }
        if self.num_classes < 2 {
            return fail("num_classes must be >= 2".into());
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return fail(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.lambda0.is_finite() && self.lambda0 >= 0.0) {
            return fail(format!("lambda0 must be >= 0, got {}", self.lambda0));
        }
        if !(self.penalty_decay_base.is_finite() && self.penalty_decay_base > 0.0) {
            return fail(format!(
                "penalty_decay_base must be positive, got {}",
                self.penalty_decay_base
            ));
        }
        if !(self.ema_halflife0.is_finite() && self.ema_halflife0 > 0.0) {
            return fail(format!(
                "ema_halflife0 must be positive, got {}",
                self.ema_halflife0
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return fail(format!(
                "learning_rate must be >= 0, got {}",
                self.learning_rate
            ));
        }
        if !(self.momentum.is_finite() && (0.0..1.0).contains(&self.momentum)) {
            return fail(format!("momentum must be in [0, 1), got {}", self.momentum));
        }
        if self.batch_size < 1 {
            return fail("batch_size must be >= 1".into());
        }
        if self.epochs < 1 {
            return fail("epochs must be >= 1".into());
        }
        Ok(())
    }
}

/// One training example: input features and a normalized target
/// distribution over classes.
pub type TrainExample<'a> = (&'a [f64], &'a [f64]);

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub penalty: f64,
    pub train_acc: f64,
    pub test_acc_maxpath: f64,
    pub test_acc_mixture: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    pub rows: Vec<EpochRow>,
}

impl TrainReport {
    /// CSV rendering with 6-decimal fixed-point reals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "epoch,train_loss,penalty,train_acc,test_acc_maxpath,test_acc_mixture,seconds\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                r.epoch,
                r.train_loss,
                r.penalty,
                r.train_acc,
                r.test_acc_maxpath,
                r.test_acc_mixture,
                r.seconds
            ));
        }
        out
    }
}

/// Runs mini-batch SGD with momentum over the whole dataset.
///
/// Example order is reshuffled every epoch with a generator derived from
/// `config.seed`, node statistics are refreshed once per batch before the
/// penalty gradient is taken, and the parameters with the best test
/// accuracy (under `config.eval_mode`) seen at any epoch end are the ones
/// returned. Identical config, seed and data produce a bit-identical tree.
pub fn train(
    tree: SoftTree,
    train_set: &Dataset,
    targets: &SoftTargetSet,
    test_set: &Dataset,
    config: &TrainConfig,
) -> Result<(SoftTree, TrainReport)> {
    config.validate()?;
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if targets.num_examples() != train_set.len() {
        return Err(Error::MisalignedTargets {
            expected: train_set.len(),
            actual: targets.num_examples(),
        });
    }
    if targets.num_classes() != tree.num_classes() {
        return Err(Error::DimensionMismatch {
            what: "target class count",
            expected: tree.num_classes(),
            actual: targets.num_classes(),
        });
    }
    for ds in [train_set, test_set] {
        if ds.input_dim() != tree.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "dataset input dimension",
                expected: tree.input_dim(),
                actual: ds.input_dim(),
            });
        }
    }

    let mut tree = tree;
    let mut stats = NodeStats::new(tree.num_inner());
    let mut velocity = Gradients::zeros_like(&tree);
    let mut report = TrainReport::default();
    let mut best_tree = tree.clone();
    let mut best_acc = f64::NEG_INFINITY;
    let n = train_set.len();

    let mut xs: Vec<&[f64]> = Vec::with_capacity(config.batch_size);
    let mut ts: Vec<&[f64]> = Vec::with_capacity(config.batch_size);

    for epoch in 0..config.epochs {
        let started = Instant::now();
        let plan = BatchPlan::new(n, config.batch_size, config.seed, epoch)?;
        let mut loss_sum = 0.0;
        let mut penalty_sum = 0.0;
        let mut num_batches = 0usize;
        for batch_indices in plan.batches() {
            xs.clear();
            ts.clear();
            for &i in batch_indices {
                xs.push(train_set.features(i));
                ts.push(targets.row(i));
            }
            let batch: Vec<TrainExample> = xs.iter().copied().zip(ts.iter().copied()).collect();
            let (grads, mean_loss, penalty) =
                batch_gradients(&tree, &batch, &mut stats, config)?;
            velocity.momentum_step(&mut tree, &grads, config.momentum, config.learning_rate);
            loss_sum += mean_loss * batch.len() as f64;
            penalty_sum += penalty;
            num_batches += 1;
        }

        let (train_max, train_mix) = evaluate_both(&tree, train_set)?;
        let (test_max, test_mix) = evaluate_both(&tree, test_set)?;
        let train_acc = match config.eval_mode {
            EvalMode::MaxPath => train_max,
            EvalMode::Mixture => train_mix,
        };
        let selection_acc = match config.eval_mode {
            EvalMode::MaxPath => test_max,
            EvalMode::Mixture => test_mix,
        };
        if selection_acc > best_acc {
            best_acc = selection_acc;
            best_tree = tree.clone();
        }
        report.rows.push(EpochRow {
            epoch: epoch + 1,
            train_loss: loss_sum / n as f64,
            penalty: penalty_sum / num_batches as f64,
            train_acc,
            test_acc_maxpath: test_max,
            test_acc_mixture: test_mix,
            seconds: started.elapsed().as_secs_f64(),
        });
    }

    Ok((best_tree, report))
}

/// Accuracy and mean negative log-likelihood of the labels under the given
/// prediction mode.
pub fn evaluate(tree: &SoftTree, data: &Dataset, mode: EvalMode) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.input_dim() != tree.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "dataset input dimension",
            expected: tree.input_dim(),
            actual: data.input_dim(),
        });
    }
    let leaf_dists = leaf_distribution_table(tree)?;
    let k = tree.num_classes();
    let num_inner = tree.num_inner();
    let num_leaves = tree.num_leaves();
    let per_example = exec::map_indexed(data.len(), |i| {
        let x = data.features(i);
        let label = data.label(i);
        let mut gates = vec![0.0; num_inner];
        let mut node_p = vec![0.0; num_inner];
        let mut leaf_p = vec![0.0; num_leaves];
        tree.route_into(x, &mut gates, &mut node_p, &mut leaf_p);
        let dist: Vec<f64> = match mode {
            EvalMode::MaxPath => leaf_dists[argmax(&leaf_p) * k..][..k].to_vec(),
            EvalMode::Mixture => {
                let mut mix = vec![0.0; k];
                for (l, &w) in leaf_p.iter().enumerate() {
                    let q = &leaf_dists[l * k..][..k];
                    for (m, &qk) in mix.iter_mut().zip(q.iter()) {
                        *m += w * qk;
                    }
                }
                mix
            }
        };
        (argmax(&dist) == label, -dist[label].max(1e-300).ln())
    });
    let mut correct = 0usize;
    let mut loss_sum = 0.0;
    for (ok, loss) in per_example {
        correct += ok as usize;
        loss_sum += loss;
    }
    let n = data.len() as f64;
    Ok((correct as f64 / n, loss_sum / n))
}

/// Row-major table of every leaf's class distribution.
fn leaf_distribution_table(tree: &SoftTree) -> Result<Vec<f64>> {
    let k = tree.num_classes();
    let mut out = vec![0.0; tree.num_leaves() * k];
    for (l, leaf) in tree.leaves().iter().enumerate() {
        let dist = crate::tree::leaf_distribution(leaf)?;
        out[l * k..(l + 1) * k].copy_from_slice(&dist);
    }
    Ok(out)
}

/// Accuracy under both prediction modes from a single routing pass.
pub fn evaluate_both(tree: &SoftTree, data: &Dataset) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let leaf_dists = leaf_distribution_table(tree)?;
    let k = tree.num_classes();
    let num_inner = tree.num_inner();
    let num_leaves = tree.num_leaves();
    let per_example = exec::map_indexed(data.len(), |i| {
        let x = data.features(i);
        let label = data.label(i);
        let mut gates = vec![0.0; num_inner];
        let mut node_p = vec![0.0; num_inner];
        let mut leaf_p = vec![0.0; num_leaves];
        tree.route_into(x, &mut gates, &mut node_p, &mut leaf_p);
        let leaf = argmax(&leaf_p);
        let max_ok = argmax(&leaf_dists[leaf * k..][..k]) == label;
        let mut mix = vec![0.0; k];
        for (l, &w) in leaf_p.iter().enumerate() {
            let q = &leaf_dists[l * k..][..k];
            for (m, &qk) in mix.iter_mut().zip(q.iter()) {
                *m += w * qk;
            }
        }
        let mix_ok = argmax(&mix) == label;
        (max_ok, mix_ok)
    });
    let mut max_correct = 0usize;
    let mut mix_correct = 0usize;
    for (a, b) in per_example {
        max_correct += a as usize;
        mix_correct += b as usize;
    }
    let n = data.len() as f64;
    Ok((max_correct as f64 / n, mix_correct as f64 / n))
}
