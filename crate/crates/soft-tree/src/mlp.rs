//! A minimal fully connected classifier used as the distillation teacher:
//! rectifier hidden layers, softmax output, mini-batch SGD with momentum.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{BatchPlan, Dataset};
use crate::distill::{Provenance, SoftTargetSet};
use crate::error::{Error, Result};
use crate::exec;
use crate::tree::{argmax, log_softmax, softmax};

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>, // per layer, (out x in) row-major
    biases: Vec<Vec<f64>>,  // per layer, out
}

impl MlpModel {
    pub fn from_parts(
        layer_sizes: Vec<usize>,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if layer_sizes.len() < 2 || layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidConfig(
                "layer_sizes needs at least input and output, all nonzero".into(),
            ));
        }
        let num_layers = layer_sizes.len() - 1;
        if weights.len() != num_layers || biases.len() != num_layers {
            return Err(Error::DimensionMismatch {
                what: "layer parameter arrays",
                expected: num_layers,
                actual: weights.len().min(biases.len()),
            });
        }
        for l in 0..num_layers {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            if weights[l].len() != fan_in * fan_out {
                return Err(Error::DimensionMismatch {
                    what: "layer weight matrix",
                    expected: fan_in * fan_out,
                    actual: weights[l].len(),
                });
            }
            if biases[l].len() != fan_out {
                return Err(Error::DimensionMismatch {
                    what: "layer bias vector",
                    expected: fan_out,
                    actual: biases[l].len(),
                });
            }
            if weights[l].iter().chain(biases[l].iter()).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("mlp layer {l}"),
                });
            }
        }
        Ok(MlpModel {
            layer_sizes,
            weights,
            biases,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn num_classes(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }
}

/// Hyperparameters for teacher training. `ensemble` > 1 trains that many
/// models from consecutive seeds for probability-averaged predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpTrainConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub export_temperature: f64,
    pub ensemble: usize,
}

impl Default for MlpTrainConfig {
    fn default() -> Self {
        MlpTrainConfig {
            hidden_sizes: vec![256, 256],
            learning_rate: 0.1,
            momentum: 0.9,
            batch_size: 64,
            epochs: 30,
            seed: 0,
            export_temperature: 1.0,
            ensemble: 1,
        }
    }
}

impl MlpTrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.hidden_sizes.iter().any(|&h| h == 0) {
            return fail("hidden layer sizes must be nonzero".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return fail(format!("learning_rate must be >= 0, got {}", self.learning_rate));
        }
        if !(self.momentum.is_finite() && (0.0..1.0).contains(&self.momentum)) {
            return fail(format!("momentum must be in [0, 1), got {}", self.momentum));
        }
        if self.batch_size < 1 || self.epochs < 1 {
            return fail("batch_size and epochs must be >= 1".into());
        }
        if !(self.export_temperature.is_finite() && self.export_temperature >= 1.0) {
            return fail(format!(
                "export_temperature must be >= 1, got {}",
                self.export_temperature
            ));
        }
        if self.ensemble < 1 {
            return fail("ensemble must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpEpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MlpReport {
    pub rows: Vec<MlpEpochRow>,
}

impl MlpReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,test_acc,seconds\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6}\n",
                r.epoch, r.train_loss, r.train_acc, r.test_acc, r.seconds
            ));
        }
        out
    }
}

/// Pre-softmax logits of the affine-rectifier stack.
pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "input vector",
            expected: model.input_dim(),
            actual: x.len(),
        });
    }
    let mut current = x.to_vec();
    for l in 0..model.num_layers() {
        let out_dim = model.layer_sizes[l + 1];
        let in_dim = model.layer_sizes[l];
        let mut next = vec![0.0; out_dim];
        for (r, slot) in next.iter_mut().enumerate() {
            let row = &model.weights[l][r * in_dim..(r + 1) * in_dim];
            *slot = crate::tree::dot(row, &current) + model.biases[l][r];
        }
        if l + 1 < model.num_layers() {
            for v in &mut next {
                *v = v.max(0.0);
            }
        }
        current = next;
    }
    Ok(current)
}

fn init_model(input_dim: usize, num_classes: usize, config: &MlpTrainConfig) -> MlpModel {
    let mut layer_sizes = vec![input_dim];
    layer_sizes.extend_from_slice(&config.hidden_sizes);
    layer_sizes.push(num_classes);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..layer_sizes.len() - 1 {
        let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
        let limit = (6.0 / fan_in as f64).sqrt();
        weights.push(
            (0..fan_in * fan_out)
                .map(|_| rng.gen_range(-limit..limit))
                .collect(),
        );
        biases.push(vec![0.0; fan_out]);
    }
    MlpModel {
        layer_sizes,
        weights,
        biases,
    }
}

/// Per-layer gradient buffers, also reused as momentum velocities.
#[derive(Debug, Clone)]
struct MlpGradients {
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl MlpGradients {
    fn zeros_like(model: &MlpModel) -> Self {
        MlpGradients {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn momentum_step(&mut self, model: &mut MlpModel, grads: &MlpGradients, mu: f64, lr: f64) {
        for l in 0..model.weights.len() {
            for ((v, &g), w) in self.weights[l]
                .iter_mut()
                .zip(grads.weights[l].iter())
                .zip(model.weights[l].iter_mut())
            {
                *v = mu * *v - lr * g;
                *w += *v;
            }
            for ((v, &g), b) in self.biases[l]
                .iter_mut()
                .zip(grads.biases[l].iter())
                .zip(model.biases[l].iter_mut())
            {
                *v = mu * *v - lr * g;
                *b += *v;
            }
        }
    }
}

/// Batch gradients of the mean softmax cross entropy. Returns the mean
/// loss. Activations and deltas are computed per example in parallel rows;
/// the reduction into parameter space walks examples in index order.
fn mlp_batch_gradients(
    model: &MlpModel,
    xs: &[&[f64]],
    targets: &[&[f64]],
    grads: &mut MlpGradients,
) -> Result<f64> {
    let b = xs.len();
    let inv_b = 1.0 / b as f64;
    let num_layers = model.num_layers();
    let k = model.num_classes();
    let hidden_total: usize = model.layer_sizes[1..num_layers].iter().sum();
    let delta_total = hidden_total + k;

    // Per-example rows: post-rectifier activations of every hidden layer,
    // then deltas for every layer (hidden layers first, output last).
    let mut acts = vec![0.0; b * hidden_total.max(1)];
    let mut deltas = vec![0.0; b * delta_total];
    let mut losses = vec![0.0; b];
    {
        let acts_width = hidden_total.max(1);
        exec::for_each_row3(
            &mut acts,
            acts_width,
            &mut deltas,
            delta_total,
            &mut losses,
            1,
            |i, act_row, delta_row, loss_slot| {
                let x = xs[i];
                let t = targets[i];
                // Forward.
                let mut offset = 0usize;
                let mut current: Vec<f64> = Vec::new();
                for l in 0..num_layers {
                    let in_dim = model.layer_sizes[l];
                    let out_dim = model.layer_sizes[l + 1];
                    let input: &[f64] = if l == 0 { x } else { &current };
                    let mut out = vec![0.0; out_dim];
                    for (r, slot) in out.iter_mut().enumerate() {
                        let row = &model.weights[l][r * in_dim..(r + 1) * in_dim];
                        *slot = crate::tree::dot(row, input) + model.biases[l][r];
                    }
                    if l + 1 < num_layers {
                        for v in &mut out {
                            *v = v.max(0.0);
                        }
                        act_row[offset..offset + out_dim].copy_from_slice(&out);
                        offset += out_dim;
                        current = out;
                    } else {
                        // Output layer: softmax cross entropy.
                        let log_probs = log_softmax(&out);
                        loss_slot[0] = -t
                            .iter()
                            .zip(log_probs.iter())
                            .map(|(&tk, &lp)| tk * lp)
                            .sum::<f64>();
                        let delta_out = &mut delta_row[hidden_total..hidden_total + k];
                        for (kk, slot) in delta_out.iter_mut().enumerate() {
                            *slot = log_probs[kk].exp() - t[kk];
                        }
                    }
                }
                // Backward through hidden layers.
                let mut upper_start = hidden_total;
                for l in (1..num_layers).rev() {
                    let out_dim = model.layer_sizes[l + 1];
                    let this_dim = model.layer_sizes[l];
                    let this_start = upper_start - this_dim;
                    // delta_l = W_l^T delta_{l+1} (*) rectifier mask
                    let (lower, upper) = delta_row.split_at_mut(upper_start);
                    let delta_upper = &upper[..out_dim];
                    let delta_this = &mut lower[this_start..];
                    let act_start: usize = model.layer_sizes[1..l].iter().sum();
                    let act_this = &act_row[act_start..act_start + this_dim];
                    for c in 0..this_dim {
                        if act_this[c] > 0.0 {
                            let mut acc = 0.0;
                            for (r, &du) in delta_upper.iter().enumerate() {
                                acc += model.weights[l][r * this_dim + c] * du;
                            }
                            delta_this[c] = acc;
                        } else {
                            delta_this[c] = 0.0;
                        }
                    }
                    upper_start = this_start;
                }
            },
        );
    }

    // Reduce into parameter gradients, one output row per task.
    // Block offsets: layer l's deltas (and the hidden activations layer l
    // produces) start at the prefix sum of layer_sizes[1..=l].
    let block_offsets: Vec<usize> = {
        let mut v = vec![0usize];
        for j in 1..=num_layers {
            v.push(v.last().unwrap() + model.layer_sizes[j]);
        }
        v
    };
    let acts_width = hidden_total.max(1);
    for l in 0..num_layers {
        let in_dim = model.layer_sizes[l];
        let offset = block_offsets[l];
        let acts_ref = &acts;
        let deltas_ref = &deltas;
        let gw = &mut grads.weights[l];
        let gb = &mut grads.biases[l];
        exec::for_each_row2(gw, in_dim, gb, 1, |r, row_w, row_b| {
            let mut sum_b = 0.0;
            for x in 0..b {
                let d = deltas_ref[x * delta_total + offset + r];
                if d != 0.0 {
                    sum_b += d;
                    let input: &[f64] = if l == 0 {
                        xs[x]
                    } else {
                        let s = x * acts_width + block_offsets[l - 1];
                        &acts_ref[s..s + in_dim]
                    };
                    for (w, &v) in row_w.iter_mut().zip(input.iter()) {
                        *w += d * v;
                    }
                }
            }
            for w in row_w.iter_mut() {
                *w *= inv_b;
            }
            row_b[0] = sum_b * inv_b;
        });
    }

    let mut mean = 0.0;
    for (i, &lv) in losses.iter().enumerate() {
        if !lv.is_finite() {
            return Err(Error::NonFinite {
                context: format!("mlp loss of batch example {i}"),
            });
        }
        mean += lv;
    }
    Ok(mean * inv_b)
}

/// Trains a fully connected teacher on hard labels.
pub fn mlp_train(
    train_set: &Dataset,
    test_set: &Dataset,
    config: &MlpTrainConfig,
) -> Result<(MlpModel, MlpReport)> {
    config.validate()?;
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = train_set.num_classes();
    let mut model = init_model(train_set.input_dim(), k, config);
    let mut velocity = MlpGradients::zeros_like(&model);
    let mut grads = MlpGradients::zeros_like(&model);
    let mut report = MlpReport::default();
    let n = train_set.len();

    // One-hot target rows, built once.
    let mut onehot = vec![0.0; n * k];
    for i in 0..n {
        onehot[i * k + train_set.label(i)] = 1.0;
    }

    for epoch in 0..config.epochs {
        let started = Instant::now();
        let plan = BatchPlan::new(n, config.batch_size, config.seed, epoch)?;
        let mut loss_sum = 0.0;
        for batch_indices in plan.batches() {
            let xs: Vec<&[f64]> = batch_indices.iter().map(|&i| train_set.features(i)).collect();
            let ts: Vec<&[f64]> = batch_indices
                .iter()
                .map(|&i| &onehot[i * k..(i + 1) * k])
                .collect();
            for g in grads.weights.iter_mut().chain(grads.biases.iter_mut()) {
                g.iter_mut().for_each(|v| *v = 0.0);
            }
            let mean_loss = mlp_batch_gradients(&model, &xs, &ts, &mut grads)?;
            velocity.momentum_step(&mut model, &grads, config.momentum, config.learning_rate);
            loss_sum += mean_loss * xs.len() as f64;
        }
        let (train_acc, _) = mlp_evaluate(&model, train_set)?;
        let (test_acc, _) = mlp_evaluate(&model, test_set)?;
        report.rows.push(MlpEpochRow {
            epoch: epoch + 1,
            train_loss: loss_sum / n as f64,
            train_acc,
            test_acc,
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok((model, report))
}

/// Trains `config.ensemble` models from consecutive seeds.
pub fn mlp_train_ensemble(
    train_set: &Dataset,
    test_set: &Dataset,
    config: &MlpTrainConfig,
) -> Result<Vec<(MlpModel, MlpReport)>> {
    config.validate()?;
    (0..config.ensemble)
        .map(|i| {
            let member = MlpTrainConfig {
                seed: config.seed + i as u64,
                ..config.clone()
            };
            mlp_train(train_set, test_set, &member)
        })
        .collect()
}

/// Accuracy and mean negative log-likelihood on a labeled dataset.
pub fn mlp_evaluate(model: &MlpModel, data: &Dataset) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let per_example = exec::map_indexed(data.len(), |i| {
        let logits = mlp_forward(model, data.features(i))?;
        let log_probs = log_softmax(&logits);
        let label = data.label(i);
        Ok::<_, Error>((argmax(&logits) == label, -log_probs[label]))
    });
    let mut correct = 0usize;
    let mut loss_sum = 0.0;
    for r in per_example {
        let (ok, loss) = r?;
        correct += ok as usize;
        loss_sum += loss;
    }
    let n = data.len() as f64;
    Ok((correct as f64 / n, loss_sum / n))
}

/// Teacher predictive distributions at softmax temperature `tau`:
/// `softmax(logits / tau)` per example.
pub fn mlp_soft_predictions(
    model: &MlpModel,
    data: &Dataset,
    temperature: f64,
) -> Result<SoftTargetSet> {
    if !(temperature.is_finite() && temperature >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "temperature must be >= 1, got {temperature}"
        )));
    }
    let k = model.num_classes();
    let per_example = exec::map_indexed(data.len(), |i| {
        let mut logits = mlp_forward(model, data.features(i))?;
        for v in &mut logits {
            *v /= temperature;
        }
        Ok::<_, Error>(softmax(&logits))
    });
    let mut rows = Vec::with_capacity(data.len() * k);
    for r in per_example {
        rows.extend_from_slice(&r?);
    }
    SoftTargetSet::from_rows(k, rows, Provenance::Teacher { temperature })
}

/// Probability-averaged predictions of several teachers at temperature
/// `tau`.
pub fn ensemble_soft_predictions(
    models: &[MlpModel],
    data: &Dataset,
    temperature: f64,
) -> Result<SoftTargetSet> {
    if models.is_empty() {
        return Err(Error::InvalidConfig("ensemble must contain at least one model".into()));
    }
    let k = models[0].num_classes();
    let mut rows = vec![0.0; data.len() * k];
    let scale = 1.0 / models.len() as f64;
    for model in models {
        let member = mlp_soft_predictions(model, data, temperature)?;
        for i in 0..data.len() {
            for (slot, &v) in rows[i * k..(i + 1) * k].iter_mut().zip(member.row(i)) {
                *slot += scale * v;
            }
        }
    }
    SoftTargetSet::from_rows(k, rows, Provenance::Teacher { temperature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn xor_dataset() -> Dataset {
        let features = vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0];
        let labels = vec![0, 1, 1, 0];
        Dataset::new("xor", 2, 2, features, labels, vec!["f".into(), "t".into()]).unwrap()
    }

    #[test]
    fn forward_zero_net_gives_zero_logits() {
        let model = MlpModel::from_parts(
            vec![3, 2, 2],
            vec![vec![0.0; 6], vec![0.0; 4]],
            vec![vec![0.0; 2], vec![0.0; 2]],
        )
        .unwrap();
        let logits = mlp_forward(&model, &[0.3, -0.4, 0.9]).unwrap();
        assert_eq!(logits, vec![0.0, 0.0]);
        let probs = softmax(&logits);
        assert_relative_eq!(probs[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn forward_known_single_unit_chain() {
        // One hidden unit: w1 = [1], b1 = 0, w2 = [2], b2 = 1, x = [3].
        let model = MlpModel::from_parts(
            vec![1, 1, 1],
            vec![vec![1.0], vec![2.0]],
            vec![vec![0.0], vec![1.0]],
        )
        .unwrap();
        let logits = mlp_forward(&model, &[3.0]).unwrap();
        assert_relative_eq!(logits[0], 7.0, epsilon = 1e-15);
        // Negative pre-activation rectifies to zero: logit = b2 only.
        let logits = mlp_forward(&model, &[-3.0]).unwrap();
        assert_relative_eq!(logits[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gradients_match_central_differences() {
        let config = MlpTrainConfig {
            hidden_sizes: vec![4],
            seed: 5,
            ..MlpTrainConfig::default()
        };
        let model = init_model(3, 2, &config);
        let xs_data = [
            vec![0.25, -0.5, 0.75],
            vec![0.9, 0.1, -0.3],
            vec![-0.6, 0.4, 0.2],
        ];
        let ts_data = [vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let xs: Vec<&[f64]> = xs_data.iter().map(|v| v.as_slice()).collect();
        let ts: Vec<&[f64]> = ts_data.iter().map(|v| v.as_slice()).collect();
        let mut grads = MlpGradients::zeros_like(&model);
        mlp_batch_gradients(&model, &xs, &ts, &mut grads).unwrap();

        let objective = |m: &MlpModel| {
            let mut sum = 0.0;
            for (x, t) in xs.iter().zip(ts.iter()) {
                let lp = log_softmax(&mlp_forward(m, x).unwrap());
                sum -= t.iter().zip(lp.iter()).map(|(&a, &b)| a * b).sum::<f64>();
            }
            sum / xs.len() as f64
        };
        let h = 1e-5;
        let mut worst = 0.0f64;
        for l in 0..model.num_layers() {
            for idx in 0..model.weights[l].len() {
                let mut plus = model.clone();
                plus.weights[l][idx] += h;
                let mut minus = model.clone();
                minus.weights[l][idx] -= h;
                let numeric = (objective(&plus) - objective(&minus)) / (2.0 * h);
                let ga = grads.weights[l][idx];
                worst = worst.max((ga - numeric).abs() / (ga.abs() + numeric.abs()).max(1e-8));
            }
            for idx in 0..model.biases[l].len() {
                let mut plus = model.clone();
                plus.biases[l][idx] += h;
                let mut minus = model.clone();
                minus.biases[l][idx] -= h;
                let numeric = (objective(&plus) - objective(&minus)) / (2.0 * h);
                let ga = grads.biases[l][idx];
                worst = worst.max((ga - numeric).abs() / (ga.abs() + numeric.abs()).max(1e-8));
            }
        }
        assert!(worst <= 1e-4, "max relative error {worst}");
    }

    #[test]
    fn learns_xor() {
        let data = xor_dataset();
        let config = MlpTrainConfig {
            hidden_sizes: vec![4],
            learning_rate: 0.1,
            momentum: 0.9,
            batch_size: 4,
            epochs: 3000,
            seed: 0,
            ..MlpTrainConfig::default()
        };
        let (model, report) = mlp_train(&data, &data, &config).unwrap();
        let (acc, _) = mlp_evaluate(&model, &data).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(report.rows.len(), 3000);
    }

    #[test]
    fn zero_learning_rate_freezes_parameters() {
        let data = xor_dataset();
        let config = MlpTrainConfig {
            hidden_sizes: vec![3],
            learning_rate: 0.0,
            epochs: 2,
            batch_size: 2,
            seed: 9,
            ..MlpTrainConfig::default()
        };
        let (model, _) = mlp_train(&data, &data, &config).unwrap();
        let fresh = init_model(2, 2, &config);
        assert_eq!(model, fresh);
    }

    #[test]
    fn training_is_deterministic() {
        let data = xor_dataset();
        let config = MlpTrainConfig {
            hidden_sizes: vec![5],
            epochs: 50,
            batch_size: 2,
            seed: 77,
            ..MlpTrainConfig::default()
        };
        let (a, _) = mlp_train(&data, &data, &config).unwrap();
        let (b, _) = mlp_train(&data, &data, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn soft_predictions_flatten_with_temperature() {
        let data = xor_dataset();
        let config = MlpTrainConfig {
            hidden_sizes: vec![4],
            learning_rate: 0.5,
            epochs: 500,
            batch_size: 4,
            seed: 1,
            ..MlpTrainConfig::default()
        };
        let (model, _) = mlp_train(&data, &data, &config).unwrap();
        let flat = mlp_soft_predictions(&model, &data, 1e6).unwrap();
        for i in 0..data.len() {
            for &v in flat.row(i) {
                assert!((v - 0.5).abs() < 1e-4, "tau -> inf row should be uniform");
            }
        }
    }

    #[test]
    fn temperature_preserves_argmax() {
        let model = MlpModel::from_parts(
            vec![1, 3],
            vec![vec![1.0, -2.0, 0.5]],
            vec![vec![0.2, 0.1, -0.4]],
        )
        .unwrap();
        let data = Dataset::new(
            "t",
            1,
            3,
            vec![0.5, -1.0, 2.0],
            vec![0, 1, 2],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let base = mlp_soft_predictions(&model, &data, 1.0).unwrap();
        for tau in [2.0, 8.0, 64.0] {
            let soft = mlp_soft_predictions(&model, &data, tau).unwrap();
            for i in 0..data.len() {
                assert_eq!(argmax(base.row(i)), argmax(soft.row(i)));
            }
        }
    }

    #[test]
    fn logits_two_zero_at_tau_two() {
        let model = MlpModel::from_parts(vec![1, 2], vec![vec![2.0, 0.0]], vec![vec![0.0, 0.0]])
            .unwrap();
        let data = Dataset::new(
            "t",
            1,
            2,
            vec![1.0],
            vec![0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        // logits [2, 0] at tau = 2 -> softmax([1, 0]) = [sigma(1), 1 - sigma(1)]
        let soft = mlp_soft_predictions(&model, &data, 2.0).unwrap();
        assert_relative_eq!(soft.row(0)[0], 0.7310585786300049, epsilon = 1e-12);
        assert_relative_eq!(soft.row(0)[1], 0.2689414213699951, epsilon = 1e-12);
    }

    #[test]
    fn ensemble_averages_probabilities() {
        let m1 = MlpModel::from_parts(vec![1, 2], vec![vec![0.0, 0.0]], vec![vec![1.0, 0.0]])
            .unwrap();
        let m2 = MlpModel::from_parts(vec![1, 2], vec![vec![0.0, 0.0]], vec![vec![0.0, 1.0]])
            .unwrap();
        let data = Dataset::new(
            "t",
            1,
            2,
            vec![0.0],
            vec![0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let avg = ensemble_soft_predictions(&[m1.clone(), m2], &data, 1.0).unwrap();
        // Symmetric logits: the average is exactly [0.5, 0.5].
        assert_relative_eq!(avg.row(0)[0], 0.5, epsilon = 1e-12);
        let single = ensemble_soft_predictions(&[m1], &data, 1.0).unwrap();
        assert!(single.row(0)[0] > 0.7);
    }
}
