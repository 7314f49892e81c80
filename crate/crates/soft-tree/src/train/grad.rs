//! Analytic gradients of the batch objective (mean example loss plus
//! balance penalty) and a central-difference checker for them.
//!
//! Per example, the loss gradient with respect to a gate probability comes
//! from a single upward sweep that folds each subtree's leaf terms into a
//! per-node value; the penalty contributes through the current batch's
//! share of each node's running usage average (history is a constant).
//! All cross-example reductions run in a fixed index order, so results are
//! bit-identical with and without the `parallel` feature.

use crate::error::{Error, Result};
use crate::exec;
use crate::tree::{log_softmax, SoftTree};

use super::loss::validate_target;
use super::stats::{balance_penalty, penalty_strength, NodeStats};
use super::{LossVariant, TrainConfig, TrainExample};

/// Parameter-shaped buffer: one slot per tree parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    input_dim: usize,
    num_classes: usize,
    grad_w: Vec<f64>,   // num_inner x input_dim, row-major
    grad_b: Vec<f64>,   // num_inner
    grad_phi: Vec<f64>, // num_leaves x num_classes, row-major
}

impl Gradients {
    pub fn zeros_like(tree: &SoftTree) -> Self {
        Gradients {
            input_dim: tree.input_dim(),
            num_classes: tree.num_classes(),
            grad_w: vec![0.0; tree.num_inner() * tree.input_dim()],
            grad_b: vec![0.0; tree.num_inner()],
            grad_phi: vec![0.0; tree.num_leaves() * tree.num_classes()],
        }
    }

    pub fn grad_w(&self, node: usize) -> &[f64] {
        &self.grad_w[node * self.input_dim..(node + 1) * self.input_dim]
    }

    pub fn grad_b(&self, node: usize) -> f64 {
        self.grad_b[node]
    }

    pub fn grad_phi(&self, leaf: usize) -> &[f64] {
        &self.grad_phi[leaf * self.num_classes..(leaf + 1) * self.num_classes]
    }

    /// Flat parameter indexing: all filters, then all biases, then all
    /// leaf logits. Matches [`tree_param_mut`].
    fn param(&self, idx: usize) -> f64 {
        if idx < self.grad_w.len() {
            self.grad_w[idx]
        } else if idx < self.grad_w.len() + self.grad_b.len() {
            self.grad_b[idx - self.grad_w.len()]
        } else {
            self.grad_phi[idx - self.grad_w.len() - self.grad_b.len()]
        }
    }

    /// `v <- mu * v - lr * g; theta <- theta + v` over every parameter,
    /// with `self` as the velocity buffer.
    pub(crate) fn momentum_step(&mut self, tree: &mut SoftTree, grads: &Gradients, mu: f64, lr: f64) {
        let d = self.input_dim;
        for (j, node) in tree.inner_nodes_mut().iter_mut().enumerate() {
            let vw = &mut self.grad_w[j * d..(j + 1) * d];
            let gw = &grads.grad_w[j * d..(j + 1) * d];
            for ((v, &g), w) in vw.iter_mut().zip(gw.iter()).zip(node.filter_w.iter_mut()) {
                *v = mu * *v - lr * g;
                *w += *v;
            }
            let vb = &mut self.grad_b[j];
            *vb = mu * *vb - lr * grads.grad_b[j];
            node.bias_b += *vb;
        }
        let k = self.num_classes;
        for (l, leaf) in tree.leaves_mut().iter_mut().enumerate() {
            let vphi = &mut self.grad_phi[l * k..(l + 1) * k];
            let gphi = &grads.grad_phi[l * k..(l + 1) * k];
            for ((v, &g), phi) in vphi.iter_mut().zip(gphi.iter()).zip(leaf.logits_phi.iter_mut()) {
                *v = mu * *v - lr * g;
                *phi += *v;
            }
        }
    }
}

/// Mutable access to the `idx`-th parameter under the flat ordering used
/// by [`Gradients::param`].
fn tree_param_mut(tree: &mut SoftTree, idx: usize) -> &mut f64 {
    let d = tree.input_dim();
    let k = tree.num_classes();
    let nw = tree.num_inner() * d;
    let nb = tree.num_inner();
    if idx < nw {
        &mut tree.inner_nodes_mut()[idx / d].filter_w[idx % d]
    } else if idx < nw + nb {
        &mut tree.inner_nodes_mut()[idx - nw].bias_b
    } else {
        let r = idx - nw - nb;
        &mut tree.leaves_mut()[r / k].logits_phi[r % k]
    }
}

/// Per-batch cache of every leaf's distribution and log-distribution.
struct LeafCache {
    q: Vec<f64>,     // num_leaves x num_classes
    log_q: Vec<f64>, // num_leaves x num_classes
}

impl LeafCache {
    fn build(tree: &SoftTree) -> Result<Self> {
        let k = tree.num_classes();
        let mut q = vec![0.0; tree.num_leaves() * k];
        let mut log_q = vec![0.0; tree.num_leaves() * k];
        for (l, leaf) in tree.leaves().iter().enumerate() {
            if leaf.logits_phi.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("leaf {l}"),
                });
            }
            let lq = log_softmax(&leaf.logits_phi);
            for (kk, &v) in lq.iter().enumerate() {
                log_q[l * k + kk] = v;
                q[l * k + kk] = v.exp();
            }
        }
        Ok(LeafCache { q, log_q })
    }
}

fn check_batch(tree: &SoftTree, batch: &[TrainExample]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for (x, t) in batch {
        if x.len() != tree.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "input vector",
                expected: tree.input_dim(),
                actual: x.len(),
            });
        }
        validate_target(t, tree.num_classes())?;
    }
    Ok(())
}

/// Exact gradients of `mean example loss + balance penalty` for one batch.
///
/// `stats` absorbs the batch (the once-per-batch update happens here,
/// before the penalty gradient is taken) and the returned penalty value
/// reflects the refreshed averages. Only the current batch's contribution
/// to each node's average carries gradient; the decayed history is a
/// constant.
pub fn batch_gradients(
    tree: &SoftTree,
    batch: &[TrainExample],
    stats: &mut NodeStats,
    config: &TrainConfig,
) -> Result<(Gradients, f64, f64)> {
    check_batch(tree, batch)?;
    let num_inner = tree.num_inner();
    let num_leaves = tree.num_leaves();
    let d = tree.input_dim();
    let k = tree.num_classes();
    let b = batch.len();
    let inv_b = 1.0 / b as f64;
    let variant = config.loss_variant;

    let cache = LeafCache::build(tree)?;
    let xs: Vec<&[f64]> = batch.iter().map(|(x, _)| *x).collect();
    let ts: Vec<&[f64]> = batch.iter().map(|(_, t)| *t).collect();

    // Forward pass, one row per example.
    let mut gates = vec![0.0; b * num_inner];
    let mut node_p = vec![0.0; b * num_inner];
    let mut leaf_p = vec![0.0; b * num_leaves];
    {
        let xs = &xs;
        exec::for_each_row3(
            &mut gates,
            num_inner,
            &mut node_p,
            num_inner,
            &mut leaf_p,
            num_leaves,
            |i, g_row, np_row, lp_row| tree.route_into(xs[i], g_row, np_row, lp_row),
        );
    }

    // Refresh the node statistics from this batch.
    let mut batch_num = vec![0.0; num_inner];
    let mut batch_den = vec![0.0; num_inner];
    for x in 0..b {
        let base = x * num_inner;
        for i in 0..num_inner {
            let mass = node_p[base + i];
            batch_den[i] += mass;
            batch_num[i] += mass * gates[base + i];
        }
    }
    let gamma_eff = stats.apply_sums(&batch_num, &batch_den, config);
    let penalty = balance_penalty(stats, config);

    // Per-node penalty coefficients: d(penalty)/d(batch contribution).
    // The clamp on alpha is a numerical guard; its derivative passes
    // through, so a hard-saturated gate still feels the full restoring
    // force of the penalty.
    let mut u = vec![0.0; num_inner];
    let mut alphas = vec![0.5; num_inner];
    let mut penalty_active = false;
    if config.lambda0 > 0.0 {
        for i in 0..num_inner {
            alphas[i] = stats.alpha(i);
            if gamma_eff[i] < 1.0 {
                let lambda_d = penalty_strength(config, SoftTree::node_depth(i));
                let psi_prime = 0.5 * (1.0 / (1.0 - alphas[i]) - 1.0 / alphas[i]);
                u[i] = lambda_d * psi_prime * (1.0 - gamma_eff[i]) / stats.ema_den(i);
                if u[i] != 0.0 {
                    penalty_active = true;
                }
            }
        }
    }

    // Backward pass: per-example gate gradients and leaf coefficients.
    let mut gate_grad = vec![0.0; b * num_inner];
    let mut leaf_coeff = vec![0.0; b * num_leaves];
    let mut losses = vec![0.0; b];
    {
        let (gates, node_p, leaf_p) = (&gates, &node_p, &leaf_p);
        let (ts, cache, u, alphas) = (&ts, &cache, &u, &alphas);
        exec::for_each_row3(
            &mut gate_grad,
            num_inner,
            &mut leaf_coeff,
            num_leaves,
            &mut losses,
            1,
            |x, gg_row, lc_row, loss_slot| {
                let g = &gates[x * num_inner..(x + 1) * num_inner];
                let np = &node_p[x * num_inner..(x + 1) * num_inner];
                let lp = &leaf_p[x * num_leaves..(x + 1) * num_leaves];
                let t = ts[x];

                // Subtree values: leaf slots carry the per-leaf term, inner
                // slots fold children with the gate factors.
                let mut vals = vec![0.0; num_inner + num_leaves];
                for l in 0..num_leaves {
                    let lq = &cache.log_q[l * k..(l + 1) * k];
                    let ce: f64 = -t.iter().zip(lq.iter()).map(|(&tk, &v)| tk * v).sum::<f64>();
                    vals[num_inner + l] = match variant {
                        LossVariant::WeightedCe => ce,
                        LossVariant::MixtureNll => (-ce).exp(),
                    };
                }
                for i in (0..num_inner).rev() {
                    vals[i] = (1.0 - g[i]) * vals[2 * i + 1] + g[i] * vals[2 * i + 2];
                }
                let mixture_mass = vals[0];
                loss_slot[0] = match variant {
                    LossVariant::WeightedCe => vals[0],
                    LossVariant::MixtureNll => -vals[0].ln(),
                };

                let mut z = vec![0.0; num_inner + num_leaves];
                if penalty_active {
                    for i in (0..num_inner).rev() {
                        z[i] = u[i] * (g[i] - alphas[i])
                            + (1.0 - g[i]) * z[2 * i + 1]
                            + g[i] * z[2 * i + 2];
                    }
                }

                for j in 0..num_inner {
                    let dv = vals[2 * j + 2] - vals[2 * j + 1];
                    let d_loss = match variant {
                        LossVariant::WeightedCe => dv * inv_b,
                        LossVariant::MixtureNll => -dv / mixture_mass * inv_b,
                    };
                    let d_pen = if penalty_active {
                        u[j] + z[2 * j + 2] - z[2 * j + 1]
                    } else {
                        0.0
                    };
                    gg_row[j] = np[j] * (d_loss + d_pen) * g[j] * (1.0 - g[j]);
                }
                for l in 0..num_leaves {
                    lc_row[l] = match variant {
                        LossVariant::WeightedCe => lp[l] * inv_b,
                        LossVariant::MixtureNll => {
                            lp[l] * vals[num_inner + l] / mixture_mass * inv_b
                        }
                    };
                }
            },
        );
    }

    // Reduce into parameter space, examples in index order.
    let mut grads = Gradients::zeros_like(tree);
    let beta = tree.beta();
    {
        let (gate_grad, xs) = (&gate_grad, &xs);
        exec::for_each_row2(&mut grads.grad_w, d, &mut grads.grad_b, 1, |j, row_w, row_b| {
            let mut sum_b = 0.0;
            for x in 0..b {
                let s = gate_grad[x * num_inner + j];
                if s != 0.0 {
                    sum_b += s;
                    let xr = xs[x];
                    for (w, &xv) in row_w.iter_mut().zip(xr.iter()) {
                        *w += s * xv;
                    }
                }
            }
            for w in row_w.iter_mut() {
                *w *= beta;
            }
            row_b[0] = beta * sum_b;
        });
        let (leaf_coeff, ts, cache) = (&leaf_coeff, &ts, &cache);
        exec::for_each_row(&mut grads.grad_phi, k, |l, row| {
            let q = &cache.q[l * k..(l + 1) * k];
            for x in 0..b {
                let coeff = leaf_coeff[x * num_leaves + l];
                if coeff != 0.0 {
                    let t = ts[x];
                    for kk in 0..k {
                        row[kk] += coeff * (q[kk] - t[kk]);
                    }
                }
            }
        });
    }

    let mut mean_loss = 0.0;
    for (x, &lv) in losses.iter().enumerate() {
        if !lv.is_finite() {
            return Err(Error::NonFinite {
                context: format!("loss of batch example {x}"),
            });
        }
        mean_loss += lv;
    }
    mean_loss *= inv_b;
    for (j, &gb) in grads.grad_b.iter().enumerate() {
        if !gb.is_finite() {
            return Err(Error::NonFinite {
                context: format!("gradient at inner node {j}"),
            });
        }
    }

    Ok((grads, mean_loss, penalty))
}

/// `(mean loss, penalty)` of one batch, leaving `stats` untouched: the
/// value whose gradient [`batch_gradients`] computes. Drives the
/// finite-difference check.
pub(crate) fn batch_objective(
    tree: &SoftTree,
    batch: &[TrainExample],
    stats: &NodeStats,
    config: &TrainConfig,
) -> Result<(f64, f64)> {
    check_batch(tree, batch)?;
    let num_inner = tree.num_inner();
    let mut batch_num = vec![0.0; num_inner];
    let mut batch_den = vec![0.0; num_inner];
    let mut loss_sum = 0.0;
    for (x, t) in batch {
        let routing = tree.route(x)?;
        for i in 0..num_inner {
            let mass = routing.node_path_prob[i];
            batch_den[i] += mass;
            batch_num[i] += mass * routing.gate_p[i];
        }
        loss_sum += super::loss::example_loss(tree, x, t, config.loss_variant)?;
    }
    let mut updated = stats.clone();
    updated.apply_sums(&batch_num, &batch_den, config);
    Ok((loss_sum / batch.len() as f64, balance_penalty(&updated, config)))
}

/// Compares [`batch_gradients`] against central finite differences
/// (`h = 1e-5`) on every parameter and returns the worst relative error
/// `|g_a - g_n| / max(1e-8, |g_a| + |g_n|)`.
pub fn gradient_check(
    tree: &SoftTree,
    batch: &[TrainExample],
    stats: &NodeStats,
    config: &TrainConfig,
) -> Result<f64> {
    let analytic = {
        let mut working = stats.clone();
        batch_gradients(tree, batch, &mut working, config)?.0
    };
    let h = 1e-5;
    let mut worst = 0.0f64;
    for idx in 0..tree.param_count() {
        let mut plus = tree.clone();
        *tree_param_mut(&mut plus, idx) += h;
        let (lp, pp) = batch_objective(&plus, batch, stats, config)?;
        let mut minus = tree.clone();
        *tree_param_mut(&mut minus, idx) -= h;
        let (lm, pm) = batch_objective(&minus, batch, stats, config)?;
        let numeric = ((lp + pp) - (lm + pm)) / (2.0 * h);
        let ga = analytic.param(idx);
        let rel = (ga - numeric).abs() / (ga.abs() + numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}
