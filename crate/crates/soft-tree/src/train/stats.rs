//! Per-node routing statistics and the balance penalty.
//!
//! Each inner node tracks an exponentially decaying running average of how
//! much probability mass it sends right (`alpha`). The averaging window
//! doubles with node depth, because deeper nodes see exponentially less
//! data per batch. The penalty is the cross entropy between the desired
//! (0.5, 0.5) usage and (alpha, 1 - alpha), with strength decaying as
//! `penalty_decay_base^(-depth)`.

use crate::tree::{RoutingResult, SoftTree, GATE_EPS};

use super::TrainConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeStats {
    ema_num: Vec<f64>,
    ema_den: Vec<f64>,
    seen: Vec<bool>,
}

impl NodeStats {
    pub fn new(num_inner: usize) -> Self {
        NodeStats {
            ema_num: vec![0.0; num_inner],
            ema_den: vec![0.0; num_inner],
            seen: vec![false; num_inner],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.ema_num.len()
    }

    /// Whether node `i` has absorbed at least one batch with mass.
    pub fn is_seen(&self, i: usize) -> bool {
        self.seen[i]
    }

    /// Running average right-branch usage of node `i`, clamped to
    /// `[GATE_EPS, 1 - GATE_EPS]`. Nodes that never saw mass report 0.5.
    pub fn alpha(&self, i: usize) -> f64 {
        if !self.seen[i] {
            return 0.5;
        }
        (self.ema_num[i] / self.ema_den[i]).clamp(GATE_EPS, 1.0 - GATE_EPS)
    }

    pub(crate) fn ema_den(&self, i: usize) -> f64 {
        self.ema_den[i]
    }

    /// Folds one batch's per-node sums of `P^i * p_i` (`batch_num`) and
    /// `P^i` (`batch_den`) into the running averages.
    ///
    /// Returns the per-node decay factor that was applied: 0 on a node's
    /// first update (the batch seeds the average directly), 1 for nodes
    /// that received no mass (nothing changed), and `gamma_d` otherwise.
    pub(crate) fn apply_sums(
        &mut self,
        batch_num: &[f64],
        batch_den: &[f64],
        config: &TrainConfig,
    ) -> Vec<f64> {
        let mut gamma_eff = vec![1.0; self.ema_num.len()];
        for i in 0..self.ema_num.len() {
            if batch_den[i] <= 0.0 {
                continue;
            }
            let gamma = if self.seen[i] {
                batch_decay(config, SoftTree::node_depth(i))
            } else {
                0.0
            };
            self.ema_num[i] = gamma * self.ema_num[i] + (1.0 - gamma) * batch_num[i];
            self.ema_den[i] = gamma * self.ema_den[i] + (1.0 - gamma) * batch_den[i];
            self.seen[i] = true;
            gamma_eff[i] = gamma;
        }
        gamma_eff
    }
}

/// Per-batch decay factor for a node at the given depth:
/// `0.5^(1 / (ema_halflife0 * 2^depth))`, so the half-life in batches is
/// `ema_halflife0 * 2^depth`.
pub(crate) fn batch_decay(config: &TrainConfig, depth: usize) -> f64 {
    let halflife = config.ema_halflife0 * (1u64 << depth) as f64;
    0.5f64.powf(1.0 / halflife)
}

/// Penalty strength at a given node depth: `lambda0 * base^(-depth)`.
pub fn penalty_strength(config: &TrainConfig, depth: usize) -> f64 {
    config.lambda0 * config.penalty_decay_base.powi(-(depth as i32))
}

/// Folds a batch of routing results into fresh statistics, leaving the
/// input untouched.
pub fn update_node_stats(
    stats: &NodeStats,
    routing_batch: &[RoutingResult],
    config: &TrainConfig,
) -> NodeStats {
    let n = stats.num_nodes();
    let mut batch_num = vec![0.0; n];
    let mut batch_den = vec![0.0; n];
    for r in routing_batch {
        for i in 0..n {
            batch_num[i] += r.node_path_prob[i] * r.gate_p[i];
            batch_den[i] += r.node_path_prob[i];
        }
    }
    let mut out = stats.clone();
    out.apply_sums(&batch_num, &batch_den, config);
    out
}

/// Cross-entropy distance of every node's running usage from an even
/// split, weighted by the depth-decayed strength:
/// `sum_i lambda_d(i) * (-0.5 log alpha_i - 0.5 log(1 - alpha_i))`.
pub fn balance_penalty(stats: &NodeStats, config: &TrainConfig) -> f64 {
    let mut total = 0.0;
    for i in 0..stats.num_nodes() {
        if !stats.is_seen(i) {
            continue;
        }
        let alpha = stats.alpha(i);
        let strength = penalty_strength(config, SoftTree::node_depth(i));
        total += strength * (-0.5 * alpha.ln() - 0.5 * (1.0 - alpha).ln());
    }
    total
}
