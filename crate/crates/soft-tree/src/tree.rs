//! The soft binary decision tree model and all pure inference over it.
//!
//! A tree of depth `d` is complete: `2^d - 1` inner nodes in breadth-first
//! order (children of node `i` are `2i+1` and `2i+2`) and `2^d` leaves.
//! Each inner node holds a linear filter and bias; an input is routed to
//! the right child with probability `sigma(beta * (w . x + b))`. Each leaf
//! holds logits whose softmax is its fixed class distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::train::TrainConfig;

/// Gate probabilities are clamped to `[GATE_EPS, 1 - GATE_EPS]` so that
/// `log(p)` and `log(1-p)` stay finite in the loss, penalty and gradients.
pub const GATE_EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct InnerNode {
    pub filter_w: Vec<f64>,
    pub bias_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafNode {
    pub logits_phi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftTree {
    depth: usize,
    input_dim: usize,
    num_classes: usize,
    beta: f64,
    inner_nodes: Vec<InnerNode>,
    leaves: Vec<LeafNode>,
}

/// Per-node gate and path probabilities for one input.
///
/// `gate_p[i]` is the probability of taking the right branch at inner node
/// `i`; `node_path_prob[i]` is the probability of reaching node `i` at all;
/// `leaf_path_prob[l]` is the probability of arriving at leaf `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingResult {
    pub gate_p: Vec<f64>,
    pub node_path_prob: Vec<f64>,
    pub leaf_path_prob: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Left => f.write_str("left"),
            Branch::Right => f.write_str("right"),
        }
    }
}

/// One hard routing decision along an explanation path.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationStep {
    pub node_index: usize,
    pub filter_w: Vec<f64>,
    pub bias_b: f64,
    pub gate_p: f64,
    pub branch: Branch,
}

/// The full root-to-leaf trace behind a max-path prediction: the filters
/// examined, the decision made at each, and the leaf distribution reached.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationPath {
    pub steps: Vec<ExplanationStep>,
    pub leaf_index: usize,
    pub leaf_distribution: Vec<f64>,
    pub predicted_class: usize,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn clamp_gate(p: f64) -> f64 {
    p.clamp(GATE_EPS, 1.0 - GATE_EPS)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four accumulators so the loop vectorizes without reassociation flags.
    let chunks = a.len() / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..chunks {
        let j = 4 * i;
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
    }
    let mut s = (s0 + s1) + (s2 + s3);
    for j in 4 * chunks..a.len() {
        s += a[j] * b[j];
    }
    s
}

/// Index of the maximum element, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Probability of taking the right branch at `node` for input `x`:
/// `sigma(beta * (x . w + b))`, clamped away from 0 and 1.
pub fn gate_probability(node: &InnerNode, x: &[f64], beta: f64) -> Result<f64> {
    if x.len() != node.filter_w.len() {
        return Err(Error::DimensionMismatch {
            what: "input vector",
            expected: node.filter_w.len(),
            actual: x.len(),
        });
    }
    if beta <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "beta must be positive, got {beta}"
        )));
    }
    Ok(clamp_gate(sigmoid(beta * (dot(&node.filter_w, x) + node.bias_b))))
}

/// Softmax of the leaf logits, stabilized by max-shifting.
pub fn leaf_distribution(leaf: &LeafNode) -> Result<Vec<f64>> {
    if leaf.logits_phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "leaf logits".to_string(),
        });
    }
    Ok(softmax(&leaf.logits_phi))
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&v| (v - m).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    out
}

/// `log softmax(logits)` via the log-sum-exp identity.
pub(crate) fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|&v| (v - m).exp()).sum::<f64>().ln();
    logits.iter().map(|&v| v - lse).collect()
}

impl SoftTree {
    /// Builds a tree from explicit parts, validating the complete-tree shape
    /// and every invariant (lengths, finiteness).
    pub fn from_parts(
        depth: usize,
        input_dim: usize,
        num_classes: usize,
        beta: f64,
        inner_nodes: Vec<InnerNode>,
        leaves: Vec<LeafNode>,
    ) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidConfig("depth must be >= 1".into()));
        }
        if input_dim < 1 {
            return Err(Error::InvalidConfig("input_dim must be >= 1".into()));
        }
        if num_classes < 2 {
            return Err(Error::InvalidConfig("num_classes must be >= 2".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        let num_inner = (1usize << depth) - 1;
        let num_leaves = 1usize << depth;
        if inner_nodes.len() != num_inner {
            return Err(Error::DimensionMismatch {
                what: "inner node array",
                expected: num_inner,
                actual: inner_nodes.len(),
            });
        }
        if leaves.len() != num_leaves {
            return Err(Error::DimensionMismatch {
                what: "leaf array",
                expected: num_leaves,
                actual: leaves.len(),
            });
        }
        for (i, n) in inner_nodes.iter().enumerate() {
            if n.filter_w.len() != input_dim {
                return Err(Error::DimensionMismatch {
                    what: "inner node filter",
                    expected: input_dim,
                    actual: n.filter_w.len(),
                });
            }
            if !n.bias_b.is_finite() || n.filter_w.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("inner node {i}"),
                });
            }
        }
        for (l, leaf) in leaves.iter().enumerate() {
            if leaf.logits_phi.len() != num_classes {
                return Err(Error::DimensionMismatch {
                    what: "leaf logits",
                    expected: num_classes,
                    actual: leaf.logits_phi.len(),
                });
            }
            if leaf.logits_phi.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("leaf {l}"),
                });
            }
        }
        Ok(SoftTree {
            depth,
            input_dim,
            num_classes,
            beta,
            inner_nodes,
            leaves,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn inner_nodes(&self) -> &[InnerNode] {
        &self.inner_nodes
    }

    pub fn leaves(&self) -> &[LeafNode] {
        &self.leaves
    }

    pub fn num_inner(&self) -> usize {
        self.inner_nodes.len()
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    /// Depth of inner node `i`; the root is at depth 0.
    pub fn node_depth(i: usize) -> usize {
        (usize::BITS - 1 - (i + 1).leading_zeros()) as usize
    }

    /// Total number of learned scalars: `(2^d - 1)(D + 1) + 2^d * K`.
    pub fn param_count(&self) -> usize {
        self.num_inner() * (self.input_dim + 1) + self.num_leaves() * self.num_classes
    }

    pub(crate) fn inner_nodes_mut(&mut self) -> &mut [InnerNode] {
        &mut self.inner_nodes
    }

    pub(crate) fn leaves_mut(&mut self) -> &mut [LeafNode] {
        &mut self.leaves
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                what: "input vector",
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Fills preallocated row slices with gate and path probabilities.
    /// Dimensions are the caller's responsibility; this is the hot path
    /// behind [`SoftTree::route`] and the trainer.
    pub(crate) fn route_into(
        &self,
        x: &[f64],
        gates: &mut [f64],
        node_p: &mut [f64],
        leaf_p: &mut [f64],
    ) {
        let num_inner = self.num_inner();
        for (i, node) in self.inner_nodes.iter().enumerate() {
            gates[i] = clamp_gate(sigmoid(self.beta * (dot(&node.filter_w, x) + node.bias_b)));
        }
        node_p[0] = 1.0;
        for i in 0..num_inner {
            let p = gates[i];
            let mass = node_p[i];
            let left = 2 * i + 1;
            let right = 2 * i + 2;
            if left < num_inner {
                node_p[left] = mass * (1.0 - p);
                node_p[right] = mass * p;
            } else {
                leaf_p[left - num_inner] = mass * (1.0 - p);
                leaf_p[right - num_inner] = mass * p;
            }
        }
    }

    /// Computes every gate probability and path probability for `x`.
    pub fn route(&self, x: &[f64]) -> Result<RoutingResult> {
        self.check_input(x)?;
        let mut gates = vec![0.0; self.num_inner()];
        let mut node_p = vec![0.0; self.num_inner()];
        let mut leaf_p = vec![0.0; self.num_leaves()];
        self.route_into(x, &mut gates, &mut node_p, &mut leaf_p);
        Ok(RoutingResult {
            gate_p: gates,
            node_path_prob: node_p,
            leaf_path_prob: leaf_p,
        })
    }

    /// Predicts from the leaf with the greatest path probability.
    /// Returns `(class, leaf distribution, leaf index)`; ties break to the
    /// lowest index.
    pub fn predict_max_path(&self, x: &[f64]) -> Result<(usize, Vec<f64>, usize)> {
        let routing = self.route(x)?;
        let leaf_index = argmax(&routing.leaf_path_prob);
        let dist = leaf_distribution(&self.leaves[leaf_index])?;
        let class = argmax(&dist);
        Ok((class, dist, leaf_index))
    }

    /// Averages all leaf distributions weighted by their path probabilities.
    pub fn predict_mixture(&self, x: &[f64]) -> Result<Vec<f64>> {
        let routing = self.route(x)?;
        let mut out = vec![0.0; self.num_classes];
        for (l, leaf) in self.leaves.iter().enumerate() {
            let w = routing.leaf_path_prob[l];
            let dist = leaf_distribution(leaf)?;
            for (o, q) in out.iter_mut().zip(dist.iter()) {
                *o += w * q;
            }
        }
        Ok(out)
    }

    /// Walks the hard decision path (right iff `p >= 0.5`) and records the
    /// filter, gate probability and branch at every step.
    pub fn explain(&self, x: &[f64]) -> Result<ExplanationPath> {
        self.check_input(x)?;
        let mut steps = Vec::with_capacity(self.depth);
        let mut index = 0usize;
        let num_inner = self.num_inner();
        while index < num_inner {
            let node = &self.inner_nodes[index];
            let p = clamp_gate(sigmoid(self.beta * (dot(&node.filter_w, x) + node.bias_b)));
            let branch = if p >= 0.5 { Branch::Right } else { Branch::Left };
            steps.push(ExplanationStep {
                node_index: index,
                filter_w: node.filter_w.clone(),
                bias_b: node.bias_b,
                gate_p: p,
                branch,
            });
            index = match branch {
                Branch::Left => 2 * index + 1,
                Branch::Right => 2 * index + 2,
            };
        }
        let leaf_index = index - num_inner;
        let leaf_distribution = leaf_distribution(&self.leaves[leaf_index])?;
        let predicted_class = argmax(&leaf_distribution);
        Ok(ExplanationPath {
            steps,
            leaf_index,
            leaf_distribution,
            predicted_class,
        })
    }
}

/// Creates a tree with filters drawn i.i.d. from a zero-mean uniform
/// distribution of scale `1/sqrt(D)`, zero biases and zero leaf logits.
/// The same seed always yields a bit-identical tree.
pub fn init_tree(config: &TrainConfig, seed: u64) -> Result<SoftTree> {
    config.validate()?;
    let depth = config.depth;
    let input_dim = config.input_dim;
    let num_classes = config.num_classes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (input_dim as f64).sqrt();
    let num_inner = (1usize << depth) - 1;
    let num_leaves = 1usize << depth;
    let inner_nodes = (0..num_inner)
        .map(|_| InnerNode {
            filter_w: (0..input_dim).map(|_| rng.gen_range(-scale..scale)).collect(),
            bias_b: 0.0,
        })
        .collect();
    let leaves = (0..num_leaves)
        .map(|_| LeafNode {
            logits_phi: vec![0.0; num_classes],
        })
        .collect();
    SoftTree::from_parts(depth, input_dim, num_classes, config.beta, inner_nodes, leaves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn config(depth: usize, input_dim: usize, num_classes: usize) -> TrainConfig {
        TrainConfig {
            depth,
            input_dim,
            num_classes,
            ..TrainConfig::default()
        }
    }

    use crate::test_util::tree_with_gates;

    #[test]
    fn gate_probability_matches_logistic() {
        let node = InnerNode {
            filter_w: vec![1.0, -1.0],
            bias_b: 0.5,
        };
        // sigma(2 * (1*1 + (-1)*0 + 0.5)) = sigma(3)
        let p = gate_probability(&node, &[1.0, 0.0], 2.0).unwrap();
        assert_relative_eq!(p, 0.952574126822433, epsilon = 1e-12);
    }

    #[test]
    fn gate_probability_is_half_when_orthogonal() {
        let node = InnerNode {
            filter_w: vec![2.0, 3.0],
            bias_b: 0.0,
        };
        let p = gate_probability(&node, &[3.0, -2.0], 7.5).unwrap();
        assert_relative_eq!(p, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gate_probability_clamps_saturated_activations() {
        let node = InnerNode {
            filter_w: vec![1.0],
            bias_b: 0.0,
        };
        let p = gate_probability(&node, &[-50.0], 1.0).unwrap();
        assert_eq!(p, GATE_EPS);
        let p = gate_probability(&node, &[50.0], 1.0).unwrap();
        assert_eq!(p, 1.0 - GATE_EPS);
    }

    #[test]
    fn gate_probability_rejects_dimension_mismatch() {
        let node = InnerNode {
            filter_w: vec![1.0, 2.0],
            bias_b: 0.0,
        };
        let err = gate_probability(&node, &[1.0], 1.0).unwrap_err();
        match err {
            Error::DimensionMismatch { expected, actual, .. } => {
                assert_eq!((expected, actual), (2, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn leaf_distribution_uniform_for_equal_logits() {
        let leaf = LeafNode {
            logits_phi: vec![0.0, 0.0, 0.0],
        };
        let q = leaf_distribution(&leaf).unwrap();
        for &v in &q {
            assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn leaf_distribution_closed_form() {
        let leaf = LeafNode {
            logits_phi: vec![2.0f64.ln(), 0.0],
        };
        let q = leaf_distribution(&leaf).unwrap();
        assert_relative_eq!(q[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(q[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn leaf_distribution_survives_huge_logits() {
        let leaf = LeafNode {
            logits_phi: vec![1000.0, 1000.0],
        };
        let q = leaf_distribution(&leaf).unwrap();
        assert_relative_eq!(q[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(q[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn leaf_distribution_rejects_non_finite() {
        let leaf = LeafNode {
            logits_phi: vec![f64::NAN, 0.0],
        };
        assert!(leaf_distribution(&leaf).is_err());
    }

    #[test]
    fn route_depth_one() {
        let tree = tree_with_gates(1, &[0.7], vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let r = tree.route(&[0.0]).unwrap();
        assert_relative_eq!(r.leaf_path_prob[0], 0.3, epsilon = 1e-12);
        assert_relative_eq!(r.leaf_path_prob[1], 0.7, epsilon = 1e-12);
        assert_eq!(r.node_path_prob[0], 1.0);
    }

    #[test]
    fn route_depth_two_symmetric() {
        let tree = tree_with_gates(2, &[0.5, 0.5, 0.5], vec![vec![0.0, 0.0]; 4]);
        let r = tree.route(&[0.0]).unwrap();
        for l in 0..4 {
            assert_relative_eq!(r.leaf_path_prob[l], 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn route_depth_two_hand_product() {
        let tree = tree_with_gates(2, &[0.9, 0.5, 0.8], vec![vec![0.0, 0.0]; 4]);
        let r = tree.route(&[0.0]).unwrap();
        let expected = [0.05, 0.05, 0.18, 0.72];
        for (l, &e) in expected.iter().enumerate() {
            assert_relative_eq!(r.leaf_path_prob[l], e, epsilon = 1e-12);
        }
        // Children partition the parent's mass.
        assert_relative_eq!(
            r.node_path_prob[1] + r.node_path_prob[2],
            r.node_path_prob[0],
            epsilon = 1e-15
        );
    }

    #[test]
    fn predict_max_path_selects_heaviest_leaf() {
        let tree = tree_with_gates(1, &[0.7], vec![vec![0.0, 0.0], vec![0.0, 5.0]]);
        let (class, _, leaf) = tree.predict_max_path(&[0.0]).unwrap();
        assert_eq!(leaf, 1);
        assert_eq!(class, 1);
    }

    #[test]
    fn predict_max_path_breaks_ties_low() {
        let tree = tree_with_gates(2, &[0.5, 0.5, 0.5], vec![vec![0.0, 0.0]; 4]);
        let (class, _, leaf) = tree.predict_max_path(&[0.0]).unwrap();
        assert_eq!(leaf, 0);
        assert_eq!(class, 0);
    }

    #[test]
    fn predict_mixture_equal_blend() {
        let big = 60.0;
        let tree = tree_with_gates(1, &[0.5], vec![vec![big, 0.0], vec![0.0, big]]);
        let q = tree.predict_mixture(&[0.0]).unwrap();
        assert_relative_eq!(q[0], 0.5, epsilon = 1e-9);
        assert_relative_eq!(q[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn predict_mixture_ignores_gates_for_identical_leaves() {
        let logits = vec![1.25, -0.5, 0.75];
        let tree = tree_with_gates(2, &[0.9, 0.2, 0.7], vec![logits.clone(); 4]);
        let q = tree.predict_mixture(&[0.0]).unwrap();
        let expected = softmax(&logits);
        for (a, b) in q.iter().zip(expected.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn predict_mixture_hand_value() {
        // p = 0.8, Q_left = [0.9, 0.1], Q_right = [0.2, 0.8]
        let left = vec![0.9f64.ln(), 0.1f64.ln()];
        let right = vec![0.2f64.ln(), 0.8f64.ln()];
        let tree = tree_with_gates(1, &[0.8], vec![left, right]);
        let q = tree.predict_mixture(&[0.0]).unwrap();
        assert_relative_eq!(q[0], 0.34, epsilon = 1e-12);
        assert_relative_eq!(q[1], 0.66, epsilon = 1e-12);
    }

    #[test]
    fn explain_walks_hard_path() {
        // Gates: root 0.9 (right), right child 0.3 (left) -> third leaf.
        let tree = tree_with_gates(2, &[0.9, 0.5, 0.3], vec![vec![0.0, 0.0]; 4]);
        let path = tree.explain(&[0.0]).unwrap();
        assert_eq!(path.steps.len(), 2);
        assert_eq!(path.steps[0].node_index, 0);
        assert_eq!(path.steps[0].branch, Branch::Right);
        assert_relative_eq!(path.steps[0].gate_p, 0.9, epsilon = 1e-12);
        assert_eq!(path.steps[1].node_index, 2);
        assert_eq!(path.steps[1].branch, Branch::Left);
        assert_relative_eq!(path.steps[1].gate_p, 0.3, epsilon = 1e-12);
        assert_eq!(path.leaf_index, 2);
    }

    #[test]
    fn explain_boundary_goes_right() {
        let tree = tree_with_gates(1, &[0.5], vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let path = tree.explain(&[0.0]).unwrap();
        assert_eq!(path.steps[0].branch, Branch::Right);
        assert_eq!(path.leaf_index, 1);
    }

    #[test]
    fn explain_zero_filters_end_at_last_leaf() {
        let cfg = config(3, 4, 2);
        let mut tree = init_tree(&cfg, 0).unwrap();
        for node in tree.inner_nodes_mut() {
            node.filter_w.iter_mut().for_each(|w| *w = 0.0);
        }
        let path = tree.explain(&[0.25, 0.5, 0.75, 1.0]).unwrap();
        assert!(path.steps.iter().all(|s| s.branch == Branch::Right));
        assert_eq!(path.leaf_index, tree.num_leaves() - 1);
    }

    #[test]
    fn init_tree_is_deterministic() {
        let cfg = config(3, 5, 4);
        let a = init_tree(&cfg, 42).unwrap();
        let b = init_tree(&cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = init_tree(&cfg, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_tree_gives_uniform_leaves() {
        let cfg = config(2, 3, 5);
        let tree = init_tree(&cfg, 7).unwrap();
        for leaf in tree.leaves() {
            let q = leaf_distribution(leaf).unwrap();
            for &v in &q {
                assert_relative_eq!(v, 0.2, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn init_tree_param_count_formula() {
        let cfg = config(8, 784, 10);
        let tree = init_tree(&cfg, 0).unwrap();
        assert_eq!(tree.param_count(), 255 * 785 + 256 * 10);
        assert_eq!(tree.param_count(), 202_735);
    }

    #[test]
    fn node_depth_is_floor_log2() {
        assert_eq!(SoftTree::node_depth(0), 0);
        assert_eq!(SoftTree::node_depth(1), 1);
        assert_eq!(SoftTree::node_depth(2), 1);
        assert_eq!(SoftTree::node_depth(3), 2);
        assert_eq!(SoftTree::node_depth(6), 2);
        assert_eq!(SoftTree::node_depth(7), 3);
    }

    #[test]
    fn from_parts_rejects_wrong_shapes() {
        let inner = vec![InnerNode {
            filter_w: vec![0.0],
            bias_b: 0.0,
        }];
        let leaves = vec![
            LeafNode {
                logits_phi: vec![0.0, 0.0],
            };
            2
        ];
        assert!(SoftTree::from_parts(2, 1, 2, 1.0, inner.clone(), leaves.clone()).is_err());
        assert!(SoftTree::from_parts(1, 1, 2, 1.0, inner, leaves).is_ok());
    }

}
