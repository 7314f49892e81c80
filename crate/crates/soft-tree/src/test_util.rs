//! Helpers shared by unit tests across modules. Compiled only for tests.

use crate::tree::{InnerNode, LeafNode, SoftTree};

/// Tree over a 1-dimensional input whose gate probabilities at `x = [0]`
/// are exactly the given values, via biases set to each probability's logit.
pub(crate) fn tree_with_gates(depth: usize, gates: &[f64], leaf_logits: Vec<Vec<f64>>) -> SoftTree {
    let num_inner = (1usize << depth) - 1;
    assert_eq!(gates.len(), num_inner);
    assert_eq!(leaf_logits.len(), 1usize << depth);
    let inner = gates
        .iter()
        .map(|&p| InnerNode {
            filter_w: vec![0.0],
            bias_b: (p / (1.0 - p)).ln(),
        })
        .collect();
    let k = leaf_logits[0].len();
    let leaves = leaf_logits
        .into_iter()
        .map(|logits_phi| LeafNode { logits_phi })
        .collect();
    SoftTree::from_parts(depth, 1, k, 1.0, inner, leaves).unwrap()
}
