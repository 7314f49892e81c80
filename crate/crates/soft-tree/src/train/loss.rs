//! The per-example training loss over a routed tree.

use crate::error::{Error, Result};
use crate::tree::{log_softmax, SoftTree};

use super::LossVariant;

pub(crate) fn validate_target(t: &[f64], num_classes: usize) -> Result<()> {
    if t.len() != num_classes {
        return Err(Error::DimensionMismatch {
            what: "target distribution",
            expected: num_classes,
            actual: t.len(),
        });
    }
    let sum: f64 = t.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > 1e-6 || t.iter().any(|&v| v < 0.0) {
        return Err(Error::UnnormalizedTarget { sum });
    }
    Ok(())
}

/// Loss of one example against target distribution `t`.
///
/// `WeightedCe` returns `sum_l P^l(x) * (-sum_k T_k log Q^l_k)`;
/// `MixtureNll` returns `-log sum_l P^l(x) * exp(sum_k T_k log Q^l_k)`.
/// Both are nonnegative.
pub fn example_loss(tree: &SoftTree, x: &[f64], t: &[f64], variant: LossVariant) -> Result<f64> {
    validate_target(t, tree.num_classes())?;
    let routing = tree.route(x)?;
    let mut acc = 0.0;
    for (l, leaf) in tree.leaves().iter().enumerate() {
        if leaf.logits_phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("leaf {l}"),
            });
        }
        let log_q = log_softmax(&leaf.logits_phi);
        // Cross entropy of the target against this leaf's distribution.
        let ce: f64 = -t.iter().zip(log_q.iter()).map(|(&tk, &lq)| tk * lq).sum::<f64>();
        match variant {
            LossVariant::WeightedCe => acc += routing.leaf_path_prob[l] * ce,
            LossVariant::MixtureNll => acc += routing.leaf_path_prob[l] * (-ce).exp(),
        }
    }
    Ok(match variant {
        LossVariant::WeightedCe => acc,
        LossVariant::MixtureNll => -acc.ln(),
    })
}
