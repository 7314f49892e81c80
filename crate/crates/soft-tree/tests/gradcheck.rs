//! Analytic gradients against central finite differences on randomized
//! small instances: both loss variants, penalty on and off, five seeds.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use soft_tree::train::{
    batch_gradients, gradient_check, LossVariant, NodeStats, TrainConfig, TrainExample,
};
use soft_tree::tree::{InnerNode, LeafNode, SoftTree};

/// Fully randomized tree so no gradient component sits at an exact
/// stationary point (where the relative-error ratio is all noise).
fn random_tree(config: &TrainConfig, seed: u64) -> SoftTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_inner = (1usize << config.depth) - 1;
    let num_leaves = 1usize << config.depth;
    let inner = (0..num_inner)
        .map(|_| InnerNode {
            filter_w: (0..config.input_dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias_b: rng.gen_range(-0.5..0.5),
        })
        .collect();
    let leaves = (0..num_leaves)
        .map(|_| LeafNode {
            logits_phi: (0..config.num_classes).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        })
        .collect();
    SoftTree::from_parts(
        config.depth,
        config.input_dim,
        config.num_classes,
        config.beta,
        inner,
        leaves,
    )
    .unwrap()
}

fn random_case(seed: u64) -> (TrainConfig, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(1..=3);
    let input_dim = rng.gen_range(2..=10);
    let num_classes = rng.gen_range(2..=3);
    let batch = rng.gen_range(2..=6);
    let config = TrainConfig {
        depth,
        input_dim,
        num_classes,
        beta: rng.gen_range(0.5..2.0),
        ema_halflife0: rng.gen_range(2.0..16.0),
        ..TrainConfig::default()
    };
    let xs: Vec<Vec<f64>> = (0..batch)
        .map(|_| (0..input_dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let ts: Vec<Vec<f64>> = (0..batch)
        .map(|_| {
            let raw: Vec<f64> = (0..num_classes).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / sum).collect()
        })
        .collect();
    (config, xs, ts)
}

fn check_seed(seed: u64, variant: LossVariant, lambda0: f64, warm_start: bool) -> f64 {
    let (mut config, xs, ts) = random_case(seed);
    config.loss_variant = variant;
    config.lambda0 = lambda0;
    let tree = random_tree(&config, seed ^ 0xABCD);
    let batch: Vec<TrainExample> = xs
        .iter()
        .map(|x| x.as_slice())
        .zip(ts.iter().map(|t| t.as_slice()))
        .collect();
    let mut stats = NodeStats::new(tree.num_inner());
    if warm_start {
        // Populate the running averages so the decayed-history branch of
        // the penalty gradient is exercised.
        let half = batch.len().div_ceil(2);
        batch_gradients(&tree, &batch[..half], &mut stats, &config).unwrap();
    }
    gradient_check(&tree, &batch, &stats, &config).unwrap()
}

#[test]
fn gradients_match_finite_differences_across_seeds_and_variants() {
    let seeds = [1u64, 2, 3, 4, 5];
    for &seed in &seeds {
        for variant in [LossVariant::WeightedCe, LossVariant::MixtureNll] {
            for &lambda0 in &[0.0, 0.2] {
                for warm in [false, true] {
                    let err = check_seed(seed, variant, lambda0, warm);
                    assert!(
                        err <= 1e-4,
                        "seed {seed} {variant:?} lambda0={lambda0} warm={warm}: max rel err {err}"
                    );
                }
            }
        }
    }
}

#[test]
fn gradcheck_spec_instance_depth2() {
    // Depth 2, D = 4, K = 3, seed 7.
    let config = TrainConfig {
        depth: 2,
        input_dim: 4,
        num_classes: 3,
        ..TrainConfig::default()
    };
    let tree = random_tree(&config, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let xs: Vec<Vec<f64>> = (0..5)
        .map(|_| (0..4).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let ts: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let mut t = vec![0.0; 3];
            t[rng.gen_range(0..3)] = 1.0;
            t
        })
        .collect();
    let batch: Vec<TrainExample> = xs
        .iter()
        .map(|x| x.as_slice())
        .zip(ts.iter().map(|t| t.as_slice()))
        .collect();
    let stats = NodeStats::new(tree.num_inner());
    for variant in [LossVariant::WeightedCe, LossVariant::MixtureNll] {
        let config = TrainConfig {
            loss_variant: variant,
            ..config.clone()
        };
        let err = gradient_check(&tree, &batch, &stats, &config).unwrap();
        assert!(err <= 1e-4, "{variant:?}: {err}");
    }
}
