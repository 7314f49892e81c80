//! Shared fixtures and independent oracles for the integration suites.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use soft_tree::data::Dataset;
use soft_tree::train::LossVariant;
use soft_tree::tree::SoftTree;

pub mod dot_grammar;

/// Loss by explicit enumeration of every root-to-leaf path, written
/// independently of the library's routing code: gate products are rebuilt
/// from scratch per leaf and softmaxes are computed naively.
pub fn brute_force_loss(tree: &SoftTree, x: &[f64], t: &[f64], variant: LossVariant) -> f64 {
    let depth = tree.depth();
    let num_inner = tree.num_inner();
    let beta = tree.beta();
    let mut acc = 0.0;
    for leaf in 0..tree.num_leaves() {
        // Walk from the root following the bits of the leaf index, most
        // significant decision first.
        let mut node = 0usize;
        let mut path_prob = 1.0;
        for level in (0..depth).rev() {
            let go_right = (leaf >> level) & 1 == 1;
            let inner = &tree.inner_nodes()[node];
            let mut activation = inner.bias_b;
            for (wi, xi) in inner.filter_w.iter().zip(x.iter()) {
                activation += wi * xi;
            }
            let mut p = 1.0 / (1.0 + (-beta * activation).exp());
            p = p.clamp(1e-7, 1.0 - 1e-7);
            path_prob *= if go_right { p } else { 1.0 - p };
            node = if go_right { 2 * node + 2 } else { 2 * node + 1 };
        }
        assert!(node >= num_inner);
        assert_eq!(node - num_inner, leaf);

        let logits = &tree.leaves()[leaf].logits_phi;
        let norm: f64 = logits.iter().map(|v| v.exp()).sum();
        let log_likelihood: f64 = t
            .iter()
            .zip(logits.iter())
            .map(|(&tk, &phi)| tk * (phi.exp() / norm).ln())
            .sum();
        match variant {
            LossVariant::WeightedCe => acc += path_prob * (-log_likelihood),
            LossVariant::MixtureNll => acc += path_prob * log_likelihood.exp(),
        }
    }
    match variant {
        LossVariant::WeightedCe => acc,
        LossVariant::MixtureNll => -acc.ln(),
    }
}

/// Gaussian-ish class blobs, linearly separated, for fast end-to-end
/// training tests.
pub fn blobs_dataset(per_class: usize, num_classes: usize, dim: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(per_class * num_classes * dim);
    let mut labels = Vec::with_capacity(per_class * num_classes);
    // Class centers on coordinate axes scaled apart.
    for i in 0..per_class * num_classes {
        let class = i % num_classes;
        for d in 0..dim {
            let center = if d % num_classes == class { 1.0 } else { 0.0 };
            features.push(center + rng.gen_range(-0.25..0.25));
        }
        labels.push(class as u32);
    }
    Dataset::new(
        "blobs",
        dim,
        num_classes,
        features,
        labels,
        (0..num_classes).map(|c| format!("c{c}")).collect(),
    )
    .unwrap()
}

/// The four XOR points over two classes.
pub fn xor_dataset() -> Dataset {
    Dataset::new(
        "xor",
        2,
        2,
        vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
        vec![0, 1, 1, 0],
        vec!["even".into(), "odd".into()],
    )
    .unwrap()
}

/// Writes a fabricated IDX image/label pair (MNIST layout).
pub fn write_idx_pair(
    dir: &std::path::Path,
    images: &[Vec<u8>],
    labels: &[u8],
    rows: u32,
    cols: u32,
) -> (std::path::PathBuf, std::path::PathBuf) {
    use std::io::Write;
    let img_path = dir.join("images-idx3-ubyte");
    let lab_path = dir.join("labels-idx1-ubyte");
    let mut f = std::fs::File::create(&img_path).unwrap();
    f.write_all(&0x0000_0803u32.to_be_bytes()).unwrap();
    f.write_all(&(images.len() as u32).to_be_bytes()).unwrap();
    f.write_all(&rows.to_be_bytes()).unwrap();
    f.write_all(&cols.to_be_bytes()).unwrap();
    for img in images {
        f.write_all(img).unwrap();
    }
    let mut f = std::fs::File::create(&lab_path).unwrap();
    f.write_all(&0x0000_0801u32.to_be_bytes()).unwrap();
    f.write_all(&(labels.len() as u32).to_be_bytes()).unwrap();
    f.write_all(labels).unwrap();
    (img_path, lab_path)
}
