// scratch pilot: measure per-epoch time and accuracy trajectory
use soft_tree::data::load_mnist;
use soft_tree::distill::hard_targets;
use soft_tree::train::{train, TrainConfig};
use soft_tree::tree::init_tree;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let beta: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let lr: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let lambda0: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let batch: usize = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(64);
    let seed: u64 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(0);
    let train_set = load_mnist("data/mnist/train-images-idx3-ubyte", "data/mnist/train-labels-idx1-ubyte").unwrap();
    let test_set = load_mnist("data/mnist/t10k-images-idx3-ubyte", "data/mnist/t10k-labels-idx1-ubyte").unwrap();
    let config = TrainConfig {
        depth: 8,
        input_dim: 784,
        num_classes: 10,
        beta,
        lambda0,
        learning_rate: lr,
        batch_size: batch,
        epochs,
        seed,
        ..TrainConfig::default()
    };
    let targets = hard_targets(train_set.labels(), 10).unwrap();
    let tree = init_tree(&config, config.seed).unwrap();
    let (_best, report) = train(tree, &train_set, &targets, &test_set, &config).unwrap();
    print!("{}", report.to_csv());
}
