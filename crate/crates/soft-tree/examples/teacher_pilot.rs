// scratch pilot: teacher trajectory
use soft_tree::data::load_mnist;
use soft_tree::mlp::{mlp_train, MlpTrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let train_set = load_mnist("data/mnist/train-images-idx3-ubyte", "data/mnist/train-labels-idx1-ubyte").unwrap();
    let test_set = load_mnist("data/mnist/t10k-images-idx3-ubyte", "data/mnist/t10k-labels-idx1-ubyte").unwrap();
    let config = MlpTrainConfig {
        epochs,
        ..MlpTrainConfig::default()
    };
    let (_, report) = mlp_train(&train_set, &test_set, &config).unwrap();
    print!("{}", report.to_csv());
}
