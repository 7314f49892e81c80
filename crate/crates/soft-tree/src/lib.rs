//! Soft binary decision trees trained by mini-batch gradient descent.
//!
//! A soft tree routes each input through every inner node with a learned
//! linear filter and a sigmoid gate, and predicts from fixed per-leaf
//! class distributions. Trees train directly on labels or distill from a
//! small fully connected teacher via soft targets, and every prediction
//! explains itself as the root-to-leaf sequence of filter decisions.
//!
//! The crate covers the model and inference ([`tree`]), training with the
//! depth-decayed balance penalty ([`train`]), soft-target construction
//! ([`distill`]), the teacher network ([`mlp`]), dataset ingestion
//! ([`data`]), filter/graph visualization ([`viz`]) and model persistence
//! ([`model_io`]).
//!
//! With the `parallel` feature (on by default) batch work fans out over
//! rayon; reductions keep a fixed order, so results are bit-identical to
//! the sequential build.

pub mod data;
pub mod distill;
pub mod error;
mod exec;
pub mod mlp;
pub mod model_io;
#[cfg(test)]
mod test_util;
pub mod train;
pub mod tree;
pub mod viz;

pub use error::{DataFormatKind, Error, Result};
pub use tree::{
    gate_probability, init_tree, leaf_distribution, Branch, ExplanationPath, ExplanationStep,
    InnerNode, LeafNode, RoutingResult, SoftTree, GATE_EPS,
};
pub use train::{
    balance_penalty, batch_gradients, evaluate, evaluate_both, example_loss, gradient_check,
    penalty_strength, train, update_node_stats, EvalMode, Gradients, LossVariant, NodeStats,
    TrainConfig, TrainExample, TrainReport,
};
pub use data::{
    load_connect4, load_letter, load_mnist, letter_standard_split, split, BatchPlan, Dataset,
};
pub use distill::{
    compose_targets, hard_targets, load_targets, save_targets, Provenance, SoftTargetSet,
};
pub use mlp::{
    ensemble_soft_predictions, mlp_evaluate, mlp_forward, mlp_soft_predictions, mlp_train,
    mlp_train_ensemble, MlpModel, MlpReport, MlpTrainConfig,
};
