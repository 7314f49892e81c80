//! Command-line front end: train trees and teachers, materialize
//! distillation targets, evaluate, explain single examples and export
//! visualizations. Every run writes a manifest beside its outputs.

mod config;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use soft_tree::data::Dataset;
use soft_tree::distill::{compose_targets, hard_targets, load_targets, save_targets};
use soft_tree::error::Error as CoreError;
use soft_tree::mlp::{ensemble_soft_predictions, mlp_evaluate, mlp_train_ensemble};
use soft_tree::model_io::{load_mlp, load_tree, save_mlp, save_tree};
use soft_tree::train::{evaluate_both, train};
use soft_tree::tree::init_tree;
use soft_tree::viz::{
    explanation_report, export_tree_dot, render_all_filters, FilterShape,
};

use config::{
    read_config, DistillCmdConfig, EvaluateCmdConfig, SplitChoice, TargetProvenance,
    TeacherTrainCmdConfig, TreeTrainCmdConfig,
};
use manifest::Manifest;

/// Errors grouped by exit code: 3 config, 4 io, 5 data, 6 model, 7 internal
/// (clap reports usage errors as 2).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Data(String),
    Model(String),
    Internal(String),
}

impl CliError {
    fn class(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Data(_) => "data",
            CliError::Model(_) => "model",
            CliError::Internal(_) => "internal",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Io(m)
            | CliError::Data(m)
            | CliError::Model(m)
            | CliError::Internal(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
            CliError::Data(_) => 5,
            CliError::Model(_) => 6,
            CliError::Internal(_) => 7,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let msg = err.to_string();
        match err {
            CoreError::InvalidConfig(_) | CoreError::UnnormalizedTarget { .. } => {
                CliError::Config(msg)
            }
            CoreError::Io(_) => CliError::Io(msg),
            CoreError::DataFormat { .. }
            | CoreError::LabelOutOfRange { .. }
            | CoreError::MisalignedTargets { .. }
            | CoreError::EmptyDataset => CliError::Data(msg),
            CoreError::KindMismatch { .. }
            | CoreError::VersionMismatch { .. }
            | CoreError::ModelSchema(_) => CliError::Model(msg),
            CoreError::DimensionMismatch { .. }
            | CoreError::NonFinite { .. }
            | CoreError::MissingImages(_) => CliError::Internal(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "soft-tree",
    version,
    about = "Soft decision trees: gradient-descent training, teacher distillation, per-decision explanations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON config file for this subcommand.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    /// Trained tree model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Dataset config JSON (same schema as the `dataset` config block).
    #[arg(long)]
    dataset: PathBuf,
    /// Example index within the chosen split.
    #[arg(long)]
    index: usize,
    /// Which split the index refers to.
    #[arg(long, default_value = "test")]
    split: String,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VisualizeArgs {
    /// Trained tree model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Filter raster shape as rows,cols,channels (e.g. 28,28,1).
    #[arg(long)]
    shape: String,
    /// Output directory for the PGM files and DOT graph.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Train a soft decision tree on a dataset (hard or soft targets).
    TreeTrain(ConfigArgs),
    /// Train the fully connected teacher network.
    TeacherTrain(ConfigArgs),
    /// Evaluate a saved tree under both prediction modes.
    Evaluate(ConfigArgs),
    /// Materialize a soft-target file from labels and/or teacher models.
    DistillTargets(ConfigArgs),
    /// Explain one example as its root-to-leaf decision sequence.
    Explain(ExplainArgs),
    /// Export per-node filter images and the tree graph.
    Visualize(VisualizeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::TreeTrain(args) => cmd_tree_train(args),
        Command::TeacherTrain(args) => cmd_teacher_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::DistillTargets(args) => cmd_distill_targets(args),
        Command::Explain(args) => cmd_explain(args),
        Command::Visualize(args) => cmd_visualize(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}: {}", err.class(), err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), contents)
        .map_err(|e| CliError::Io(format!("cannot write {name}: {e}")))
}

fn cmd_tree_train(args: ConfigArgs) -> Result<(), CliError> {
    let mut cfg: TreeTrainCmdConfig = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.train.seed = seed;
    }
    let dir = out_dir(&args.out)?;
    let (train_set, test_set) = cfg.dataset.load()?;
    cfg.train.input_dim = train_set.input_dim();
    cfg.train.num_classes = train_set.num_classes();
    cfg.train.validate()?;

    let mut data_files = cfg.dataset.files();
    let targets = match &cfg.targets {
        Some(path) => {
            data_files.push(path.clone());
            load_targets(path)?
        }
        None => hard_targets(train_set.labels(), train_set.num_classes())?,
    };

    let tree = init_tree(&cfg.train, cfg.train.seed)?;
    let (best, report) = train(tree, &train_set, &targets, &test_set, &cfg.train)?;
    save_tree(&best, dir.join("model.json"))?;
    write_output(&dir, "report.csv", &report.to_csv())?;

    let (best_max, best_mix) = evaluate_both(&best, &test_set)?;
    let last = report.rows.last().expect("at least one epoch");
    let metrics = json!({
        "best_test_acc_maxpath": best_max,
        "best_test_acc_mixture": best_mix,
        "final_train_loss": last.train_loss,
        "final_train_acc": last.train_acc,
        "epochs": report.rows.len(),
    });
    println!(
        "tree-train: best test accuracy {:.4} (max-path) / {:.4} (mixture) over {} epochs",
        best_max,
        best_mix,
        report.rows.len()
    );
    Manifest::new(
        "tree-train",
        &cfg,
        Some(cfg.train.seed),
        &data_files,
        metrics,
        &["model.json".into(), "report.csv".into()],
    )?
    .write(&dir)?;
    Ok(())
}

fn cmd_teacher_train(args: ConfigArgs) -> Result<(), CliError> {
    let mut cfg: TeacherTrainCmdConfig = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.mlp.seed = seed;
    }
    let dir = out_dir(&args.out)?;
    let (train_set, test_set) = cfg.dataset.load()?;
    cfg.mlp.validate()?;

    let members = mlp_train_ensemble(&train_set, &test_set, &cfg.mlp)?;
    let mut outputs = Vec::new();
    let mut accs = Vec::new();
    for (i, (model, report)) in members.iter().enumerate() {
        let name = if members.len() == 1 {
            "model.json".to_string()
        } else {
            format!("model_{i}.json")
        };
        save_mlp(model, dir.join(&name))?;
        let report_name = if members.len() == 1 {
            "report.csv".to_string()
        } else {
            format!("report_{i}.csv")
        };
        write_output(&dir, &report_name, &report.to_csv())?;
        let (acc, _) = mlp_evaluate(model, &test_set)?;
        accs.push(acc);
        outputs.push(name);
        outputs.push(report_name);
    }
    let best = accs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "teacher-train: test accuracy {:?} (best {:.4})",
        accs.iter().map(|a| (a * 1e4).round() / 1e4).collect::<Vec<_>>(),
        best
    );
    let metrics = json!({ "test_acc": accs, "best_test_acc": best });
    Manifest::new(
        "teacher-train",
        &cfg,
        Some(cfg.mlp.seed),
        &cfg.dataset.files(),
        metrics,
        &outputs,
    )?
    .write(&dir)?;
    Ok(())
}

fn cmd_evaluate(args: ConfigArgs) -> Result<(), CliError> {
    let cfg: EvaluateCmdConfig = read_config(&args.config)?;
    let dir = out_dir(&args.out)?;
    let (train_set, test_set) = cfg.dataset.load()?;
    let data = match cfg.split {
        SplitChoice::Train => &train_set,
        SplitChoice::Test => &test_set,
    };
    let tree = load_tree(&cfg.model)?;
    let (acc_max, acc_mix) = evaluate_both(&tree, data)?;
    println!(
        "evaluate: accuracy {:.4} (max-path) / {:.4} (mixture) on {} examples",
        acc_max,
        acc_mix,
        data.len()
    );
    let mut data_files = cfg.dataset.files();
    data_files.push(cfg.model.clone());
    let metrics = json!({
        "accuracy_maxpath": acc_max,
        "accuracy_mixture": acc_mix,
        "examples": data.len(),
    });
    Manifest::new("evaluate", &cfg, None, &data_files, metrics, &[])?.write(&dir)?;
    Ok(())
}

fn cmd_distill_targets(args: ConfigArgs) -> Result<(), CliError> {
    let cfg: DistillCmdConfig = read_config(&args.config)?;
    let dir = out_dir(&args.out)?;
    let (train_set, _) = cfg.dataset.load()?;

    let targets = match cfg.provenance {
        TargetProvenance::Hard => hard_targets(train_set.labels(), train_set.num_classes())?,
        TargetProvenance::Teacher | TargetProvenance::Composite => {
            if cfg.teachers.is_empty() {
                return Err(CliError::Config(
                    "teacher/composite targets need at least one teacher model".into(),
                ));
            }
            let models = cfg
                .teachers
                .iter()
                .map(|p| load_mlp(p).map_err(CliError::from))
                .collect::<Result<Vec<_>, _>>()?;
            let teacher_probs =
                ensemble_soft_predictions(&models, &train_set, cfg.temperature)?;
            match cfg.provenance {
                TargetProvenance::Teacher => teacher_probs,
                _ => compose_targets(train_set.labels(), &teacher_probs, cfg.rho)?,
            }
        }
    };
    save_targets(&targets, dir.join("targets.txt"))?;
    println!(
        "distill-targets: wrote {} rows of {} classes ({})",
        targets.num_examples(),
        targets.num_classes(),
        targets.provenance().name()
    );
    let mut data_files = cfg.dataset.files();
    data_files.extend(cfg.teachers.iter().cloned());
    let metrics = json!({
        "rows": targets.num_examples(),
        "classes": targets.num_classes(),
        "provenance": targets.provenance().name(),
    });
    Manifest::new(
        "distill-targets",
        &cfg,
        None,
        &data_files,
        metrics,
        &["targets.txt".into()],
    )?
    .write(&dir)?;
    Ok(())
}

fn cmd_explain(args: ExplainArgs) -> Result<(), CliError> {
    let dir = out_dir(&args.out)?;
    let spec: config::DatasetSpec = read_config(&args.dataset)?;
    let (train_set, test_set) = spec.load()?;
    let data: &Dataset = match args.split.as_str() {
        "train" => &train_set,
        "test" => &test_set,
        other => {
            return Err(CliError::Config(format!(
                "split must be 'train' or 'test', got {other:?}"
            )))
        }
    };
    if args.index >= data.len() {
        return Err(CliError::Config(format!(
            "index {} out of range for {} examples",
            args.index,
            data.len()
        )));
    }
    let tree = load_tree(&args.model)?;
    let path = tree.explain(data.features(args.index))?;
    let (text, report) = explanation_report(&path, data.class_names());
    print!("{text}");
    write_output(&dir, "explanation.txt", &text)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    write_output(&dir, "explanation.json", &json)?;
    let mut data_files = spec.files();
    data_files.push(args.model.clone());
    let metrics = json!({
        "index": args.index,
        "split": args.split,
        "leaf": report.leaf,
        "predicted": report.predicted,
        "label": data.label(args.index),
    });
    Manifest::new(
        "explain",
        &json!({"model": args.model, "dataset": spec, "index": args.index, "split": args.split}),
        None,
        &data_files,
        metrics,
        &["explanation.txt".into(), "explanation.json".into()],
    )?
    .write(&dir)?;
    Ok(())
}

fn parse_shape(text: &str) -> Result<FilterShape, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "shape must be rows,cols,channels, got {text:?}"
        )));
    }
    let dims: Vec<usize> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad shape component {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(FilterShape::new(dims[0], dims[1], dims[2]))
}

fn cmd_visualize(args: VisualizeArgs) -> Result<(), CliError> {
    let dir = out_dir(&Some(args.out.clone()))?;
    let shape = parse_shape(&args.shape)?;
    let tree = load_tree(&args.model)?;
    let images = render_all_filters(&tree, shape, &dir)?;
    let dot_path = dir.join("tree.dot");
    export_tree_dot(&tree, &dir, &dot_path)?;
    println!(
        "visualize: wrote {} filter images and tree.dot ({} inner nodes, {} leaves)",
        images.len(),
        tree.num_inner(),
        tree.num_leaves()
    );
    let mut outputs: Vec<String> = images
        .iter()
        .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
        .collect();
    outputs.push("tree.dot".into());
    let metrics = json!({
        "filter_images": images.len(),
        "inner_nodes": tree.num_inner(),
        "leaves": tree.num_leaves(),
    });
    Manifest::new(
        "visualize",
        &json!({"model": args.model, "shape": args.shape}),
        None,
        &[args.model.clone()],
        metrics,
        &outputs,
    )?
    .write(&dir)?;
    Ok(())
}
