//! Filter rendering, tree graph export and explanation reports.
//!
//! Filters become 8-bit binary PGM images, one per channel, under a
//! symmetric gray mapping: zero weight is mid-gray (128), the most
//! positive weight white, the most negative black, with one scale shared
//! by all channels of a node. The whole tree exports as a DOT graph whose
//! inner nodes reference those images and whose leaves show their top
//! classes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{ExplanationPath, InnerNode, SoftTree};

/// Row-major raster shape `(rows, cols, channels)` of a filter; the weight
/// at pixel `(r, c)` channel `ch` is `w[(r * cols + c) * channels + ch]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterShape {
    pub rows: usize,
    pub cols: usize,
    pub channels: usize,
}

impl FilterShape {
    pub fn new(rows: usize, cols: usize, channels: usize) -> Self {
        FilterShape {
            rows,
            cols,
            channels,
        }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// File names a node's filter renders to: `<stem>.pgm` for single-channel
/// shapes, `<stem>_c<k>.pgm` per channel otherwise.
pub fn filter_image_names(stem: &str, channels: usize) -> Vec<String> {
    if channels == 1 {
        vec![format!("{stem}.pgm")]
    } else {
        (0..channels).map(|c| format!("{stem}_c{c}.pgm")).collect()
    }
}

/// Stem used for inner node `i`'s filter images.
pub fn node_image_stem(node_index: usize) -> String {
    format!("node{node_index:03}")
}

fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(pixels);
    fs::write(path, bytes)?;
    Ok(())
}

/// Renders one inner node's filter as binary PGM files in `dir`, one per
/// channel, returning the written paths.
///
/// Weights map to gray levels by `round(255 * (w + m) / (2m))` with
/// `m = max |w|` over the node (1 when the filter is all zero), so zero
/// weights render as mid-gray 128 and all channels share one scale.
pub fn render_filter_image(
    node: &InnerNode,
    shape: FilterShape,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    if shape.len() != node.filter_w.len() {
        return Err(Error::DimensionMismatch {
            what: "filter shape",
            expected: node.filter_w.len(),
            actual: shape.len(),
        });
    }
    let mut m = node.filter_w.iter().fold(0.0f64, |acc, &w| acc.max(w.abs()));
    if m == 0.0 {
        m = 1.0;
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let names = filter_image_names(stem, shape.channels);
    let mut written = Vec::with_capacity(shape.channels);
    for (ch, name) in names.iter().enumerate() {
        let mut pixels = Vec::with_capacity(shape.rows * shape.cols);
        for r in 0..shape.rows {
            for c in 0..shape.cols {
                let w = node.filter_w[(r * shape.cols + c) * shape.channels + ch];
                let level = (255.0 * (w + m) / (2.0 * m)).round();
                pixels.push(level.clamp(0.0, 255.0) as u8);
            }
        }
        let path = dir.join(name);
        write_pgm(&path, shape.cols, shape.rows, &pixels)?;
        written.push(path);
    }
    Ok(written)
}

/// Renders every inner node's filter into `dir` using the standard stems.
pub fn render_all_filters(
    tree: &SoftTree,
    shape: FilterShape,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut written = Vec::new();
    for (i, node) in tree.inner_nodes().iter().enumerate() {
        written.extend(render_filter_image(node, shape, dir, &node_image_stem(i))?);
    }
    Ok(written)
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Top `count` classes of a distribution with their probabilities, ties to
/// the lowest class index.
fn top_classes(dist: &[f64], count: usize) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| dist[b].partial_cmp(&dist[a]).unwrap().then(a.cmp(&b)));
    order.into_iter().take(count).map(|i| (i, dist[i])).collect()
}

/// Writes the tree as a DOT digraph. Inner nodes reference their filter
/// images (rendered beforehand into `image_dir` under the standard stems);
/// leaves are labeled with their top-3 classes and probabilities; edges
/// carry left/right labels.
pub fn export_tree_dot(
    tree: &SoftTree,
    image_dir: impl AsRef<Path>,
    out_path: impl AsRef<Path>,
) -> Result<()> {
    let image_dir = image_dir.as_ref();

    // Resolve each node's image files; single-channel and per-channel
    // naming are both accepted.
    let mut node_images: Vec<Vec<String>> = Vec::with_capacity(tree.num_inner());
    let mut missing = Vec::new();
    for i in 0..tree.num_inner() {
        let stem = node_image_stem(i);
        let single = filter_image_names(&stem, 1);
        if image_dir.join(&single[0]).is_file() {
            node_images.push(single);
            continue;
        }
        let mut channel_files = Vec::new();
        let mut ch = 0usize;
        loop {
            let name = format!("{stem}_c{ch}.pgm");
            if image_dir.join(&name).is_file() {
                channel_files.push(name);
                ch += 1;
            } else {
                break;
            }
        }
        if channel_files.is_empty() {
            missing.push(single[0].clone());
            node_images.push(Vec::new());
        } else {
            node_images.push(channel_files);
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingImages(missing));
    }

    let mut out = String::new();
    out.push_str("digraph soft_tree {\n");
    out.push_str("  node [shape=box];\n");
    for (i, images) in node_images.iter().enumerate() {
        let image_path = image_dir.join(&images[0]);
        if images.len() == 1 {
            writeln!(
                out,
                "  inner{i} [label=\"node {i}\" labelloc=\"b\" image=\"{}\"];",
                escape_dot(&image_path.display().to_string())
            )
            .unwrap();
        } else {
            // Multi-channel nodes list every channel file in the label.
            let listing: Vec<String> = images.iter().map(|f| escape_dot(f)).collect();
            writeln!(
                out,
                "  inner{i} [label=\"node {i}\\n{}\" image=\"{}\"];",
                listing.join("\\n"),
                escape_dot(&image_path.display().to_string())
            )
            .unwrap();
        }
    }
    for (l, leaf) in tree.leaves().iter().enumerate() {
        let dist = crate::tree::leaf_distribution(leaf)?;
        let top: Vec<String> = top_classes(&dist, 3)
            .into_iter()
            .map(|(class, p)| format!("{class}: {p:.3}"))
            .collect();
        writeln!(
            out,
            "  leaf{l} [shape=ellipse label=\"leaf {l}\\n{}\"];",
            top.join("\\n")
        )
        .unwrap();
    }
    let num_inner = tree.num_inner();
    for i in 0..num_inner {
        for (child, side) in [(2 * i + 1, "left"), (2 * i + 2, "right")] {
            let target = if child < num_inner {
                format!("inner{child}")
            } else {
                format!("leaf{}", child - num_inner)
            };
            writeln!(out, "  inner{i} -> {target} [label=\"{side}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    fs::write(out_path, out)?;
    Ok(())
}

/// JSON-ready mirror of an explanation: the decision sequence plus the
/// leaf outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub steps: Vec<ReportStep>,
    pub leaf: usize,
    pub distribution: Vec<f64>,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStep {
    pub node: usize,
    pub depth: usize,
    pub branch: String,
    pub p: f64,
    pub image: String,
}

/// Renders an explanation as human-readable text plus a JSON mirror with
/// the same content.
pub fn explanation_report(
    path: &ExplanationPath,
    class_names: &[String],
) -> (String, ExplanationReport) {
    let report = ExplanationReport {
        steps: path
            .steps
            .iter()
            .enumerate()
            .map(|(depth, step)| ReportStep {
                node: step.node_index,
                depth,
                branch: step.branch.to_string(),
                p: step.gate_p,
                image: format!("{}.pgm", node_image_stem(step.node_index)),
            })
            .collect(),
        leaf: path.leaf_index,
        distribution: path.leaf_distribution.clone(),
        predicted: path.predicted_class,
    };

    let mut text = String::new();
    for step in &report.steps {
        writeln!(
            text,
            "step {}: node {} (depth {}) -> {} (p_right = {:.4}) [filter: {}]",
            step.depth, step.node, step.depth, step.branch, step.p, step.image
        )
        .unwrap();
    }
    writeln!(text, "leaf: {}", report.leaf).unwrap();
    let dist: Vec<String> = report
        .distribution
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let name = class_names.get(k).map(|s| s.as_str()).unwrap_or("?");
            format!("{name}: {p:.4}")
        })
        .collect();
    writeln!(text, "distribution: {}", dist.join(", ")).unwrap();
    let predicted_name = class_names
        .get(report.predicted)
        .map(|s| s.as_str())
        .unwrap_or("?");
    writeln!(text, "predicted: {predicted_name}").unwrap();
    (text, report)
}
