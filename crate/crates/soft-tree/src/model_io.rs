//! JSON persistence for trees and teachers.
//!
//! A tree document is
//! `{"format_version":1,"depth":..,"input_dim":..,"num_classes":..,
//!   "beta":..,"inner_nodes":[{"w":[..],"b":..},..],"leaves":[{"phi":[..]},..]}`
//! with arrays in breadth-first order. A teacher uses the same envelope
//! plus `"kind":"mlp"`. Serialization is canonical (fixed key order,
//! shortest round-trip decimals), so save -> load -> save reproduces the
//! file byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::MlpModel;
use crate::tree::{InnerNode, LeafNode, SoftTree};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct InnerNodeDoc {
    w: Vec<f64>,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct LeafDoc {
    phi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    format_version: u32,
    depth: usize,
    input_dim: usize,
    num_classes: usize,
    beta: f64,
    inner_nodes: Vec<InnerNodeDoc>,
    leaves: Vec<LeafDoc>,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    w: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MlpDoc {
    format_version: u32,
    kind: String,
    layer_sizes: Vec<usize>,
    layers: Vec<LayerDoc>,
}

pub fn tree_to_json(tree: &SoftTree) -> String {
    let doc = TreeDoc {
        format_version: FORMAT_VERSION,
        depth: tree.depth(),
        input_dim: tree.input_dim(),
        num_classes: tree.num_classes(),
        beta: tree.beta(),
        inner_nodes: tree
            .inner_nodes()
            .iter()
            .map(|n| InnerNodeDoc {
                w: n.filter_w.clone(),
                b: n.bias_b,
            })
            .collect(),
        leaves: tree
            .leaves()
            .iter()
            .map(|l| LeafDoc {
                phi: l.logits_phi.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("tree serialization cannot fail")
}

/// Reports which kind of model a JSON document claims to be.
fn document_kind(value: &serde_json::Value) -> &str {
    match value.get("kind").and_then(|k| k.as_str()) {
        Some(kind) => kind,
        // Tree documents carry no kind field.
        None => "tree",
    }
}

fn check_version(value: &serde_json::Value) -> Result<()> {
    let found = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::ModelSchema("missing format_version".into()))?;
    if found != FORMAT_VERSION as u64 {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: found as u32,
        });
    }
    Ok(())
}

pub fn tree_from_json(json: &str) -> Result<SoftTree> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::ModelSchema(e.to_string()))?;
    let kind = document_kind(&value);
    if kind != "tree" {
        return Err(Error::KindMismatch {
            expected: "tree".into(),
            found: kind.into(),
        });
    }
    check_version(&value)?;
    let doc: TreeDoc =
        serde_json::from_value(value).map_err(|e| Error::ModelSchema(e.to_string()))?;
    SoftTree::from_parts(
        doc.depth,
        doc.input_dim,
        doc.num_classes,
        doc.beta,
        doc.inner_nodes
            .into_iter()
            .map(|n| InnerNode {
                filter_w: n.w,
                bias_b: n.b,
            })
            .collect(),
        doc.leaves
            .into_iter()
            .map(|l| LeafNode { logits_phi: l.phi })
            .collect(),
    )
}

pub fn mlp_to_json(model: &MlpModel) -> String {
    let doc = MlpDoc {
        format_version: FORMAT_VERSION,
        kind: "mlp".into(),
        layer_sizes: model.layer_sizes().to_vec(),
        layers: model
            .weights()
            .iter()
            .zip(model.biases().iter())
            .map(|(w, b)| LayerDoc {
                w: w.clone(),
                b: b.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("mlp serialization cannot fail")
}

pub fn mlp_from_json(json: &str) -> Result<MlpModel> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::ModelSchema(e.to_string()))?;
    let kind = document_kind(&value);
    if kind != "mlp" {
        return Err(Error::KindMismatch {
            expected: "mlp".into(),
            found: kind.into(),
        });
    }
    check_version(&value)?;
    let doc: MlpDoc =
        serde_json::from_value(value).map_err(|e| Error::ModelSchema(e.to_string()))?;
    let (weights, biases) = doc.layers.into_iter().map(|l| (l.w, l.b)).unzip();
    MlpModel::from_parts(doc.layer_sizes, weights, biases)
}

pub fn save_tree(tree: &SoftTree, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, tree_to_json(tree))?;
    Ok(())
}

pub fn load_tree(path: impl AsRef<Path>) -> Result<SoftTree> {
    tree_from_json(&fs::read_to_string(path)?)
}

pub fn save_mlp(model: &MlpModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, mlp_to_json(model))?;
    Ok(())
}

pub fn load_mlp(path: impl AsRef<Path>) -> Result<MlpModel> {
    mlp_from_json(&fs::read_to_string(path)?)
}
