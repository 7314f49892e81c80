//! Soft training targets: one-hot labels, teacher predictions, and convex
//! blends of the two, plus a plain-text persistence format.

use std::fs;
use std::path::Path;

use crate::error::{DataFormatKind, Error, Result};

/// Where a target set came from, with the parameters that shaped it.
/// `rho` is the weight on the true one-hot labels (1 = pure labels,
/// 0 = pure teacher); `temperature` is the softmax temperature the teacher
/// predictions were exported at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Hard,
    Teacher { temperature: f64 },
    Composite { rho: f64, temperature: f64 },
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Hard => "hard",
            Provenance::Teacher { .. } => "teacher",
            Provenance::Composite { .. } => "composite",
        }
    }

    fn rho(&self) -> f64 {
        match self {
            Provenance::Hard => 1.0,
            Provenance::Teacher { .. } => 0.0,
            Provenance::Composite { rho, .. } => *rho,
        }
    }

    fn temperature(&self) -> f64 {
        match self {
            Provenance::Hard => 1.0,
            Provenance::Teacher { temperature } | Provenance::Composite { temperature, .. } => {
                *temperature
            }
        }
    }
}

/// Per-example target distributions aligned row-for-row with a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftTargetSet {
    num_classes: usize,
    rows: Vec<f64>, // num_examples x num_classes, row-major
    provenance: Provenance,
}

impl SoftTargetSet {
    pub fn from_rows(num_classes: usize, rows: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidConfig("num_classes must be >= 2".into()));
        }
        if rows.len() % num_classes != 0 {
            return Err(Error::DimensionMismatch {
                what: "target rows",
                expected: num_classes,
                actual: rows.len() % num_classes,
            });
        }
        let set = SoftTargetSet {
            num_classes,
            rows,
            provenance,
        };
        for i in 0..set.num_examples() {
            let sum: f64 = set.row(i).iter().sum();
            if !sum.is_finite() || (sum - 1.0).abs() > 1e-6 || set.row(i).iter().any(|&v| v < 0.0)
            {
                return Err(Error::UnnormalizedTarget { sum });
            }
        }
        Ok(set)
    }

    pub fn num_examples(&self) -> usize {
        self.rows.len() / self.num_classes
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.num_classes..(i + 1) * self.num_classes]
    }
}

/// One-hot rows from integer labels.
pub fn hard_targets(labels: &[u32], num_classes: usize) -> Result<SoftTargetSet> {
    let mut rows = vec![0.0; labels.len() * num_classes];
    for (i, &label) in labels.iter().enumerate() {
        if label as usize >= num_classes {
            return Err(Error::LabelOutOfRange {
                label: label as usize,
                num_classes,
            });
        }
        rows[i * num_classes + label as usize] = 1.0;
    }
    SoftTargetSet::from_rows(num_classes, rows, Provenance::Hard)
}

/// Blends the true labels into teacher predictions:
/// `row_i = rho * onehot(label_i) + (1 - rho) * teacher_row_i`.
pub fn compose_targets(
    labels: &[u32],
    teacher_probs: &SoftTargetSet,
    rho: f64,
) -> Result<SoftTargetSet> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidConfig(format!(
            "rho must be in [0, 1], got {rho}"
        )));
    }
    if labels.len() != teacher_probs.num_examples() {
        return Err(Error::MisalignedTargets {
            expected: labels.len(),
            actual: teacher_probs.num_examples(),
        });
    }
    let k = teacher_probs.num_classes();
    let mut rows = vec![0.0; labels.len() * k];
    for (i, &label) in labels.iter().enumerate() {
        if label as usize >= k {
            return Err(Error::LabelOutOfRange {
                label: label as usize,
                num_classes: k,
            });
        }
        let teacher_row = teacher_probs.row(i);
        let out = &mut rows[i * k..(i + 1) * k];
        for (kk, slot) in out.iter_mut().enumerate() {
            *slot = (1.0 - rho) * teacher_row[kk];
        }
        out[label as usize] += rho;
    }
    SoftTargetSet::from_rows(
        k,
        rows,
        Provenance::Composite {
            rho,
            temperature: teacher_probs.provenance().temperature(),
        },
    )
}

/// Writes the set as text: a header line
/// `soft-targets v1 n=<N> k=<K> provenance=<p> rho=<r> temperature=<t>`
/// followed by `N` lines of `K` space-separated decimals that reconstruct
/// each double exactly.
pub fn save_targets(set: &SoftTargetSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "soft-targets v1 n={} k={} provenance={} rho={} temperature={}\n",
        set.num_examples(),
        set.num_classes(),
        set.provenance().name(),
        set.provenance().rho(),
        set.provenance().temperature(),
    ));
    for i in 0..set.num_examples() {
        let row = set.row(i);
        for (kk, v) in row.iter().enumerate() {
            if kk > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{:.17e}", v));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_targets(path: impl AsRef<Path>) -> Result<SoftTargetSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| {
        Error::data(DataFormatKind::BadHeader, path, Some(1), "file is empty")
    })?;

    let mut n = None;
    let mut k = None;
    let mut provenance_name = None;
    let mut rho = None;
    let mut temperature = None;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("soft-targets") || tokens.next() != Some("v1") {
        return Err(Error::data(
            DataFormatKind::BadHeader,
            path,
            Some(1),
            "expected header starting with 'soft-targets v1'",
        ));
    }
    for token in tokens {
        let (key, value) = token.split_once('=').ok_or_else(|| {
            Error::data(
                DataFormatKind::BadHeader,
                path,
                Some(1),
                format!("malformed header token {token:?}"),
            )
        })?;
        match key {
            "n" => n = value.parse::<usize>().ok(),
            "k" => k = value.parse::<usize>().ok(),
            "provenance" => provenance_name = Some(value.to_string()),
            "rho" => rho = value.parse::<f64>().ok(),
            "temperature" => temperature = value.parse::<f64>().ok(),
            _ => {
                return Err(Error::data(
                    DataFormatKind::BadHeader,
                    path,
                    Some(1),
                    format!("unknown header key {key:?}"),
                ))
            }
        }
    }
    let (n, k) = match (n, k) {
        (Some(n), Some(k)) if k >= 2 => (n, k),
        _ => {
            return Err(Error::data(
                DataFormatKind::BadHeader,
                path,
                Some(1),
                "header must declare n and k >= 2",
            ))
        }
    };
    let provenance = match provenance_name.as_deref() {
        Some("hard") => Provenance::Hard,
        Some("teacher") => Provenance::Teacher {
            temperature: temperature.unwrap_or(1.0),
        },
        Some("composite") => Provenance::Composite {
            rho: rho.unwrap_or(0.5),
            temperature: temperature.unwrap_or(1.0),
        },
        other => {
            return Err(Error::data(
                DataFormatKind::BadHeader,
                path,
                Some(1),
                format!("unknown provenance {other:?}"),
            ))
        }
    };

    let mut rows = Vec::with_capacity(n * k);
    let mut row_count = 0usize;
    for (line_idx, line) in lines {
        let line_no = line_idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = rows.len();
        for field in line.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| {
                Error::data(
                    DataFormatKind::BadToken,
                    path,
                    Some(line_no),
                    format!("non-numeric entry {field:?}"),
                )
            })?;
            rows.push(v);
        }
        if rows.len() - before != k {
            return Err(Error::data(
                DataFormatKind::BadRow,
                path,
                Some(line_no),
                format!("row width {} disagrees with header k={k}", rows.len() - before),
            ));
        }
        row_count += 1;
    }
    if row_count != n {
        return Err(Error::data(
            DataFormatKind::RowCountMismatch,
            path,
            None,
            format!("header declares n={n} rows, found {row_count}"),
        ));
    }
    SoftTargetSet::from_rows(k, rows, provenance)
}
