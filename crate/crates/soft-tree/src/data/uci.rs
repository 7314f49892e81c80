//! UCI text-format loaders: Connect-4 board states and the Letter
//! recognition attributes.

use std::fs;
use std::path::Path;

use crate::error::{DataFormatKind, Error, Result};

use super::Dataset;

pub const CONNECT4_CLASSES: [&str; 3] = ["win", "loss", "draw"];

const BOARD_ROWS: usize = 6;
const BOARD_COLS: usize = 7;
const BOARD_CELLS: usize = BOARD_ROWS * BOARD_COLS;
const CELL_CHANNELS: usize = 3; // x, o, b

/// Loads the UCI connect-4 file: 42 comma-separated cell tokens in
/// `{x, o, b}` plus a class in `{win, loss, draw}` per line.
///
/// Each cell becomes a 3-way one-hot (channels x/o/b), laid out in raster
/// order `(row * 7 + col) * 3 + channel` so a filter reshapes directly to
/// a 6x7 board with 3 channels. The file lists cells column by column
/// (a1..a6, b1..b6, ...); rasterization reorders them. Classes are fixed
/// as win=0, loss=1, draw=2.
pub fn load_connect4(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let input_dim = BOARD_CELLS * CELL_CHANNELS;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != BOARD_CELLS + 1 {
            return Err(Error::data(
                DataFormatKind::BadRow,
                path,
                Some(line_no),
                format!("expected 43 fields, found {}", fields.len()),
            ));
        }
        let start = features.len();
        features.resize(start + input_dim, 0.0);
        for (cell, token) in fields[..BOARD_CELLS].iter().enumerate() {
            let channel = match *token {
                "x" => 0,
                "o" => 1,
                "b" => 2,
                other => {
                    return Err(Error::data(
                        DataFormatKind::BadToken,
                        path,
                        Some(line_no),
                        format!("unknown cell token {other:?}"),
                    ))
                }
            };
            // File order is column-major over the board.
            let col = cell / BOARD_ROWS;
            let row = cell % BOARD_ROWS;
            features[start + (row * BOARD_COLS + col) * CELL_CHANNELS + channel] = 1.0;
        }
        let label = match fields[BOARD_CELLS] {
            "win" => 0,
            "loss" => 1,
            "draw" => 2,
            other => {
                return Err(Error::data(
                    DataFormatKind::BadToken,
                    path,
                    Some(line_no),
                    format!("unknown class token {other:?}"),
                ))
            }
        };
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::data(
            DataFormatKind::BadHeader,
            path,
            None,
            "file contains no data rows",
        ));
    }
    Dataset::new(
        "connect4",
        input_dim,
        3,
        features,
        labels,
        CONNECT4_CLASSES.iter().map(|s| s.to_string()).collect(),
    )
}

/// Loads the UCI letter-recognition file: a capital letter class followed
/// by 16 integer attributes in `[0, 15]`, scaled to `[0, 1]`.
pub fn load_letter(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 17 {
            return Err(Error::data(
                DataFormatKind::BadRow,
                path,
                Some(line_no),
                format!("expected 17 fields, found {}", fields.len()),
            ));
        }
        let class = fields[0];
        let letter = match class.as_bytes() {
            [c @ b'A'..=b'Z'] => (c - b'A') as u32,
            _ => {
                return Err(Error::data(
                    DataFormatKind::BadToken,
                    path,
                    Some(line_no),
                    format!("bad class letter {class:?}"),
                ))
            }
        };
        for field in &fields[1..] {
            let value: i64 = field.trim().parse().map_err(|_| {
                Error::data(
                    DataFormatKind::BadToken,
                    path,
                    Some(line_no),
                    format!("non-integer attribute {field:?}"),
                )
            })?;
            if !(0..=15).contains(&value) {
                return Err(Error::data(
                    DataFormatKind::OutOfRange,
                    path,
                    Some(line_no),
                    format!("attribute {value} outside [0, 15]"),
                ));
            }
            features.push(value as f64 / 15.0);
        }
        labels.push(letter);
    }
    if labels.is_empty() {
        return Err(Error::data(
            DataFormatKind::BadHeader,
            path,
            None,
            "file contains no data rows",
        ));
    }
    Dataset::new(
        "letter",
        16,
        26,
        features,
        labels,
        (b'A'..=b'Z').map(|c| (c as char).to_string()).collect(),
    )
}

/// The conventional Letter split: first 16,000 rows train, last 4,000 test
/// (file order). Works proportionally for smaller fixture files.
pub fn letter_standard_split(dataset: &Dataset) -> Result<(Dataset, Dataset)> {
    let n = dataset.len();
    let train_n = if n == 20_000 { 16_000 } else { n * 4 / 5 };
    if train_n == 0 || train_n == n {
        return Err(Error::InvalidConfig(format!(
            "letter split needs more than {n} examples"
        )));
    }
    let train_idx: Vec<usize> = (0..train_n).collect();
    let test_idx: Vec<usize> = (train_n..n).collect();
    Ok((
        dataset.subset(&train_idx, "letter-train"),
        dataset.subset(&test_idx, "letter-test"),
    ))
}
