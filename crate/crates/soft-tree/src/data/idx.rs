//! IDX (MNIST) binary format: big-endian headers, one byte per pixel or
//! label. Image files carry magic 0x00000803, label files 0x00000801.

use std::fs;
use std::path::Path;

use crate::error::{DataFormatKind, Error, Result};

use super::Dataset;

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::data(
            DataFormatKind::Truncated,
            path,
            None,
            format!("file ends inside header at byte {offset}"),
        ));
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Loads an MNIST-style image/label file pair. Pixels are scaled to
/// `[0, 1]` by dividing by 255; the label space is fixed at 10 digits.
pub fn load_mnist(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();

    let image_bytes = fs::read(images_path)?;
    let magic = read_u32_be(&image_bytes, 0, images_path)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::data(
            DataFormatKind::BadMagic,
            images_path,
            None,
            format!("expected image magic {IMAGE_MAGIC:#010x}, found {magic:#010x}"),
        ));
    }
    let count = read_u32_be(&image_bytes, 4, images_path)? as usize;
    let rows = read_u32_be(&image_bytes, 8, images_path)? as usize;
    let cols = read_u32_be(&image_bytes, 12, images_path)? as usize;
    let input_dim = rows * cols;
    if input_dim == 0 {
        return Err(Error::data(
            DataFormatKind::BadHeader,
            images_path,
            None,
            format!("degenerate image shape {rows}x{cols}"),
        ));
    }
    let expected = 16 + count * input_dim;
    if image_bytes.len() < expected {
        return Err(Error::data(
            DataFormatKind::Truncated,
            images_path,
            None,
            format!("need {expected} bytes for {count} images, file has {}", image_bytes.len()),
        ));
    }

    let label_bytes = fs::read(labels_path)?;
    let magic = read_u32_be(&label_bytes, 0, labels_path)?;
    if magic != LABEL_MAGIC {
        return Err(Error::data(
            DataFormatKind::BadMagic,
            labels_path,
            None,
            format!("expected label magic {LABEL_MAGIC:#010x}, found {magic:#010x}"),
        ));
    }
    let label_count = read_u32_be(&label_bytes, 4, labels_path)? as usize;
    if label_count != count {
        return Err(Error::data(
            DataFormatKind::CountMismatch,
            labels_path,
            None,
            format!("{count} images but {label_count} labels"),
        ));
    }
    if label_bytes.len() < 8 + count {
        return Err(Error::data(
            DataFormatKind::Truncated,
            labels_path,
            None,
            format!("need {} bytes for {count} labels, file has {}", 8 + count, label_bytes.len()),
        ));
    }

    let mut features = Vec::with_capacity(count * input_dim);
    features.extend(
        image_bytes[16..16 + count * input_dim]
            .iter()
            .map(|&b| b as f64 / 255.0),
    );
    let mut labels = Vec::with_capacity(count);
    for (i, &b) in label_bytes[8..8 + count].iter().enumerate() {
        if b > 9 {
            return Err(Error::data(
                DataFormatKind::OutOfRange,
                labels_path,
                None,
                format!("label {b} at index {i} exceeds digit range"),
            ));
        }
        labels.push(b as u32);
    }

    Dataset::new(
        "mnist",
        input_dim,
        10,
        features,
        labels,
        (0..10).map(|d| d.to_string()).collect(),
    )
}
