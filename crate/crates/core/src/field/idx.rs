//! IDX binary reader for MNIST-format files (big-endian, magic-checked).

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{grid_coords_2d, FieldSample};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    let slice = bytes
        .get(offset..offset + 4)
        .ok_or_else(|| Error::format(offset as u64, "truncated header"))?;
    Ok(u32::from_be_bytes([slice[0], slice[1], slice[2], slice[3]]))
}

/// Parses the IDX image payload: magic 0x00000803, dims count x rows x cols.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, &[u8])> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::format(
            0,
            format!("image magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        ));
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let rows = read_u32_be(bytes, 8)? as usize;
    let cols = read_u32_be(bytes, 12)? as usize;
    let expected = count * rows * cols;
    let payload = bytes
        .get(16..16 + expected)
        .ok_or_else(|| Error::format(bytes.len() as u64, "truncated image payload"))?;
    Ok((count, rows, cols, payload))
}

/// Parses the IDX label payload: magic 0x00000801, dims count.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<&[u8]> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != LABELS_MAGIC {
        return Err(Error::format(
            0,
            format!("label magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        ));
    }
    let count = read_u32_be(bytes, 4)? as usize;
    bytes
        .get(8..8 + count)
        .ok_or_else(|| Error::format(bytes.len() as u64, "truncated label payload"))
}

/// Loads an MNIST-format pair of IDX files. Each image becomes a FieldSample
/// on the pixel-center grid with grayscale replicated to 3 channels,
/// rescaled from [0, 255] to [-1, 1]; condition is the digit label.
pub fn load_mnist_idx(images_path: &Path, labels_path: &Path) -> Result<Vec<FieldSample>> {
    let image_bytes = fs::read(images_path)?;
    let label_bytes = fs::read(labels_path)?;
    let (count, rows, cols, pixels) = parse_idx_images(&image_bytes)?;
    let labels = parse_idx_labels(&label_bytes)?;
    if labels.len() != count {
        return Err(Error::format(
            4,
            format!("image count {count} != label count {}", labels.len()),
        ));
    }
    if rows != cols {
        return Err(Error::format(8, format!("non-square images {rows}x{cols}")));
    }
    let n = rows * cols;
    let coords = grid_coords_2d(rows);
    let mut samples = Vec::with_capacity(count);
    for (idx, chunk) in pixels.chunks_exact(n).enumerate() {
        let mut values = Array2::zeros((n, 3));
        for (i, &px) in chunk.iter().enumerate() {
            let v = px as f64 / 255.0 * 2.0 - 1.0;
            for ch in 0..3 {
                values[[i, ch]] = v;
            }
        }
        samples.push(FieldSample {
            coords: coords.clone(),
            values,
            condition: Some(labels[idx] as u32),
            sample_id: idx as u64,
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_images(count: u32, side: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        b.extend_from_slice(&count.to_be_bytes());
        b.extend_from_slice(&side.to_be_bytes());
        b.extend_from_slice(&side.to_be_bytes());
        b.extend_from_slice(pixels);
        b
    }

    fn idx_labels(labels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        b.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        b.extend_from_slice(labels);
        b
    }

    fn load(images: &[u8], labels: &[u8]) -> Result<Vec<FieldSample>> {
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("im.idx");
        let lp = dir.path().join("lb.idx");
        fs::write(&ip, images).unwrap();
        fs::write(&lp, labels).unwrap();
        load_mnist_idx(&ip, &lp)
    }

    #[test]
    fn all_zero_pixels_map_to_minus_one() {
        let images = idx_images(1, 28, &[0u8; 784]);
        let labels = idx_labels(&[3]);
        let ds = load(&images, &labels).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].n(), 784);
        assert!(ds[0].values.iter().all(|&v| v == -1.0));
        assert_eq!(ds[0].condition, Some(3));
    }

    #[test]
    fn pixel_255_maps_to_plus_one() {
        let mut px = vec![0u8; 784];
        px[10] = 255;
        let ds = load(&idx_images(1, 28, &px), &idx_labels(&[0])).unwrap();
        assert_eq!(ds[0].values[[10, 0]], 1.0);
        assert_eq!(ds[0].values[[10, 2]], 1.0);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let mut images = idx_images(1, 28, &[0u8; 784]);
        images[3] = 0x02; // magic 0x00000802
        let err = load(&images, &idx_labels(&[0])).unwrap_err();
        assert!(matches!(err, Error::Format { offset: 0, .. }));
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let images = idx_images(2, 28, &[0u8; 784]); // claims 2, ships 1
        let err = load(&images, &idx_labels(&[0, 1])).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let images = idx_images(1, 28, &[0u8; 784]);
        let err = load(&images, &idx_labels(&[0, 1])).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }
}
