//! Data as coordinate-value sets.
//!
//! A [`FieldSample`] is one observation of a map from coordinates to values:
//! a 2D image observed as pixel-center coordinates with RGB values, or a 3D
//! point cloud where coordinates and values coincide. This module provides
//! synthetic dataset generators, MNIST IDX ingestion, per-sample
//! normalization and Fourier positional embeddings.

mod generate;
pub mod idx;
pub mod ply;
pub mod ppm;
pub mod store;

pub use generate::generate_dataset;

use ndarray::{Array2, ArrayView2, NdFloat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One map f observed as paired coordinate and value arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    /// N x d_in, components in [-1, 1].
    pub coords: Array2<f64>,
    /// N x d_out, components in [-1, 1] after normalization.
    pub values: Array2<f64>,
    /// Optional class id for conditional training.
    pub condition: Option<u32>,
    pub sample_id: u64,
}

impl FieldSample {
    pub fn n(&self) -> usize {
        self.coords.nrows()
    }

    pub fn d_in(&self) -> usize {
        self.coords.ncols()
    }

    pub fn d_out(&self) -> usize {
        self.values.ncols()
    }

    /// Checks the structural invariants: matching N, coordinate range and
    /// finite values.
    pub fn validate(&self) -> Result<()> {
        if self.coords.nrows() != self.values.nrows() {
            return Err(Error::contract(format!(
                "coords rows {} != values rows {}",
                self.coords.nrows(),
                self.values.nrows()
            )));
        }
        if self.coords.nrows() == 0 {
            return Err(Error::contract("empty sample (N = 0)"));
        }
        for &c in self.coords.iter() {
            if !c.is_finite() || !(-1.0..=1.0).contains(&c) {
                return Err(Error::data(format!("coordinate {c} outside [-1, 1]")));
            }
        }
        for &v in self.values.iter() {
            if !v.is_finite() {
                return Err(Error::data("non-finite value component"));
            }
        }
        Ok(())
    }
}

/// Which synthetic dataset to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    GaussianBlobs2d,
    Checkerboard2d,
    MnistIdx,
    ParametricShapes3d,
}

/// Relative weights for the 3D shape families.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeWeights {
    pub sphere: f64,
    pub torus: f64,
    #[serde(rename = "box")]
    pub box_: f64,
}

impl Default for ShapeWeights {
    fn default() -> Self {
        ShapeWeights {
            sphere: 1.0,
            torus: 1.0,
            box_: 1.0,
        }
    }
}

/// Generator knobs; defaults give a varied dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorParams {
    /// Inclusive range for the number of blobs per gaussian_blobs_2d sample.
    pub blob_count_range: (usize, usize),
    /// Range of blob standard deviations in coordinate units.
    pub blob_sigma_range: (f64, f64),
    /// Inclusive range of checkerboard cell counts per axis.
    pub frequency_range: (u32, u32),
    pub shape_weights: ShapeWeights,
    /// Apply a uniformly random rotation to 3D shapes.
    pub rotate: bool,
    /// Uniform scale range applied to 3D shapes before normalization.
    pub scale_range: (f64, f64),
    /// Paths for the mnist_idx kind.
    pub mnist_images: Option<std::path::PathBuf>,
    pub mnist_labels: Option<std::path::PathBuf>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            blob_count_range: (1, 4),
            blob_sigma_range: (0.08, 0.35),
            frequency_range: (2, 6),
            shape_weights: ShapeWeights::default(),
            rotate: true,
            scale_range: (0.6, 1.4),
            mnist_images: None,
            mnist_labels: None,
        }
    }
}

/// Full description of a synthetic dataset; (spec, seed) determines every bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// Pixel count for 2D kinds (a perfect square, side^2) or point count
    /// for 3D kinds.
    pub resolution_or_points: usize,
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: GeneratorParams,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::config("dataset count must be positive"));
        }
        if self.resolution_or_points == 0 {
            return Err(Error::config("resolution_or_points must be positive"));
        }
        match self.kind {
            DatasetKind::GaussianBlobs2d | DatasetKind::Checkerboard2d => {
                let side = (self.resolution_or_points as f64).sqrt().round() as usize;
                if side * side != self.resolution_or_points {
                    return Err(Error::config(format!(
                        "2D resolution {} is not a perfect square",
                        self.resolution_or_points
                    )));
                }
            }
            DatasetKind::MnistIdx => {
                if self.params.mnist_images.is_none() || self.params.mnist_labels.is_none() {
                    return Err(Error::config(
                        "mnist_idx requires params.mnist_images and params.mnist_labels",
                    ));
                }
            }
            DatasetKind::ParametricShapes3d => {
                let w = self.params.shape_weights;
                if w.sphere < 0.0 || w.torus < 0.0 || w.box_ < 0.0 {
                    return Err(Error::config("shape weights must be non-negative"));
                }
                if w.sphere + w.torus + w.box_ <= 0.0 {
                    return Err(Error::config("at least one shape weight must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn d_in(&self) -> usize {
        match self.kind {
            DatasetKind::ParametricShapes3d => 3,
            _ => 2,
        }
    }

    pub fn d_out(&self) -> usize {
        3
    }
}

/// Row-major pixel-center grid over [-1, 1]^2: index = row * side + col,
/// coord = (x(col), y(row)) with x(i) = -1 + (2i + 1)/side.
pub fn grid_coords_2d(side: usize) -> Array2<f64> {
    let mut coords = Array2::zeros((side * side, 2));
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            coords[[i, 0]] = -1.0 + (2 * c + 1) as f64 / side as f64;
            coords[[i, 1]] = -1.0 + (2 * r + 1) as f64 / side as f64;
        }
    }
    coords
}

/// Per-sample normalization into [-1, 1]: center is the bounding-box
/// midpoint, scale is half of the largest box extent. Degenerate (all
/// components equal per dimension) input maps to zeros with scale 1.
pub fn normalize_per_sample(values: &ArrayView2<f64>) -> Result<(Array2<f64>, Vec<f64>, f64)> {
    if values.nrows() == 0 {
        return Err(Error::contract("normalize_per_sample on empty array"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("normalize_per_sample: non-finite input"));
    }
    let d = values.ncols();
    let mut center = vec![0.0; d];
    let mut half_extent = 0.0f64;
    for j in 0..d {
        let col = values.column(j);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in col.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        center[j] = 0.5 * (lo + hi);
        half_extent = half_extent.max(0.5 * (hi - lo));
    }
    let scale = if half_extent > 0.0 { half_extent } else { 1.0 };
    let mut out = values.to_owned();
    for mut row in out.rows_mut() {
        for j in 0..d {
            row[j] = (row[j] - center[j]) / scale;
        }
    }
    Ok((out, center, scale))
}

/// Inverse of [`normalize_per_sample`].
pub fn denormalize(values: &ArrayView2<f64>, center: &[f64], scale: f64) -> Array2<f64> {
    let mut out = values.to_owned();
    for mut row in out.rows_mut() {
        for (j, &c) in center.iter().enumerate() {
            row[j] = row[j] * scale + c;
        }
    }
    out
}

/// Fourier positional embedding configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FourierEmbeddingConfig {
    pub num_bands: usize,
    pub max_frequency: f64,
    pub include_input: bool,
}

impl Default for FourierEmbeddingConfig {
    fn default() -> Self {
        FourierEmbeddingConfig {
            num_bands: 6,
            max_frequency: 8.0,
            include_input: true,
        }
    }
}

impl FourierEmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_bands == 0 && !self.include_input {
            return Err(Error::config(
                "fourier embedding would be empty (num_bands = 0, include_input = false)",
            ));
        }
        if self.num_bands > 0 && !(self.max_frequency > 0.0) {
            return Err(Error::config("max_frequency must be positive"));
        }
        Ok(())
    }

    /// d_in x (2 * num_bands + include_input).
    pub fn output_dim(&self, d_in: usize) -> usize {
        d_in * (2 * self.num_bands + usize::from(self.include_input))
    }

    /// Band frequencies, geometrically spaced from 1 to max_frequency.
    pub fn frequencies(&self) -> Vec<f64> {
        match self.num_bands {
            0 => Vec::new(),
            1 => vec![1.0],
            n => (0..n)
                .map(|k| self.max_frequency.powf(k as f64 / (n - 1) as f64))
                .collect(),
        }
    }
}

/// Standard Fourier positional embedding. Per input dimension x and band
/// frequency w: sin(w * pi * x) then cos(w * pi * x); raw inputs are
/// appended at the end when `include_input` is set.
pub fn fourier_embed<F: NdFloat>(
    coords: &ArrayView2<F>,
    cfg: &FourierEmbeddingConfig,
) -> Result<Array2<F>> {
    cfg.validate()?;
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::data("fourier_embed: non-finite coordinates"));
    }
    let (n, d_in) = (coords.nrows(), coords.ncols());
    let freqs: Vec<F> = cfg
        .frequencies()
        .iter()
        .map(|&w| F::from(w * std::f64::consts::PI).unwrap())
        .collect();
    let d_emb = cfg.output_dim(d_in);
    let mut out = Array2::zeros((n, d_emb));
    for i in 0..n {
        let mut col = 0;
        for d in 0..d_in {
            let x = coords[[i, d]];
            for &w in &freqs {
                out[[i, col]] = (w * x).sin();
                out[[i, col + cfg.num_bands]] = (w * x).cos();
                col += 1;
            }
            col += cfg.num_bands;
        }
        if cfg.include_input {
            for d in 0..d_in {
                out[[i, col + d]] = coords[[i, d]];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn normalize_two_point_box() {
        let v = array![[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        let (n, center, scale) = normalize_per_sample(&v.view()).unwrap();
        assert_eq!(center, vec![1.0, 0.0, 0.0]);
        assert_eq!(scale, 1.0);
        assert_eq!(n, array![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn normalize_degenerate_input() {
        let v = array![[5.0, 5.0, 5.0], [5.0, 5.0, 5.0], [5.0, 5.0, 5.0]];
        let (n, _, scale) = normalize_per_sample(&v.view()).unwrap();
        assert_eq!(scale, 1.0);
        assert!(n.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn normalize_largest_extent_rule() {
        let v = array![[-3.0, 1.0, 0.0], [3.0, -1.0, 0.0]];
        let (n, _, scale) = normalize_per_sample(&v.view()).unwrap();
        assert_eq!(scale, 3.0);
        assert_abs_diff_eq!(n[[0, 0]], -1.0);
        assert_abs_diff_eq!(n[[0, 1]], 1.0 / 3.0);
        assert_abs_diff_eq!(n[[1, 0]], 1.0);
        assert_abs_diff_eq!(n[[1, 1]], -1.0 / 3.0);
    }

    #[test]
    fn normalize_rejects_non_finite() {
        let v = array![[f64::NAN, 0.0]];
        assert!(matches!(
            normalize_per_sample(&v.view()),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn denormalize_round_trips() {
        let v = array![[0.25, -4.0], [7.5, 2.0], [-1.5, 0.5]];
        let (n, center, scale) = normalize_per_sample(&v.view()).unwrap();
        let back = denormalize(&n.view(), &center, scale);
        for (a, b) in back.iter().zip(v.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn fourier_zero_input() {
        let cfg = FourierEmbeddingConfig {
            num_bands: 3,
            max_frequency: 8.0,
            include_input: false,
        };
        let coords = array![[0.0f64, 0.0]];
        let emb = fourier_embed(&coords.view(), &cfg).unwrap();
        // Per dim: 3 sines then 3 cosines.
        for d in 0..2 {
            for k in 0..3 {
                assert_eq!(emb[[0, d * 6 + k]], 0.0);
                assert_eq!(emb[[0, d * 6 + 3 + k]], 1.0);
            }
        }
    }

    #[test]
    fn fourier_dimension_formula() {
        let cfg = FourierEmbeddingConfig {
            num_bands: 2,
            max_frequency: 4.0,
            include_input: true,
        };
        let coords = Array2::<f64>::zeros((5, 2));
        let emb = fourier_embed(&coords.view(), &cfg).unwrap();
        assert_eq!(emb.ncols(), 10);
        assert_eq!(cfg.output_dim(2), 10);
    }

    #[test]
    fn fourier_parity() {
        let cfg = FourierEmbeddingConfig {
            num_bands: 4,
            max_frequency: 6.0,
            include_input: false,
        };
        let x = array![[0.37f64, -0.81]];
        let neg = array![[-0.37f64, 0.81]];
        let e1 = fourier_embed(&x.view(), &cfg).unwrap();
        let e2 = fourier_embed(&neg.view(), &cfg).unwrap();
        for d in 0..2 {
            for k in 0..4 {
                assert_abs_diff_eq!(e1[[0, d * 8 + k]], -e2[[0, d * 8 + k]], epsilon = 1e-12);
                assert_abs_diff_eq!(
                    e1[[0, d * 8 + 4 + k]],
                    e2[[0, d * 8 + 4 + k]],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn fourier_empty_config_is_an_error() {
        let cfg = FourierEmbeddingConfig {
            num_bands: 0,
            max_frequency: 1.0,
            include_input: false,
        };
        let coords = Array2::<f64>::zeros((1, 2));
        assert!(matches!(
            fourier_embed(&coords.view(), &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grid_is_pixel_centers() {
        let g = grid_coords_2d(16);
        assert_eq!(g.nrows(), 256);
        assert_abs_diff_eq!(g[[0, 0]], -1.0 + 1.0 / 16.0);
        assert_abs_diff_eq!(g[[0, 1]], -1.0 + 1.0 / 16.0);
        assert_abs_diff_eq!(g[[255, 0]], 1.0 - 1.0 / 16.0);
        // Column index advances x first.
        assert_abs_diff_eq!(g[[1, 0]], -1.0 + 3.0 / 16.0);
        assert_abs_diff_eq!(g[[1, 1]], -1.0 + 1.0 / 16.0);
    }
}
