//! Synthetic dataset generators.
//!
//! Every sample is generated from a per-sample rng derived from
//! (dataset seed, sample index), so the same spec reproduces byte-identical
//! datasets regardless of generation order.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::field::{
    grid_coords_2d, idx, normalize_per_sample, DatasetKind, DatasetSpec, FieldSample,
    GeneratorParams,
};

/// splitmix64 finalizer; decorrelates per-sample seeds.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(index)))
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Generates `spec.count` samples. 2D kinds share the regular pixel-center
/// grid; 3D shapes are surface-sampled, randomly rotated/scaled and
/// per-sample normalized with coords equal to values.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<Vec<FieldSample>> {
    spec.validate()?;
    if spec.kind == DatasetKind::MnistIdx {
        let images = spec.params.mnist_images.as_ref().unwrap();
        let labels = spec.params.mnist_labels.as_ref().unwrap();
        let mut samples = idx::load_mnist_idx(images, labels)?;
        samples.truncate(spec.count);
        return Ok(samples);
    }

    let mut samples = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let mut rng = sample_rng(spec.seed, i as u64);
        let sample = match spec.kind {
            DatasetKind::GaussianBlobs2d => gaussian_blobs(spec, i as u64, &mut rng),
            DatasetKind::Checkerboard2d => checkerboard(spec, i as u64, &mut rng),
            DatasetKind::ParametricShapes3d => parametric_shape(spec, i as u64, &mut rng)?,
            DatasetKind::MnistIdx => unreachable!(),
        };
        samples.push(sample);
    }
    Ok(samples)
}

fn gaussian_blobs(spec: &DatasetSpec, id: u64, rng: &mut ChaCha8Rng) -> FieldSample {
    let side = (spec.resolution_or_points as f64).sqrt().round() as usize;
    let coords = grid_coords_2d(side);
    let p = &spec.params;
    let k = rng.random_range(p.blob_count_range.0..=p.blob_count_range.1);
    let mut centers = Vec::with_capacity(k);
    for _ in 0..k {
        let cx = uniform(rng, -0.8, 0.8);
        let cy = uniform(rng, -0.8, 0.8);
        let sigma = uniform(rng, p.blob_sigma_range.0, p.blob_sigma_range.1);
        let color = [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        centers.push((cx, cy, sigma, color));
    }
    let mut values = Array2::zeros((coords.nrows(), 3));
    for (i, c) in coords.rows().into_iter().enumerate() {
        let mut acc = [0.0f64; 3];
        for &(cx, cy, sigma, color) in &centers {
            let d2 = (c[0] - cx).powi(2) + (c[1] - cy).powi(2);
            let w = (-d2 / (2.0 * sigma * sigma)).exp();
            for ch in 0..3 {
                acc[ch] += color[ch] * w;
            }
        }
        for ch in 0..3 {
            values[[i, ch]] = (2.0 * acc[ch] - 1.0).clamp(-1.0, 1.0);
        }
    }
    FieldSample {
        coords,
        values,
        condition: None,
        sample_id: id,
    }
}

fn checkerboard(spec: &DatasetSpec, id: u64, rng: &mut ChaCha8Rng) -> FieldSample {
    let side = (spec.resolution_or_points as f64).sqrt().round() as usize;
    let coords = grid_coords_2d(side);
    let p = &spec.params;
    let kx = rng.random_range(p.frequency_range.0..=p.frequency_range.1) as f64;
    let ky = rng.random_range(p.frequency_range.0..=p.frequency_range.1) as f64;
    let phase = rng.random_range(0..2u32);
    let color_a = [
        uniform(rng, -1.0, 1.0),
        uniform(rng, -1.0, 1.0),
        uniform(rng, -1.0, 1.0),
    ];
    let color_b = [
        uniform(rng, -1.0, 1.0),
        uniform(rng, -1.0, 1.0),
        uniform(rng, -1.0, 1.0),
    ];
    let mut values = Array2::zeros((coords.nrows(), 3));
    for (i, c) in coords.rows().into_iter().enumerate() {
        let ix = ((c[0] + 1.0) / 2.0 * kx).floor() as i64;
        let iy = ((c[1] + 1.0) / 2.0 * ky).floor() as i64;
        let cell = (ix + iy + phase as i64).rem_euclid(2);
        let color = if cell == 0 { color_a } else { color_b };
        for ch in 0..3 {
            values[[i, ch]] = color[ch];
        }
    }
    FieldSample {
        coords,
        values,
        condition: None,
        sample_id: id,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ShapeFamily {
    Sphere,
    Torus,
    Box,
}

fn pick_family(spec: &DatasetSpec, rng: &mut ChaCha8Rng) -> ShapeFamily {
    let w = spec.params.shape_weights;
    let total = w.sphere + w.torus + w.box_;
    let x = rng.random::<f64>() * total;
    if x < w.sphere {
        ShapeFamily::Sphere
    } else if x < w.sphere + w.torus {
        ShapeFamily::Torus
    } else {
        ShapeFamily::Box
    }
}

/// Rotation matrix from a uniformly random unit quaternion.
fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let mut q = [0.0f64; 4];
    loop {
        for v in q.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for v in q.iter_mut() {
                *v /= norm;
            }
            break;
        }
    }
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Uniform surface sample of one shape family, before any transform.
fn surface_points(family: ShapeFamily, n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut pts = Array2::zeros((n, 3));
    match family {
        ShapeFamily::Sphere => {
            for mut row in pts.rows_mut() {
                loop {
                    let g: [f64; 3] = [
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                    ];
                    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 1e-9 {
                        for j in 0..3 {
                            row[j] = g[j] / norm;
                        }
                        break;
                    }
                }
            }
        }
        ShapeFamily::Torus => {
            // Major radius R, minor radius r; area element ~ (R + r cos v).
            let (major, minor) = (0.7, 0.25);
            for mut row in pts.rows_mut() {
                let u = uniform(rng, 0.0, std::f64::consts::TAU);
                let v = loop {
                    let v = uniform(rng, 0.0, std::f64::consts::TAU);
                    let accept = (major + minor * v.cos()) / (major + minor);
                    if rng.random::<f64>() <= accept {
                        break v;
                    }
                };
                row[0] = (major + minor * v.cos()) * u.cos();
                row[1] = (major + minor * v.cos()) * u.sin();
                row[2] = minor * v.sin();
            }
        }
        ShapeFamily::Box => {
            // Unit cube surface, uniform by face.
            for mut row in pts.rows_mut() {
                let face = rng.random_range(0..6u32);
                let a = uniform(rng, -0.5, 0.5);
                let b = uniform(rng, -0.5, 0.5);
                let (axis, sign) = (face / 2, if face % 2 == 0 { 0.5 } else { -0.5 });
                match axis {
                    0 => {
                        row[0] = sign;
                        row[1] = a;
                        row[2] = b;
                    }
                    1 => {
                        row[0] = a;
                        row[1] = sign;
                        row[2] = b;
                    }
                    _ => {
                        row[0] = a;
                        row[1] = b;
                        row[2] = sign;
                    }
                };
            }
        }
    }
    pts
}

fn parametric_shape(spec: &DatasetSpec, id: u64, rng: &mut ChaCha8Rng) -> Result<FieldSample> {
    let family = pick_family(spec, rng);
    let condition = match family {
        ShapeFamily::Sphere => 0u32,
        ShapeFamily::Torus => 1,
        ShapeFamily::Box => 2,
    };
    let mut pts = surface_points(family, spec.resolution_or_points, rng);

    let scale = uniform(rng, spec.params.scale_range.0, spec.params.scale_range.1);
    let rot = if spec.params.rotate {
        Some(random_rotation(rng))
    } else {
        None
    };
    for mut row in pts.rows_mut() {
        let p = [row[0] * scale, row[1] * scale, row[2] * scale];
        let q = match &rot {
            Some(m) => [
                m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
                m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
                m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
            ],
            None => p,
        };
        for j in 0..3 {
            row[j] = q[j];
        }
    }

    let (values, _, _) = normalize_per_sample(&pts.view())?;
    Ok(FieldSample {
        coords: values.clone(),
        values,
        condition: Some(condition),
        sample_id: id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ShapeWeights;

    fn spec(kind: DatasetKind, n: usize, count: usize, seed: u64) -> DatasetSpec {
        DatasetSpec {
            kind,
            resolution_or_points: n,
            count,
            seed,
            params: GeneratorParams::default(),
        }
    }

    #[test]
    fn blobs_use_the_grid() {
        let s = spec(DatasetKind::GaussianBlobs2d, 256, 1, 7);
        let ds = generate_dataset(&s).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].n(), 256);
        assert_eq!(ds[0].d_in(), 2);
        assert_eq!(ds[0].d_out(), 3);
        assert_eq!(ds[0].coords, grid_coords_2d(16));
        ds[0].validate().unwrap();
    }

    #[test]
    fn sphere_points_have_unit_norm_before_normalization() {
        let mut rng = sample_rng(3, 0);
        let raw = surface_points(ShapeFamily::Sphere, 256, &mut rng);
        for row in raw.rows() {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12, "norm {norm}");
        }
    }

    #[test]
    fn shapes_are_normalized_with_coords_equal_values() {
        let mut s = spec(DatasetKind::ParametricShapes3d, 128, 3, 11);
        s.params.shape_weights = ShapeWeights {
            sphere: 1.0,
            torus: 1.0,
            box_: 1.0,
        };
        let ds = generate_dataset(&s).unwrap();
        for sample in &ds {
            sample.validate().unwrap();
            assert_eq!(sample.coords, sample.values);
            assert!(sample.values.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn determinism_bit_identical() {
        let s = spec(DatasetKind::Checkerboard2d, 64, 5, 7);
        let a = generate_dataset(&s).unwrap();
        let b = generate_dataset(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_count_rejected() {
        let s = spec(DatasetKind::GaussianBlobs2d, 256, 0, 1);
        assert!(generate_dataset(&s).is_err());
    }

    #[test]
    fn non_square_2d_resolution_rejected() {
        let s = spec(DatasetKind::GaussianBlobs2d, 200, 1, 1);
        assert!(generate_dataset(&s).is_err());
    }
}
