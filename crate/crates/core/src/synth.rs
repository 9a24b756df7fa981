//! Seeded synthetic identification corpora.
//!
//! Each subject owns a multi-octave value-noise texture. Every image of that
//! subject is the texture plus independent Gaussian pixel noise; images under
//! [`Condition::Day`] additionally receive a global brightness shift before
//! clamping, which saturates the brightest regions.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::identification::Condition;
use crate::imaging::{quantize, save_png, GrayImage};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub subjects: usize,
    /// Images per subject per condition.
    pub images_per_condition: usize,
    pub conditions: Vec<Condition>,
    pub size: usize,
    /// Standard deviation of the per-image additive noise, intensity units.
    pub noise_sigma: f64,
    /// Intensity offset added to every Day image.
    pub day_brightness_shift: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            subjects: 20,
            images_per_condition: 32,
            conditions: vec![Condition::Office, Condition::Day],
            size: 224,
            noise_sigma: 12.0,
            day_brightness_shift: 40.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthSample {
    pub subject_id: String,
    pub image_id: String,
    pub condition: Condition,
    pub image: GrayImage,
}

/// Bilinearly interpolated lattice of uniform values with `cells` cells per side.
fn value_noise(rng: &mut ChaCha8Rng, size: usize, cells: usize) -> Vec<f64> {
    let n = cells + 1;
    let lattice: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
    let step = cells as f64 / size as f64;
    let mut out = Vec::with_capacity(size * size);
    for y in 0..size {
        let fy = (y as f64 + 0.5) * step;
        let y0 = (fy.floor() as usize).min(cells - 1);
        let ty = fy - y0 as f64;
        for x in 0..size {
            let fx = (x as f64 + 0.5) * step;
            let x0 = (fx.floor() as usize).min(cells - 1);
            let tx = fx - x0 as f64;
            let v00 = lattice[y0 * n + x0];
            let v10 = lattice[y0 * n + x0 + 1];
            let v01 = lattice[(y0 + 1) * n + x0];
            let v11 = lattice[(y0 + 1) * n + x0 + 1];
            let top = v00 * (1.0 - tx) + v10 * tx;
            let bottom = v01 * (1.0 - tx) + v11 * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    out
}

/// Real-valued texture stretched to `[10, 245]`.
pub fn base_texture(seed: u64, size: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![0.0; size * size];
    let mut cells = 4usize;
    let mut amplitude = 1.0;
    while cells <= size.max(4) / 2 && cells <= 64 {
        for (a, v) in acc.iter_mut().zip(value_noise(&mut rng, size, cells)) {
            *a += amplitude * v;
        }
        cells *= 2;
        amplitude *= 0.7;
    }
    let (lo, hi) = acc
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = (hi - lo).max(f64::EPSILON);
    acc.iter().map(|v| 10.0 + 235.0 * (v - lo) / span).collect()
}

pub fn textured_image(seed: u64, size: usize) -> GrayImage {
    let tex = base_texture(seed, size);
    GrayImage::new(size, size, tex.into_iter().map(quantize).collect()).expect("square raster")
}

/// `base + offset + N(0, sigma)`, rounded and clamped.
pub fn render(base: &[f64], size: usize, offset: f64, sigma: f64, rng: &mut ChaCha8Rng) -> GrayImage {
    let data = if sigma > 0.0 {
        let noise = Normal::new(0.0, sigma).expect("positive sigma");
        base.iter().map(|&b| quantize(b + offset + noise.sample(rng))).collect()
    } else {
        base.iter().map(|&b| quantize(b + offset)).collect()
    };
    GrayImage::new(size, size, data).expect("square raster")
}

/// `count` independent textures with per-pixel grain of std-dev `grain_sigma`.
pub fn textured_corpus(count: usize, size: usize, grain_sigma: f64, seed: u64) -> Vec<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let base = base_texture(rng.random(), size);
            render(&base, size, 0.0, grain_sigma, &mut rng)
        })
        .collect()
}

/// Generates the whole corpus in `(subject, condition, image)` order.
pub fn generate(config: &SynthConfig) -> Vec<SynthSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = (config.subjects.max(1) - 1).to_string().len().max(2);
    let mut out = Vec::new();
    for s in 0..config.subjects {
        let base = base_texture(rng.random(), config.size);
        for &condition in &config.conditions {
            let offset = if condition == Condition::Day {
                config.day_brightness_shift
            } else {
                0.0
            };
            for i in 0..config.images_per_condition {
                out.push(SynthSample {
                    subject_id: format!("s{s:0width$}"),
                    image_id: format!("img{i:04}"),
                    condition,
                    image: render(&base, config.size, offset, config.noise_sigma, &mut rng),
                });
            }
        }
    }
    out
}

/// Writes `<root>/<condition>/<subject>/<image>.png`.
pub fn write_dataset(root: &Path, samples: &[SynthSample]) -> Result<(), image::ImageError> {
    for s in samples {
        let dir = root.join(s.condition.as_str()).join(&s.subject_id);
        std::fs::create_dir_all(&dir).map_err(image::ImageError::IoError)?;
        save_png(&s.image, dir.join(format!("{}.png", s.image_id)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seeded() {
        let cfg = SynthConfig {
            subjects: 2,
            images_per_condition: 2,
            size: 32,
            ..Default::default()
        };
        let a = generate(&cfg);
        let b = generate(&cfg);
        assert_eq!(a.len(), 8);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.image, y.image);
        }
        assert_ne!(a[0].image, a[1].image);
    }

    #[test]
    fn day_images_are_brighter() {
        let cfg = SynthConfig {
            subjects: 1,
            images_per_condition: 1,
            size: 64,
            noise_sigma: 0.0,
            ..Default::default()
        };
        let s = generate(&cfg);
        assert_eq!(s[1].condition, Condition::Day);
        assert!(s[1].image.mean() > s[0].image.mean() + 30.0);
    }

    #[test]
    fn texture_spans_range() {
        let t = base_texture(3, 224);
        let lo = t.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo - 10.0).abs() < 1e-9 && (hi - 245.0).abs() < 1e-9);
    }
}
