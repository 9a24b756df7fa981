//! Gradient-orientation descriptors: cell-wise HOG and the spatial-pyramid PHOG.

use super::{DescriptorError, DescriptorId, DescriptorParams, FeatureVector};
use crate::imaging::{GrayImage, ImagingError};

const HOG_EPS: f64 = 1e-6;

/// Central-difference gradient field with border clamping.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub width: usize,
    pub height: usize,
    pub magnitude: Vec<f64>,
    /// Unsigned orientation in degrees, `[0, 180)`.
    pub orientation: Vec<f64>,
}

impl Gradients {
    pub fn compute(img: &GrayImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let mut magnitude = Vec::with_capacity(w * h);
        let mut orientation = Vec::with_capacity(w * h);
        for y in 0..h as isize {
            for x in 0..w as isize {
                let gx = img.get_clamped(x + 1, y) as f64 - img.get_clamped(x - 1, y) as f64;
                let gy = img.get_clamped(x, y + 1) as f64 - img.get_clamped(x, y - 1) as f64;
                magnitude.push(gx.hypot(gy));
                let mut theta = gy.atan2(gx).to_degrees();
                if theta < 0.0 {
                    theta += 180.0;
                }
                if theta >= 180.0 {
                    theta -= 180.0;
                }
                orientation.push(theta);
            }
        }
        Self {
            width: w,
            height: h,
            magnitude,
            orientation,
        }
    }
}

/// Magnitude-weighted orientation histogram over the half-open pixel rectangle
/// `[x0, x1) x [y0, y1)`.
///
/// Bin `i` is centred on `i * 180 / bins` degrees; each vote is split linearly
/// between the two nearest centres, wrapping at 180°.
pub fn orientation_histogram(
    grad: &Gradients,
    (x0, y0): (usize, usize),
    (x1, y1): (usize, usize),
    bins: usize,
) -> Vec<f64> {
    let mut hist = vec![0.0; bins];
    let width = 180.0 / bins as f64;
    for y in y0..y1 {
        for x in x0..x1 {
            let i = y * grad.width + x;
            let m = grad.magnitude[i];
            if m == 0.0 {
                continue;
            }
            let pos = grad.orientation[i] / width;
            let lo = pos.floor();
            let frac = pos - lo;
            let lo = lo as usize % bins;
            let hi = (lo + 1) % bins;
            hist[lo] += m * (1.0 - frac);
            hist[hi] += m * frac;
        }
    }
    hist
}

/// Cell histograms in row-major cell order, each L2-normalized.
pub fn extract_hog(img: &GrayImage, params: &DescriptorParams) -> Result<FeatureVector, DescriptorError> {
    params.validate()?;
    let cell = params.hog_cell;
    if img.width() < cell || img.height() < cell {
        return Err(ImagingError::Dimension(format!(
            "{}x{} image is smaller than one {cell}x{cell} cell",
            img.width(),
            img.height()
        ))
        .into());
    }
    let grad = Gradients::compute(img);
    let (cols, rows) = (img.width() / cell, img.height() / cell);
    let mut values = Vec::with_capacity(rows * cols * params.hog_bins);
    for r in 0..rows {
        for c in 0..cols {
            let mut hist = orientation_histogram(
                &grad,
                (c * cell, r * cell),
                ((c + 1) * cell, (r + 1) * cell),
                params.hog_bins,
            );
            let norm = (hist.iter().map(|v| v * v).sum::<f64>() + HOG_EPS * HOG_EPS).sqrt();
            hist.iter_mut().for_each(|v| *v /= norm);
            values.extend(hist);
        }
    }
    FeatureVector::new(DescriptorId::Hog, values)
}

/// Levels `0..=phog_levels`, level `l` split into `2^l x 2^l` regions, the
/// whole vector L1-normalized.
pub fn extract_phog(img: &GrayImage, params: &DescriptorParams) -> Result<FeatureVector, DescriptorError> {
    params.validate()?;
    let splits = 1usize << params.phog_levels;
    if img.width() < splits || img.height() < splits {
        return Err(DescriptorError::InvalidParams(format!(
            "{} pyramid levels need at least {splits}x{splits} pixels, image is {}x{}",
            params.phog_levels,
            img.width(),
            img.height()
        )));
    }
    let grad = Gradients::compute(img);
    let (w, h) = (img.width(), img.height());
    let mut values = Vec::new();
    for level in 0..=params.phog_levels {
        let n = 1usize << level;
        for ry in 0..n {
            for rx in 0..n {
                let from = (rx * w / n, ry * h / n);
                let to = ((rx + 1) * w / n, (ry + 1) * h / n);
                values.extend(orientation_histogram(&grad, from, to, params.phog_bins));
            }
        }
    }
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter_mut().for_each(|v| *v /= total);
    }
    FeatureVector::new(DescriptorId::Phog, values)
}
