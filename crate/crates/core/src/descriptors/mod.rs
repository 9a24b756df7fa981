//! Handcrafted face descriptors.
//!
//! Every extractor maps a [`GrayImage`] to a [`FeatureVector`]. The texture
//! codes (LBP, mLBP, LTP, LPQ) are histogrammed per non-overlapping block and
//! the block histograms concatenated in row-major block order. HOG and PHOG
//! bin gradient orientations over cells and pyramid regions respectively.

mod gradient;
mod lbp;
mod lpq;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imaging::{GrayImage, ImagingError};

pub use gradient::{extract_hog, extract_phog, orientation_histogram, Gradients};
pub use lbp::{
    extract_lbp, extract_ltp, extract_mlbp, lbp_code_map, ltp_code_maps, mlbp_code_map,
};
pub use lpq::{extract_lpq, lpq_code_map};

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error("invalid descriptor parameters: {0}")]
    InvalidParams(String),
    #[error("feature vector contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("unknown descriptor {name:?}; valid descriptors: {valid}")]
    Unknown { name: String, valid: String },
}

/// Which extractor (or external model) produced a feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DescriptorId {
    #[serde(rename = "LBP")]
    Lbp,
    #[serde(rename = "mLBP")]
    Mlbp,
    #[serde(rename = "LTP")]
    Ltp,
    #[serde(rename = "LPQ")]
    Lpq,
    #[serde(rename = "HOG")]
    Hog,
    #[serde(rename = "PHOG")]
    Phog,
    #[serde(rename = "EMBEDDING")]
    Embedding,
}

impl DescriptorId {
    /// The six image descriptors, in the order they are usually tabulated.
    pub const HANDCRAFTED: [DescriptorId; 6] = [
        DescriptorId::Lbp,
        DescriptorId::Mlbp,
        DescriptorId::Hog,
        DescriptorId::Phog,
        DescriptorId::Lpq,
        DescriptorId::Ltp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DescriptorId::Lbp => "LBP",
            DescriptorId::Mlbp => "mLBP",
            DescriptorId::Ltp => "LTP",
            DescriptorId::Lpq => "LPQ",
            DescriptorId::Hog => "HOG",
            DescriptorId::Phog => "PHOG",
            DescriptorId::Embedding => "EMBEDDING",
        }
    }

    /// True for descriptors whose values are normalized code histograms.
    pub fn is_histogram(self) -> bool {
        matches!(
            self,
            DescriptorId::Lbp | DescriptorId::Mlbp | DescriptorId::Ltp | DescriptorId::Lpq
        )
    }

    pub fn is_handcrafted(self) -> bool {
        self != DescriptorId::Embedding
    }

    fn handcrafted_names() -> String {
        Self::HANDCRAFTED
            .iter()
            .map(|d| d.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for DescriptorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for DescriptorId {
    type Err = DescriptorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let id = match s.trim().to_ascii_uppercase().as_str() {
            "LBP" => DescriptorId::Lbp,
            "MLBP" => DescriptorId::Mlbp,
            "LTP" => DescriptorId::Ltp,
            "LPQ" => DescriptorId::Lpq,
            "HOG" => DescriptorId::Hog,
            "PHOG" => DescriptorId::Phog,
            "EMBEDDING" => DescriptorId::Embedding,
            _ => {
                return Err(DescriptorError::Unknown {
                    name: s.to_string(),
                    valid: Self::handcrafted_names(),
                })
            }
        };
        Ok(id)
    }
}

/// A finite real-valued descriptor or embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    descriptor: DescriptorId,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(descriptor: DescriptorId, values: Vec<f64>) -> Result<Self, DescriptorError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DescriptorError::NonFinite(i));
        }
        Ok(Self { descriptor, values })
    }

    pub fn descriptor(&self) -> DescriptorId {
        self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Multiplies every component by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            descriptor: self.descriptor,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Tunables shared by all extractors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescriptorParams {
    pub block_size: usize,
    /// LBP-family neighbourhood side length.
    pub window: usize,
    pub ltp_threshold: u8,
    pub lpq_window: usize,
    pub hog_cell: usize,
    /// Unsigned orientation bins spanning `[0°, 180°)`.
    pub hog_bins: usize,
    pub phog_levels: usize,
    pub phog_bins: usize,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            block_size: 32,
            window: 3,
            ltp_threshold: 5,
            lpq_window: 3,
            hog_cell: 8,
            hog_bins: 9,
            phog_levels: 3,
            phog_bins: 8,
        }
    }
}

impl DescriptorParams {
    pub fn validate(&self) -> Result<(), DescriptorError> {
        let odd = |name: &str, v: usize| {
            if v < 3 || v % 2 == 0 {
                Err(DescriptorError::InvalidParams(format!(
                    "{name} must be odd and at least 3, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        odd("window", self.window)?;
        odd("lpq_window", self.lpq_window)?;
        for (name, v) in [
            ("block_size", self.block_size),
            ("hog_cell", self.hog_cell),
            ("hog_bins", self.hog_bins),
            ("phog_bins", self.phog_bins),
        ] {
            if v == 0 {
                return Err(DescriptorError::InvalidParams(format!(
                    "{name} must be at least 1"
                )));
            }
        }
        if self.phog_levels > 16 {
            return Err(DescriptorError::InvalidParams(format!(
                "phog_levels {} is unreasonably deep",
                self.phog_levels
            )));
        }
        Ok(())
    }

    /// Closed-form output length of `descriptor` on a `width`x`height` image.
    pub fn output_dim(&self, descriptor: DescriptorId, width: usize, height: usize) -> usize {
        let blocks = (width / self.block_size) * (height / self.block_size);
        match descriptor {
            DescriptorId::Lbp | DescriptorId::Mlbp | DescriptorId::Lpq => 256 * blocks,
            DescriptorId::Ltp => 2 * 256 * blocks,
            DescriptorId::Hog => {
                self.hog_bins * (width / self.hog_cell) * (height / self.hog_cell)
            }
            DescriptorId::Phog => {
                self.phog_bins * (0..=self.phog_levels).map(|l| 1usize << (2 * l)).sum::<usize>()
            }
            DescriptorId::Embedding => 0,
        }
    }
}

/// Runs the extractor named by `descriptor`.
pub fn extract(
    descriptor: DescriptorId,
    img: &GrayImage,
    params: &DescriptorParams,
) -> Result<FeatureVector, DescriptorError> {
    match descriptor {
        DescriptorId::Lbp => extract_lbp(img, params),
        DescriptorId::Mlbp => extract_mlbp(img, params),
        DescriptorId::Ltp => extract_ltp(img, params),
        DescriptorId::Lpq => extract_lpq(img, params),
        DescriptorId::Hog => extract_hog(img, params),
        DescriptorId::Phog => extract_phog(img, params),
        DescriptorId::Embedding => Err(DescriptorError::InvalidParams(
            "EMBEDDING vectors are loaded from file, not extracted".into(),
        )),
    }
}

/// Extracts every image on a pool of `jobs` workers. Output order follows
/// input order and values do not depend on the worker count.
pub fn extract_batch(
    descriptor: DescriptorId,
    images: &[GrayImage],
    params: &DescriptorParams,
    jobs: usize,
) -> Vec<Result<FeatureVector, DescriptorError>> {
    let run = || {
        images
            .par_iter()
            .map(|img| extract(descriptor, img, params))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => images.iter().map(|img| extract(descriptor, img, params)).collect(),
    }
}

/// Per-pixel 8-bit codes; only pixels at least `margin` away from every
/// border carry a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMap {
    pub width: usize,
    pub height: usize,
    pub margin: usize,
    codes: Vec<u8>,
}

impl CodeMap {
    pub(crate) fn new(width: usize, height: usize, margin: usize) -> Self {
        Self {
            width,
            height,
            margin,
            codes: vec![0; width * height],
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, x: usize, y: usize, code: u8) {
        self.codes[y * self.width + x] = code;
    }

    #[inline]
    pub fn is_coded(&self, x: usize, y: usize) -> bool {
        x >= self.margin
            && y >= self.margin
            && x + self.margin < self.width
            && y + self.margin < self.height
    }

    /// Code at `(x, y)`, `None` in the uncoded border.
    pub fn get(&self, x: usize, y: usize) -> Option<u8> {
        self.is_coded(x, y).then(|| self.codes[y * self.width + x])
    }

    /// Concatenated 256-bin histograms, one per block, each L1-normalized.
    pub fn block_histograms(&self, block_size: usize) -> Vec<f64> {
        let rows = self.height / block_size;
        let cols = self.width / block_size;
        let mut out = vec![0.0; rows * cols * 256];
        for r in 0..rows {
            for c in 0..cols {
                let hist = &mut out[(r * cols + c) * 256..][..256];
                let mut count = 0usize;
                for y in r * block_size..(r + 1) * block_size {
                    for x in c * block_size..(c + 1) * block_size {
                        if let Some(code) = self.get(x, y) {
                            hist[code as usize] += 1.0;
                            count += 1;
                        }
                    }
                }
                if count > 0 {
                    let n = count as f64;
                    hist.iter_mut().for_each(|h| *h /= n);
                }
            }
        }
        out
    }
}

/// Shared precondition of the block-histogram descriptors.
pub(crate) fn check_block_input(
    img: &GrayImage,
    block_size: usize,
    window: usize,
) -> Result<(), DescriptorError> {
    crate::imaging::partition_blocks(img, block_size)?;
    if img.width() < window || img.height() < window {
        return Err(ImagingError::Dimension(format!(
            "{}x{} image is smaller than the {window}x{window} window",
            img.width(),
            img.height()
        ))
        .into());
    }
    Ok(())
}
