//! Pairwise match scores and multi-template score fusion.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::{DescriptorId, FeatureVector};

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("cosine similarity is undefined for a zero-norm vector")]
    DegenerateVector,
    #[error("invalid argument: {0}")]
    Argument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Higher is a better match.
    Similarity,
    /// Lower is a better match.
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchScore {
    pub value: f64,
    pub polarity: Polarity,
}

impl MatchScore {
    /// Orders `self` before `other` when it is the better match.
    pub fn better_first(&self, other: &MatchScore) -> std::cmp::Ordering {
        match self.polarity {
            Polarity::Similarity => other.value.total_cmp(&self.value),
            Polarity::Distance => self.value.total_cmp(&other.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cosine,
    Euclidean,
}

impl Metric {
    pub fn polarity(self) -> Polarity {
        match self {
            Metric::Cosine => Polarity::Similarity,
            Metric::Euclidean => Polarity::Distance,
        }
    }

    /// Cosine for deep embeddings, Euclidean for handcrafted descriptors.
    pub fn default_for(descriptor: DescriptorId) -> Metric {
        if descriptor.is_handcrafted() {
            Metric::Euclidean
        } else {
            Metric::Cosine
        }
    }

    pub fn score(self, u: &FeatureVector, v: &FeatureVector) -> Result<MatchScore, MatchError> {
        match self {
            Metric::Cosine => cosine_similarity(u, v),
            Metric::Euclidean => euclidean_distance(u, v),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = MatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosine" => Ok(Metric::Cosine),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(MatchError::Argument(format!(
                "unknown metric {other:?}; valid metrics: cosine, euclidean"
            ))),
        }
    }
}

fn check_dims(u: &[f64], v: &[f64]) -> Result<(), MatchError> {
    if u.len() != v.len() {
        return Err(MatchError::Dimension(u.len(), v.len()));
    }
    Ok(())
}

/// Cosine of the angle between two raw slices, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, MatchError> {
    check_dims(u, v)?;
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(MatchError::DegenerateVector);
    }
    Ok((dot / (uu * vv).sqrt()).clamp(-1.0, 1.0))
}

pub fn euclidean(u: &[f64], v: &[f64]) -> Result<f64, MatchError> {
    check_dims(u, v)?;
    Ok(u
        .iter()
        .zip(v)
        .map(|(&a, &b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt())
}

pub fn cosine_similarity(u: &FeatureVector, v: &FeatureVector) -> Result<MatchScore, MatchError> {
    Ok(MatchScore {
        value: cosine(u.values(), v.values())?,
        polarity: Polarity::Similarity,
    })
}

pub fn euclidean_distance(u: &FeatureVector, v: &FeatureVector) -> Result<MatchScore, MatchError> {
    Ok(MatchScore {
        value: euclidean(u.values(), v.values())?,
        polarity: Polarity::Distance,
    })
}

/// Arithmetic mean of same-polarity scores.
///
/// Values are summed in sorted order so the result is bit-identical for any
/// permutation of the input.
pub fn fuse_gallery_scores(scores: &[MatchScore]) -> Result<MatchScore, MatchError> {
    let first = scores
        .first()
        .ok_or_else(|| MatchError::Argument("cannot fuse an empty score list".into()))?;
    if scores.iter().any(|s| s.polarity != first.polarity) {
        return Err(MatchError::Argument(
            "cannot fuse similarity and distance scores together".into(),
        ));
    }
    let mut values: Vec<f64> = scores.iter().map(|s| s.value).collect();
    values.sort_by(f64::total_cmp);
    let sum: f64 = values.iter().sum();
    Ok(MatchScore {
        value: sum / scores.len() as f64,
        polarity: first.polarity,
    })
}
