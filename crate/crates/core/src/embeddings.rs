//! Feature files and the deep-model metadata table.
//!
//! Two CSV layouts share one reader. Embedding files:
//!
//! ```text
//! subject_id,image_id,condition,dim
//! s01,img0001,office,512,0.013,-0.27,...
//! ```
//!
//! Feature files written by the extractor add a descriptor column:
//!
//! ```text
//! subject_id,image_id,condition,descriptor_id,dim
//! s01,img0001,office,LBP,12544,0.0,0.0031,...
//! ```
//!
//! Each row carries exactly `dim` values after the fixed columns. Values are
//! written in shortest round-trip decimal form and records are sorted by
//! `(subject_id, image_id, condition)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::descriptors::{DescriptorId, FeatureVector};
use crate::identification::{Condition, LabeledFeature};

pub const EMBEDDING_DIM: usize = 512;

const EMBEDDING_HEADER: [&str; 4] = ["subject_id", "image_id", "condition", "dim"];
const FEATURE_HEADER: [&str; 5] = ["subject_id", "image_id", "condition", "descriptor_id", "dim"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Record { line: u64, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

fn at_line(line: u64, message: impl Into<String>) -> FormatError {
    FormatError::Record {
        line,
        message: message.into(),
    }
}

/// Loads a 512-dimensional (or `expected_dim`) embedding file.
pub fn load_embeddings(
    path: impl AsRef<Path>,
    expected_dim: usize,
) -> Result<Vec<LabeledFeature>, FormatError> {
    load_features(path, Some(expected_dim))
}

/// Loads either layout; `expected_dim` of `None` accepts whatever dimension
/// the first record declares.
pub fn load_features(
    path: impl AsRef<Path>,
    expected_dim: Option<usize>,
) -> Result<Vec<LabeledFeature>, FormatError> {
    read_features(BufReader::new(File::open(path)?), expected_dim)
}

pub fn read_features<R: Read>(
    reader: R,
    expected_dim: Option<usize>,
) -> Result<Vec<LabeledFeature>, FormatError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();

    let header = match records.next() {
        Some(h) => h?,
        None => return Err(at_line(1, "missing header")),
    };
    let fields: Vec<&str> = header.iter().map(str::trim).collect();
    let has_descriptor = if fields == EMBEDDING_HEADER {
        false
    } else if fields == FEATURE_HEADER {
        true
    } else {
        return Err(at_line(
            1,
            format!(
                "expected header `{}` or `{}`",
                EMBEDDING_HEADER.join(","),
                FEATURE_HEADER.join(",")
            ),
        ));
    };
    let fixed = if has_descriptor { 5 } else { 4 };

    let mut dim = expected_dim;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() < fixed {
            return Err(at_line(line, format!("expected at least {fixed} fields, got {}", record.len())));
        }
        let subject_id = record[0].trim().to_string();
        let image_id = record[1].trim().to_string();
        if subject_id.is_empty() || image_id.is_empty() {
            return Err(at_line(line, "subject_id and image_id must be non-empty"));
        }
        let condition: Condition = record[2]
            .parse()
            .map_err(|e: crate::identification::IdentificationError| at_line(line, e.to_string()))?;
        let descriptor = if has_descriptor {
            record[3]
                .parse::<DescriptorId>()
                .map_err(|e| at_line(line, e.to_string()))?
        } else {
            DescriptorId::Embedding
        };
        let declared: usize = record[fixed - 1]
            .trim()
            .parse()
            .map_err(|_| at_line(line, format!("invalid dim {:?}", &record[fixed - 1])))?;
        match dim {
            Some(d) if d != declared => {
                return Err(at_line(
                    line,
                    format!("record for ({subject_id}, {image_id}) declares dim {declared}, expected {d}"),
                ))
            }
            None => dim = Some(declared),
            _ => {}
        }
        let n_values = record.len() - fixed;
        if n_values != declared {
            return Err(at_line(
                line,
                format!("record for ({subject_id}, {image_id}) has {n_values} values, declared dim {declared}"),
            ));
        }
        let mut values = Vec::with_capacity(declared);
        for (i, field) in record.iter().skip(fixed).enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| at_line(line, format!("value {i} ({field:?}) is not a number")))?;
            if !v.is_finite() {
                return Err(at_line(line, format!("value {i} is not finite")));
            }
            values.push(v);
        }
        if !seen.insert((subject_id.clone(), image_id.clone(), condition)) {
            return Err(at_line(
                line,
                format!("duplicate record ({subject_id}, {image_id}, {condition})"),
            ));
        }
        let feature = FeatureVector::new(descriptor, values).map_err(|e| at_line(line, e.to_string()))?;
        out.push(LabeledFeature {
            subject_id,
            image_id,
            condition,
            feature,
        });
    }
    Ok(out)
}

fn sorted(features: &[LabeledFeature]) -> Vec<&LabeledFeature> {
    let mut refs: Vec<&LabeledFeature> = features.iter().collect();
    refs.sort_by(|a, b| {
        (&a.subject_id, &a.image_id, a.condition).cmp(&(&b.subject_id, &b.image_id, b.condition))
    });
    refs
}

fn write_rows<W: Write>(
    writer: W,
    features: &[LabeledFeature],
    with_descriptor: bool,
) -> Result<(), FormatError> {
    let mut csv = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    if with_descriptor {
        csv.write_record(FEATURE_HEADER)?;
    } else {
        csv.write_record(EMBEDDING_HEADER)?;
    }
    for f in sorted(features) {
        let mut row = vec![
            f.subject_id.clone(),
            f.image_id.clone(),
            f.condition.as_str().to_string(),
        ];
        if with_descriptor {
            row.push(f.feature.descriptor().as_str().to_string());
        }
        row.push(f.feature.dim().to_string());
        row.extend(f.feature.values().iter().map(|v| v.to_string()));
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Writes the embedding layout (no descriptor column).
pub fn write_embeddings<W: Write>(writer: W, features: &[LabeledFeature]) -> Result<(), FormatError> {
    write_rows(writer, features, false)
}

/// Writes the feature layout, including the descriptor column.
pub fn write_features<W: Write>(writer: W, features: &[LabeledFeature]) -> Result<(), FormatError> {
    write_rows(writer, features, true)
}

pub fn save_features(path: impl AsRef<Path>, features: &[LabeledFeature]) -> Result<(), FormatError> {
    let file = BufWriter::new(File::create(path)?);
    write_features(file, features)
}

pub fn save_embeddings(path: impl AsRef<Path>, features: &[LabeledFeature]) -> Result<(), FormatError> {
    let file = BufWriter::new(File::create(path)?);
    write_embeddings(file, features)
}

/// A network that produced an embedding file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub params_millions: f64,
}

/// Parameter counts of the CNNs whose embeddings this toolkit evaluates.
pub fn model_registry() -> Vec<ModelInfo> {
    [
        ("ResNet-50", 23.5),
        ("VGG-16", 138.0),
        ("MobileNetV2", 3.4),
        ("EfficientNet-B0", 5.3),
        ("LightCNN-29", 12.6),
        ("LightCNN-9", 5.5),
    ]
    .into_iter()
    .map(|(name, params_millions)| ModelInfo {
        name,
        params_millions,
    })
    .collect()
}

/// Case-insensitive registry lookup.
pub fn lookup_model(name: &str) -> Option<ModelInfo> {
    model_registry()
        .into_iter()
        .find(|m| m.name.eq_ignore_ascii_case(name.trim()))
}
