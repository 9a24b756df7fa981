//! Per-sample extraction timing.
//!
//! The timed region is one extractor call on one already-decoded image, run
//! on the calling thread. Background load on the host perturbs the numbers;
//! nothing here pins threads or cores.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::FeatureVector;
use crate::imaging::GrayImage;

pub const DEFAULT_WARMUP: usize = 3;
pub const DEFAULT_REPETITIONS: usize = 10;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Reduces an extractor's output to a number the optimizer cannot discard.
pub trait Checksum {
    fn checksum(&self) -> f64;
}

impl Checksum for FeatureVector {
    fn checksum(&self) -> f64 {
        self.values().iter().sum()
    }
}

impl Checksum for Vec<f64> {
    fn checksum(&self) -> f64 {
        self.iter().sum()
    }
}

impl Checksum for f64 {
    fn checksum(&self) -> f64 {
        *self
    }
}

impl Checksum for () {
    fn checksum(&self) -> f64 {
        0.0
    }
}

impl<T: Checksum, E> Checksum for Result<T, E> {
    fn checksum(&self) -> f64 {
        self.as_ref().map(Checksum::checksum).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub extractor_name: String,
    /// Parameter count in millions, when the extractor is a registered model.
    pub params_millions: Option<f64>,
    pub host: String,
    pub n_samples: usize,
    pub warmup_runs: usize,
    pub repetitions: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub std_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Summary statistics over `samples` (milliseconds). Sample standard
/// deviation, zero for a single sample.
fn summarize(samples: &mut [f64]) -> (f64, f64, f64, f64, f64) {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    };
    let std = if n > 1 {
        (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    (mean, median, std, samples[0], samples[n - 1])
}

/// Times `extractor` over every image of `corpus`, `repetitions` times, after
/// `warmup` untimed passes. One sample per (image, repetition).
pub fn benchmark_extractor<F, T>(
    name: &str,
    mut extractor: F,
    corpus: &[GrayImage],
    warmup: usize,
    repetitions: usize,
) -> Result<TimingReport, BenchError>
where
    F: FnMut(&GrayImage) -> T,
    T: Checksum,
{
    if corpus.is_empty() {
        return Err(BenchError::Argument("benchmark corpus is empty".into()));
    }
    if repetitions == 0 {
        return Err(BenchError::Argument("repetitions must be at least 1".into()));
    }
    let mut checksum = 0.0;
    for _ in 0..warmup {
        for img in corpus {
            checksum += extractor(black_box(img)).checksum();
        }
    }
    let mut samples = Vec::with_capacity(corpus.len() * repetitions);
    for _ in 0..repetitions {
        for img in corpus {
            let start = Instant::now();
            let out = extractor(black_box(img));
            let elapsed = start.elapsed();
            checksum += black_box(out).checksum();
            samples.push(elapsed.as_secs_f64() * 1e3);
        }
    }
    black_box(checksum);

    let n_samples = samples.len();
    let (mean_ms, median_ms, std_ms, min_ms, max_ms) = summarize(&mut samples);
    Ok(TimingReport {
        extractor_name: name.to_string(),
        params_millions: None,
        host: String::new(),
        n_samples,
        warmup_runs: warmup,
        repetitions,
        mean_ms,
        median_ms,
        std_ms,
        min_ms,
        max_ms,
    })
}

#[derive(Serialize)]
struct JsonTable<'a> {
    schema_version: u32,
    rows: &'a [TimingReport],
}

/// Timing table as JSON, `{"schema_version": 1, "rows": [...]}`.
pub fn write_reports_json<W: Write>(mut writer: W, reports: &[TimingReport]) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(
        &mut writer,
        &JsonTable {
            schema_version: REPORT_SCHEMA_VERSION,
            rows: reports,
        },
    )?;
    writeln!(writer)?;
    Ok(())
}

pub const CSV_COLUMNS: [&str; 12] = [
    "schema_version",
    "model",
    "params_m",
    "host",
    "extraction_time_ms",
    "median_ms",
    "std_ms",
    "min_ms",
    "max_ms",
    "n_samples",
    "warmup",
    "repetitions",
];

/// Timing table as CSV: model, parameter count, host and mean extraction
/// time first, then the remaining statistics.
pub fn write_reports_csv<W: Write>(writer: W, reports: &[TimingReport]) -> Result<(), BenchError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(CSV_COLUMNS)?;
    for r in reports {
        csv.write_record([
            REPORT_SCHEMA_VERSION.to_string(),
            r.extractor_name.clone(),
            r.params_millions.map(|p| p.to_string()).unwrap_or_default(),
            r.host.clone(),
            r.mean_ms.to_string(),
            r.median_ms.to_string(),
            r.std_ms.to_string(),
            r.min_ms.to_string(),
            r.max_ms.to_string(),
            r.n_samples.to_string(),
            r.warmup_runs.to_string(),
            r.repetitions.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}
