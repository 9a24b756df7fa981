//! `faceid` batch frontend.
//!
//! Exit codes: `0` success, `1` internal error, `2` usage or validation error.
//!
//! Image datasets are laid out as `<root>/<condition>/<subject_id>/<image_id>.(png|jpg)`
//! where `<condition>` is `office`, `day` or `other`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{self, benchmark_extractor, TimingReport};
use crate::descriptors::{extract, DescriptorId, DescriptorParams};
use crate::embeddings::{self, load_features};
use crate::identification::{
    compute_cmc_with_jobs, enroll_gallery, sample_probes, Condition, LabeledFeature,
};
use crate::imaging::{load_gray, resize_bilinear, GrayImage, DEFAULT_FACE_SIZE};
use crate::matching::Metric;
use crate::synth::{self, SynthConfig};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn internal(msg: impl std::fmt::Display) -> CliError {
    CliError::Internal(msg.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. Loaded from a TOML key-value file; command
/// line flags override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub descriptor: DescriptorId,
    pub params: DescriptorParams,
    /// Defaults to cosine for embeddings and Euclidean for handcrafted features.
    pub metric: Option<Metric>,
    /// Square side every image is resized to before extraction; 0 keeps the
    /// decoded size.
    pub resize: usize,
    pub gallery_per_subject: usize,
    pub probes_per_subject: usize,
    pub gallery_seed: u64,
    pub probe_seed: u64,
    pub max_rank: usize,
    pub gallery_condition: Option<Condition>,
    pub probe_condition: Option<Condition>,
    /// Drop probe samples whose (subject, image, condition) is enrolled.
    pub exclude_gallery_from_probes: bool,
    /// Extra `<subject>/<image>` roots keyed by condition, merged with `--input`.
    pub dataset_roots: BTreeMap<Condition, PathBuf>,
    pub format: Format,
    pub host: String,
    pub warmup: usize,
    pub repetitions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            descriptor: DescriptorId::Lbp,
            params: DescriptorParams::default(),
            metric: None,
            resize: DEFAULT_FACE_SIZE,
            gallery_per_subject: crate::identification::DEFAULT_GALLERY_PER_SUBJECT,
            probes_per_subject: crate::identification::DEFAULT_PROBES_PER_SUBJECT,
            gallery_seed: crate::identification::DEFAULT_GALLERY_SEED,
            probe_seed: crate::identification::DEFAULT_PROBE_SEED,
            max_rank: crate::identification::DEFAULT_MAX_RANK,
            gallery_condition: None,
            probe_condition: None,
            exclude_gallery_from_probes: false,
            dataset_roots: BTreeMap::new(),
            format: Format::Csv,
            host: "unlabelled-host".into(),
            warmup: bench::DEFAULT_WARMUP,
            repetitions: bench::DEFAULT_REPETITIONS,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate().map_err(usage)?;
        for (name, v) in [
            ("gallery_per_subject", self.gallery_per_subject),
            ("probes_per_subject", self.probes_per_subject),
            ("max_rank", self.max_rank),
            ("repetitions", self.repetitions),
        ] {
            if v == 0 {
                return Err(usage(format!("{name} must be at least 1")));
            }
        }
        for (condition, root) in &self.dataset_roots {
            if !root.is_dir() {
                return Err(usage(format!(
                    "dataset root for {condition} does not exist: {}",
                    root.display()
                )));
            }
        }
        Ok(())
    }

    pub fn metric_for(&self, descriptor: DescriptorId) -> Metric {
        self.metric.unwrap_or_else(|| Metric::default_for(descriptor))
    }
}

#[derive(Debug, Parser)]
#[command(name = "faceid", version, about = "Face descriptor extraction, rank-k identification and timing")]
pub struct Cli {
    /// TOML key-value run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for extraction and probe scoring.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for gallery sampling (probe sampling uses seed + 1) or corpus generation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract one descriptor from every image of a dataset tree.
    Extract(ExtractArgs),
    /// Rank-k identification of a probe feature file against a gallery file.
    Evaluate(EvaluateArgs),
    /// Per-sample extraction time of one or more descriptors.
    Bench(BenchArgs),
    /// Write a seeded synthetic dataset tree.
    SynthDataset(SynthArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub descriptor: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub probes: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metric: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated descriptor names.
    #[arg(long, value_delimiter = ',', default_value = "LBP,mLBP,HOG,PHOG,LPQ,LTP")]
    pub descriptors: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long)]
    pub warmup: Option<usize>,
    #[arg(long)]
    pub repetitions: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub subjects: usize,
    /// Images per subject per condition.
    #[arg(long, default_value_t = 32)]
    pub images: usize,
    #[arg(long, default_value_t = 224)]
    pub size: usize,
    #[arg(long, default_value_t = 12.0)]
    pub noise: f64,
    /// Brightness offset applied to Day images.
    #[arg(long, default_value_t = 40.0)]
    pub shift: f64,
    #[arg(long, value_delimiter = ',', default_value = "office,day")]
    pub conditions: Vec<String>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.gallery_seed = seed;
        config.probe_seed = seed.wrapping_add(1);
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    if cli.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    config.validate()?;
    match cli.command {
        Command::Extract(args) => {
            if let Some(name) = &args.descriptor {
                config.descriptor = name.parse().map_err(usage)?;
            }
            cmd_extract(&config, args.input.as_deref(), &args.out, cli.jobs)
        }
        Command::Evaluate(args) => {
            if let Some(m) = &args.metric {
                config.metric = Some(m.parse().map_err(usage)?);
            }
            cmd_evaluate(&config, &args.gallery, &args.probes, &args.out, cli.jobs)
        }
        Command::Bench(args) => {
            if let Some(host) = args.host {
                config.host = host;
            }
            if let Some(w) = args.warmup {
                config.warmup = w;
            }
            if let Some(r) = args.repetitions {
                config.repetitions = r;
            }
            config.validate()?;
            cmd_bench(&config, &args.input, &args.descriptors, &args.out)
        }
        Command::SynthDataset(args) => cmd_synth(&args, cli.seed.unwrap_or(7)),
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        .unwrap_or(false)
}

fn sorted_entries(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ImageEntry {
    subject_id: String,
    image_id: String,
    condition: Condition,
    path: PathBuf,
}

/// Images under `<root>/<subject>/<image>` for one condition.
fn scan_condition_root(
    root: &Path,
    condition: Condition,
    out: &mut Vec<ImageEntry>,
    warnings: &mut usize,
) -> std::io::Result<()> {
    for subject_dir in sorted_entries(root)? {
        if !subject_dir.is_dir() {
            continue;
        }
        let subject_id = subject_dir.file_name().unwrap().to_string_lossy().into_owned();
        for file in sorted_entries(&subject_dir)? {
            if !file.is_file() || !is_image(&file) {
                continue;
            }
            let Some(stem) = file.file_stem().map(|s| s.to_string_lossy().into_owned()) else {
                continue;
            };
            if out
                .iter()
                .any(|e| e.subject_id == subject_id && e.image_id == stem && e.condition == condition)
            {
                warn!("skipping {}: duplicate image id {stem}", file.display());
                *warnings += 1;
                continue;
            }
            out.push(ImageEntry {
                subject_id: subject_id.clone(),
                image_id: stem,
                condition,
                path: file,
            });
        }
    }
    Ok(())
}

/// All images of a `<condition>/<subject>/<image>` tree plus configured roots,
/// sorted by `(subject, image, condition)`.
fn scan_dataset(
    input: Option<&Path>,
    roots: &BTreeMap<Condition, PathBuf>,
    warnings: &mut usize,
) -> Result<Vec<ImageEntry>, CliError> {
    let mut entries = Vec::new();
    if let Some(input) = input {
        if !input.is_dir() {
            return Err(usage(format!("input directory does not exist: {}", input.display())));
        }
        for cond_dir in sorted_entries(input).map_err(internal)? {
            if !cond_dir.is_dir() {
                continue;
            }
            let name = cond_dir.file_name().unwrap().to_string_lossy().into_owned();
            match name.parse::<Condition>() {
                Ok(condition) => scan_condition_root(&cond_dir, condition, &mut entries, warnings)
                    .map_err(internal)?,
                Err(_) => {
                    warn!("skipping {}: not a condition directory", cond_dir.display());
                    *warnings += 1;
                }
            }
        }
    }
    for (&condition, root) in roots {
        scan_condition_root(root, condition, &mut entries, warnings).map_err(internal)?;
    }
    entries.sort();
    Ok(entries)
}

fn preprocess(img: GrayImage, resize: usize) -> Result<GrayImage, crate::imaging::ImagingError> {
    if resize == 0 {
        Ok(img)
    } else {
        resize_bilinear(&img, resize, resize)
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(internal)?;
    Ok(pool.install(f))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(internal)?;
    }
    fs::write(path, bytes).map_err(|e| internal(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_extract(
    config: &RunConfig,
    input: Option<&Path>,
    out: &Path,
    jobs: usize,
) -> Result<(), CliError> {
    if !config.descriptor.is_handcrafted() {
        return Err(usage("extract needs an image descriptor, not EMBEDDING"));
    }
    if input.is_none() && config.dataset_roots.is_empty() {
        return Err(usage("extract needs --input or dataset_roots in the config"));
    }
    let mut warnings = 0usize;
    let entries = scan_dataset(input, &config.dataset_roots, &mut warnings)?;
    if entries.is_empty() {
        return Err(usage("no images found in the input dataset"));
    }

    let results: Vec<Result<LabeledFeature, String>> = with_pool(jobs, || {
        entries
            .par_iter()
            .map(|e| {
                let img = load_gray(&e.path).map_err(|err| err.to_string())?;
                let img = preprocess(img, config.resize).map_err(|err| err.to_string())?;
                let feature = extract(config.descriptor, &img, &config.params)
                    .map_err(|err| format!("{}: {err}", e.path.display()))?;
                Ok(LabeledFeature {
                    subject_id: e.subject_id.clone(),
                    image_id: e.image_id.clone(),
                    condition: e.condition,
                    feature,
                })
            })
            .collect()
    })?;

    let mut records = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(f) => records.push(f),
            Err(msg) => {
                warn!("skipping image: {msg}");
                warnings += 1;
            }
        }
    }
    if records.is_empty() {
        return Err(usage(format!(
            "none of the {} images could be processed ({warnings} warnings)",
            entries.len()
        )));
    }
    let mut buf = Vec::new();
    embeddings::write_features(&mut buf, &records).map_err(internal)?;
    write_output(out, &buf)?;
    eprintln!(
        "extract: {} {} records, {warnings} warnings -> {}",
        records.len(),
        config.descriptor,
        out.display()
    );
    Ok(())
}

/// One row of an identification table. Rates are percentages rounded to two
/// decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub condition_pair: String,
    pub rank1: f64,
    pub rank5: Option<f64>,
    pub rank10: Option<f64>,
    pub cmc: Vec<f64>,
    pub n_probes: usize,
    pub gallery_subjects: usize,
    pub gallery_templates: usize,
    pub probe_shortfall_subjects: usize,
    pub gallery_seed: u64,
    pub probe_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub descriptor: DescriptorId,
    pub metric: Metric,
    pub rows: Vec<EvalRow>,
}

fn percent(rate: f64) -> f64 {
    (rate * 10_000.0).round() / 100.0
}

fn fmt_percent(v: Option<f64>) -> String {
    v.map(|p| format!("{p:.2}")).unwrap_or_default()
}

impl EvalReport {
    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = serde_json::to_vec_pretty(self).map_err(internal)?;
        buf.push(b'\n');
        Ok(buf)
    }

    /// CSV with the CMC curve as a `;`-separated list in the last column.
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record([
            "schema_version",
            "condition_pair",
            "descriptor",
            "metric",
            "rank1",
            "rank5",
            "rank10",
            "n_probes",
            "gallery_subjects",
            "gallery_templates",
            "probe_shortfall_subjects",
            "gallery_seed",
            "probe_seed",
            "cmc",
        ])
        .map_err(internal)?;
        for r in &self.rows {
            csv.write_record([
                self.schema_version.to_string(),
                r.condition_pair.clone(),
                self.descriptor.to_string(),
                self.metric.to_string(),
                fmt_percent(Some(r.rank1)),
                fmt_percent(r.rank5),
                fmt_percent(r.rank10),
                r.n_probes.to_string(),
                r.gallery_subjects.to_string(),
                r.gallery_templates.to_string(),
                r.probe_shortfall_subjects.to_string(),
                r.gallery_seed.to_string(),
                r.probe_seed.to_string(),
                r.cmc.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(";"),
            ])
            .map_err(internal)?;
        }
        csv.into_inner().map_err(internal)
    }
}

/// Single condition shared by every feature, if any.
fn common_condition(features: &[LabeledFeature]) -> Option<Condition> {
    let first = features.first()?.condition;
    features.iter().all(|f| f.condition == first).then_some(first)
}

fn side_label(configured: Option<Condition>, features: &[LabeledFeature]) -> &'static str {
    configured
        .or_else(|| common_condition(features))
        .map(Condition::title)
        .unwrap_or("Mixed")
}

/// Builds the identification report without writing it.
pub fn evaluate_files(
    config: &RunConfig,
    gallery_path: &Path,
    probe_path: &Path,
    jobs: usize,
) -> Result<EvalReport, CliError> {
    let load = |p: &Path| {
        load_features(p, None).map_err(|e| usage(format!("{}: {e}", p.display())))
    };
    let mut gallery_features = load(gallery_path)?;
    let mut probe_features = load(probe_path)?;
    let shape = |f: &[LabeledFeature]| f.first().map(|x| (x.feature.descriptor(), x.feature.dim()));
    let (descriptor, dim) = shape(&gallery_features).ok_or_else(|| usage("gallery file has no records"))?;
    let probe_shape = shape(&probe_features).ok_or_else(|| usage("probe file has no records"))?;
    if probe_shape != (descriptor, dim) {
        return Err(usage(format!(
            "descriptor mismatch: gallery is {descriptor} dim {dim}, probes are {} dim {}",
            probe_shape.0, probe_shape.1
        )));
    }

    if let Some(c) = config.gallery_condition {
        gallery_features.retain(|f| f.condition == c);
    }
    if let Some(c) = config.probe_condition {
        probe_features.retain(|f| f.condition == c);
    }
    if gallery_features.is_empty() || probe_features.is_empty() {
        return Err(usage("no records left after condition filtering"));
    }

    let metric = config.metric_for(descriptor);
    let gallery = enroll_gallery(&gallery_features, config.gallery_per_subject, config.gallery_seed)
        .map_err(usage)?;
    let exclude = config.exclude_gallery_from_probes.then_some(&gallery);
    let probes = sample_probes(&probe_features, config.probes_per_subject, config.probe_seed, exclude)
        .map_err(usage)?;
    let cmc = compute_cmc_with_jobs(&probes.probes, &gallery, metric, config.max_rank, jobs)
        .map_err(usage)?;
    debug_assert!(cmc.is_monotone());

    let row = EvalRow {
        condition_pair: format!(
            "{} vs. {}",
            side_label(config.gallery_condition, &gallery_features),
            side_label(config.probe_condition, &probe_features)
        ),
        rank1: percent(cmc.accuracy[0]),
        rank5: cmc.rank(5).map(percent),
        rank10: cmc.rank(10).map(percent),
        cmc: cmc.accuracy.iter().map(|&a| percent(a)).collect(),
        n_probes: cmc.n_probes,
        gallery_subjects: gallery.subject_count(),
        gallery_templates: gallery.template_count(),
        probe_shortfall_subjects: probes.shortfalls.len(),
        gallery_seed: config.gallery_seed,
        probe_seed: config.probe_seed,
    };
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        descriptor,
        metric,
        rows: vec![row],
    })
}

pub fn cmd_evaluate(
    config: &RunConfig,
    gallery_path: &Path,
    probe_path: &Path,
    out: &Path,
    jobs: usize,
) -> Result<(), CliError> {
    let report = evaluate_files(config, gallery_path, probe_path, jobs)?;
    let bytes = match config.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    write_output(out, &bytes)?;
    let row = &report.rows[0];
    eprintln!(
        "evaluate: {} {} rank-1 {:.2}% over {} probes -> {}",
        report.descriptor,
        row.condition_pair,
        row.rank1,
        row.n_probes,
        out.display()
    );
    Ok(())
}

/// Every decodable image below `dir`, recursively, in path order.
fn collect_images(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in sorted_entries(dir)? {
        if entry.is_dir() {
            collect_images(&entry, out)?;
        } else if is_image(&entry) {
            out.push(entry);
        }
    }
    Ok(())
}

pub fn parse_descriptor_list(names: &[String]) -> Result<Vec<DescriptorId>, CliError> {
    names
        .iter()
        .filter(|n| !n.trim().is_empty())
        .map(|n| {
            let id: DescriptorId = n.parse().map_err(usage)?;
            if id.is_handcrafted() {
                Ok(id)
            } else {
                Err(usage(format!(
                    "{n} is not an image descriptor; valid descriptors: {}",
                    DescriptorId::HANDCRAFTED.map(|d| d.as_str()).join(", ")
                )))
            }
        })
        .collect()
}

/// Runs the timing harness for `descriptors` on every image below `input`.
pub fn bench_directory(
    config: &RunConfig,
    input: &Path,
    descriptors: &[DescriptorId],
) -> Result<Vec<TimingReport>, CliError> {
    if !input.is_dir() {
        return Err(usage(format!("input directory does not exist: {}", input.display())));
    }
    let mut paths = Vec::new();
    collect_images(input, &mut paths).map_err(internal)?;
    let mut corpus = Vec::with_capacity(paths.len());
    for p in &paths {
        match load_gray(p).and_then(|img| preprocess(img, config.resize)) {
            Ok(img) => corpus.push(img),
            Err(e) => warn!("skipping {}: {e}", p.display()),
        }
    }
    if corpus.is_empty() {
        return Err(usage(format!("no decodable images in {}", input.display())));
    }
    let mut reports = Vec::with_capacity(descriptors.len());
    for &d in descriptors {
        // Surface parameter or size problems before timing anything.
        extract(d, &corpus[0], &config.params).map_err(usage)?;
        let mut report = benchmark_extractor(
            d.as_str(),
            |img| extract(d, img, &config.params),
            &corpus,
            config.warmup,
            config.repetitions,
        )
        .map_err(usage)?;
        report.host = config.host.clone();
        reports.push(report);
    }
    Ok(reports)
}

pub fn cmd_bench(
    config: &RunConfig,
    input: &Path,
    names: &[String],
    out: &Path,
) -> Result<(), CliError> {
    let descriptors = parse_descriptor_list(names)?;
    if descriptors.is_empty() {
        return Err(usage("no descriptors requested"));
    }
    let reports = bench_directory(config, input, &descriptors)?;
    let mut buf = Vec::new();
    match config.format {
        Format::Csv => bench::write_reports_csv(&mut buf, &reports).map_err(internal)?,
        Format::Json => bench::write_reports_json(&mut buf, &reports).map_err(internal)?,
    }
    write_output(out, &buf)?;
    let mut stderr = std::io::stderr().lock();
    for r in &reports {
        let _ = writeln!(
            stderr,
            "bench: {:<5} {:>9.3} ms/sample (n = {})",
            r.extractor_name, r.mean_ms, r.n_samples
        );
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs, seed: u64) -> Result<(), CliError> {
    let conditions = args
        .conditions
        .iter()
        .map(|c| c.parse::<Condition>().map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    if args.subjects == 0 || args.images == 0 || args.size < 8 {
        return Err(usage("synth-dataset needs subjects >= 1, images >= 1, size >= 8"));
    }
    if !(args.noise >= 0.0) {
        return Err(usage("noise must be non-negative"));
    }
    let cfg = SynthConfig {
        subjects: args.subjects,
        images_per_condition: args.images,
        conditions,
        size: args.size,
        noise_sigma: args.noise,
        day_brightness_shift: args.shift,
        seed,
    };
    let samples = synth::generate(&cfg);
    synth::write_dataset(&args.out, &samples).map_err(internal)?;
    eprintln!("synth-dataset: {} images -> {}", samples.len(), args.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_overrides() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let cfg = RunConfig::from_toml(
            "descriptor = \"LPQ\"\nmetric = \"cosine\"\ngallery_per_subject = 3\n[params]\nblock_size = 16\n",
        )
        .unwrap();
        assert_eq!(cfg.descriptor, DescriptorId::Lpq);
        assert_eq!(cfg.metric_for(cfg.descriptor), Metric::Cosine);
        assert_eq!(cfg.params.block_size, 16);
        assert_eq!(cfg.params.window, 3);
        assert_eq!(cfg.gallery_per_subject, 3);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(RunConfig::from_toml("gallery_size = 3").is_err());
        let bad = RunConfig {
            max_rank: 0,
            ..Default::default()
        };
        assert_eq!(bad.validate().unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(percent(1.0 / 3.0), 33.33);
        assert_eq!(percent(2.0 / 3.0), 66.67);
        assert_eq!(percent(1.0), 100.0);
        assert_eq!(fmt_percent(Some(100.0)), "100.00");
    }

    #[test]
    fn descriptor_list_validation() {
        let ok = parse_descriptor_list(&["LBP".into(), "lpq".into()]).unwrap();
        assert_eq!(ok, vec![DescriptorId::Lbp, DescriptorId::Lpq]);
        let err = parse_descriptor_list(&["LBQ".into()]).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        let msg = err.to_string();
        for d in DescriptorId::HANDCRAFTED {
            assert!(msg.contains(d.as_str()), "{msg}");
        }
        assert!(parse_descriptor_list(&["EMBEDDING".into()]).is_err());
    }
}
