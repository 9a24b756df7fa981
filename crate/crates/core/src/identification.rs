//! Closed-set gallery/probe identification and CMC evaluation.
//!
//! A [`Gallery`] holds a seeded sample of templates per subject. Each probe
//! is scored against every template, scores are averaged per subject and the
//! subjects ranked best-first. The CMC curve records, for every `k`, the
//! fraction of probes whose true subject is within the top `k`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::{DescriptorId, FeatureVector};
use crate::matching::{fuse_gallery_scores, MatchError, MatchScore, Metric};

pub const DEFAULT_GALLERY_PER_SUBJECT: usize = 12;
pub const DEFAULT_PROBES_PER_SUBJECT: usize = 100;
pub const DEFAULT_GALLERY_SEED: u64 = 42;
pub const DEFAULT_PROBE_SEED: u64 = 43;
pub const DEFAULT_MAX_RANK: usize = 10;

#[derive(Debug, Error)]
pub enum IdentificationError {
    #[error("protocol error: {required} images needed per subject, short: {}", list_counts(.subjects))]
    InsufficientImages {
        required: usize,
        subjects: Vec<(String, usize)>,
    },
    #[error("protocol error: no probe candidates left for subjects: {}", .subjects.join(", "))]
    EmptyProbePool { subjects: Vec<String> },
    #[error("protocol error: probe subject {0:?} is not enrolled in the gallery")]
    UnknownSubject(String),
    #[error("protocol error: subjects missing {condition} images: {}", .subjects.join(", "))]
    MissingCondition {
        condition: Condition,
        subjects: Vec<String>,
    },
    #[error("protocol error: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Match(#[from] MatchError),
}

fn list_counts(subjects: &[(String, usize)]) -> String {
    subjects
        .iter()
        .map(|(s, n)| format!("{s} ({n})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Acquisition lighting of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Office,
    Day,
    Other,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Office => "office",
            Condition::Day => "day",
            Condition::Other => "other",
        }
    }

    /// Capitalized form used in report labels.
    pub fn title(self) -> &'static str {
        match self {
            Condition::Office => "Office",
            Condition::Day => "Day",
            Condition::Other => "Other",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = IdentificationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "office" => Ok(Condition::Office),
            "day" => Ok(Condition::Day),
            "other" => Ok(Condition::Other),
            other => Err(IdentificationError::Argument(format!(
                "unknown condition {other:?}; valid conditions: office, day, other"
            ))),
        }
    }
}

/// `(subject_id, image_id, condition)`, unique within a feature set.
pub type SampleKey = (String, String, Condition);

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeature {
    pub subject_id: String,
    pub image_id: String,
    pub condition: Condition,
    pub feature: FeatureVector,
}

impl LabeledFeature {
    pub fn key(&self) -> SampleKey {
        (self.subject_id.clone(), self.image_id.clone(), self.condition)
    }

    fn sort_key(&self) -> (&str, &str, Condition) {
        (&self.subject_id, &self.image_id, self.condition)
    }
}

/// Checks ids, key uniqueness, and a shared descriptor and dimension.
fn validate_set(features: &[LabeledFeature]) -> Result<Option<(DescriptorId, usize)>, IdentificationError> {
    let mut seen = BTreeSet::new();
    let mut shape = None;
    for f in features {
        if f.subject_id.is_empty() || f.image_id.is_empty() {
            return Err(IdentificationError::Inconsistent(
                "subject_id and image_id must be non-empty".into(),
            ));
        }
        if !seen.insert(f.sort_key()) {
            return Err(IdentificationError::Inconsistent(format!(
                "duplicate sample ({}, {}, {})",
                f.subject_id, f.image_id, f.condition
            )));
        }
        let this = (f.feature.descriptor(), f.feature.dim());
        match shape {
            None => shape = Some(this),
            Some(s) if s != this => {
                return Err(IdentificationError::Inconsistent(format!(
                    "mixed feature shapes: {} dim {} and {} dim {}",
                    s.0, s.1, this.0, this.1
                )))
            }
            _ => {}
        }
    }
    Ok(shape)
}

/// Features grouped by subject, each group in canonical key order.
fn by_subject(features: &[LabeledFeature]) -> BTreeMap<&str, Vec<&LabeledFeature>> {
    let mut groups: BTreeMap<&str, Vec<&LabeledFeature>> = BTreeMap::new();
    for f in features {
        groups.entry(&f.subject_id).or_default().push(f);
    }
    for group in groups.values_mut() {
        group.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }
    groups
}

/// Seeded choice of `k` of `n` indices, returned ascending.
fn sample_indices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

/// Enrolled templates per subject.
#[derive(Debug, Clone)]
pub struct Gallery {
    templates: BTreeMap<String, Vec<FeatureVector>>,
    members: BTreeSet<SampleKey>,
    descriptor: DescriptorId,
    dim: usize,
}

impl Gallery {
    /// Enrolls every given feature without sampling.
    pub fn from_features(features: &[LabeledFeature]) -> Result<Self, IdentificationError> {
        let (descriptor, dim) = validate_set(features)?
            .ok_or_else(|| IdentificationError::Argument("gallery needs at least one template".into()))?;
        let mut templates: BTreeMap<String, Vec<FeatureVector>> = BTreeMap::new();
        let mut members = BTreeSet::new();
        for (subject, group) in by_subject(features) {
            for f in group {
                templates.entry(subject.to_string()).or_default().push(f.feature.clone());
                members.insert(f.key());
            }
        }
        Ok(Self {
            templates,
            members,
            descriptor,
            dim,
        })
    }

    pub fn descriptor(&self) -> DescriptorId {
        self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subject_count(&self) -> usize {
        self.templates.len()
    }

    pub fn template_count(&self) -> usize {
        self.members.len()
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn templates(&self, subject_id: &str) -> Option<&[FeatureVector]> {
        self.templates.get(subject_id).map(Vec::as_slice)
    }

    pub fn contains(&self, key: &SampleKey) -> bool {
        self.members.contains(key)
    }

    /// A copy with each subject's templates in the given order.
    pub fn with_template_order(&self, mut reorder: impl FnMut(&mut Vec<FeatureVector>)) -> Self {
        let mut out = self.clone();
        out.templates.values_mut().for_each(|t| reorder(t));
        out
    }
}

/// Draws `per_subject` templates for every subject with a seeded RNG.
pub fn enroll_gallery(
    features: &[LabeledFeature],
    per_subject: usize,
    seed: u64,
) -> Result<Gallery, IdentificationError> {
    if per_subject == 0 {
        return Err(IdentificationError::Argument("per_subject must be at least 1".into()));
    }
    validate_set(features)?;
    let groups = by_subject(features);
    let short: Vec<(String, usize)> = groups
        .iter()
        .filter(|(_, g)| g.len() < per_subject)
        .map(|(s, g)| (s.to_string(), g.len()))
        .collect();
    if !short.is_empty() {
        return Err(IdentificationError::InsufficientImages {
            required: per_subject,
            subjects: short,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(groups.len() * per_subject);
    for group in groups.values() {
        for i in sample_indices(&mut rng, group.len(), per_subject) {
            chosen.push(group[i].clone());
        }
    }
    Gallery::from_features(&chosen)
}

/// A subject whose probe pool was smaller than requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shortfall {
    pub subject_id: String,
    pub requested: usize,
    pub available: usize,
}

#[derive(Debug, Clone)]
pub struct ProbeSet {
    pub probes: Vec<LabeledFeature>,
    pub shortfalls: Vec<Shortfall>,
}

/// Draws up to `per_subject` probes per subject, skipping any sample already
/// enrolled in `exclude`. Short pools are taken whole and reported.
pub fn sample_probes(
    features: &[LabeledFeature],
    per_subject: usize,
    seed: u64,
    exclude: Option<&Gallery>,
) -> Result<ProbeSet, IdentificationError> {
    if per_subject == 0 {
        return Err(IdentificationError::Argument("per_subject must be at least 1".into()));
    }
    validate_set(features)?;
    let mut groups = by_subject(features);
    if let Some(gallery) = exclude {
        for group in groups.values_mut() {
            group.retain(|f| !gallery.contains(&f.key()));
        }
    }
    let empty: Vec<String> = groups
        .iter()
        .filter(|(_, g)| g.is_empty())
        .map(|(s, _)| s.to_string())
        .collect();
    if !empty.is_empty() {
        return Err(IdentificationError::EmptyProbePool { subjects: empty });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = Vec::new();
    let mut shortfalls = Vec::new();
    for (subject, group) in &groups {
        if group.len() <= per_subject {
            if group.len() < per_subject {
                shortfalls.push(Shortfall {
                    subject_id: subject.to_string(),
                    requested: per_subject,
                    available: group.len(),
                });
            }
            probes.extend(group.iter().map(|f| (*f).clone()));
        } else {
            for i in sample_indices(&mut rng, group.len(), per_subject) {
                probes.push(group[i].clone());
            }
        }
    }
    Ok(ProbeSet { probes, shortfalls })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedSubject<'g> {
    pub subject_id: &'g str,
    pub score: MatchScore,
}

/// Every gallery subject with its fused score, best match first. Equal
/// scores are ordered by ascending subject id.
pub fn identify<'g>(
    probe: &FeatureVector,
    gallery: &'g Gallery,
    metric: Metric,
) -> Result<Vec<RankedSubject<'g>>, IdentificationError> {
    if probe.dim() != gallery.dim {
        return Err(MatchError::Dimension(probe.dim(), gallery.dim).into());
    }
    let mut ranked = gallery
        .templates
        .iter()
        .map(|(subject, templates)| {
            let scores = templates
                .iter()
                .map(|t| metric.score(probe, t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RankedSubject {
                subject_id: subject.as_str(),
                score: fuse_gallery_scores(&scores)?,
            })
        })
        .collect::<Result<Vec<_>, IdentificationError>>()?;
    ranked.sort_by(|a, b| {
        a.score
            .better_first(&b.score)
            .then_with(|| a.subject_id.cmp(b.subject_id))
    });
    Ok(ranked)
}

/// 1-based position of `subject_id` in the ranking of `probe`.
pub fn true_subject_rank(
    probe: &LabeledFeature,
    gallery: &Gallery,
    metric: Metric,
) -> Result<usize, IdentificationError> {
    if gallery.templates(&probe.subject_id).is_none() {
        return Err(IdentificationError::UnknownSubject(probe.subject_id.clone()));
    }
    let ranked = identify(&probe.feature, gallery, metric)?;
    Ok(ranked
        .iter()
        .position(|r| r.subject_id == probe.subject_id)
        .expect("enrolled subject is ranked")
        + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmcCurve {
    pub max_rank: usize,
    /// `accuracy[k - 1]` is the rank-k identification rate.
    pub accuracy: Vec<f64>,
    pub n_probes: usize,
}

impl CmcCurve {
    /// Builds the curve from 1-based true-subject ranks.
    pub fn from_ranks(ranks: &[usize], max_rank: usize) -> Self {
        let mut hits = vec![0usize; max_rank];
        for &r in ranks {
            if (1..=max_rank).contains(&r) {
                hits[r - 1] += 1;
            }
        }
        let n = ranks.len();
        let mut cumulative = 0;
        let accuracy = hits
            .into_iter()
            .map(|h| {
                cumulative += h;
                cumulative as f64 / n as f64
            })
            .collect();
        Self {
            max_rank,
            accuracy,
            n_probes: n,
        }
    }

    /// Rank-k rate, `None` beyond `max_rank`.
    pub fn rank(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.accuracy.get(i)).copied()
    }

    pub fn is_monotone(&self) -> bool {
        self.accuracy.windows(2).all(|w| w[0] <= w[1])
            && self.accuracy.iter().all(|a| (0.0..=1.0).contains(a))
    }
}

pub fn compute_cmc(
    probes: &[LabeledFeature],
    gallery: &Gallery,
    metric: Metric,
    max_rank: usize,
) -> Result<CmcCurve, IdentificationError> {
    compute_cmc_with_jobs(probes, gallery, metric, max_rank, 1)
}

/// [`compute_cmc`] with probes scored on `jobs` workers; the curve is
/// identical for any worker count.
pub fn compute_cmc_with_jobs(
    probes: &[LabeledFeature],
    gallery: &Gallery,
    metric: Metric,
    max_rank: usize,
    jobs: usize,
) -> Result<CmcCurve, IdentificationError> {
    if probes.is_empty() {
        return Err(IdentificationError::Argument("probe set is empty".into()));
    }
    if max_rank == 0 {
        return Err(IdentificationError::Argument("max_rank must be at least 1".into()));
    }
    let ranks: Vec<usize> = if jobs <= 1 {
        probes
            .iter()
            .map(|p| true_subject_rank(p, gallery, metric))
            .collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| IdentificationError::Argument(e.to_string()))?;
        pool.install(|| {
            probes
                .par_iter()
                .map(|p| true_subject_rank(p, gallery, metric))
                .collect::<Result<_, _>>()
        })?
    };
    Ok(CmcCurve::from_ranks(&ranks, max_rank))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub metric: Metric,
    pub gallery_per_subject: usize,
    pub probes_per_subject: usize,
    pub gallery_seed: u64,
    pub probe_seed: u64,
    pub max_rank: usize,
    pub jobs: usize,
}

impl EvalConfig {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            gallery_per_subject: DEFAULT_GALLERY_PER_SUBJECT,
            probes_per_subject: DEFAULT_PROBES_PER_SUBJECT,
            gallery_seed: DEFAULT_GALLERY_SEED,
            probe_seed: DEFAULT_PROBE_SEED,
            max_rank: DEFAULT_MAX_RANK,
            jobs: 1,
        }
    }

    pub fn for_descriptor(descriptor: DescriptorId) -> Self {
        Self::new(Metric::default_for(descriptor))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub gallery_condition: Condition,
    pub probe_condition: Condition,
    pub cmc: CmcCurve,
    pub gallery_subjects: usize,
    pub gallery_templates: usize,
    pub shortfalls: Vec<Shortfall>,
}

impl Evaluation {
    /// e.g. `Office vs. Day`
    pub fn label(&self) -> String {
        format!("{} vs. {}", self.gallery_condition.title(), self.probe_condition.title())
    }
}

/// Enrolls templates from one lighting condition and probes from another.
/// With equal conditions the probes exclude the enrolled samples.
pub fn cross_condition_eval(
    gallery_condition: Condition,
    probe_condition: Condition,
    dataset: &[LabeledFeature],
    config: &EvalConfig,
) -> Result<Evaluation, IdentificationError> {
    let mut availability: BTreeMap<&str, BTreeSet<Condition>> = BTreeMap::new();
    for f in dataset {
        availability.entry(&f.subject_id).or_default().insert(f.condition);
    }
    for condition in [gallery_condition, probe_condition] {
        let missing: Vec<String> = availability
            .iter()
            .filter(|(_, c)| !c.contains(&condition))
            .map(|(s, _)| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(IdentificationError::MissingCondition {
                condition,
                subjects: missing,
            });
        }
    }

    let of = |c: Condition| -> Vec<LabeledFeature> {
        dataset.iter().filter(|f| f.condition == c).cloned().collect()
    };
    let gallery = enroll_gallery(&of(gallery_condition), config.gallery_per_subject, config.gallery_seed)?;
    let probes = sample_probes(
        &of(probe_condition),
        config.probes_per_subject,
        config.probe_seed,
        Some(&gallery),
    )?;
    let cmc = compute_cmc_with_jobs(
        &probes.probes,
        &gallery,
        config.metric,
        config.max_rank,
        config.jobs,
    )?;
    Ok(Evaluation {
        gallery_condition,
        probe_condition,
        cmc,
        gallery_subjects: gallery.subject_count(),
        gallery_templates: gallery.template_count(),
        shortfalls: probes.shortfalls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feat(subject: &str, image: &str, condition: Condition, values: &[f64]) -> LabeledFeature {
        LabeledFeature {
            subject_id: subject.into(),
            image_id: image.into(),
            condition,
            feature: FeatureVector::new(DescriptorId::Embedding, values.to_vec()).unwrap(),
        }
    }

    fn population(subjects: usize, per: usize) -> Vec<LabeledFeature> {
        let mut out = Vec::new();
        for s in 0..subjects {
            for i in 0..per {
                out.push(feat(
                    &format!("s{s}"),
                    &format!("img{i:03}"),
                    Condition::Office,
                    &[s as f64 + 1.0, i as f64 * 0.01, 1.0],
                ));
            }
        }
        out
    }

    #[test]
    fn enroll_takes_whole_population_when_exact() {
        let data = population(3, 12);
        let g = enroll_gallery(&data, 12, 7).unwrap();
        assert_eq!(g.subject_count(), 3);
        assert_eq!(g.template_count(), 36);
        assert!(data.iter().all(|f| g.contains(&f.key())));
    }

    #[test]
    fn enroll_is_seeded() {
        let data = population(3, 20);
        let a = enroll_gallery(&data, 12, 42).unwrap();
        let b = enroll_gallery(&data, 12, 42).unwrap();
        assert_eq!(a.members, b.members);
        assert_eq!(a.template_count(), 36);
        let mut shuffled = data.clone();
        shuffled.reverse();
        assert_eq!(enroll_gallery(&shuffled, 12, 42).unwrap().members, a.members);
        assert_ne!(enroll_gallery(&data, 12, 41).unwrap().members, a.members);
    }

    #[test]
    fn enroll_reports_short_subjects() {
        let mut data = population(2, 12);
        data.extend(population(3, 5).into_iter().filter(|f| f.subject_id == "s2"));
        let err = enroll_gallery(&data, 12, 0).unwrap_err();
        match &err {
            IdentificationError::InsufficientImages { subjects, .. } => {
                assert_eq!(subjects, &vec![("s2".to_string(), 5)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("s2"));
    }

    #[test]
    fn duplicates_and_mixed_dims_rejected() {
        let mut data = population(1, 3);
        data.push(data[0].clone());
        assert!(matches!(
            enroll_gallery(&data, 1, 0),
            Err(IdentificationError::Inconsistent(_))
        ));
        let mixed = vec![
            feat("a", "1", Condition::Office, &[1.0]),
            feat("a", "2", Condition::Office, &[1.0, 2.0]),
        ];
        assert!(matches!(
            Gallery::from_features(&mixed),
            Err(IdentificationError::Inconsistent(_))
        ));
    }

    #[test]
    fn probes_full_and_short_pools() {
        let mut data = population(1, 162);
        data.extend(population(2, 52).into_iter().filter(|f| f.subject_id == "s1"));
        let g = enroll_gallery(&data, 12, 42).unwrap();
        let set = sample_probes(&data, 100, 43, Some(&g)).unwrap();
        let count = |s: &str| set.probes.iter().filter(|p| p.subject_id == s).count();
        assert_eq!(count("s0"), 100);
        assert_eq!(count("s1"), 40);
        assert_eq!(
            set.shortfalls,
            vec![Shortfall {
                subject_id: "s1".into(),
                requested: 100,
                available: 40
            }]
        );
        assert!(set.probes.iter().all(|p| !g.contains(&p.key())));
        let again = sample_probes(&data, 100, 43, Some(&g)).unwrap();
        assert_eq!(again.probes, set.probes);
    }

    #[test]
    fn empty_pool_is_protocol_error() {
        let data = population(2, 12);
        let g = enroll_gallery(&data, 12, 42).unwrap();
        assert!(matches!(
            sample_probes(&data, 100, 43, Some(&g)),
            Err(IdentificationError::EmptyProbePool { .. })
        ));
    }

    #[test]
    fn identify_self_match_first() {
        let data = population(4, 1);
        let g = Gallery::from_features(&data).unwrap();
        let ranked = identify(&data[2].feature, &g, Metric::Cosine).unwrap();
        assert_eq!(ranked.len(), 4);
        assert_eq!(ranked[0].subject_id, "s2");
        assert!((ranked[0].score.value - 1.0).abs() < 1e-12);
        assert!(identify(
            &FeatureVector::new(DescriptorId::Embedding, vec![1.0]).unwrap(),
            &g,
            Metric::Cosine
        )
        .is_err());
    }

    #[test]
    fn ties_break_on_subject_id() {
        // Unit vectors at known angles give fused cosines A=0.9, B=0.9, C=0.1.
        let probe = [1.0, 0.0];
        let at = |c: f64| [c, (1.0 - c * c).sqrt()];
        let data = vec![
            feat("C", "1", Condition::Office, &at(0.1)),
            feat("B", "1", Condition::Office, &at(0.9)),
            feat("A", "1", Condition::Office, &at(0.9)),
        ];
        let g = Gallery::from_features(&data).unwrap();
        let p = FeatureVector::new(DescriptorId::Embedding, probe.to_vec()).unwrap();
        let order: Vec<&str> = identify(&p, &g, Metric::Cosine)
            .unwrap()
            .iter()
            .map(|r| r.subject_id)
            .collect();

        // Brute-force oracle: sort (score desc, id asc) over explicit pairs.
        let mut oracle = vec![("A", 0.9), ("B", 0.9), ("C", 0.1)];
        oracle.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
        assert_eq!(order, oracle.iter().map(|o| o.0).collect::<Vec<_>>());
        assert_eq!(order, vec!["A", "B", "C"]);
    }

    #[test]
    fn euclidean_ranks_ascending() {
        let data = vec![
            feat("far", "1", Condition::Office, &[10.0]),
            feat("near", "1", Condition::Office, &[1.0]),
        ];
        let g = Gallery::from_features(&data).unwrap();
        let p = FeatureVector::new(DescriptorId::Embedding, vec![0.0]).unwrap();
        let ranked = identify(&p, &g, Metric::Euclidean).unwrap();
        assert_eq!(ranked[0].subject_id, "near");
    }

    #[test]
    fn cmc_from_hand_built_ranks() {
        // Gallery of four 1-D subjects; probes placed so true ranks are 1, 2, 4.
        let gallery = Gallery::from_features(&[
            feat("a", "g", Condition::Office, &[0.0]),
            feat("b", "g", Condition::Office, &[10.0]),
            feat("c", "g", Condition::Office, &[20.0]),
            feat("d", "g", Condition::Office, &[30.0]),
        ])
        .unwrap();
        let probes = vec![
            feat("a", "p1", Condition::Day, &[1.0]),
            feat("b", "p2", Condition::Day, &[4.0]),
            feat("d", "p3", Condition::Day, &[2.0]),
        ];
        let ranks: Vec<usize> = probes
            .iter()
            .map(|p| true_subject_rank(p, &gallery, Metric::Euclidean).unwrap())
            .collect();
        assert_eq!(ranks, vec![1, 2, 4]);
        let cmc = compute_cmc(&probes, &gallery, Metric::Euclidean, 5).unwrap();
        // Oracle: count ranks <= k directly.
        let expected: Vec<f64> = (1..=5)
            .map(|k| ranks.iter().filter(|&&r| r <= k).count() as f64 / 3.0)
            .collect();
        assert_eq!(cmc.accuracy, expected);
        assert_eq!(cmc.accuracy, vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0, 1.0]);
        assert_eq!(cmc.rank(6), None);
    }

    #[test]
    fn cmc_errors() {
        let data = population(2, 2);
        let g = Gallery::from_features(&data).unwrap();
        assert!(compute_cmc(&[], &g, Metric::Cosine, 10).is_err());
        let stranger = vec![feat("zz", "x", Condition::Office, &[1.0, 0.0, 1.0])];
        assert!(matches!(
            compute_cmc(&stranger, &g, Metric::Cosine, 10),
            Err(IdentificationError::UnknownSubject(_))
        ));
    }

    #[test]
    fn missing_condition_is_protocol_error() {
        let data = population(2, 20);
        let err = cross_condition_eval(
            Condition::Office,
            Condition::Day,
            &data,
            &EvalConfig::new(Metric::Cosine),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            IdentificationError::MissingCondition {
                condition: Condition::Day,
                ..
            }
        ));
    }
}
