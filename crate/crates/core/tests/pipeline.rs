use faceid::descriptors::{extract, extract_batch, lbp_code_map};
use faceid::embeddings::{load_embeddings, save_embeddings, EMBEDDING_DIM};
use faceid::identification::{
    compute_cmc, compute_cmc_with_jobs, cross_condition_eval, enroll_gallery, identify, sample_probes, EvalConfig,
};
use faceid::synth::{generate, SynthConfig};
use faceid::{Condition, DescriptorId, DescriptorParams, FeatureVector, GrayImage, LabeledFeature, Metric};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn clustered(seed: u64, subjects: usize, per: usize, dim: usize, spread: f64) -> Vec<LabeledFeature> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in 0..subjects {
        let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for i in 0..per {
            let v = center.iter().map(|c| c + spread * rng.random_range(-1.0..1.0)).collect();
            out.push(LabeledFeature {
                subject_id: format!("subject{s:02}"),
                image_id: format!("{i:03}"),
                condition: Condition::Office,
                feature: FeatureVector::new(DescriptorId::Embedding, v).unwrap(),
            });
        }
    }
    out
}

fn with_condition(features: &[LabeledFeature], condition: Condition) -> Vec<LabeledFeature> {
    features
        .iter()
        .map(|f| LabeledFeature {
            condition,
            ..f.clone()
        })
        .collect()
}

#[test]
fn embeddings_flow_through_identification() {
    let dir = tempfile::tempdir().unwrap();
    let features = clustered(1, 5, 16, EMBEDDING_DIM, 0.3);
    let path = dir.path().join("resnet50.csv");
    save_embeddings(&path, &features).unwrap();
    let loaded = load_embeddings(&path, EMBEDDING_DIM).unwrap();
    assert_eq!(loaded.len(), features.len());
    let gallery = enroll_gallery(&loaded, 12, 42).unwrap();
    let probes = sample_probes(&loaded, 100, 43, Some(&gallery)).unwrap();
    assert_eq!(probes.probes.len(), 5 * 4);
    assert_eq!(probes.shortfalls.len(), 5);
    let cmc = compute_cmc(&probes.probes, &gallery, Metric::Cosine, 10).unwrap();
    assert_eq!(cmc.accuracy[0], 1.0);
    assert_eq!(cmc.accuracy.len(), 10);
}

#[test]
fn identical_conditions_give_identical_curves() {
    let office = clustered(2, 6, 30, 24, 0.05);
    let mut dataset = office.clone();
    dataset.extend(with_condition(&office, Condition::Day));
    let config = EvalConfig {
        probes_per_subject: 10,
        ..EvalConfig::new(Metric::Euclidean)
    };
    let same = cross_condition_eval(Condition::Office, Condition::Office, &dataset, &config).unwrap();
    let cross = cross_condition_eval(Condition::Office, Condition::Day, &dataset, &config).unwrap();
    assert_eq!(same.cmc, cross.cmc);
    assert_eq!(cross.label(), "Office vs. Day");
}

#[test]
fn degraded_probe_condition_lowers_rank_one() {
    let office = clustered(3, 10, 40, 8, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let day: Vec<LabeledFeature> = with_condition(&office, Condition::Day)
        .into_iter()
        .map(|f| {
            let v = f.feature.values().iter().map(|x| x + rng.random_range(-1.5..1.5)).collect();
            LabeledFeature {
                feature: FeatureVector::new(DescriptorId::Embedding, v).unwrap(),
                ..f
            }
        })
        .collect();
    let mut dataset = office;
    dataset.extend(day);
    let config = EvalConfig {
        probes_per_subject: 20,
        ..EvalConfig::new(Metric::Euclidean)
    };
    let same = cross_condition_eval(Condition::Office, Condition::Office, &dataset, &config).unwrap();
    let cross = cross_condition_eval(Condition::Office, Condition::Day, &dataset, &config).unwrap();
    assert!(cross.cmc.accuracy[0] < same.cmc.accuracy[0], "{:?} vs {:?}", cross.cmc, same.cmc);
}

#[test]
fn missing_condition_is_reported() {
    let office = clustered(4, 3, 20, 4, 0.1);
    let err = cross_condition_eval(Condition::Office, Condition::Day, &office, &EvalConfig::new(Metric::Cosine))
        .unwrap_err();
    assert!(err.to_string().contains("day"), "{err}");
}

#[test]
fn parallel_scoring_matches_sequential() {
    let features = clustered(5, 8, 20, 4, 1.5);
    let gallery = enroll_gallery(&features, 12, 42).unwrap();
    let probes = sample_probes(&features, 8, 43, Some(&gallery)).unwrap();
    let one = compute_cmc_with_jobs(&probes.probes, &gallery, Metric::Euclidean, 8, 1).unwrap();
    for jobs in [2, 3, 8] {
        assert_eq!(compute_cmc_with_jobs(&probes.probes, &gallery, Metric::Euclidean, 8, jobs).unwrap(), one);
    }
    assert!(one.accuracy[0] < 1.0 && one.accuracy[7] == 1.0);
}

#[test]
fn parallel_extraction_matches_sequential() {
    let samples = generate(&SynthConfig {
        subjects: 3,
        images_per_condition: 3,
        size: 64,
        ..Default::default()
    });
    let images: Vec<GrayImage> = samples.into_iter().map(|s| s.image).collect();
    let params = DescriptorParams::default();
    for d in DescriptorId::HANDCRAFTED {
        let seq = extract_batch(d, &images, &params, 1);
        let par = extract_batch(d, &images, &params, 4);
        let seq: Vec<FeatureVector> = seq.into_iter().map(Result::unwrap).collect();
        let par: Vec<FeatureVector> = par.into_iter().map(Result::unwrap).collect();
        assert_eq!(seq, par, "{d}");
    }
}

#[test]
fn block_histograms_follow_block_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (w, h, b) = (160, 96, 32);
    let wide = GrayImage::from_fn(w + b, h, |_, _| rng.random());
    let left = GrayImage::from_fn(w, h, |x, y| wide.get(x, y));
    let right = GrayImage::from_fn(w, h, |x, y| wide.get(x + b, y));
    let params = DescriptorParams {
        block_size: b,
        ..Default::default()
    };
    let hl = extract(DescriptorId::Lbp, &left, &params).unwrap();
    let hr = extract(DescriptorId::Lbp, &right, &params).unwrap();
    let cols = w / b;
    let block = |f: &FeatureVector, r: usize, c: usize| f.values()[(r * cols + c) * 256..][..256].to_vec();
    // Blocks away from the image border see the same pixels after the shift.
    for r in 1..h / b - 1 {
        for c in 2..cols - 1 {
            assert_eq!(block(&hl, r, c), block(&hr, r, c - 1), "block ({r}, {c})");
        }
    }
    let map = lbp_code_map(&left, 3);
    assert_eq!(map.get(0, 5), None);
    assert!(map.get(1, 1).is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn template_order_does_not_change_ranking(seed in any::<u64>(), rot in 0usize..12) {
        let features = clustered(seed, 4, 14, 6, 0.9);
        let gallery = enroll_gallery(&features, 12, seed ^ 1).unwrap();
        let shuffled = gallery.with_template_order(|t| { t.rotate_left(rot); t.reverse(); });
        for f in features.iter().step_by(5) {
            for metric in [Metric::Cosine, Metric::Euclidean] {
                let a: Vec<&str> = identify(&f.feature, &gallery, metric).unwrap().iter().map(|r| r.subject_id).collect();
                let b: Vec<&str> = identify(&f.feature, &shuffled, metric).unwrap().iter().map(|r| r.subject_id).collect();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn cosine_ranking_ignores_probe_scale(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let features = clustered(seed, 5, 13, 8, 1.0);
        let gallery = enroll_gallery(&features, 12, seed).unwrap();
        for f in features.iter().step_by(7) {
            let a: Vec<&str> = identify(&f.feature, &gallery, Metric::Cosine).unwrap().iter().map(|r| r.subject_id).collect();
            let b: Vec<&str> = identify(&f.feature.scaled(scale), &gallery, Metric::Cosine).unwrap().iter().map(|r| r.subject_id).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn histogram_descriptors_are_block_normalized(
        seed in any::<u64>(),
        bw in 1usize..4,
        bh in 1usize..4,
        window in prop::sample::select(vec![3usize, 5]),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let block = 16;
        let img = GrayImage::from_fn(bw * block + rng.random_range(0..block), bh * block, |_, _| rng.random());
        let params = DescriptorParams { block_size: block, window, lpq_window: window, ..Default::default() };
        for d in [DescriptorId::Lbp, DescriptorId::Mlbp, DescriptorId::Ltp, DescriptorId::Lpq] {
            let f = extract(d, &img, &params).unwrap();
            prop_assert_eq!(f.dim(), params.output_dim(d, img.width(), img.height()));
            for hist in f.values().chunks(256) {
                let sum: f64 = hist.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9, "{} block sums to {}", d, sum);
            }
        }
        for d in [DescriptorId::Hog, DescriptorId::Phog] {
            let f = extract(d, &img, &params).unwrap();
            prop_assert_eq!(f.dim(), params.output_dim(d, img.width(), img.height()));
        }
    }
}
