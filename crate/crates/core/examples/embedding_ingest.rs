//! Loads precomputed CNN embeddings and ranks them like any other feature.
//!
//!     cargo run --example embedding_ingest [-- embeddings.csv]
//!
//! Without an argument a small random 512-dimensional file is written first.

use faceid::embeddings::{load_embeddings, lookup_model, model_registry, save_embeddings, EMBEDDING_DIM};
use faceid::identification::{compute_cmc, enroll_gallery, sample_probes};
use faceid::{Condition, DescriptorId, FeatureVector, LabeledFeature, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<16} params (M)", "model");
    for m in model_registry() {
        println!("{:<16} {}", m.name, m.params_millions);
    }

    let dir = tempfile::tempdir()?;
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let mut records = Vec::new();
            for s in 0..8 {
                let identity: Vec<f64> = (0..EMBEDDING_DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
                for i in 0..20 {
                    let v = identity.iter().map(|x| x + rng.random_range(-1.5..1.5)).collect();
                    records.push(LabeledFeature {
                        subject_id: format!("id{s}"),
                        image_id: format!("{i:02}"),
                        condition: Condition::Office,
                        feature: FeatureVector::new(DescriptorId::Embedding, v)?,
                    });
                }
            }
            let path = dir.path().join("resnet-50.csv");
            save_embeddings(&path, &records)?;
            path
        }
    };

    let features = load_embeddings(&path, EMBEDDING_DIM)?;
    let gallery = enroll_gallery(&features, 12, 42)?;
    let probes = sample_probes(&features, 100, 43, Some(&gallery))?;
    let cmc = compute_cmc(&probes.probes, &gallery, Metric::Cosine, 5)?;
    let model = lookup_model("resnet-50").expect("registered");
    println!(
        "{} embeddings from {}: rank-1 {:.2}%, rank-5 {:.2}% over {} probes",
        features.len(),
        model.name,
        100.0 * cmc.accuracy[0],
        100.0 * cmc.accuracy[4],
        cmc.n_probes
    );
    Ok(())
}
