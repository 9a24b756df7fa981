//! Cosine and Euclidean scores, polarity, and gallery fusion.
//!
//!     cargo run --example match_scores

use faceid::matching::{cosine_similarity, euclidean_distance, fuse_gallery_scores};
use faceid::{DescriptorId, FeatureVector, Metric};

fn fv(values: &[f64]) -> FeatureVector {
    FeatureVector::new(DescriptorId::Embedding, values.to_vec()).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let probe = fv(&[1.0, 0.0, 0.0]);
    let templates = [fv(&[1.0, 1.0, 0.0]), fv(&[2.0, 0.0, 0.0]), fv(&[0.0, 0.0, 1.0])];

    for t in &templates {
        println!(
            "{:?}: cosine {:.4}  euclidean {:.4}",
            t.values(),
            cosine_similarity(&probe, t)?.value,
            euclidean_distance(&probe, t)?.value
        );
    }
    for metric in [Metric::Cosine, Metric::Euclidean] {
        let scores = templates
            .iter()
            .map(|t| metric.score(&probe, t))
            .collect::<Result<Vec<_>, _>>()?;
        let fused = fuse_gallery_scores(&scores)?;
        println!("{metric}: fused {:.4} ({:?})", fused.value, fused.polarity);
    }
    println!("zero vector: {}", cosine_similarity(&probe, &fv(&[0.0; 3])).unwrap_err());
    Ok(())
}
