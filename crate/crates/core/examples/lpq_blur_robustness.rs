//! Compares how much LBP and LPQ features move under Gaussian blur.
//!
//!     cargo run --release --example lpq_blur_robustness

use faceid::descriptors::extract;
use faceid::imaging::gaussian_blur;
use faceid::matching::cosine_similarity;
use faceid::synth::textured_corpus;
use faceid::{DescriptorId, DescriptorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = textured_corpus(40, 224, 12.0, 2024);
    let params = DescriptorParams::default();
    println!("sigma   LBP     LPQ");
    for sigma in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let mut totals = [0.0; 2];
        for img in &corpus {
            let blurred = gaussian_blur(img, sigma)?;
            for (t, d) in totals.iter_mut().zip([DescriptorId::Lbp, DescriptorId::Lpq]) {
                let a = extract(d, img, &params)?;
                let b = extract(d, &blurred, &params)?;
                *t += cosine_similarity(&a, &b)?.value;
            }
        }
        let n = corpus.len() as f64;
        println!("{sigma:<5}  {:.4}  {:.4}", totals[0] / n, totals[1] / n);
    }
    Ok(())
}
