//! Same-lighting and cross-lighting identification on a synthetic corpus.
//!
//!     cargo run --release --example gallery_probe_cmc

use faceid::descriptors::extract;
use faceid::identification::{cross_condition_eval, EvalConfig};
use faceid::synth::{generate, SynthConfig};
use faceid::{Condition, DescriptorId, DescriptorParams, LabeledFeature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = generate(&SynthConfig {
        noise_sigma: 40.0,
        ..Default::default()
    });
    let params = DescriptorParams::default();
    for d in [DescriptorId::Lbp, DescriptorId::Lpq, DescriptorId::Hog] {
        let features = samples
            .iter()
            .map(|s| {
                Ok(LabeledFeature {
                    subject_id: s.subject_id.clone(),
                    image_id: s.image_id.clone(),
                    condition: s.condition,
                    feature: extract(d, &s.image, &params)?,
                })
            })
            .collect::<Result<Vec<_>, faceid::descriptors::DescriptorError>>()?;
        let config = EvalConfig {
            probes_per_subject: 20,
            ..EvalConfig::for_descriptor(d)
        };
        for (g, p) in [(Condition::Office, Condition::Office), (Condition::Office, Condition::Day)] {
            let eval = cross_condition_eval(g, p, &features, &config)?;
            let cmc = &eval.cmc;
            println!(
                "{:<5} {:<15} rank-1 {:6.2}%  rank-5 {:6.2}%  rank-10 {:6.2}%  ({} probes)",
                d,
                eval.label(),
                100.0 * cmc.accuracy[0],
                100.0 * cmc.rank(5).unwrap_or(f64::NAN),
                100.0 * cmc.rank(10).unwrap_or(f64::NAN),
                cmc.n_probes
            );
        }
    }
    Ok(())
}
