//! Per-sample extraction time of every descriptor, written as a CSV table.
//!
//!     cargo run --release --example extraction_timing

use faceid::bench::{benchmark_extractor, write_reports_csv};
use faceid::descriptors::extract;
use faceid::synth::textured_corpus;
use faceid::{DescriptorId, DescriptorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = textured_corpus(20, 224, 8.0, 1);
    let params = DescriptorParams::default();
    let host = std::env::var("HOSTNAME").unwrap_or_else(|_| "local".into());
    let mut reports = Vec::new();
    for d in DescriptorId::HANDCRAFTED {
        let mut r = benchmark_extractor(d.as_str(), |img| extract(d, img, &params), &corpus, 3, 10)?;
        r.host = host.clone();
        reports.push(r);
    }
    write_reports_csv(std::io::stdout().lock(), &reports)?;
    Ok(())
}
