//! Extracts every handcrafted descriptor from one face-sized image.
//!
//!     cargo run --release --example extract_descriptors [-- path/to/face.png]

use faceid::descriptors::extract;
use faceid::imaging::{load_gray, resize_bilinear, DEFAULT_FACE_SIZE};
use faceid::synth::textured_image;
use faceid::{DescriptorId, DescriptorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = match std::env::args().nth(1) {
        Some(path) => resize_bilinear(&load_gray(path)?, DEFAULT_FACE_SIZE, DEFAULT_FACE_SIZE)?,
        None => textured_image(1, DEFAULT_FACE_SIZE),
    };
    let params = DescriptorParams::default();
    println!("{}x{} image", img.width(), img.height());
    for d in DescriptorId::HANDCRAFTED {
        let f = extract(d, &img, &params)?;
        let nonzero = f.values().iter().filter(|v| **v != 0.0).count();
        let head: Vec<String> = f.values()[..4].iter().map(|v| format!("{v:.4}")).collect();
        println!("{:<5} dim {:>6}  nonzero {:>6}  [{} ...]", d, f.dim(), nonzero, head.join(", "));
    }
    Ok(())
}
