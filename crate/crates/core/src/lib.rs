//! Face identification toolkit built on handcrafted texture descriptors.
//!
//! The pipeline is: decode and resize ([`imaging`]), extract a descriptor
//! ([`descriptors`]), score against enrolled templates ([`matching`]) and
//! measure rank-k accuracy ([`identification`]). Deep-model embeddings enter
//! through [`embeddings`]; [`bench`] times extractors per sample.
//!
//! ```
//! use faceid::descriptors::{extract_lbp, DescriptorParams};
//! use faceid::imaging::GrayImage;
//!
//! let img = GrayImage::from_fn(224, 224, |x, y| ((x * 7) ^ (y * 3)) as u8);
//! let lbp = extract_lbp(&img, &DescriptorParams::default()).unwrap();
//! assert_eq!(lbp.dim(), 256 * 49);
//! ```

pub mod bench;
pub mod cli;
pub mod descriptors;
pub mod embeddings;
pub mod identification;
pub mod imaging;
pub mod matching;
pub mod synth;

pub use descriptors::{DescriptorId, DescriptorParams, FeatureVector};
pub use identification::{CmcCurve, Condition, Gallery, LabeledFeature};
pub use imaging::GrayImage;
pub use matching::{MatchScore, Metric, Polarity};
