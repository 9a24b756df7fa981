//! Local binary patterns and the two variants built on the same sampling:
//! the mean-referenced mLBP and the three-level LTP.

use super::{check_block_input, CodeMap, DescriptorError, DescriptorId, DescriptorParams, FeatureVector};
use crate::imaging::GrayImage;

/// Neighbour offsets at radius `r`, clockwise from top-left. The first
/// neighbour lands in the most significant bit.
fn neighbour_offsets(r: isize) -> [(isize, isize); 8] {
    [
        (-r, -r),
        (0, -r),
        (r, -r),
        (r, 0),
        (r, r),
        (0, r),
        (-r, r),
        (-r, 0),
    ]
}

#[inline]
fn at(img: &GrayImage, x: usize, y: usize, (dx, dy): (isize, isize)) -> u8 {
    img.get((x as isize + dx) as usize, (y as isize + dy) as usize)
}

/// Packs up to 8 predicates MSB-first.
#[inline]
fn pack(bits: impl Iterator<Item = bool>) -> u8 {
    bits.fold(0u8, |acc, b| (acc << 1) | b as u8)
}

/// Codes with each neighbour compared to the center: `neighbour >= center`.
pub fn lbp_code_map(img: &GrayImage, window: usize) -> CodeMap {
    let r = window / 2;
    let offsets = neighbour_offsets(r as isize);
    let mut map = CodeMap::new(img.width(), img.height(), r);
    for y in r..img.height().saturating_sub(r) {
        for x in r..img.width().saturating_sub(r) {
            let center = img.get(x, y);
            map.set(x, y, pack(offsets.iter().map(|&o| at(img, x, y, o) >= center)));
        }
    }
    map
}

/// Codes with each neighbour compared to the unrounded mean of the whole
/// `window`x`window` neighbourhood.
pub fn mlbp_code_map(img: &GrayImage, window: usize) -> CodeMap {
    let r = window / 2;
    let ri = r as isize;
    let offsets = neighbour_offsets(ri);
    let area = (window * window) as u32;
    let mut map = CodeMap::new(img.width(), img.height(), r);
    for y in r..img.height().saturating_sub(r) {
        for x in r..img.width().saturating_sub(r) {
            let mut sum = 0u32;
            for dy in -ri..=ri {
                for dx in -ri..=ri {
                    sum += at(img, x, y, (dx, dy)) as u32;
                }
            }
            // neighbour >= sum / area, kept in integers.
            map.set(
                x,
                y,
                pack(offsets.iter().map(|&o| at(img, x, y, o) as u32 * area >= sum)),
            );
        }
    }
    map
}

/// Upper and lower binary patterns of the ternary code with threshold `t`.
///
/// A neighbour is `+1` when `>= center + t`, otherwise `-1` when
/// `<= center - t`, otherwise `0`. The upper map marks `+1`, the lower `-1`.
pub fn ltp_code_maps(img: &GrayImage, window: usize, t: u8) -> (CodeMap, CodeMap) {
    let r = window / 2;
    let offsets = neighbour_offsets(r as isize);
    let t = t as i16;
    let mut upper = CodeMap::new(img.width(), img.height(), r);
    let mut lower = CodeMap::new(img.width(), img.height(), r);
    for y in r..img.height().saturating_sub(r) {
        for x in r..img.width().saturating_sub(r) {
            let center = img.get(x, y) as i16;
            let mut up = 0u8;
            let mut down = 0u8;
            for &o in &offsets {
                let n = at(img, x, y, o) as i16;
                let plus = n >= center + t;
                let minus = !plus && n <= center - t;
                up = (up << 1) | plus as u8;
                down = (down << 1) | minus as u8;
            }
            upper.set(x, y, up);
            lower.set(x, y, down);
        }
    }
    (upper, lower)
}

fn prepare(img: &GrayImage, params: &DescriptorParams) -> Result<(), DescriptorError> {
    params.validate()?;
    check_block_input(img, params.block_size, params.window)
}

pub fn extract_lbp(img: &GrayImage, params: &DescriptorParams) -> Result<FeatureVector, DescriptorError> {
    prepare(img, params)?;
    let values = lbp_code_map(img, params.window).block_histograms(params.block_size);
    FeatureVector::new(DescriptorId::Lbp, values)
}

pub fn extract_mlbp(img: &GrayImage, params: &DescriptorParams) -> Result<FeatureVector, DescriptorError> {
    prepare(img, params)?;
    let values = mlbp_code_map(img, params.window).block_histograms(params.block_size);
    FeatureVector::new(DescriptorId::Mlbp, values)
}

/// Upper-pattern block histograms followed by lower-pattern block histograms.
pub fn extract_ltp(img: &GrayImage, params: &DescriptorParams) -> Result<FeatureVector, DescriptorError> {
    prepare(img, params)?;
    let (upper, lower) = ltp_code_maps(img, params.window, params.ltp_threshold);
    let mut values = upper.block_histograms(params.block_size);
    values.extend(lower.block_histograms(params.block_size));
    FeatureVector::new(DescriptorId::Ltp, values)
}
