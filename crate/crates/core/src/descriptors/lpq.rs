//! Local phase quantization.
//!
//! A short-term Fourier transform over an `M`x`M` rectangular window is
//! evaluated at the four lowest non-trivial frequencies `(a,0)`, `(0,a)`,
//! `(a,a)` and `(a,-a)` with `a = 1/M`. The signs of the eight real and
//! imaginary parts form the code:
//!
//! ```text
//! bit 0..3 : Re F(u1) .. Re F(u4)
//! bit 4..7 : Im F(u1) .. Im F(u4)
//! ```
//!
//! Components `>= 0` set their bit. No whitening is applied.

use std::f64::consts::PI;

use super::{check_block_input, CodeMap, DescriptorError, DescriptorId, DescriptorParams, FeatureVector};
use crate::imaging::GrayImage;

#[derive(Debug, Clone, Copy, Default)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    #[inline]
    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    #[inline]
    fn conj(self) -> Complex {
        Complex {
            re: self.re,
            im: -self.im,
        }
    }
}

/// Horizontal pass results for one pixel: DC sum and the `a`-frequency sum.
#[derive(Debug, Clone, Copy, Default)]
struct RowResponse {
    dc: f64,
    freq: Complex,
}

pub fn lpq_code_map(img: &GrayImage, window: usize) -> CodeMap {
    let r = window / 2;
    let ri = r as isize;
    let (w, h) = (img.width(), img.height());
    let mut map = CodeMap::new(w, h, r);
    if w < window || h < window {
        return map;
    }

    // exp(-j 2π a d) for d in -r..=r
    let a = 1.0 / window as f64;
    let taps: Vec<Complex> = (-ri..=ri)
        .map(|d| {
            let phase = -2.0 * PI * a * d as f64;
            Complex {
                re: phase.cos(),
                im: phase.sin(),
            }
        })
        .collect();

    // Exact cancellation at zero frequency-offset leaves floating residue of
    // order 1e-13; anything below this is treated as zero before taking signs.
    let zero_tol = 1e-9 * 255.0 * (window * window) as f64;

    let mut rows = vec![RowResponse::default(); w * h];
    for y in 0..h {
        for x in r..w - r {
            let mut resp = RowResponse::default();
            for (k, tap) in taps.iter().enumerate() {
                let v = img.get(x + k - r, y) as f64;
                resp.dc += v;
                resp.freq.re += tap.re * v;
                resp.freq.im += tap.im * v;
            }
            rows[y * w + x] = resp;
        }
    }

    for y in r..h - r {
        for x in r..w - r {
            let mut f = [Complex::default(); 4];
            for (k, tap) in taps.iter().enumerate() {
                let row = rows[(y + k - r) * w + x];
                // u1 = (a, 0): frequency along x only
                f[0].re += row.freq.re;
                f[0].im += row.freq.im;
                // u2 = (0, a): frequency along y only
                f[1].re += tap.re * row.dc;
                f[1].im += tap.im * row.dc;
                // u3 = (a, a) and u4 = (a, -a)
                let p3 = row.freq.mul(*tap);
                let p4 = row.freq.mul(tap.conj());
                f[2].re += p3.re;
                f[2].im += p3.im;
                f[3].re += p4.re;
                f[3].im += p4.im;
            }
            let parts = [
                f[0].re, f[1].re, f[2].re, f[3].re, f[0].im, f[1].im, f[2].im, f[3].im,
            ];
            let mut code = 0u8;
            for (bit, &v) in parts.iter().enumerate() {
                if v >= 0.0 || v.abs() <= zero_tol {
                    code |= 1 << bit;
                }
            }
            map.set(x, y, code);
        }
    }
    map
}

pub fn extract_lpq(img: &GrayImage, params: &DescriptorParams) -> Result<FeatureVector, DescriptorError> {
    params.validate()?;
    check_block_input(img, params.block_size, params.lpq_window)?;
    let values = lpq_code_map(img, params.lpq_window).block_histograms(params.block_size);
    FeatureVector::new(DescriptorId::Lpq, values)
}
