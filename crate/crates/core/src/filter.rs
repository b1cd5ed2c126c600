//! Separable Gaussian smoothing with edge replication.

use crate::error::{Error, Result};
use crate::imagebuf::{FloatImage, GrayImage};

pub const DEFAULT_SIGMA: f64 = 1.4;

/// Normalized, truncated 1-D Gaussian of radius `ceil(3 * sigma)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianKernel {
    sigma: f64,
    radius: usize,
    weights: Vec<f64>,
}

impl GaussianKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidSigma(sigma));
        }
        let radius = ((3.0 * sigma).ceil() as usize).max(1);
        let two_var = 2.0 * sigma * sigma;
        let mut weights: Vec<f64> = (0..=2 * radius)
            .map(|i| {
                let d = i as f64 - radius as f64;
                (-d * d / two_var).exp()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(GaussianKernel {
            sigma,
            radius,
            weights,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

pub fn build_kernel(sigma: f64) -> Result<GaussianKernel> {
    GaussianKernel::new(sigma)
}

/// Horizontal then vertical pass in real arithmetic, no quantization.
pub fn gaussian_blur_f64(src: &GrayImage, sigma: f64) -> Result<FloatImage> {
    let kernel = GaussianKernel::new(sigma)?;
    let (w, h) = src.dimensions();
    let r = kernel.radius as isize;
    let weights = kernel.weights();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let input = src.data();
    let mut horizontal = vec![0.0; w * h];
    for y in 0..h {
        let row = &input[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wt) in weights.iter().enumerate() {
                let sx = clamp(x as isize + k as isize - r, w);
                acc += wt * row[sx] as f64;
            }
            horizontal[y * w + x] = acc;
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (k, &wt) in weights.iter().enumerate() {
            let sy = clamp(y as isize + k as isize - r, h);
            let src_row = &horizontal[sy * w..(sy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += wt * s;
            }
        }
    }
    Ok(FloatImage::from_vec_unchecked(w, h, out))
}

/// Gaussian blur quantized once, half up, to 8 bits.
pub fn gaussian_blur(src: &GrayImage, sigma: f64) -> Result<GrayImage> {
    Ok(gaussian_blur_f64(src, sigma)?.quantize())
}
