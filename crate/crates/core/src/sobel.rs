//! Sobel gradients and edge binarization.

use crate::error::{Error, Result};
use crate::imagebuf::{quantize_sample, FloatImage, GrayImage};
use crate::otsu::{otsu_multilevel, Histogram256};

/// Horizontal derivative kernel, applied by correlation.
pub const SOBEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
/// Vertical derivative kernel, applied by correlation.
pub const SOBEL_Y: [[i32; 3]; 3] = [[1, 2, 1], [0, 0, 0], [-1, -2, -1]];

#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub gx: FloatImage,
    pub gy: FloatImage,
    pub magnitude: FloatImage,
}

/// Binary edge raster: 255 on edges, 0 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    image: GrayImage,
    edge_count: usize,
}

impl EdgeMap {
    pub fn empty(width: usize, height: usize) -> Self {
        EdgeMap {
            image: GrayImage::new(width, height),
            edge_count: 0,
        }
    }

    /// Any non-zero sample is taken as an edge and stored as 255.
    pub fn from_gray(image: &GrayImage) -> Self {
        let data: Vec<u8> = image
            .data()
            .iter()
            .map(|&v| if v > 0 { 255 } else { 0 })
            .collect();
        let edge_count = data.iter().filter(|&&v| v == 255).count();
        EdgeMap {
            image: GrayImage::from_raw(image.width(), image.height(), data)
                .expect("dimensions preserved"),
            edge_count,
        }
    }

    pub fn from_points(
        width: usize,
        height: usize,
        points: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut image = GrayImage::new(width, height);
        for (x, y) in points {
            if x < width && y < height {
                image.set(x, y, 255);
            }
        }
        Self::from_gray(&image)
    }

    pub fn image(&self) -> &GrayImage {
        &self.image
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.image.get(x, y) != 0
    }

    /// Edge coordinates in raster order.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.image.width();
        self.image
            .data()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(i, _)| (i % w, i / w))
    }
}

pub fn sobel_gradients(src: &GrayImage) -> Result<GradientField> {
    let (w, h) = src.dimensions();
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    let mut magnitude = Vec::with_capacity(w * h);
    for y in 0..h {
        let rows = [y.saturating_sub(1), y, (y + 1).min(h - 1)];
        for x in 0..w {
            let cols = [x.saturating_sub(1), x, (x + 1).min(w - 1)];
            let (mut sx, mut sy) = (0i32, 0i32);
            for (ky, &ry) in rows.iter().enumerate() {
                for (kx, &cx) in cols.iter().enumerate() {
                    let v = src.get(cx, ry) as i32;
                    sx += SOBEL_X[ky][kx] * v;
                    sy += SOBEL_Y[ky][kx] * v;
                }
            }
            let (fx, fy) = (sx as f64, sy as f64);
            gx.push(fx);
            gy.push(fy);
            magnitude.push(fx.hypot(fy));
        }
    }
    Ok(GradientField {
        gx: FloatImage::from_vec_unchecked(w, h, gx),
        gy: FloatImage::from_vec_unchecked(w, h, gy),
        magnitude: FloatImage::from_vec_unchecked(w, h, magnitude),
    })
}

/// Rescales the magnitude to `[0, 255]` and keeps pixels strictly above a
/// two-class Otsu threshold of that histogram.
///
/// A field with no variation (all zero, or one constant level) has no
/// separable edges and yields an empty map.
pub fn binarize_edges(grad: &GradientField) -> EdgeMap {
    let mag = &grad.magnitude;
    let (w, h) = (mag.width(), mag.height());
    let peak = mag.data().iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return EdgeMap::empty(w, h);
    }
    let scaled: Vec<u8> = mag
        .data()
        .iter()
        .map(|&m| quantize_sample(m / peak * 255.0))
        .collect();
    let mut counts = [0u64; 256];
    for &v in &scaled {
        counts[v as usize] += 1;
    }
    let threshold = match otsu_multilevel(&Histogram256::from_counts(counts), 2) {
        Ok(t) => t.levels()[0],
        Err(_) => return EdgeMap::empty(w, h),
    };
    let data: Vec<u8> = scaled
        .iter()
        .map(|&v| if v > threshold { 255 } else { 0 })
        .collect();
    let edge_count = data.iter().filter(|&&v| v == 255).count();
    EdgeMap {
        image: GrayImage::from_raw(w, h, data).expect("dimensions preserved"),
        edge_count,
    }
}
