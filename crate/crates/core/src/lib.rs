//! Counting circular products (eggs, bottle caps) in still images.
//!
//! The pipeline converts a frame to its HSV saturation plane, smooths it with
//! a Gaussian, splits it into four tones with a three-threshold Otsu search,
//! extracts Sobel edges from the tone image and counts circles by Hough
//! voting over `(center, radius)`.

pub mod cli;
pub mod colorspace;
pub mod draw;
pub mod error;
pub mod eval;
pub mod filter;
pub mod hough;
pub mod imagebuf;
pub mod otsu;
pub mod pipeline;
pub mod sobel;
pub mod synth;

pub use error::{Error, Result};
pub use hough::{DetectedCircle, HoughParams};
pub use imagebuf::{read_pnm, write_pnm, FloatImage, GrayImage, PnmImage, RgbImage};
pub use pipeline::{run, CountReport, PipelineConfig, Stage, StageDump};
