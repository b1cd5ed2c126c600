//! The eight counting stages, end to end.
//!
//! 1. intake, 2. saturation, 3. Gaussian blur, 4. histogram,
//! 5. multi-level Otsu and class mapping, 6. Sobel gradients,
//! 7. edge binarization, 8. Hough accumulation and peak picking.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::colorspace::saturation;
use crate::draw::{draw_circle, draw_marker, HIGHLIGHT};
use crate::error::{Error, Result};
use crate::filter::{gaussian_blur, DEFAULT_SIGMA};
use crate::hough::{detect, DetectedCircle, HoughParams};
use crate::imagebuf::{write_pgm, write_ppm, GrayImage, RgbImage};
use crate::otsu::{apply_thresholds_with, histogram, otsu_multilevel, ToneMap};
use crate::sobel::{binarize_edges, sobel_gradients};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub sigma: f64,
    pub otsu_classes: usize,
    pub tones: ToneMap,
    pub hough: HoughParams,
    pub dump_stages: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sigma: DEFAULT_SIGMA,
            otsu_classes: 4,
            tones: ToneMap::ClassMean,
            hough: HoughParams::default(),
            dump_stages: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidSigma(self.sigma));
        }
        if self.otsu_classes != 2 && self.otsu_classes != 4 {
            return Err(Error::InvalidClassCount(self.otsu_classes));
        }
        self.hough.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Intake,
    Saturation,
    Blur,
    Histogram,
    Threshold,
    Sobel,
    Edges,
    Hough,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Intake,
        Stage::Saturation,
        Stage::Blur,
        Stage::Histogram,
        Stage::Threshold,
        Stage::Sobel,
        Stage::Edges,
        Stage::Hough,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Intake => "intake",
            Stage::Saturation => "saturation",
            Stage::Blur => "blur",
            Stage::Histogram => "histogram",
            Stage::Threshold => "threshold",
            Stage::Sobel => "sobel",
            Stage::Edges => "edges",
            Stage::Hough => "hough",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub source_id: String,
    pub count: usize,
    pub circles: Vec<DetectedCircle>,
    /// Elapsed time of each stage that ran, in execution order.
    pub stage_timings: Vec<(Stage, Duration)>,
    /// Set when the histogram had too few levels to threshold.
    pub degenerate: bool,
}

impl CountReport {
    pub fn total_time(&self) -> Duration {
        self.stage_timings.iter().map(|(_, d)| *d).sum()
    }
}

/// Intermediate images of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct StageDump {
    pub saturation: GrayImage,
    pub blurred: GrayImage,
    /// Absent when the run short-circuited on a degenerate histogram.
    pub thresholded: Option<GrayImage>,
    pub edges: Option<GrayImage>,
    pub annotated: RgbImage,
}

impl StageDump {
    /// `(file name, encoded bytes)` for every stage image, named
    /// `{source_id}.stage{N}.{pgm|ppm}`.
    pub fn files(&self, source_id: &str) -> Vec<(String, Vec<u8>)> {
        let mut files = vec![
            (
                format!("{source_id}.stage2.pgm"),
                write_pgm(&self.saturation),
            ),
            (format!("{source_id}.stage3.pgm"), write_pgm(&self.blurred)),
        ];
        if let Some(t) = &self.thresholded {
            files.push((format!("{source_id}.stage5.pgm"), write_pgm(t)));
        }
        if let Some(e) = &self.edges {
            files.push((format!("{source_id}.stage7.pgm"), write_pgm(e)));
        }
        files.push((
            format!("{source_id}.stage8.ppm"),
            write_ppm(&self.annotated),
        ));
        files
    }

    pub fn write_to(&self, dir: &Path, source_id: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files(source_id) {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

struct Timer {
    timings: Vec<(Stage, Duration)>,
}

impl Timer {
    fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push((stage, start.elapsed()));
        out
    }
}

/// Counts circles in `src`. The stage dump is produced only when
/// `cfg.dump_stages` is set.
pub fn run(
    src: &RgbImage,
    cfg: &PipelineConfig,
    source_id: &str,
) -> Result<(CountReport, Option<StageDump>)> {
    cfg.validate()?;
    let mut timer = Timer {
        timings: Vec::with_capacity(8),
    };

    let frame = timer.time(Stage::Intake, || src.clone());
    let sat = timer.time(Stage::Saturation, || saturation(&frame));
    let blurred = timer.time(Stage::Blur, || gaussian_blur(&sat, cfg.sigma))?;
    let hist = timer.time(Stage::Histogram, || histogram(&blurred))?;

    let thresholded = timer.time(Stage::Threshold, || {
        match otsu_multilevel(&hist, cfg.otsu_classes) {
            Ok(t) => Ok(Some(apply_thresholds_with(&blurred, &hist, &t, cfg.tones))),
            Err(Error::DegenerateHistogram { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;

    let Some(thresholded) = thresholded else {
        let dump = cfg.dump_stages.then(|| StageDump {
            saturation: sat,
            blurred,
            thresholded: None,
            edges: None,
            annotated: frame.clone(),
        });
        let report = CountReport {
            source_id: source_id.to_string(),
            count: 0,
            circles: Vec::new(),
            stage_timings: timer.timings,
            degenerate: true,
        };
        return Ok((report, dump));
    };

    let grad = timer.time(Stage::Sobel, || sobel_gradients(&thresholded))?;
    let edges = timer.time(Stage::Edges, || binarize_edges(&grad));
    let circles = timer.time(Stage::Hough, || detect(&edges, &cfg.hough))?;

    let dump = cfg.dump_stages.then(|| StageDump {
        saturation: sat,
        blurred,
        thresholded: Some(thresholded),
        edges: Some(edges.image().clone()),
        annotated: annotate(&frame, &circles),
    });
    let report = CountReport {
        source_id: source_id.to_string(),
        count: circles.len(),
        circles,
        stage_timings: timer.timings,
        degenerate: false,
    };
    Ok((report, dump))
}

/// Copy of `src` with each detection outlined and its center marked in green,
/// drawn in list order.
pub fn annotate(src: &RgbImage, circles: &[DetectedCircle]) -> RgbImage {
    let mut out = src.clone();
    for c in circles {
        draw_circle(
            &mut out,
            c.cx as i64,
            c.cy as i64,
            c.radius as i64,
            HIGHLIGHT,
        );
        draw_marker(&mut out, c.cx as i64, c.cy as i64, HIGHLIGHT);
    }
    out
}
