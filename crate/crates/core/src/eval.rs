//! Scoring detections against ground truth.

use std::time::Duration;

use crate::error::Result;
use crate::hough::DetectedCircle;
use crate::imagebuf::RgbImage;
use crate::pipeline::{run, PipelineConfig, Stage};
use crate::synth::{GroundTruth, TruthCircle};

/// Largest center distance and radius difference for a match, in pixels.
pub const MATCH_TOLERANCE: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageScore {
    pub truth: usize,
    pub detected: usize,
    pub matched: usize,
}

impl ImageScore {
    pub fn exact(&self) -> bool {
        self.truth == self.detected
    }
}

/// Greedy one-to-one matching by ascending center distance. A pair is
/// eligible when the centers are within [`MATCH_TOLERANCE`] and the radii
/// differ by at most the same amount.
pub fn match_circles(detections: &[DetectedCircle], truth: &[TruthCircle]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (di, d) in detections.iter().enumerate() {
        for (ti, t) in truth.iter().enumerate() {
            let dx = d.cx as f64 - t.cx as f64;
            let dy = d.cy as f64 - t.cy as f64;
            let dist = (dx * dx + dy * dy).sqrt();
            let dr = (d.radius as f64 - t.radius as f64).abs();
            if dist <= MATCH_TOLERANCE && dr <= MATCH_TOLERANCE {
                pairs.push((dist, ti, di));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_d = vec![false; detections.len()];
    let mut used_t = vec![false; truth.len()];
    let mut matches = Vec::new();
    for (_, ti, di) in pairs {
        if !used_d[di] && !used_t[ti] {
            used_d[di] = true;
            used_t[ti] = true;
            matches.push((di, ti));
        }
    }
    matches
}

pub fn score_image(detections: &[DetectedCircle], truth: &GroundTruth) -> ImageScore {
    ImageScore {
        truth: truth.count(),
        detected: detections.len(),
        matched: match_circles(detections, &truth.circles).len(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Metrics {
    pub images: usize,
    pub exact: usize,
    pub truth: usize,
    pub detected: usize,
    pub matched: usize,
}

impl Metrics {
    pub fn add(&mut self, s: ImageScore) {
        self.images += 1;
        self.exact += s.exact() as usize;
        self.truth += s.truth;
        self.detected += s.detected;
        self.matched += s.matched;
    }

    pub fn exact_count_accuracy(&self) -> f64 {
        ratio(self.exact, self.images)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.truth)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.detected)
    }
}

/// An empty denominator counts as perfect.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Result of running the pipeline over a labelled corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRun {
    pub per_image: Vec<(String, ImageScore)>,
    pub metrics: Metrics,
    /// Mean elapsed time per stage over the images where the stage ran.
    pub mean_timings: Vec<(Stage, Duration)>,
}

pub fn evaluate(
    items: &[(String, RgbImage, GroundTruth)],
    cfg: &PipelineConfig,
) -> Result<EvalRun> {
    let cfg = PipelineConfig {
        dump_stages: false,
        ..*cfg
    };
    let mut per_image = Vec::with_capacity(items.len());
    let mut metrics = Metrics::default();
    let mut totals = [(Duration::ZERO, 0u32); 8];
    for (id, img, truth) in items {
        let (report, _) = run(img, &cfg, id)?;
        let score = score_image(&report.circles, truth);
        metrics.add(score);
        per_image.push((id.clone(), score));
        for (stage, d) in &report.stage_timings {
            let slot = &mut totals[*stage as usize];
            slot.0 += *d;
            slot.1 += 1;
        }
    }
    let mean_timings = Stage::ALL
        .iter()
        .zip(totals)
        .filter(|(_, (_, n))| *n > 0)
        .map(|(&s, (total, n))| (s, total / n))
        .collect();
    Ok(EvalRun {
        per_image,
        metrics,
        mean_timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(cx: usize, cy: usize, radius: usize) -> DetectedCircle {
        DetectedCircle {
            cx,
            cy,
            radius,
            votes: 200,
            score: 0.5,
        }
    }

    fn truth(cx: i64, cy: i64, radius: i64) -> TruthCircle {
        TruthCircle { cx, cy, radius }
    }

    #[test]
    fn tolerance_boundaries() {
        let t = [truth(50, 50, 20)];
        assert_eq!(match_circles(&[det(53, 50, 23)], &t).len(), 1);
        assert_eq!(match_circles(&[det(54, 50, 20)], &t).len(), 0);
        assert_eq!(match_circles(&[det(52, 52, 20)], &t).len(), 1);
        assert_eq!(match_circles(&[det(50, 50, 16)], &t).len(), 0);
    }

    #[test]
    fn one_to_one_by_distance() {
        let t = [truth(50, 50, 20), truth(53, 50, 20)];
        let d = [det(52, 50, 20)];
        // nearest truth wins, the other stays unmatched
        assert_eq!(match_circles(&d, &t), vec![(0, 1)]);
        let d2 = [det(52, 50, 20), det(50, 50, 20)];
        let mut m = match_circles(&d2, &t);
        m.sort_unstable();
        assert_eq!(m, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn metrics() {
        let mut m = Metrics::default();
        m.add(ImageScore {
            truth: 2,
            detected: 2,
            matched: 2,
        });
        m.add(ImageScore {
            truth: 3,
            detected: 4,
            matched: 3,
        });
        assert_eq!(m.exact_count_accuracy(), 0.5);
        assert_eq!(m.recall(), 1.0);
        assert_eq!(m.precision(), 5.0 / 6.0);
        assert_eq!(Metrics::default().recall(), 1.0);
    }
}
