//! Circle Hough transform over (center x, center y, radius).
//!
//! Every edge pixel `(x, y)` votes, for every radius and every sampled angle
//! `θ ∈ {0, step, .., 360 - step}` degrees, for the center
//! `(x - r cos θ, y - r sin θ)` rounded to the nearest pixel. The rounded
//! offsets are computed once per `(r, θ)` (half away from zero), and angles
//! landing on the same offset are folded into one weighted increment.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sobel::EdgeMap;

pub const DEFAULT_R_MIN: usize = 10;
pub const DEFAULT_R_MAX: usize = 60;
pub const DEFAULT_THETA_STEP: u32 = 1;
pub const DEFAULT_VOTE_FRACTION: f64 = 0.8;
pub const DEFAULT_MIN_CENTER_DIST: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoughParams {
    pub r_min: usize,
    pub r_max: usize,
    /// Angular sampling step in whole degrees; must divide 360.
    pub theta_step: u32,
    /// Minimum score (fraction of the ideal perimeter votes) for a peak.
    pub vote_fraction: f64,
    /// Accepted centers are at least this far apart.
    pub min_center_dist: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            theta_step: DEFAULT_THETA_STEP,
            vote_fraction: DEFAULT_VOTE_FRACTION,
            min_center_dist: DEFAULT_MIN_CENTER_DIST,
        }
    }
}

impl HoughParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.r_min < 1 || self.r_min > self.r_max {
            return fail(format!(
                "radius range {}..={} must satisfy 1 <= r_min <= r_max",
                self.r_min, self.r_max
            ));
        }
        if self.theta_step == 0 || 360 % self.theta_step != 0 {
            return fail(format!("theta step {} must divide 360", self.theta_step));
        }
        if !(self.vote_fraction > 0.0 && self.vote_fraction <= 1.0) {
            return fail(format!(
                "vote fraction {} must lie in (0, 1]",
                self.vote_fraction
            ));
        }
        if !self.min_center_dist.is_finite() || self.min_center_dist < 1.0 {
            return fail(format!(
                "min center distance {} must be >= 1",
                self.min_center_dist
            ));
        }
        Ok(())
    }

    pub fn radii(&self) -> usize {
        self.r_max - self.r_min + 1
    }

    pub fn angle_samples(&self) -> u32 {
        360 / self.theta_step
    }

    /// Votes a perfect circle collects at its true center and radius.
    pub fn ideal_votes(&self) -> u32 {
        self.angle_samples()
    }

    pub fn score(&self, votes: u32) -> f64 {
        votes as f64 / self.ideal_votes() as f64
    }

    /// Smallest vote count whose score reaches `vote_fraction`.
    fn min_votes(&self) -> u32 {
        (0..=self.ideal_votes())
            .find(|&v| self.score(v) >= self.vote_fraction)
            .unwrap_or(u32::MAX)
    }
}

/// Rounding half away from zero, matching `f64::round`.
fn round_offset(v: f64) -> i64 {
    v.round() as i64
}

/// Center offsets `(-round(r cos θ), -round(r sin θ))` for one radius, with
/// the number of angles producing each.
fn radius_offsets(r: usize, theta_step: u32) -> Vec<(i64, i64, u32)> {
    let mut offsets: Vec<(i64, i64, u32)> = Vec::new();
    for t in (0..360).step_by(theta_step as usize) {
        let rad = t as f64 * PI / 180.0;
        let ox = -round_offset(r as f64 * rad.cos());
        let oy = -round_offset(r as f64 * rad.sin());
        match offsets.iter_mut().find(|(x, y, _)| *x == ox && *y == oy) {
            Some(entry) => entry.2 += 1,
            None => offsets.push((ox, oy, 1)),
        }
    }
    offsets
}

fn check_size(edges: &EdgeMap, params: &HoughParams) -> Result<()> {
    params.validate()?;
    let min = 2 * params.r_min;
    if edges.width() < min || edges.height() < min {
        return Err(Error::ImageTooSmall {
            width: edges.width(),
            height: edges.height(),
            min,
        });
    }
    Ok(())
}

/// Votes of every edge point for one radius into a `width * height` slice.
fn vote_slice(
    points: &[(i64, i64)],
    width: usize,
    height: usize,
    offsets: &[(i64, i64, u32)],
    slice: &mut [u32],
) {
    let (w, h) = (width as i64, height as i64);
    for &(ox, oy, weight) in offsets {
        for &(x, y) in points {
            let a = x + ox;
            let b = y + oy;
            if a >= 0 && a < w && b >= 0 && b < h {
                slice[(b * w + a) as usize] += weight;
            }
        }
    }
}

fn edge_points(edges: &EdgeMap) -> Vec<(i64, i64)> {
    edges.points().map(|(x, y)| (x as i64, y as i64)).collect()
}

/// Full vote volume, stored one radius slice after another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoughAccumulator {
    width: usize,
    height: usize,
    r_min: usize,
    r_max: usize,
    votes: Vec<u32>,
}

impl HoughAccumulator {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn radius_range(&self) -> (usize, usize) {
        (self.r_min, self.r_max)
    }

    /// Votes for center `(a, b)` and radius `r`.
    pub fn votes(&self, a: usize, b: usize, r: usize) -> u32 {
        assert!((self.r_min..=self.r_max).contains(&r) && a < self.width && b < self.height);
        self.votes[((r - self.r_min) * self.height + b) * self.width + a]
    }

    pub fn slice(&self, r: usize) -> &[u32] {
        let n = self.width * self.height;
        let i = r - self.r_min;
        &self.votes[i * n..(i + 1) * n]
    }

    pub fn total_votes(&self) -> u64 {
        self.votes.iter().map(|&v| v as u64).sum()
    }

    /// Largest cell as `(a, b, r, votes)`, first in (r, b, a) order on ties.
    pub fn argmax(&self) -> (usize, usize, usize, u32) {
        let n = self.width * self.height;
        let (i, v) =
            self.votes.iter().enumerate().fold(
                (0, 0),
                |best, (i, &v)| if v > best.1 { (i, v) } else { best },
            );
        (i % self.width, (i % n) / self.width, self.r_min + i / n, v)
    }
}

pub fn accumulate(edges: &EdgeMap, params: &HoughParams) -> Result<HoughAccumulator> {
    check_size(edges, params)?;
    let (w, h) = (edges.width(), edges.height());
    let n = w * h;
    let points = edge_points(edges);
    let mut votes = vec![0u32; n * params.radii()];
    for (i, r) in (params.r_min..=params.r_max).enumerate() {
        let offsets = radius_offsets(r, params.theta_step);
        vote_slice(&points, w, h, &offsets, &mut votes[i * n..(i + 1) * n]);
    }
    Ok(HoughAccumulator {
        width: w,
        height: h,
        r_min: params.r_min,
        r_max: params.r_max,
        votes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectedCircle {
    pub cx: usize,
    pub cy: usize,
    pub radius: usize,
    pub votes: u32,
    /// `votes / (360 / theta_step)`.
    pub score: f64,
}

fn collect_candidates(
    slice: &[u32],
    width: usize,
    r: usize,
    params: &HoughParams,
    min_votes: u32,
    out: &mut Vec<DetectedCircle>,
) {
    for (i, &v) in slice.iter().enumerate() {
        if v >= min_votes {
            out.push(DetectedCircle {
                cx: i % width,
                cy: i / width,
                radius: r,
                votes: v,
                score: params.score(v),
            });
        }
    }
}

/// Greedy suppression: strongest first (ties to the smaller radius, then the
/// smaller `(cy, cx)`), keeping a candidate only if it lies at least
/// `min_center_dist` from every center kept so far.
fn suppress(mut candidates: Vec<DetectedCircle>, min_center_dist: f64) -> Vec<DetectedCircle> {
    candidates.sort_unstable_by(|p, q| {
        q.votes
            .cmp(&p.votes)
            .then(p.radius.cmp(&q.radius))
            .then(p.cy.cmp(&q.cy))
            .then(p.cx.cmp(&q.cx))
    });
    let min_sq = min_center_dist * min_center_dist;
    let mut accepted: Vec<DetectedCircle> = Vec::new();
    for c in candidates {
        let clear = accepted.iter().all(|k| {
            let dx = k.cx as f64 - c.cx as f64;
            let dy = k.cy as f64 - c.cy as f64;
            dx * dx + dy * dy >= min_sq
        });
        if clear {
            accepted.push(c);
        }
    }
    accepted
}

pub fn find_circles(acc: &HoughAccumulator, params: &HoughParams) -> Vec<DetectedCircle> {
    let min_votes = params.min_votes();
    let mut candidates = Vec::new();
    for r in acc.r_min.max(params.r_min)..=acc.r_max.min(params.r_max) {
        collect_candidates(
            acc.slice(r),
            acc.width,
            r,
            params,
            min_votes,
            &mut candidates,
        );
    }
    suppress(candidates, params.min_center_dist)
}

/// Same result as `find_circles(&accumulate(..)?, ..)` while holding only
/// one radius slice in memory.
pub fn detect(edges: &EdgeMap, params: &HoughParams) -> Result<Vec<DetectedCircle>> {
    check_size(edges, params)?;
    let (w, h) = (edges.width(), edges.height());
    let points = edge_points(edges);
    let min_votes = params.min_votes();
    let mut slice = vec![0u32; w * h];
    let mut candidates = Vec::new();
    if points.is_empty() {
        return Ok(candidates);
    }
    for r in params.r_min..=params.r_max {
        slice.iter_mut().for_each(|v| *v = 0);
        let offsets = radius_offsets(r, params.theta_step);
        vote_slice(&points, w, h, &offsets, &mut slice);
        collect_candidates(&slice, w, r, params, min_votes, &mut candidates);
    }
    Ok(suppress(candidates, params.min_center_dist))
}

/// Number of circles found in `edges`, with the detections themselves.
pub fn count(edges: &EdgeMap, params: &HoughParams) -> Result<(usize, Vec<DetectedCircle>)> {
    let circles = detect(edges, params)?;
    Ok((circles.len(), circles))
}
