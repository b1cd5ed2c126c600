//! Exact two- and four-class Otsu thresholding.
//!
//! Class `j` holds the intensities `t[j-1] < v <= t[j]` with `t[-1] = -1` and
//! the last class closed at 255. The search enumerates every strictly
//! increasing threshold tuple in `0..=254` and keeps the first maximum in
//! lexicographic order. The objective per tuple is `sum_j S_j^2 / n_j`
//! (class pixel sum squared over class count), which differs from the
//! between-class variance only by terms fixed by the histogram.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::imagebuf::GrayImage;

/// Intensity counts of an 8-bit image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
    total: u64,
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        let total = counts.iter().sum();
        Histogram256 { counts, total }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn mean(&self) -> f64 {
        let sum: u64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(v, &c)| v as u64 * c)
            .sum();
        sum as f64 / self.total as f64
    }
}

pub fn histogram(src: &GrayImage) -> Result<Histogram256> {
    if src.data().is_empty() {
        return Err(Error::EmptyImage);
    }
    let mut counts = [0u64; 256];
    for &v in src.data() {
        counts[v as usize] += 1;
    }
    Ok(Histogram256 {
        counts,
        total: src.data().len() as u64,
    })
}

/// Thresholds chosen by [`otsu_multilevel`] and the variance they achieve.
#[derive(Clone, Debug, PartialEq)]
pub struct OtsuThresholds {
    levels: Vec<u8>,
    variance: f64,
}

impl OtsuThresholds {
    /// Wraps caller-chosen levels, recomputing their variance on `hist`.
    pub fn from_levels(hist: &Histogram256, levels: &[u8]) -> Result<Self> {
        if !(levels.len() == 1 || levels.len() == 3)
            || levels.windows(2).any(|w| w[0] >= w[1])
            || levels.contains(&255)
        {
            return Err(Error::InvalidThresholds);
        }
        if hist.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        Ok(OtsuThresholds {
            levels: levels.to_vec(),
            variance: between_class_variance(hist, levels),
        })
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn classes(&self) -> usize {
        self.levels.len() + 1
    }
}

/// Prefix tables over bins: `count[i]` and `sum[i]` cover intensities `< i`.
struct Cumulative {
    count: [u64; 257],
    sum: [u64; 257],
}

impl Cumulative {
    fn new(hist: &Histogram256) -> Self {
        let mut count = [0u64; 257];
        let mut sum = [0u64; 257];
        for v in 0..256 {
            count[v + 1] = count[v] + hist.counts[v];
            sum[v + 1] = sum[v] + v as u64 * hist.counts[v];
        }
        Cumulative { count, sum }
    }

    /// `S^2 / n` for intensities `lo..=hi`, zero for an empty class.
    #[inline]
    fn term(&self, lo: usize, hi: usize) -> f64 {
        let n = self.count[hi + 1] - self.count[lo];
        if n == 0 {
            return 0.0;
        }
        let s = (self.sum[hi + 1] - self.sum[lo]) as f64;
        s * s / n as f64
    }

    /// `(n, S)` of every class cut at `levels`.
    fn classes(&self, levels: &[usize]) -> Vec<(u64, u64)> {
        let mut lo = 0;
        levels
            .iter()
            .copied()
            .chain(std::iter::once(255))
            .map(|hi| {
                let c = (
                    self.count[hi + 1] - self.count[lo],
                    self.sum[hi + 1] - self.sum[lo],
                );
                lo = hi + 1;
                c
            })
            .collect()
    }

    /// Exact comparison of the objective `sum S^2 / n` at two cuts.
    fn exact_cmp(&self, a: &[usize], b: &[usize]) -> Ordering {
        let (ca, cb) = (self.classes(a), self.classes(b));
        if ca == cb {
            return Ordering::Equal;
        }
        let (na, da) = exact_objective(&ca);
        let (nb, db) = exact_objective(&cb);
        (na * db).cmp(&(nb * da))
    }
}

/// `sum S^2 / n` as an unreduced fraction.
fn exact_objective(classes: &[(u64, u64)]) -> (BigUint, BigUint) {
    let mut num = BigUint::from(0u32);
    let mut den = BigUint::from(1u32);
    for &(n, s) in classes.iter().filter(|c| c.0 > 0) {
        let s2 = BigUint::from(s) * s;
        num = num * n + s2 * &den;
        den *= n;
    }
    (num, den)
}

/// Relative gap under which two float objectives are treated as a possible
/// tie and compared exactly.
const NEAR_TIE: f64 = 1e-12;

/// Running argmax. Exact ties keep the first tuple offered, which is the
/// lexicographically smallest in the search order.
struct Best<'a> {
    cum: &'a Cumulative,
    levels: Vec<usize>,
    value: f64,
    lower: f64,
    upper: f64,
}

impl<'a> Best<'a> {
    fn new(cum: &'a Cumulative, levels: Vec<usize>, value: f64) -> Self {
        let mut best = Best {
            cum,
            levels,
            value,
            lower: 0.0,
            upper: 0.0,
        };
        best.set_bounds();
        best
    }

    fn set_bounds(&mut self) {
        let tol = NEAR_TIE * self.value.abs();
        self.lower = self.value - tol;
        self.upper = self.value + tol;
    }

    #[inline]
    fn offer(&mut self, levels: &[usize], value: f64) {
        if value >= self.lower
            && (value > self.upper || self.cum.exact_cmp(levels, &self.levels) == Ordering::Greater)
        {
            self.levels.clear();
            self.levels.extend_from_slice(levels);
            self.value = value;
            self.set_bounds();
        }
    }
}

/// Between-class variance `sum_j w_j (mu_j - mu_T)^2` at the given levels.
pub fn between_class_variance(hist: &Histogram256, levels: &[u8]) -> f64 {
    let cum = Cumulative::new(hist);
    let mut lo = 0;
    let mut objective = 0.0;
    for hi in levels
        .iter()
        .map(|&t| t as usize)
        .chain(std::iter::once(255))
    {
        objective += cum.term(lo, hi);
        lo = hi + 1;
    }
    finish_variance(&cum, objective)
}

fn finish_variance(cum: &Cumulative, objective: f64) -> f64 {
    let n = cum.count[256] as f64;
    let mean = cum.sum[256] as f64 / n;
    (objective / n - mean * mean).max(0.0)
}

/// Exhaustive Otsu search for `classes` ∈ {2, 4}.
pub fn otsu_multilevel(hist: &Histogram256, classes: usize) -> Result<OtsuThresholds> {
    if classes != 2 && classes != 4 {
        return Err(Error::InvalidClassCount(classes));
    }
    if hist.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let occupied = hist.occupied_bins();
    if occupied < classes {
        return Err(Error::DegenerateHistogram { occupied, classes });
    }
    let cum = Cumulative::new(hist);

    let best = if classes == 2 {
        let mut best = Best::new(&cum, vec![0], cum.term(0, 0) + cum.term(1, 255));
        for t in 1..255 {
            best.offer(&[t], cum.term(0, t) + cum.term(t + 1, 255));
        }
        best
    } else {
        // term(lo, hi) for every class interval, indexed [lo][hi]
        let mut table = vec![0.0f64; 256 * 256];
        for lo in 0..256 {
            for hi in lo..256 {
                table[lo * 256 + hi] = cum.term(lo, hi);
            }
        }
        let value = |t1: usize, t2: usize, t3: usize| {
            table[t1]
                + table[(t1 + 1) * 256 + t2]
                + table[(t2 + 1) * 256 + t3]
                + table[(t3 + 1) * 256 + 255]
        };
        let mut best = Best::new(&cum, vec![0, 1, 2], value(0, 1, 2));
        for t1 in 0..253 {
            let first = table[t1];
            for t2 in t1 + 1..254 {
                let head = first + table[(t1 + 1) * 256 + t2];
                let third = &table[(t2 + 1) * 256..(t2 + 2) * 256];
                for t3 in t2 + 1..255 {
                    let value = head + third[t3] + table[(t3 + 1) * 256 + 255];
                    if value >= best.lower {
                        best.offer(&[t1, t2, t3], value);
                    }
                }
            }
        }
        best
    };
    let (levels, objective) = (best.levels.iter().map(|&t| t as u8).collect(), best.value);

    Ok(OtsuThresholds {
        levels,
        variance: finish_variance(&cum, objective),
    })
}

/// Gray tone assigned to class `j` of `classes`: evenly spaced over `[0, 255]`.
pub fn class_tone(j: usize, classes: usize) -> u8 {
    ((255 * j + (classes - 1) / 2) / (classes - 1)) as u8
}

/// How classes are painted after thresholding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ToneMap {
    /// Evenly spaced tones, see [`class_tone`].
    Even,
    /// Each class takes its own mean level, rounded half up. Two classes
    /// that split one mode stay close in tone.
    #[default]
    ClassMean,
}

impl std::str::FromStr for ToneMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(ToneMap::Even),
            "mean" => Ok(ToneMap::ClassMean),
            other => Err(Error::InvalidParams(format!("unknown tone map {other:?}"))),
        }
    }
}

/// Mean level of each class under `thresholds`, rounded half up. An empty
/// class gets its evenly spaced tone.
pub fn class_means(hist: &Histogram256, thresholds: &OtsuThresholds) -> Vec<u8> {
    let classes = thresholds.classes();
    let mut bounds = Vec::with_capacity(classes + 1);
    bounds.push(0usize);
    bounds.extend(thresholds.levels.iter().map(|&t| t as usize + 1));
    bounds.push(256);
    bounds
        .windows(2)
        .enumerate()
        .map(|(j, w)| {
            let (mut n, mut s) = (0u64, 0u64);
            for v in w[0]..w[1] {
                n += hist.counts[v];
                s += hist.counts[v] * v as u64;
            }
            if n == 0 {
                class_tone(j, classes)
            } else {
                ((2 * s + n) / (2 * n)) as u8
            }
        })
        .collect()
}

/// Maps each pixel to its class tone: `{0, 255}` for two classes,
/// `{0, 85, 170, 255}` for four.
pub fn apply_thresholds(src: &GrayImage, thresholds: &OtsuThresholds) -> GrayImage {
    let classes = thresholds.classes();
    let tones: Vec<u8> = (0..classes).map(|j| class_tone(j, classes)).collect();
    paint(src, thresholds, &tones)
}

/// Like [`apply_thresholds`] with a choice of tones. `hist` must be the
/// histogram the thresholds came from.
pub fn apply_thresholds_with(
    src: &GrayImage,
    hist: &Histogram256,
    thresholds: &OtsuThresholds,
    tones: ToneMap,
) -> GrayImage {
    match tones {
        ToneMap::Even => apply_thresholds(src, thresholds),
        ToneMap::ClassMean => paint(src, thresholds, &class_means(hist, thresholds)),
    }
}

fn paint(src: &GrayImage, thresholds: &OtsuThresholds, tones: &[u8]) -> GrayImage {
    let mut lut = [0u8; 256];
    for (v, tone) in lut.iter_mut().enumerate() {
        let class = thresholds
            .levels
            .iter()
            .filter(|&&t| v > t as usize)
            .count();
        *tone = tones[class];
    }
    let data = src.data().iter().map(|&v| lut[v as usize]).collect();
    GrayImage::from_raw(src.width(), src.height(), data).expect("dimensions preserved")
}
