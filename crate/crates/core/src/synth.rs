//! Synthetic scenes with exact ground truth.
//!
//! # Random numbers
//!
//! All randomness comes from SplitMix64 (Steele, Lea and Flood): the state
//! advances by `0x9E3779B97F4A7C15` and each output is
//! `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`.
//! Derived quantities:
//!
//! - `below(n)`: high 64 bits of the 128-bit product `next() * n`.
//! - `unit()`: `(next() >> 11) * 2^-53`, in `[0, 1)`.
//! - `normal()`: Box-Muller cosine branch,
//!   `sqrt(-2 ln(1 - unit())) * cos(2 pi unit())` (two draws per sample).
//!
//! # Rendering order
//!
//! [`render`] seeds one generator with `rng_seed`, draws one occlusion start
//! angle `2 pi unit()` per disk (only when `occlusion_fraction > 0`), then one
//! noise sample per channel in raster order R, G, B. Noisy channels are
//! `clamp(round_half_up(v + sigma * normal()), 0, 255)`.
//!
//! # Corpora
//!
//! [`corpus`] seeds a master generator with the corpus seed and takes one
//! `next()` per image as that image's layout seed. The layout generator draws,
//! in order: the disk count `1 + below(12)`, the background gray
//! `110 + below(91)`, then for each disk up to [`PLACEMENT_ATTEMPTS`] tries of
//! radius `10 + below(51)`, `cx = r + 2 + below(w - 2r - 4)`,
//! `cy = r + 2 + below(h - 2r - 4)`; a try succeeds when the disk clears every
//! placed disk by more than [`CORPUS_GAP`] pixels, and then one more draw
//! `below(palette len)` picks the color. For the occluded profile the
//! fraction `0.10 * unit()` follows; the last draw is the render seed.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imagebuf::{read_pnm, write_ppm, RgbImage};

pub const CORPUS_WIDTH: usize = 640;
pub const CORPUS_HEIGHT: usize = 480;
pub const CORPUS_MAX_DISKS: u64 = 12;
/// Minimum clearance between disk rims in generated corpora.
pub const CORPUS_GAP: f64 = 4.0;
pub const PLACEMENT_ATTEMPTS: usize = 200;
pub const NOISY_SIGMA: f64 = 10.0;
pub const MAX_OCCLUSION: f64 = 0.10;

/// Saturated disk colors, each with HSV saturation of at least 0.6.
pub const PALETTE: [[u8; 3]; 8] = [
    [220, 40, 40],
    [230, 120, 20],
    [220, 200, 30],
    [40, 180, 60],
    [40, 80, 210],
    [200, 50, 180],
    [200, 120, 60],
    [30, 170, 190],
];

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub cx: i64,
    pub cy: i64,
    pub radius: i64,
    pub color: [u8; 3],
}

impl Disk {
    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        let (dx, dy) = (x - self.cx, y - self.cy);
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub background: [u8; 3],
    pub disks: Vec<Disk>,
    pub noise_sigma: f64,
    /// Fraction of each disk's angular extent replaced by background.
    pub occlusion_fraction: f64,
    pub rng_seed: u64,
    pub allow_overlap: bool,
}

impl SceneSpec {
    pub fn new(width: usize, height: usize, background: [u8; 3]) -> Self {
        SceneSpec {
            width,
            height,
            background,
            disks: Vec::new(),
            noise_sigma: 0.0,
            occlusion_fraction: 0.0,
            rng_seed: 0,
            allow_overlap: false,
        }
    }

    pub fn with_disk(mut self, cx: i64, cy: i64, radius: i64, color: [u8; 3]) -> Self {
        self.disks.push(Disk {
            cx,
            cy,
            radius,
            color,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.width == 0 || self.height == 0 {
            return fail("empty frame".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail(format!("noise sigma {}", self.noise_sigma));
        }
        if !(0.0..0.5).contains(&self.occlusion_fraction) {
            return fail(format!("occlusion fraction {}", self.occlusion_fraction));
        }
        let (w, h) = (self.width as i64, self.height as i64);
        for d in &self.disks {
            if d.radius < 1
                || d.cx - d.radius < 2
                || d.cy - d.radius < 2
                || d.cx + d.radius > w - 3
                || d.cy + d.radius > h - 3
            {
                return fail(format!(
                    "disk ({}, {}, r={}) needs a 2 px margin inside {}x{}",
                    d.cx, d.cy, d.radius, w, h
                ));
            }
        }
        if !self.allow_overlap {
            for (i, a) in self.disks.iter().enumerate() {
                for b in &self.disks[i + 1..] {
                    if !clears(a, b, 4.0) {
                        return fail(format!(
                            "disks at ({}, {}) and ({}, {}) are closer than r1 + r2 + 4",
                            a.cx, a.cy, b.cx, b.cy
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn clears(a: &Disk, b: &Disk, gap: f64) -> bool {
    let d = (((a.cx - b.cx).pow(2) + (a.cy - b.cy).pow(2)) as f64).sqrt();
    d > (a.radius + b.radius) as f64 + gap
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruthCircle {
    pub cx: i64,
    pub cy: i64,
    pub radius: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub circles: Vec<TruthCircle>,
}

impl GroundTruth {
    pub fn count(&self) -> usize {
        self.circles.len()
    }

    /// One `cx cy r` line per circle.
    pub fn to_sidecar(&self) -> String {
        self.circles
            .iter()
            .map(|c| format!("{} {} {}\n", c.cx, c.cy, c.radius))
            .collect()
    }

    pub fn parse_sidecar(text: &str) -> Result<Self> {
        let mut circles = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<i64> = line
                .split_whitespace()
                .map(|f| f.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::MalformedTruth(format!("line {}: {e}", n + 1)))?;
            match fields[..] {
                [cx, cy, radius] if radius > 0 => circles.push(TruthCircle { cx, cy, radius }),
                _ => {
                    return Err(Error::MalformedTruth(format!(
                        "line {}: expected `cx cy r`",
                        n + 1
                    )))
                }
            }
        }
        Ok(GroundTruth { circles })
    }
}

/// Rasterizes `spec`; ground truth lists the disks before occlusion.
pub fn render(spec: &SceneSpec) -> Result<(RgbImage, GroundTruth)> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.rng_seed);
    let wedges: Vec<Option<(f64, f64)>> = spec
        .disks
        .iter()
        .map(|_| {
            (spec.occlusion_fraction > 0.0)
                .then(|| (2.0 * PI * rng.unit(), 2.0 * PI * spec.occlusion_fraction))
        })
        .collect();

    let mut img = RgbImage::filled(spec.width, spec.height, spec.background);
    for (disk, wedge) in spec.disks.iter().zip(&wedges) {
        let r = disk.radius;
        for y in disk.cy - r..=disk.cy + r {
            for x in disk.cx - r..=disk.cx + r {
                if !disk.contains(x, y) {
                    continue;
                }
                let occluded = wedge.is_some_and(|(start, extent)| {
                    let angle = ((y - disk.cy) as f64).atan2((x - disk.cx) as f64);
                    (angle - start).rem_euclid(2.0 * PI) < extent
                });
                if !occluded {
                    img.set(x as usize, y as usize, disk.color);
                }
            }
        }
    }

    if spec.noise_sigma > 0.0 {
        let mut data = img.into_raw();
        for v in data.iter_mut() {
            let noisy = *v as f64 + spec.noise_sigma * rng.normal();
            *v = (noisy + 0.5).floor().clamp(0.0, 255.0) as u8;
        }
        img = RgbImage::from_raw(spec.width, spec.height, data)?;
    }

    let truth = GroundTruth {
        circles: spec
            .disks
            .iter()
            .map(|d| TruthCircle {
                cx: d.cx,
                cy: d.cy,
                radius: d.radius,
            })
            .collect(),
    };
    Ok((img, truth))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Clean,
    Noisy,
    Occluded,
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "clean" => Ok(Profile::Clean),
            "noisy" => Ok(Profile::Noisy),
            "occluded" => Ok(Profile::Occluded),
            other => Err(format!(
                "unknown profile `{other}`, expected clean, noisy or occluded"
            )),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Clean => "clean",
            Profile::Noisy => "noisy",
            Profile::Occluded => "occluded",
        })
    }
}

/// The scene layout for one corpus image.
pub fn corpus_scene(profile: Profile, layout_seed: u64) -> SceneSpec {
    let mut rng = SplitMix64::new(layout_seed);
    let (w, h) = (CORPUS_WIDTH as i64, CORPUS_HEIGHT as i64);
    let wanted = 1 + rng.below(CORPUS_MAX_DISKS);
    let gray = 110 + rng.below(91) as u8;
    let mut spec = SceneSpec::new(CORPUS_WIDTH, CORPUS_HEIGHT, [gray; 3]);
    for _ in 0..wanted {
        for _ in 0..PLACEMENT_ATTEMPTS {
            let radius = 10 + rng.below(51) as i64;
            let cx = radius + 2 + rng.below((w - 2 * radius - 4) as u64) as i64;
            let cy = radius + 2 + rng.below((h - 2 * radius - 4) as u64) as i64;
            let candidate = Disk {
                cx,
                cy,
                radius,
                color: [0; 3],
            };
            if spec.disks.iter().all(|d| clears(d, &candidate, CORPUS_GAP)) {
                let color = PALETTE[rng.below(PALETTE.len() as u64) as usize];
                spec.disks.push(Disk { color, ..candidate });
                break;
            }
        }
    }
    match profile {
        Profile::Clean => {}
        Profile::Noisy => spec.noise_sigma = NOISY_SIGMA,
        Profile::Occluded => {
            spec.noise_sigma = NOISY_SIGMA;
            spec.occlusion_fraction = MAX_OCCLUSION * rng.unit();
        }
    }
    spec.rng_seed = rng.next_u64();
    spec
}

/// `n` deterministic scenes for `profile`.
pub fn corpus(profile: Profile, n: usize, seed: u64) -> Vec<(RgbImage, GroundTruth)> {
    let mut master = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let spec = corpus_scene(profile, master.next_u64());
            render(&spec).expect("corpus layouts satisfy the scene invariants")
        })
        .collect()
}

pub fn item_id(index: usize) -> String {
    format!("img{index:04}")
}

/// Writes `{id}.ppm` and `{id}.truth` for every item.
pub fn write_corpus(dir: &Path, items: &[(RgbImage, GroundTruth)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, (img, truth)) in items.iter().enumerate() {
        let id = item_id(i);
        let image_path = dir.join(format!("{id}.ppm"));
        std::fs::write(&image_path, write_ppm(img)).map_err(|e| Error::io(&image_path, e))?;
        let truth_path = dir.join(format!("{id}.truth"));
        std::fs::write(&truth_path, truth.to_sidecar()).map_err(|e| Error::io(&truth_path, e))?;
    }
    Ok(())
}

/// Image/truth pairs under `dir`, sorted by id. Images without a sidecar are
/// an error.
pub fn read_corpus(dir: &Path) -> Result<Vec<(String, RgbImage, GroundTruth)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut images: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("ppm" | "pgm")))
        .collect();
    images.sort();
    let mut out = Vec::with_capacity(images.len());
    for path in images {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let img = read_pnm(&bytes)
            .map_err(|e| Error::Io {
                path: path.clone(),
                message: e.to_string(),
            })?
            .into_rgb();
        let truth_path = path.with_extension("truth");
        let text = std::fs::read_to_string(&truth_path).map_err(|e| Error::io(&truth_path, e))?;
        let truth = GroundTruth::parse_sidecar(&text).map_err(|e| Error::Io {
            path: truth_path.clone(),
            message: e.to_string(),
        })?;
        out.push((id, img, truth));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::saturation_pixel;

    #[test]
    fn splitmix_reference_values() {
        // first outputs for seed 0 published with the reference implementation
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn normal_moments() {
        let mut rng = SplitMix64::new(99);
        let xs: Vec<f64> = (0..200_000).map(|_| rng.normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn below_is_in_range() {
        let mut rng = SplitMix64::new(5);
        for n in [1u64, 2, 7, 51, 1000] {
            assert!((0..1000).all(|_| rng.below(n) < n));
        }
    }

    #[test]
    fn palette_is_saturated() {
        for c in PALETTE {
            assert!(saturation_pixel(c) as f64 >= 0.6 * 255.0, "{c:?}");
        }
    }

    #[test]
    fn blank_scene() {
        let (img, truth) = render(&SceneSpec::new(32, 16, [120; 3])).unwrap();
        assert_eq!(img, RgbImage::filled(32, 16, [120; 3]));
        assert_eq!(truth.count(), 0);
    }

    #[test]
    fn disk_area_matches_membership_count() {
        let spec = SceneSpec::new(128, 128, [128; 3]).with_disk(64, 64, 20, [255, 0, 0]);
        let (img, truth) = render(&spec).unwrap();
        let painted = img.pixels().filter(|&p| p == [255, 0, 0]).count();
        let mut brute = 0;
        for y in 0..128i64 {
            for x in 0..128i64 {
                if (x - 64).pow(2) + (y - 64).pow(2) <= 400 {
                    brute += 1;
                }
            }
        }
        assert_eq!(painted, brute);
        assert_eq!(brute, 1257);
        let area = PI * 400.0;
        assert!((painted as f64 - area).abs() <= 2.0 * PI * 20.0);
        assert_eq!(
            truth.circles,
            vec![TruthCircle {
                cx: 64,
                cy: 64,
                radius: 20
            }]
        );
    }

    #[test]
    fn rejects_invalid_layouts() {
        let edge = SceneSpec::new(64, 64, [0; 3]).with_disk(10, 30, 9, [255, 0, 0]);
        assert!(matches!(render(&edge), Err(Error::InvalidSpec(_))));
        let close = SceneSpec::new(128, 64, [0; 3])
            .with_disk(30, 30, 10, [255, 0, 0])
            .with_disk(53, 30, 10, [255, 0, 0]);
        assert!(matches!(render(&close), Err(Error::InvalidSpec(_))));
        let mut overlap = close.clone();
        overlap.allow_overlap = true;
        assert!(render(&overlap).is_ok());
        let mut occl = SceneSpec::new(8, 8, [0; 3]);
        occl.occlusion_fraction = 0.5;
        assert!(render(&occl).is_err());
    }

    #[test]
    fn occlusion_removes_a_wedge() {
        let mut spec = SceneSpec::new(128, 128, [128; 3]).with_disk(64, 64, 30, [255, 0, 0]);
        spec.occlusion_fraction = 0.25;
        spec.rng_seed = 3;
        let (img, truth) = render(&spec).unwrap();
        let painted = img.pixels().filter(|&p| p == [255, 0, 0]).count() as f64;
        let full = (PI * 900.0).round();
        assert!((painted / full - 0.75).abs() < 0.02, "{}", painted / full);
        assert_eq!(truth.count(), 1);
    }

    #[test]
    fn seeded_renders_are_identical() {
        let mut spec = SceneSpec::new(96, 96, [150; 3]).with_disk(40, 40, 15, PALETTE[0]);
        spec.noise_sigma = 10.0;
        spec.occlusion_fraction = 0.1;
        spec.rng_seed = 42;
        assert_eq!(render(&spec).unwrap(), render(&spec).unwrap());
        let other = SceneSpec {
            rng_seed: 43,
            ..spec.clone()
        };
        assert_ne!(render(&spec).unwrap().0, render(&other).unwrap().0);
    }

    #[test]
    fn corpus_profiles() {
        let a = corpus(Profile::Clean, 1, 1);
        assert_eq!(a.len(), 1);
        assert!(a[0].1.circles.iter().all(|c| (10..=60).contains(&c.radius)));
        assert!(a[0].1.count() >= 1);
        assert_eq!(corpus(Profile::Noisy, 3, 9), corpus(Profile::Noisy, 3, 9));
        // same layouts across profiles
        let clean = corpus(Profile::Clean, 3, 9);
        let noisy = corpus(Profile::Noisy, 3, 9);
        for (c, n) in clean.iter().zip(&noisy) {
            assert_eq!(c.1, n.1);
            assert_ne!(c.0, n.0);
        }
    }

    #[test]
    fn reference_corpus_total() {
        let total: usize = corpus(Profile::Clean, 100, 7)
            .iter()
            .map(|(_, t)| t.count())
            .sum();
        assert_eq!(total, 634);
    }

    #[test]
    fn sidecar_parsing() {
        let t = GroundTruth::parse_sidecar("10 20 30\n\n 4 5 6 \n").unwrap();
        assert_eq!(t.count(), 2);
        assert_eq!(t.to_sidecar(), "10 20 30\n4 5 6\n");
        assert!(GroundTruth::parse_sidecar("1 2\n").is_err());
        assert!(GroundTruth::parse_sidecar("1 2 x\n").is_err());
        assert!(GroundTruth::parse_sidecar("1 2 0\n").is_err());
    }
}
