//! RGB to HSV saturation.

use crate::imagebuf::{GrayImage, RgbImage};

/// Saturation of one pixel scaled to `[0, 255]`, rounded half up.
///
/// `S = 1 - min/max` (0 when `max == 0`), so `255 * S = 255 * (max - min) / max`,
/// evaluated in integers to keep the rounding exact.
#[inline]
pub fn saturation_pixel([r, g, b]: [u8; 3]) -> u8 {
    let max = r.max(g).max(b) as u32;
    if max == 0 {
        return 0;
    }
    let min = r.min(g).min(b) as u32;
    ((2 * 255 * (max - min) + max) / (2 * max)) as u8
}

/// The saturation plane of `src`; hue and value are never formed.
pub fn saturation(src: &RgbImage) -> GrayImage {
    let data = src.pixels().map(saturation_pixel).collect();
    GrayImage::from_raw(src.width(), src.height(), data).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_pixels() {
        assert_eq!(saturation_pixel([0, 0, 0]), 0);
        assert_eq!(saturation_pixel([255, 0, 0]), 255);
        assert_eq!(saturation_pixel([100, 50, 50]), 128);
        assert_eq!(saturation_pixel([200, 200, 200]), 0);
    }

    #[test]
    fn plane_preserves_dimensions() {
        let src = RgbImage::from_raw(2, 1, vec![255, 0, 0, 9, 9, 9]).unwrap();
        let s = saturation(&src);
        assert_eq!(s.dimensions(), (2, 1));
        assert_eq!(s.data(), &[255, 0]);
    }

    /// Every RGB triple against a floating-point evaluation of `1 - min/max`.
    /// Values sitting on a rounding tie within float error are resolved by the
    /// exact rational comparison instead.
    #[test]
    fn exhaustive_against_float_formula() {
        for r in 0..=255u32 {
            for g in 0..=255u32 {
                for b in 0..=255u32 {
                    let px = [r as u8, g as u8, b as u8];
                    let got = saturation_pixel(px);
                    let max = r.max(g).max(b);
                    let min = r.min(g).min(b);
                    if max == 0 {
                        assert_eq!(got, 0);
                        continue;
                    }
                    let s = 1.0 - min as f64 / max as f64;
                    let scaled = s * 255.0;
                    let expected = (scaled + 0.5).floor() as u8;
                    if (scaled.fract() - 0.5).abs() < 1e-9 {
                        // exact tie test: 2*255*(max-min) == (2k+1)*max
                        let k = scaled.floor() as u32;
                        assert_eq!(2 * 255 * (max - min), (2 * k + 1) * max);
                        assert_eq!(got as u32, k + 1);
                    } else {
                        assert_eq!(got, expected, "{px:?}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn scale_invariance(
            (k, r, g, b) in (2u32..=16).prop_flat_map(|k| {
                let top = (255 / k) as u8;
                (Just(k), 0..=top, 0..=top, 0..=top)
            })
        ) {
            let scaled = [(r as u32 * k) as u8, (g as u32 * k) as u8, (b as u32 * k) as u8];
            let d = saturation_pixel(scaled) as i32 - saturation_pixel([r, g, b]) as i32;
            prop_assert!(d.abs() <= 1);
        }

        #[test]
        fn permutation_invariance(r: u8, g: u8, b: u8) {
            let s = saturation_pixel([r, g, b]);
            for p in [[r, b, g], [g, r, b], [g, b, r], [b, r, g], [b, g, r]] {
                prop_assert_eq!(saturation_pixel(p), s);
            }
        }
    }
}
