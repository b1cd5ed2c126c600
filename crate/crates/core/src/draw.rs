//! Raster drawing used for annotation and synthetic fixtures.

use crate::imagebuf::RgbImage;

pub const HIGHLIGHT: [u8; 3] = [0, 255, 0];

/// Pixels of the midpoint-circle outline around `(cx, cy)`, deduplicated and
/// sorted by `(y, x)`. Coordinates may be negative or outside any image.
pub fn circle_outline(cx: i64, cy: i64, radius: i64) -> Vec<(i64, i64)> {
    let mut pts = Vec::new();
    if radius <= 0 {
        pts.push((cx, cy));
        return pts;
    }
    let (mut x, mut y, mut d) = (radius, 0i64, 1 - radius);
    while x >= y {
        for (px, py) in [
            (x, y),
            (y, x),
            (-y, x),
            (-x, y),
            (-x, -y),
            (-y, -x),
            (y, -x),
            (x, -y),
        ] {
            pts.push((cx + px, cy + py));
        }
        y += 1;
        if d < 0 {
            d += 2 * y + 1;
        } else {
            x -= 1;
            d += 2 * (y - x) + 1;
        }
    }
    pts.sort_unstable_by_key(|&(x, y)| (y, x));
    pts.dedup();
    pts
}

fn put(img: &mut RgbImage, x: i64, y: i64, color: [u8; 3]) {
    if x >= 0 && y >= 0 && (x as usize) < img.width() && (y as usize) < img.height() {
        img.set(x as usize, y as usize, color);
    }
}

pub fn draw_circle(img: &mut RgbImage, cx: i64, cy: i64, radius: i64, color: [u8; 3]) {
    for (x, y) in circle_outline(cx, cy, radius) {
        put(img, x, y, color);
    }
}

/// 3x3 square centered on `(cx, cy)`.
pub fn draw_marker(img: &mut RgbImage, cx: i64, cy: i64, color: [u8; 3]) {
    for dy in -1..=1 {
        for dx in -1..=1 {
            put(img, cx + dx, cy + dy, color);
        }
    }
}
