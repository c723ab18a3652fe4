//! Seeded stroke-rendered digit images, for running the autoencoder
//! benchmark without a downloaded dataset.
//!
//! Each image is one of ten polyline glyphs drawn on a 28x28 canvas under a
//! random scale, slant, rotation, shift and stroke width, with soft edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rud_core::objectives::ImageDataset;

pub const SIDE: usize = 28;

type Stroke = &'static [(f64, f64)];

/// Glyph polylines in a unit box, `y` pointing down.
const GLYPHS: [&[Stroke]; 10] = [
    &[&[
        (0.5, 0.0),
        (0.85, 0.2),
        (0.9, 0.5),
        (0.85, 0.8),
        (0.5, 1.0),
        (0.15, 0.8),
        (0.1, 0.5),
        (0.15, 0.2),
        (0.5, 0.0),
    ]],
    &[&[(0.3, 0.2), (0.55, 0.0), (0.55, 1.0)], &[(0.3, 1.0), (0.8, 1.0)]],
    &[&[
        (0.15, 0.2),
        (0.45, 0.0),
        (0.8, 0.1),
        (0.85, 0.35),
        (0.15, 1.0),
        (0.9, 1.0),
    ]],
    &[&[
        (0.15, 0.05),
        (0.8, 0.05),
        (0.45, 0.45),
        (0.85, 0.65),
        (0.7, 0.95),
        (0.15, 0.9),
    ]],
    &[&[(0.7, 1.0), (0.7, 0.0), (0.1, 0.65), (0.9, 0.65)]],
    &[&[
        (0.85, 0.0),
        (0.2, 0.0),
        (0.15, 0.45),
        (0.7, 0.45),
        (0.85, 0.7),
        (0.65, 1.0),
        (0.15, 0.9),
    ]],
    &[&[
        (0.75, 0.0),
        (0.3, 0.35),
        (0.15, 0.75),
        (0.45, 1.0),
        (0.8, 0.8),
        (0.7, 0.5),
        (0.2, 0.6),
    ]],
    &[&[(0.1, 0.0), (0.9, 0.0), (0.4, 1.0)], &[(0.35, 0.5), (0.75, 0.5)]],
    &[
        &[
            (0.5, 0.45),
            (0.2, 0.25),
            (0.5, 0.0),
            (0.8, 0.25),
            (0.5, 0.45),
            (0.15, 0.72),
            (0.5, 1.0),
            (0.85, 0.72),
            (0.5, 0.45),
        ],
    ],
    &[&[
        (0.8, 0.4),
        (0.5, 0.5),
        (0.2, 0.3),
        (0.5, 0.0),
        (0.8, 0.2),
        (0.8, 0.5),
        (0.3, 1.0),
    ]],
];

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + s * dx - p.0, a.1 + s * dy - p.1);
    (qx * qx + qy * qy).sqrt()
}

fn render_one(rng: &mut ChaCha8Rng, digit: usize, out: &mut [u8]) {
    let scale = rng.random_range(14.0..19.0);
    let aspect = rng.random_range(0.75..1.05);
    let slant = rng.random_range(-0.25..0.25);
    let angle: f64 = rng.random_range(-0.2..0.2);
    let width = rng.random_range(1.0..1.9);
    let shift = (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
    let (sin, cos) = angle.sin_cos();
    let centre = SIDE as f64 / 2.0;

    let place = |(x, y): (f64, f64)| {
        let (u, v) = ((x - 0.5) * scale * aspect, (y - 0.5) * scale);
        let u = u + slant * -v;
        (
            centre + shift.0 + cos * u - sin * v,
            centre + shift.1 + sin * u + cos * v,
        )
    };
    let segments: Vec<((f64, f64), (f64, f64))> = GLYPHS[digit]
        .iter()
        .flat_map(|stroke| stroke.windows(2).map(|w| (place(w[0]), place(w[1]))))
        .collect();

    for r in 0..SIDE {
        for c in 0..SIDE {
            let p = (c as f64 + 0.5, r as f64 + 0.5);
            let d = segments
                .iter()
                .map(|&(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min);
            let ink = (1.0 - (d - width) / 0.9).clamp(0.0, 1.0);
            out[r * SIDE + c] = (255.0 * ink).round() as u8;
        }
    }
}

/// `count` images of uniformly drawn digits.
pub fn synthetic_digits(count: usize, seed: u64) -> ImageDataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = vec![0u8; count * SIDE * SIDE];
    for img in pixels.chunks_exact_mut(SIDE * SIDE) {
        let digit = rng.random_range(0..GLYPHS.len());
        render_one(&mut rng, digit, img);
    }
    ImageDataset::from_bytes(count, SIDE, SIDE, &pixels)
}
