//! Straight-sided and circular test domains with known geometric features.

use std::f64::consts::PI;

use super::{dist, lerp, BoundaryPolyline, BoundaryTag, Point2};

/// Regular `n`-gon inscribed in the circle of radius `r` about the origin.
pub fn disk_polyline(r: f64, n: usize) -> BoundaryPolyline {
    let vertices = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    BoundaryPolyline::from_ring(vertices, BoundaryTag::Sigma)
}

/// Splits every edge of a closed ring into pieces no longer than `max_len`.
pub fn subdivide_ring(corners: &[Point2], max_len: f64) -> Vec<Point2> {
    let n = corners.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (corners[i], corners[(i + 1) % n]);
        let pieces = (dist(a, b) / max_len).ceil().max(1.0) as usize;
        for k in 0..pieces {
            out.push(lerp(a, b, k as f64 / pieces as f64));
        }
    }
    out
}

/// Half-width of the slit cut into [`slit_square`].
pub const SLIT_HALF_WIDTH: f64 = 0.01;

/// Unit square with a thin slot x ∈ [0.49, 0.51], y ∈ [0.5, 1] removed
/// from its top edge.
pub fn slit_square(max_len: f64) -> BoundaryPolyline {
    let (l, r) = (0.5 - SLIT_HALF_WIDTH, 0.5 + SLIT_HALF_WIDTH);
    let corners = [
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [r, 1.0],
        [r, 0.5],
        [l, 0.5],
        [l, 1.0],
        [0.0, 1.0],
    ];
    BoundaryPolyline::from_ring(subdivide_ring(&corners, max_len), BoundaryTag::Sigma)
}

/// Half-width of the neck joining the two lobes of [`dumbbell`].
pub const DUMBBELL_NECK_HALF_WIDTH: f64 = 0.05;

/// Two unit squares `[0,1]²` and `[1.6,2.6]×[0,1]` joined by the neck
/// `[1,1.6]×[0.45,0.55]`.
pub fn dumbbell(max_len: f64) -> BoundaryPolyline {
    let (lo, hi) = (0.5 - DUMBBELL_NECK_HALF_WIDTH, 0.5 + DUMBBELL_NECK_HALF_WIDTH);
    let corners = [
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, lo],
        [1.6, lo],
        [1.6, 0.0],
        [2.6, 0.0],
        [2.6, 1.0],
        [1.6, 1.0],
        [1.6, hi],
        [1.0, hi],
        [1.0, 1.0],
        [0.0, 1.0],
    ];
    BoundaryPolyline::from_ring(subdivide_ring(&corners, max_len), BoundaryTag::Sigma)
}
