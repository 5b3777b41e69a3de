//! Sampled certificate for the uniform interior cone condition: at every
//! boundary vertex x some axis ω must satisfy w + C_ω ⊂ Ω for all
//! w ∈ B_a(x) ∩ Ω̄, where C_ω = {y : ⟨y, ω⟩ > |y| cos θ, |y| < a}.

use serde::{Deserialize, Serialize};

use super::{cross, dist, dot, lerp, norm, point_segment_distance, sub, BoundaryPolyline, Point2};

/// Sampling densities of the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeCheckConfig {
    /// Number of candidate axis directions around the full circle.
    pub directions: usize,
    /// Radial and angular resolution of the w-grid in B_a(x).
    pub w_radial: usize,
    pub w_angular: usize,
    /// Rays per cone, spread over the aperture.
    pub rays: usize,
}

impl Default for ConeCheckConfig {
    fn default() -> Self {
        ConeCheckConfig {
            directions: 48,
            w_radial: 4,
            w_angular: 16,
            rays: 9,
        }
    }
}

/// A boundary vertex at which no sampled axis works, with the offending
/// apex and the point of the cone found outside Ω (for the inward-normal axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeWitness {
    pub vertex: usize,
    pub x: Point2,
    pub omega: Point2,
    pub w: Point2,
    pub point: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub pass: bool,
    pub theta: f64,
    pub a: f64,
    pub vertices_checked: usize,
    pub witness: Option<ConeWitness>,
}

/// Cone certificate for a boundary polyline.
pub fn cone_condition_check(
    poly: &BoundaryPolyline,
    theta: f64,
    a: f64,
    config: &ConeCheckConfig,
) -> ConeReport {
    cone_condition_check_rings(std::slice::from_ref(&poly.vertices), theta, a, config)
}

struct Region<'a> {
    rings: &'a [Vec<Point2>],
}

impl Region<'_> {
    fn contains(&self, x: Point2) -> bool {
        self.rings
            .iter()
            .filter(|r| r.len() >= 3)
            .fold(false, |acc, r| acc ^ super::ring_contains(r, x))
    }

    fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.rings.iter().flat_map(|r| {
            let n = r.len();
            (0..n).map(move |i| (r[i], r[(i + 1) % n]))
        })
    }
}

/// Parameter of the first crossing of the ray `p + t d` (`|d| = 1`) with
/// segment `[q0, q1]` in the range `(t_min, t_max)`.
fn ray_hit(p: Point2, d: Point2, q0: Point2, q1: Point2, t_min: f64, t_max: f64) -> Option<f64> {
    let e = sub(q1, q0);
    let den = cross(d, e);
    if den.abs() < 1e-300 {
        return None;
    }
    let qp = sub(q0, p);
    let t = cross(qp, e) / den;
    let s = cross(qp, d) / den;
    if t > t_min && t < t_max && (-1e-12..=1.0 + 1e-12).contains(&s) {
        Some(t)
    } else {
        None
    }
}

fn rotate(v: Point2, angle: f64) -> Point2 {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Checks the cone `w + C_ω` against the nearby boundary; returns a point
/// of the cone outside Ω when containment fails.
fn cone_violation(
    region: &Region,
    near: &[(Point2, Point2)],
    w: Point2,
    omega: Point2,
    theta: f64,
    a: f64,
    rays: usize,
) -> Option<Point2> {
    let t_min = 1e-9 * a;
    let reach = 0.999 * a;
    let cos_t = theta.cos();
    // boundary vertices strictly inside the open cone
    for &(q, _) in near {
        let v = sub(q, w);
        let r = norm(v);
        if r > t_min && r < reach && dot(v, omega) > r * cos_t * (1.0 + 1e-12) {
            return Some(q);
        }
    }
    let half = 0.999 * theta;
    for k in 0..rays {
        let ang = if rays == 1 {
            0.0
        } else {
            -half + 2.0 * half * k as f64 / (rays - 1) as f64
        };
        let d = rotate(omega, ang);
        for &(q0, q1) in near {
            if let Some(t) = ray_hit(w, d, q0, q1, t_min, reach) {
                return Some([w[0] + t * d[0], w[1] + t * d[1]]);
            }
        }
    }
    let probe = [w[0] + 0.5 * a * omega[0], w[1] + 0.5 * a * omega[1]];
    if region.contains(probe) {
        None
    } else {
        Some(probe)
    }
}

/// Cone certificate for a region bounded by one or more closed rings
/// (even-odd interior).  Every ring vertex is tested as a boundary point.
pub fn cone_condition_check_rings(
    rings: &[Vec<Point2>],
    theta: f64,
    a: f64,
    config: &ConeCheckConfig,
) -> ConeReport {
    let region = Region { rings };
    let all_segments: Vec<(Point2, Point2)> = region.segments().collect();
    let mut checked = 0;
    let mut flat_index = 0;
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let vertex = flat_index + i;
            let x = ring[i];
            let prev = ring[(i + n - 1) % n];
            let next = ring[(i + 1) % n];
            let inward = inward_direction(region.rings, prev, x, next);
            let near: Vec<(Point2, Point2)> = all_segments
                .iter()
                .copied()
                .filter(|&(p, q)| point_segment_distance(x, p, q) < 2.0 * a)
                .collect();
            let apexes = apex_samples(&region, &near, x, a, config);
            checked += 1;
            let mut first_failure = None;
            let mut found = false;
            for k in 0..config.directions.max(1) {
                // 0, +1, -1, +2, -2, ... steps away from the inward normal
                let step = (k + 1) / 2;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                let angle = sign * step as f64 * 2.0 * std::f64::consts::PI / config.directions.max(1) as f64;
                let omega = rotate(inward, angle);
                let bad = apexes.iter().find_map(|&w| {
                    cone_violation(&region, &near, w, omega, theta, a, config.rays).map(|pt| (w, pt))
                });
                match bad {
                    None => {
                        found = true;
                        break;
                    }
                    Some((w, point)) if first_failure.is_none() => {
                        first_failure = Some(ConeWitness { vertex, x, omega, w, point });
                    }
                    Some(_) => {}
                }
            }
            if !found {
                return ConeReport {
                    pass: false,
                    theta,
                    a,
                    vertices_checked: checked,
                    witness: first_failure,
                };
            }
        }
        flat_index += n;
    }
    ConeReport {
        pass: true,
        theta,
        a,
        vertices_checked: checked,
        witness: None,
    }
}

/// Unit vector bisecting the two edges at `x`, pointing into the region.
fn inward_direction(rings: &[Vec<Point2>], prev: Point2, x: Point2, next: Point2) -> Point2 {
    let unit = |v: Point2| {
        let l = norm(v);
        [v[0] / l, v[1] / l]
    };
    let d1 = unit(sub(x, prev));
    let d2 = unit(sub(next, x));
    // left normals of both edges; for positive orientation they point inward
    let n = [-(d1[1] + d2[1]), d1[0] + d2[0]];
    let mut dir = if norm(n) > 1e-12 { unit(n) } else { [-d1[1], d1[0]] };
    let region = Region { rings };
    let probe_len = 1e-6 * dist(prev, next).max(1e-6);
    if !region.contains([x[0] + probe_len * dir[0], x[1] + probe_len * dir[1]]) {
        dir = [-dir[0], -dir[1]];
    }
    dir
}

/// Apex points w ∈ B_a(x) ∩ Ω̄: x itself, nearby boundary vertices and
/// segment midpoints, and a polar grid filtered by membership in Ω.
fn apex_samples(
    region: &Region,
    near: &[(Point2, Point2)],
    x: Point2,
    a: f64,
    config: &ConeCheckConfig,
) -> Vec<Point2> {
    let mut out = vec![x];
    for &(p, q) in near {
        for c in [p, lerp(p, q, 0.5)] {
            if dist(c, x) < a && c != x {
                out.push(c);
            }
        }
    }
    for i in 1..=config.w_radial {
        let r = 0.999 * a * i as f64 / config.w_radial as f64;
        for j in 0..config.w_angular {
            let t = 2.0 * std::f64::consts::PI * j as f64 / config.w_angular as f64;
            let w = [x[0] + r * t.cos(), x[1] + r * t.sin()];
            if region.contains(w) {
                out.push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{disk_polyline, slit_square, SLIT_HALF_WIDTH};
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_passes() {
        let r = cone_condition_check(&disk_polyline(1.0, 96), PI / 6.0, 0.2, &ConeCheckConfig::default());
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn slit_fails_with_witness_near_the_slit() {
        let r = cone_condition_check(&slit_square(0.02), PI / 6.0, 0.1, &ConeCheckConfig::default());
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert!((w.x[0] - 0.5).abs() < 0.1 + SLIT_HALF_WIDTH && w.x[1] > 0.4);
    }

    #[test]
    fn smaller_cones_keep_passing() {
        let p = disk_polyline(1.0, 64);
        for (t, a) in [(PI / 6.0, 0.2), (PI / 8.0, 0.1), (PI / 12.0, 0.05)] {
            assert!(cone_condition_check(&p, t, a, &ConeCheckConfig::default()).pass);
        }
    }
}
