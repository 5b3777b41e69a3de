//! Lens domains inside the upper half-ball and the purely geometric
//! quantities attached to them: boundary polylines, distances to the
//! boundary, radii about a center, heights, and the interior-cone and
//! parallel-set certificates.

mod cone;
pub mod fixtures;
mod parallel;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::quadrature::adaptive_gk15;

pub use cone::{cone_condition_check, cone_condition_check_rings, ConeCheckConfig, ConeReport, ConeWitness};
pub use parallel::{parallel_set_boundary, parallel_set_connected, ParallelSetReport};

/// A point of the plane.
pub type Point2 = [f64; 2];

pub(crate) fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn dist(a: Point2, b: Point2) -> f64 {
    norm(sub(a, b))
}

pub(crate) fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn lerp(a: Point2, b: Point2, t: f64) -> Point2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Distance from `x` to the closed segment `[a, b]`.
pub fn point_segment_distance(x: Point2, a: Point2, b: Point2) -> f64 {
    let d = sub(b, a);
    let len2 = dot(d, d);
    let t = if len2 > 0.0 {
        (dot(sub(x, a), d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(x, lerp(a, b, t))
}

/// Which piece of the boundary a segment or edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryTag {
    /// The free boundary, where the Dirichlet condition holds.
    Sigma,
    /// The patch of the unit sphere carrying the Steklov-type condition.
    TArc,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Sigma => "SIGMA",
            BoundaryTag::TArc => "T_ARC",
        }
    }
}

impl std::str::FromStr for BoundaryTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SIGMA" => Ok(BoundaryTag::Sigma),
            "T_ARC" => Ok(BoundaryTag::TArc),
            other => Err(format!("unknown boundary tag {other:?}")),
        }
    }
}

/// Shape of the radial perturbation of the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileShape {
    /// g = 0.
    Identity,
    /// g(s) = sin⁴(πs) on the window, s the normalized angle; C² with
    /// g = g' = 0 at both window ends and max g = 1 at the middle.
    Bump,
}

/// Radial perturbation r(φ) = R₀(1 + ε g(φ)) of the cap around its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationProfile {
    pub amplitude: f64,
    pub shape: ProfileShape,
    /// Angular interval `[φ_a, φ_b]` (polar angle about the cap center)
    /// outside of which g vanishes.
    pub window: [f64; 2],
}

impl PerturbationProfile {
    pub fn identity() -> Self {
        PerturbationProfile {
            amplitude: 0.0,
            shape: ProfileShape::Identity,
            window: [0.0, 0.0],
        }
    }

    pub fn bump(window: [f64; 2]) -> Self {
        PerturbationProfile {
            amplitude: 0.0,
            shape: ProfileShape::Bump,
            window,
        }
    }

    fn normalized(&self, phi: f64) -> Option<f64> {
        let [a, b] = self.window;
        if b <= a || phi <= a || phi >= b {
            None
        } else {
            Some((phi - a) / (b - a))
        }
    }

    /// g(φ).
    pub fn shape_value(&self, phi: f64) -> f64 {
        match (self.shape, self.normalized(phi)) {
            (ProfileShape::Bump, Some(s)) => (PI * s).sin().powi(4),
            _ => 0.0,
        }
    }

    /// g'(φ).
    pub fn shape_derivative(&self, phi: f64) -> f64 {
        match (self.shape, self.normalized(phi)) {
            (ProfileShape::Bump, Some(s)) => {
                let (sn, cs) = (PI * s).sin_cos();
                4.0 * sn.powi(3) * cs * PI / (self.window[1] - self.window[0])
            }
            _ => 0.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.amplitude == 0.0 || self.shape == ProfileShape::Identity
    }
}

/// Analytic description of a lens domain Ω = {x ∈ B : |x − z₀| < r(φ)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dimension: usize,
    pub cap_radius: f64,
    pub cap_center: Vec<f64>,
    pub perturbation: PerturbationProfile,
    pub cone_theta: f64,
    pub cone_a: f64,
    #[serde(default)]
    pub inner_radius: Option<f64>,
}

/// Default interior-cone parameters attached to lens domains.  The cone
/// length shrinks with caps of radius below one, whose corners turn faster.
pub const DEFAULT_CONE_THETA: f64 = PI / 6.0;
pub const DEFAULT_CONE_A: f64 = 0.1;

fn default_cone_a(radius: f64) -> f64 {
    DEFAULT_CONE_A * radius.min(1.0)
}

/// Builds the cap whose sphere |x − z| = R meets the unit sphere
/// orthogonally, with z = (z', sqrt(1 + R² − |z'|²)).
pub fn make_symmetric_cap(
    dimension: usize,
    radius: f64,
    z_prime: &[f64],
) -> Result<DomainSpec, GeometryError> {
    if dimension < 2 {
        return Err(GeometryError::InvalidParameter(format!(
            "dimension must be at least 2, got {dimension}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::InvalidParameter(format!(
            "cap radius must be positive and finite, got {radius}"
        )));
    }
    if z_prime.len() != dimension - 1 {
        return Err(GeometryError::InvalidParameter(format!(
            "z' must have {} components, got {}",
            dimension - 1,
            z_prime.len()
        )));
    }
    let zp2: f64 = z_prime.iter().map(|v| v * v).sum();
    let zn2 = 1.0 + radius * radius - zp2;
    if !(zn2 > 0.0) {
        return Err(GeometryError::EmptyLens(format!(
            "|z'|^2 = {zp2} leaves no positive z_N for R = {radius}"
        )));
    }
    let mut center = z_prime.to_vec();
    center.push(zn2.sqrt());
    let spec = DomainSpec {
        dimension,
        cap_radius: radius,
        cap_center: center,
        perturbation: PerturbationProfile::identity(),
        cone_theta: DEFAULT_CONE_THETA,
        cone_a: default_cone_a(radius),
        inner_radius: None,
    };
    spec.validate().map_err(|e| match e {
        GeometryError::InadmissiblePerturbation(m) => GeometryError::EmptyLens(m),
        other => other,
    })?;
    Ok(spec)
}

/// Perturbs the free boundary of a symmetric cap radially:
/// r(φ) = R₀(1 + ε g(φ)).  Λ and T are unchanged.
pub fn make_perturbed_domain(
    base: &DomainSpec,
    eps: f64,
    profile: &PerturbationProfile,
) -> Result<DomainSpec, GeometryError> {
    if base.dimension != 2 {
        return Err(GeometryError::NotPlanar(base.dimension));
    }
    if !base.perturbation.is_identity() {
        return Err(GeometryError::InvalidParameter(
            "base domain must be an unperturbed cap".into(),
        ));
    }
    if !eps.is_finite() {
        return Err(GeometryError::InadmissiblePerturbation(format!(
            "amplitude {eps} is not finite"
        )));
    }
    let mut spec = base.clone();
    spec.perturbation = PerturbationProfile {
        amplitude: eps,
        ..*profile
    };
    spec.validate()?;
    Ok(spec)
}

impl DomainSpec {
    /// Number of boundary samples used by the admissibility checks.
    const ADMISSIBILITY_SAMPLES: usize = 4096;

    fn require_planar(&self) -> Result<(), GeometryError> {
        if self.dimension == 2 {
            Ok(())
        } else {
            Err(GeometryError::NotPlanar(self.dimension))
        }
    }

    /// Planar reduction of the cap: for N = 2 the center itself, for
    /// N ≥ 3 the center written in the plane spanned by z' and e_N.
    fn planar_center(&self) -> Point2 {
        let n = self.cap_center.len();
        let zp: f64 = self.cap_center[..n - 1]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        if self.dimension == 2 {
            [self.cap_center[0], self.cap_center[1]]
        } else {
            [zp, self.cap_center[n - 1]]
        }
    }

    /// Cap center z₀ as a planar point (N = 2).
    pub fn center(&self) -> Point2 {
        self.planar_center()
    }

    /// Polar-angle window `[φ_a, φ_b]` about z₀ in which the unperturbed
    /// cap lies inside B; φ_a gives the left corner, φ_b the right one.
    pub fn sigma_window(&self) -> [f64; 2] {
        let z = self.planar_center();
        let zn = norm(z);
        let center = (-z[1]).atan2(-z[0]);
        let half = (self.cap_radius / zn).clamp(-1.0, 1.0).acos();
        [center - half, center + half]
    }

    /// r(φ).
    pub fn radius_at(&self, phi: f64) -> f64 {
        let p = &self.perturbation;
        let g = if p.is_identity() { 0.0 } else { p.shape_value(phi) };
        self.cap_radius * (1.0 + p.amplitude * g)
    }

    /// dr/dφ.
    pub fn radius_derivative(&self, phi: f64) -> f64 {
        let p = &self.perturbation;
        if p.is_identity() {
            0.0
        } else {
            self.cap_radius * p.amplitude * p.shape_derivative(phi)
        }
    }

    /// Point of Σ at polar angle φ about z₀.
    pub fn sigma_point(&self, phi: f64) -> Point2 {
        let z = self.planar_center();
        let r = self.radius_at(phi);
        [z[0] + r * phi.cos(), z[1] + r * phi.sin()]
    }

    /// The two corner points of Λ: `[left, right]`.
    pub fn corners(&self) -> [Point2; 2] {
        let [a, b] = self.sigma_window();
        [self.sigma_point(a), self.sigma_point(b)]
    }

    /// Angular window `[ψ_0, ψ_1]` of T on the unit circle, traversed
    /// counterclockwise from the right corner to the left one.
    pub fn t_window(&self) -> [f64; 2] {
        let [left, right] = self.corners();
        let p0 = right[1].atan2(right[0]);
        let mut p1 = left[1].atan2(left[0]);
        if p1 < p0 {
            p1 += 2.0 * PI;
        }
        [p0, p1]
    }

    /// Length of the planar free boundary Σ.
    pub fn sigma_length(&self) -> f64 {
        let [a, b] = self.sigma_window();
        if self.perturbation.is_identity() {
            return self.cap_radius * (b - a);
        }
        adaptive_gk15(|phi| self.sigma_speed(phi), a, b, 1e-13, 4000).value
    }

    fn sigma_speed(&self, phi: f64) -> f64 {
        self.radius_at(phi).hypot(self.radius_derivative(phi))
    }

    /// Length of the planar Steklov arc T.
    pub fn t_length(&self) -> f64 {
        let [p0, p1] = self.t_window();
        p1 - p0
    }

    /// Length of the mid ray of the lens: r(φ_c) minus the distance from
    /// z₀ to the unit circle along the same ray.
    pub fn thickness(&self) -> f64 {
        let [a, b] = self.sigma_window();
        let phi = 0.5 * (a + b);
        let z = self.planar_center();
        let e = [phi.cos(), phi.sin()];
        let ze = dot(z, e);
        let disc = (ze * ze - dot(z, z) + 1.0).max(0.0);
        let entry = -ze - disc.sqrt();
        self.radius_at(phi) - entry
    }

    /// Radial projection onto Σ (about z₀) or onto the unit circle.
    pub fn project(&self, tag: BoundaryTag, x: Point2) -> Point2 {
        match tag {
            BoundaryTag::Sigma => {
                let z = self.planar_center();
                let d = sub(x, z);
                let phi = d[1].atan2(d[0]);
                let [a, b] = self.sigma_window();
                // keep the angle on the branch of the window
                let mut phi = phi;
                while phi < a - PI {
                    phi += 2.0 * PI;
                }
                while phi > b + PI {
                    phi -= 2.0 * PI;
                }
                self.sigma_point(phi)
            }
            BoundaryTag::TArc => {
                let r = norm(x);
                [x[0] / r, x[1] / r]
            }
        }
    }

    /// `n + 1` samples of Σ at uniform polar angle, corners included.
    pub fn sigma_samples(&self, n: usize) -> Vec<Point2> {
        let [a, b] = self.sigma_window();
        let n = n.max(1);
        (0..=n)
            .map(|k| self.sigma_point(a + (b - a) * k as f64 / n as f64))
            .collect()
    }

    /// m = min{x_N : x ∈ Ω̄}; attained on Σ̄ since T lies higher than Λ.
    pub fn min_height(&self) -> f64 {
        let [a, b] = self.sigma_window();
        let f = |phi: f64| self.sigma_point(phi)[1];
        let n = 2048;
        let step = (b - a) / n as f64;
        let (mut best_k, mut best) = (0, f64::INFINITY);
        for k in 0..=n {
            let v = f(a + step * k as f64);
            if v < best {
                best = v;
                best_k = k;
            }
        }
        // golden-section polish on the bracketing cell pair
        let (mut lo, mut hi) = (
            (a + step * (best_k as f64 - 1.0)).max(a),
            (a + step * (best_k as f64 + 1.0)).min(b),
        );
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - ratio * (hi - lo);
            let m2 = lo + ratio * (hi - lo);
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best.min(f(0.5 * (lo + hi)))
    }

    /// Checks every invariant of the spec: orthogonal intersection,
    /// positivity of parameters, and (N = 2) that the realized Σ stays in
    /// the open upper half-ball with its endpoints on the unit circle.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.dimension < 2 || self.cap_center.len() != self.dimension {
            return Err(GeometryError::InvalidParameter(format!(
                "cap center has {} components for N = {}",
                self.cap_center.len(),
                self.dimension
            )));
        }
        if !(self.cap_radius > 0.0) || !self.cap_radius.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "cap radius must be positive, got {}",
                self.cap_radius
            )));
        }
        if !(self.cone_theta > 0.0 && self.cone_theta <= 0.5 * PI) {
            return Err(GeometryError::InvalidParameter(format!(
                "cone angle must lie in (0, pi/2], got {}",
                self.cone_theta
            )));
        }
        if !(self.cone_a > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "cone length must be positive, got {}",
                self.cone_a
            )));
        }
        if let Some(ri) = self.inner_radius {
            if !(ri > 0.0) {
                return Err(GeometryError::InvalidParameter(format!(
                    "inner radius must be positive, got {ri}"
                )));
            }
        }
        let z2: f64 = self.cap_center.iter().map(|v| v * v).sum();
        let mismatch = z2 - self.cap_radius * self.cap_radius - 1.0;
        if mismatch.abs() > 1e-12 * z2.max(1.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "|z|^2 - R^2 = {} differs from 1; the cap must meet the unit sphere orthogonally",
                mismatch + 1.0
            )));
        }
        if !(self.cap_center[self.dimension - 1] > 0.0) {
            return Err(GeometryError::EmptyLens("z_N must be positive".into()));
        }
        if self.dimension != 2 && !self.perturbation.is_identity() {
            return Err(GeometryError::NotPlanar(self.dimension));
        }
        let [left, right] = self.corners();
        if left[1] < 0.0 || right[1] < 0.0 {
            return Err(GeometryError::EmptyLens(format!(
                "the interface leaves the upper half-ball (corner heights {:.3e}, {:.3e})",
                left[1], right[1]
            )));
        }
        if self.dimension != 2 {
            return Ok(());
        }
        let p = &self.perturbation;
        let [a, b] = self.sigma_window();
        if !p.is_identity() && (p.window[0] < a - 1e-12 || p.window[1] > b + 1e-12) {
            return Err(GeometryError::InadmissiblePerturbation(format!(
                "profile window [{}, {}] exceeds the cap window [{a}, {b}]",
                p.window[0], p.window[1]
            )));
        }
        for (k, c) in [left, right].iter().enumerate() {
            if (norm(*c) - 1.0).abs() > 1e-10 {
                return Err(GeometryError::InadmissiblePerturbation(format!(
                    "corner {k} is off the unit circle by {:.3e}",
                    norm(*c) - 1.0
                )));
            }
        }
        let n = Self::ADMISSIBILITY_SAMPLES;
        for k in 1..n {
            let phi = a + (b - a) * k as f64 / n as f64;
            let r = self.radius_at(phi);
            if !(r > 0.0) {
                return Err(GeometryError::InadmissiblePerturbation(format!(
                    "radius {r:.4} at angle {phi:.4} is not positive"
                )));
            }
            let x = self.sigma_point(phi);
            if !(x[1] > 0.0) || !(norm(x) < 1.0) {
                return Err(GeometryError::InadmissiblePerturbation(format!(
                    "free boundary leaves the open half-ball at ({:.4}, {:.4})",
                    x[0], x[1]
                )));
            }
        }
        Ok(())
    }
}

/// Projection of points back onto the curved boundary pieces, used when
/// boundary vertices are inserted by meshing or refinement.
pub trait BoundaryCurves: Sync {
    fn project(&self, tag: BoundaryTag, x: Point2) -> Point2;
}

impl BoundaryCurves for DomainSpec {
    fn project(&self, tag: BoundaryTag, x: Point2) -> Point2 {
        DomainSpec::project(self, tag, x)
    }
}

/// Circle of the given radius about the given center; every tag maps to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl BoundaryCurves for Disk {
    fn project(&self, _tag: BoundaryTag, x: Point2) -> Point2 {
        let d = sub(x, self.center);
        let r = norm(d);
        [
            self.center[0] + self.radius * d[0] / r,
            self.center[1] + self.radius * d[1] / r,
        ]
    }
}

/// Straight-sided boundary: points stay where they are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Polygonal;

impl BoundaryCurves for Polygonal {
    fn project(&self, _tag: BoundaryTag, x: Point2) -> Point2 {
        x
    }
}

/// Distance to the boundary together with the side of the polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedDistance {
    pub distance: f64,
    pub inside: bool,
}

/// Closed, positively oriented polygon with tagged segments; segment `i`
/// joins vertex `i` to vertex `i + 1` (cyclically).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPolyline {
    pub vertices: Vec<Point2>,
    pub tags: Vec<BoundaryTag>,
    /// Corner vertices where Σ meets T (empty for fixtures without T).
    pub lambda: Vec<usize>,
}

/// Polyline of a lens with about `n` segments, split between Σ and T in
/// proportion to their lengths.
pub fn boundary_polyline(spec: &DomainSpec, n: usize) -> Result<BoundaryPolyline, GeometryError> {
    if n < 16 {
        return Err(GeometryError::InvalidParameter(format!(
            "need at least 16 boundary segments, got {n}"
        )));
    }
    spec.require_planar()?;
    let ls = spec.sigma_length();
    let lt = spec.t_length();
    let ns = ((n as f64 * ls / (ls + lt)).round() as usize).clamp(8, n - 8);
    boundary_polyline_counts(spec, ns, n - ns)
}

/// Polyline of a lens with `n_sigma` segments on Σ (arc-length uniform)
/// and `n_t` segments on T (uniform angle).
pub fn boundary_polyline_counts(
    spec: &DomainSpec,
    n_sigma: usize,
    n_t: usize,
) -> Result<BoundaryPolyline, GeometryError> {
    spec.require_planar()?;
    if n_sigma < 2 || n_t < 2 {
        return Err(GeometryError::InvalidParameter(format!(
            "need at least two segments per boundary piece, got {n_sigma} and {n_t}"
        )));
    }
    let mut vertices: Vec<Point2> = sigma_arclength_angles(spec, n_sigma)
        .into_iter()
        .map(|phi| spec.sigma_point(phi))
        .collect();
    let [p0, p1] = spec.t_window();
    for k in 1..n_t {
        let psi = p0 + (p1 - p0) * k as f64 / n_t as f64;
        vertices.push([psi.cos(), psi.sin()]);
    }
    let mut tags = vec![BoundaryTag::Sigma; n_sigma];
    tags.extend(std::iter::repeat_n(BoundaryTag::TArc, n_t));
    Ok(BoundaryPolyline {
        vertices,
        tags,
        lambda: vec![0, n_sigma],
    })
}

/// Polar angles of `n + 1` points splitting Σ into pieces of equal length.
fn sigma_arclength_angles(spec: &DomainSpec, n: usize) -> Vec<f64> {
    let [a, b] = spec.sigma_window();
    if spec.perturbation.is_identity() {
        return (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    }
    // cumulative length table by Simpson's rule on a fine grid
    let m = 8192usize;
    let step = (b - a) / m as f64;
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    for i in 0..m {
        let x0 = a + step * i as f64;
        let s = step / 6.0
            * (spec.sigma_speed(x0)
                + 4.0 * spec.sigma_speed(x0 + 0.5 * step)
                + spec.sigma_speed(x0 + step));
        cumulative.push(cumulative[i] + s);
    }
    let total = cumulative[m];
    let mut out = Vec::with_capacity(n + 1);
    out.push(a);
    let mut j = 0;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while cumulative[j + 1] < target {
            j += 1;
        }
        let t = (target - cumulative[j]) / (cumulative[j + 1] - cumulative[j]);
        out.push(a + step * (j as f64 + t));
    }
    out.push(b);
    out
}

impl BoundaryPolyline {
    /// Polyline with every segment carrying the same tag and no corners.
    pub fn from_ring(vertices: Vec<Point2>, tag: BoundaryTag) -> Self {
        let n = vertices.len();
        BoundaryPolyline {
            vertices,
            tags: vec![tag; n],
            lambda: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Endpoints of segment `i`.
    pub fn segment(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                dist(a, b)
            })
            .collect()
    }

    /// Outward unit normals of the segments.
    pub fn normals(&self) -> Vec<Point2> {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                let d = sub(b, a);
                let l = norm(d);
                [d[1] / l, -d[0] / l]
            })
            .collect()
    }

    /// Total length of the segments carrying `tag`.
    pub fn tagged_length(&self, tag: BoundaryTag) -> f64 {
        self.segment_lengths()
            .iter()
            .zip(&self.tags)
            .filter(|(_, t)| **t == tag)
            .map(|(l, _)| l)
            .sum()
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                cross(a, b)
            })
            .sum::<f64>()
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, x: Point2) -> bool {
        ring_contains(&self.vertices, x)
    }

    /// Euclidean distance from `x` to the polyline, with its side.
    pub fn distance_to_boundary(&self, x: Point2) -> SignedDistance {
        let distance = (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                point_segment_distance(x, a, b)
            })
            .fold(f64::INFINITY, f64::min);
        SignedDistance {
            distance,
            inside: self.contains(x),
        }
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(dist(v[i], v[j]));
            }
        }
        d
    }

    /// Minimum of x_N over the vertices.
    pub fn min_height(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[1])
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance between a segment midpoint and its projection onto
    /// the true curve.
    pub fn chord_deviation(&self, curves: &dyn BoundaryCurves) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.segment(i);
                let m = lerp(a, b, 0.5);
                dist(m, curves.project(self.tags[i], m))
            })
            .fold(0.0, f64::max)
    }

    /// Vertex tag as written to CSV: corners are `LAMBDA`, other vertices
    /// take the tag of their outgoing segment.
    pub fn vertex_tag(&self, i: usize) -> &'static str {
        if self.lambda.contains(&i) {
            "LAMBDA"
        } else {
            self.tags[i].as_str()
        }
    }

    /// CSV with header `x1,x2,tag`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x1,x2,tag\n");
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!("{:.17e},{:.17e},{}\n", v[0], v[1], self.vertex_tag(i)));
        }
        s
    }
}

/// Even-odd point-in-polygon test for a closed ring.
pub fn ring_contains(ring: &[Point2], x: Point2) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a[1] > x[1]) != (b[1] > x[1]) {
            let t = (x[1] - a[1]) / (b[1] - a[1]);
            if x[0] < a[0] + t * (b[0] - a[0]) {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// (ρ_e, ρ_i) = (max, min) of |x − z| over the samples.  Returns `None`
/// for an empty sample set.
pub fn rho_extremes(samples: &[Point2], z: Point2) -> Option<(f64, f64)> {
    if samples.is_empty() {
        return None;
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for x in samples {
        let r = dist(*x, z);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Some((hi, lo))
}

/// σ₀ = min{(a/2) sinθ/(1 + sinθ), δ₀}.
pub fn sigma0(theta: f64, a: f64, delta0: f64) -> f64 {
    let s = theta.sin();
    (0.5 * a * s / (1.0 + s)).min(delta0)
}

/// Upper bound on the John constant of a domain with the (θ, a) interior
/// cone condition: max{1/sinθ, d_Ω / min{(a/2) sinθ/(1 + sinθ), δ₀}}.
/// `d_omega = None` substitutes the half-ball bound d_Ω ≤ 2.
pub fn john_constant_bound(theta: f64, a: f64, d_omega: Option<f64>, delta0: f64) -> f64 {
    let s = theta.sin();
    if !(s > 0.0) || !(a > 0.0) || !(delta0 > 0.0) {
        return f64::INFINITY;
    }
    let d = d_omega.unwrap_or(2.0);
    (1.0 / s).max(d / sigma0(theta, a, delta0))
}
