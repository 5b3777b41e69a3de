//! Derived quantities of a discrete solution and residual reports for the
//! integral identities and inequalities it must satisfy.
//!
//! Everything here is planar: fields come from the P2 solver.  With
//! h = Q − u_h and Q = ½|x − z|², the Hessian of h is I − ∇²u_h on every
//! element, independently of z.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, IdentityError};
use crate::fem::{Field, FluxSample, PLANAR_N, RESIDUAL_TOLERANCE};
use crate::geometry::{dot, norm, parallel_set_connected, rho_extremes, sub, BoundaryTag, DomainSpec, Point2};
use crate::mesh::Mesh;
use crate::oracle::killing_field;
use crate::quadrature::compensated_sum;

/// Left side, right side and residual of one identity or inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs|.
    pub residual: f64,
    /// max(|lhs|, |rhs|, 1e−30).
    pub scale: f64,
    pub relative: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_error_estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityReport {
    pub fn new(identity: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let residual = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs()).max(1e-30);
        IdentityReport {
            identity: identity.into(),
            lhs,
            rhs,
            residual,
            scale,
            relative: residual / scale,
            quad_error_estimate: None,
            h: None,
            note: None,
        }
    }

    pub fn with_quad_error(mut self, e: f64) -> Self {
        self.quad_error_estimate = Some(e);
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

fn flux_integral<F: Fn(&FluxSample) -> f64>(samples: &[FluxSample], f: F) -> f64 {
    compensated_sum(samples.iter().map(|s| s.weight * f(s)))
}

/// R = N ∫_Ω x_N dx / ∫_Σ x_N dS.
pub fn compute_r(field: &Field) -> Result<f64, IdentityError> {
    let mesh = field.mesh();
    let num = PLANAR_N * mesh.volume_integral(|x| x[1]);
    let den = mesh.boundary_integral(BoundaryTag::Sigma, |x, _| x[1]);
    if !(den > 0.0) {
        return Err(IdentityError::OutOfRange(format!(
            "the moment of Sigma is {den:.3e}; Sigma must lie in the upper half-plane"
        )));
    }
    Ok(num / den)
}

/// The modified center of mass computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZCenter {
    /// (∫_Ω x dx − ∫_T u x dS) / |Ω|.
    pub surface: Point2,
    /// (∫_Ω x dx − ∫_Ω ∇u dx) / |Ω|.
    pub volume: Point2,
    /// |surface − volume|.
    pub discrepancy: f64,
}

/// z from the surface form, cross-checked against the volume form; the two
/// agree by the divergence theorem since u = 0 on Σ and ν = x on T.
pub fn compute_z(field: &Field) -> ZCenter {
    let mesh = field.mesh();
    let area = mesh.area();
    let mx = [mesh.volume_integral(|x| x[0]), mesh.volume_integral(|x| x[1])];
    let t = field.normal_derivative_on(BoundaryTag::TArc);
    let tx = [flux_integral(&t, |s| s.u * s.x[0]), flux_integral(&t, |s| s.u * s.x[1])];
    let gx = [field.integrate(|_, _, g| g[0]), field.integrate(|_, _, g| g[1])];
    let surface = [(mx[0] - tx[0]) / area, (mx[1] - tx[1]) / area];
    let volume = [(mx[0] - gx[0]) / area, (mx[1] - gx[1]) / area];
    ZCenter {
        surface,
        volume,
        discrepancy: norm(sub(surface, volume)),
    }
}

/// Elements whose centroid lies farther than `sigma` from the boundary.
fn parallel_elements(mesh: &Mesh, sigma: f64) -> Vec<usize> {
    (0..mesh.triangles.len())
        .filter(|&t| sigma <= 0.0 || mesh.delta_at(t, [1.0 / 3.0; 3]) > sigma)
        .collect()
}

/// z = (∫_{Ω_σ} x dx − ∫_{Ω_σ} ∇u dx) / |Ω_σ| over the parallel sub-mesh,
/// which must be nonempty and connected.
pub fn compute_z_sigma(field: &Field, sigma: f64) -> Result<Point2, IdentityError> {
    let mesh = field.mesh();
    let report = parallel_set_connected(mesh, sigma)?;
    if !report.connected {
        return Err(GeometryError::DisconnectedParallelSet {
            sigma,
            components: report.components,
        }
        .into());
    }
    let elements = parallel_elements(mesh, sigma);
    let per: Vec<[f64; 3]> = elements
        .par_iter()
        .map(|&t| {
            let mut acc = [0.0; 3];
            for q in mesh.triangle_quadrature(t) {
                let g = field.gradient(t, q.bary);
                acc[0] += q.weight * (q.x[0] - g[0]);
                acc[1] += q.weight * (q.x[1] - g[1]);
                acc[2] += q.weight;
            }
            acc
        })
        .collect();
    let sum = |k: usize| compensated_sum(per.iter().map(|a| a[k]));
    let area = sum(2);
    Ok([sum(0) / area, sum(1) / area])
}

/// N ∫_Ω x_N P dx = ½ ∫_Σ u_ν² ⟨X^q, ν⟩ dS with P = ½|∇u|² − u.
pub fn pohozaev_report(field: &Field) -> IdentityReport {
    let lhs = PLANAR_N * field.integrate(|x, u, g| x[1] * (0.5 * dot(g, g) - u));
    let sigma = field.normal_derivative_on(BoundaryTag::Sigma);
    let rhs = 0.5 * flux_integral(&sigma, |s| s.u_nu * s.u_nu * dot_slice(&killing_field(&s.x), s.normal));
    IdentityReport::new("pohozaev", lhs, rhs).with_h(field.mesh().h)
}

/// |∇²u_h|² − (Δu_h)²/N on element `t`.
pub fn hessian_deficit(field: &Field, t: usize) -> f64 {
    let h = field.hessian(t);
    let frob = h[0][0] * h[0][0] + h[0][1] * h[0][1] + h[1][0] * h[1][0] + h[1][1] * h[1][1];
    let tr = h[0][0] + h[1][1];
    frob - tr * tr / PLANAR_N
}

/// ∫_Ω x_N (−u)(|∇²u|² − (Δu)²/N) dx with the discrete per-element Δu_h.
pub fn fundamental_lhs(field: &Field) -> f64 {
    let mesh = field.mesh();
    let per: Vec<f64> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let d = hessian_deficit(field, t);
            compensated_sum(
                mesh.triangle_quadrature(t)
                    .iter()
                    .map(|q| q.weight * q.x[1] * (-field.value(t, q.bary)) * d),
            )
        })
        .collect();
    compensated_sum(per)
}

fn fundamental_rhs(sigma: &[FluxSample], c: f64) -> f64 {
    0.5 * flux_integral(sigma, |s| {
        (s.u_nu * s.u_nu - c * c) * (s.x[1] * s.u_nu - dot_slice(&killing_field(&s.x), s.normal))
    })
}

/// ∫_Ω x_N(−u)(|∇²u|² − (Δu)²/N) dx = ½∫_Σ (u_ν² − c²)(x_N u_ν − ⟨X^q, ν⟩) dS.
pub fn fundamental_report(field: &Field, c: f64) -> IdentityReport {
    let sigma = field.normal_derivative_on(BoundaryTag::Sigma);
    IdentityReport::new("fundamental", fundamental_lhs(field), fundamental_rhs(&sigma, c))
        .with_h(field.mesh().h)
        .with_note(format!("c = {c}"))
}

/// ∫_Σ (x_N u_ν − ⟨X^q, ν⟩) dS, which vanishes for every solution; the
/// right side of the fundamental identity depends on c only through it.
pub fn c_independence_integral(field: &Field) -> f64 {
    let sigma = field.normal_derivative_on(BoundaryTag::Sigma);
    flux_integral(&sigma, |s| s.x[1] * s.u_nu - dot_slice(&killing_field(&s.x), s.normal))
}

/// ‖u_ν² − R²‖_{1,Σ}.
pub fn deficit_norm(field: &Field, r: f64) -> f64 {
    let sigma = field.normal_derivative_on(BoundaryTag::Sigma);
    flux_integral(&sigma, |s| (s.u_nu * s.u_nu - r * r).abs())
}

/// Vertices of the mesh lying on Σ, corners included.
pub fn sigma_vertices(mesh: &Mesh) -> Vec<Point2> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in &mesh.boundary_edges {
        if e.tag == BoundaryTag::Sigma {
            for v in e.nodes {
                if seen.insert(v) {
                    out.push(mesh.vertices[v]);
                }
            }
        }
    }
    out
}

/// Oscillation of h on Σ and the gap bound that it controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HQuantities {
    pub rho_e: f64,
    pub rho_i: f64,
    pub gap: f64,
    /// max_Σ h − min_Σ h, from Q alone since u = 0 on Σ.
    pub osc_h: f64,
    pub diameter: f64,
    /// (8/d_Ω) osc_h.
    pub bound_diameter: f64,
    /// (8/a) osc_h.
    pub bound_cone: f64,
    pub holds: bool,
}

/// Gap and oscillation of h = Q − u on Σ about `z`, sampled at the Σ
/// vertices of the mesh.
pub fn h_quantities(field: &Field, z: Point2, cone_a: f64) -> HQuantities {
    let mesh = field.mesh();
    let samples = sigma_vertices(mesh);
    let (rho_e, rho_i) = rho_extremes(&samples, z).unwrap_or((0.0, 0.0));
    let q: Vec<f64> = samples.iter().map(|&x| 0.5 * dot(sub(x, z), sub(x, z))).collect();
    let osc_h = q.iter().copied().fold(f64::NEG_INFINITY, f64::max) - q.iter().copied().fold(f64::INFINITY, f64::min);
    let osc_h = if samples.is_empty() { 0.0 } else { osc_h };
    let bnd: Vec<Point2> = mesh.boundary_edges.iter().map(|e| mesh.vertices[e.nodes[0]]).collect();
    let diameter = bnd
        .iter()
        .flat_map(|a| bnd.iter().map(move |b| norm(sub(*a, *b))))
        .fold(0.0, f64::max);
    let gap = rho_e - rho_i;
    let bound_diameter = 8.0 / diameter * osc_h;
    let bound_cone = 8.0 / cone_a * osc_h;
    // ρ_e − ρ_i = 2 osc_h / (ρ_e + ρ_i) up to rounding
    let slack = 1e-12 * rho_e.max(1.0);
    HQuantities {
        rho_e,
        rho_i,
        gap,
        osc_h,
        diameter,
        bound_diameter,
        bound_cone,
        holds: gap <= bound_diameter + slack && gap <= bound_cone + slack,
    }
}

/// Evaluation of δ_Γ at quadrature points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Linear interpolation of the vertex distances.
    #[default]
    Interpolated,
    /// Exact distance to the boundary polygon.
    Exact,
}

fn delta_at(mesh: &Mesh, t: usize, bary: [f64; 3], x: Point2, mode: DeltaMode) -> f64 {
    match mode {
        DeltaMode::Interpolated => mesh.delta_at(t, bary),
        DeltaMode::Exact => mesh.boundary_distance(x),
    }
}

/// |∇²h|² = |I − ∇²u_h|² on element `t`.
pub fn hessian_h_squared(field: &Field, t: usize) -> f64 {
    let h = field.hessian(t);
    let a = 1.0 - h[0][0];
    let d = 1.0 - h[1][1];
    a * a + d * d + h[0][1] * h[0][1] + h[1][0] * h[1][0]
}

/// ‖δ_Γ^τ ∇²h‖_{2,Ω}.  The Hessian of h does not depend on `z`, which is
/// kept in the signature because h itself does.
pub fn weighted_hessian_norm(field: &Field, _z: Point2, tau: f64, mode: DeltaMode) -> f64 {
    let mesh = field.mesh();
    let per: Vec<f64> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let hh = hessian_h_squared(field, t);
            compensated_sum(mesh.triangle_quadrature(t).iter().map(|q| {
                let d = delta_at(mesh, t, q.bary, q.x, mode).max(0.0);
                q.weight * d.powf(2.0 * tau) * hh
            }))
        })
        .collect();
    compensated_sum(per).sqrt()
}

/// Weighted Hessian norms at the three exponents used by the theorems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorms {
    pub half: f64,
    pub one: f64,
    pub three_half: f64,
}

pub fn weighted_norms(field: &Field, z: Point2, mode: DeltaMode) -> WeightedNorms {
    WeightedNorms {
        half: weighted_hessian_norm(field, z, 0.5, mode),
        one: weighted_hessian_norm(field, z, 1.0, mode),
        three_half: weighted_hessian_norm(field, z, 1.5, mode),
    }
}

/// A point where −u ≥ ½δ² (or −u ≥ (r_i/2)δ) fails beyond the slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma42Violation {
    pub x: Point2,
    pub minus_u: f64,
    pub bound: f64,
    pub linear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma42Report {
    pub points_checked: usize,
    /// C h² with the mesh size h.
    pub slack: f64,
    pub violations: usize,
    /// Largest bound − (−u) over all points (negative when all hold with room).
    pub worst_excess: f64,
    /// Checks of the linear bound, run only when r_i is known.
    pub linear_violations: Option<usize>,
    /// First few violations, in element order.
    pub examples: Vec<Lemma42Violation>,
}

impl Lemma42Report {
    pub fn pass(&self) -> bool {
        self.violations == 0 && self.linear_violations.unwrap_or(0) == 0
    }
}

/// Evaluates −u ≥ ½δ_Γ² and, when `inner_radius` is given, −u ≥ (r_i/2)δ_Γ
/// at every element quadrature point, allowing a slack of `slack_c`·h².
pub fn lemma42_check(field: &Field, inner_radius: Option<f64>, slack_c: f64, mode: DeltaMode) -> Lemma42Report {
    const KEEP: usize = 16;
    let mesh = field.mesh();
    let slack = slack_c * mesh.h * mesh.h;
    let per: Vec<(usize, usize, f64, Vec<Lemma42Violation>)> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let (mut bad, mut bad_lin, mut worst) = (0, 0, f64::NEG_INFINITY);
            let mut ex = Vec::new();
            for q in mesh.triangle_quadrature(t) {
                let minus_u = -field.value(t, q.bary);
                let d = delta_at(mesh, t, q.bary, q.x, mode);
                let quad = 0.5 * d * d;
                worst = worst.max(quad - minus_u);
                if minus_u < quad - slack {
                    bad += 1;
                    ex.push(Lemma42Violation { x: q.x, minus_u, bound: quad, linear: false });
                }
                if let Some(ri) = inner_radius {
                    let lin = 0.5 * ri * d;
                    if minus_u < lin - slack {
                        bad_lin += 1;
                        ex.push(Lemma42Violation { x: q.x, minus_u, bound: lin, linear: true });
                    }
                }
            }
            (bad, bad_lin, worst, ex)
        })
        .collect();
    let mut examples = Vec::new();
    for p in &per {
        for v in &p.3 {
            if examples.len() < KEEP {
                examples.push(*v);
            }
        }
    }
    Lemma42Report {
        points_checked: 6 * mesh.triangles.len(),
        slack,
        violations: per.iter().map(|p| p.0).sum(),
        worst_excess: per.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max),
        linear_violations: inner_radius.map(|_| per.iter().map(|p| p.1).sum()),
        examples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradHReport {
    /// max over quadrature points of |x − z − ∇u_h|.
    pub grad_h_inf: f64,
    pub lipschitz: f64,
    /// 2(L + 1).
    pub bound: f64,
    pub pass: bool,
}

/// ‖∇h‖_∞ ≤ 2(L + 1).
pub fn grad_h_bound_check(field: &Field, z: Point2) -> GradHReport {
    let mesh = field.mesh();
    let grad_h_inf = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            mesh.triangle_quadrature(t)
                .iter()
                .map(|q| norm(sub(sub(q.x, z), field.gradient(t, q.bary))))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let lipschitz = field.lipschitz_bound();
    let bound = 2.0 * (lipschitz + 1.0);
    GradHReport {
        grad_h_inf,
        lipschitz,
        bound,
        pass: grad_h_inf <= bound,
    }
}

/// |∫_Ω ∇h dx| = |∫_Ω (x − z − ∇u_h) dx|, which the choice of z annihilates.
pub fn mean_gradient_defect(field: &Field, z: Point2) -> f64 {
    let a = field.integrate(|x, _, g| x[0] - z[0] - g[0]);
    let b = field.integrate(|x, _, g| x[1] - z[1] - g[1]);
    a.hypot(b)
}

/// κ_{N,τ} = 1/(τ + N/2 − 1).
pub fn kappa(n: usize, tau: f64) -> Result<f64, IdentityError> {
    if n < 2 {
        return Err(IdentityError::OutOfRange(format!("N >= 2 required, got {n}")));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(IdentityError::OutOfRange(format!("tau > 0 required, got {tau}")));
    }
    // p(1 − α) < N with p = 2 and α = τ keeps the denominator positive
    if !(2.0 * (1.0 - tau) < n as f64) {
        return Err(IdentityError::OutOfRange(format!(
            "p(1 - alpha) < N violated for p = 2, alpha = {tau}, N = {n}"
        )));
    }
    Ok(1.0 / (tau + 0.5 * n as f64 - 1.0))
}

/// α_{p,q} = p(q − N)/(N(q − p)), with q = ∞ giving p/N.
pub fn alpha_pq(n: usize, p: f64, q: f64) -> Result<f64, IdentityError> {
    let nf = n as f64;
    if n < 2 {
        return Err(IdentityError::OutOfRange(format!("N >= 2 required, got {n}")));
    }
    if !(p >= 1.0 && p < nf) {
        return Err(IdentityError::OutOfRange(format!("1 <= p < N violated for p = {p}, N = {n}")));
    }
    if !(q > p) {
        return Err(IdentityError::OutOfRange(format!("p < q violated for p = {p}, q = {q}")));
    }
    if !(q > nf) {
        return Err(IdentityError::OutOfRange(format!(
            "q > N violated for q = {q}, N = {n}; the exponent would not be positive"
        )));
    }
    if q.is_infinite() {
        return Ok(p / nf);
    }
    Ok(p * (q - nf) / (nf * (q - p)))
}

/// One inequality lhs ≤ rhs; `rhs` is absent when the hypotheses fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub applicable: bool,
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(name: &str, applicable: bool, lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            name: name.to_string(),
            applicable,
            lhs,
            rhs: applicable.then_some(rhs),
            holds: !applicable || lhs <= rhs,
        }
    }
}

/// The four weighted Hessian bounds: squared norms against multiples of
/// the deficit (L + 2)·‖u_ν² − R²‖₁.
pub fn lemma45_checks(
    norms: &WeightedNorms,
    deficit: f64,
    lipschitz: f64,
    m: f64,
    inner_radius: Option<f64>,
) -> Vec<InequalityCheck> {
    let base = (lipschitz + 2.0) * deficit;
    let ri = inner_radius.unwrap_or(f64::NAN);
    vec![
        InequalityCheck::new("cone_three_half", true, norms.three_half.powi(2), base),
        InequalityCheck::new("cone_one_height", m > 0.0, norms.one.powi(2), base / m),
        InequalityCheck::new("sphere_one", inner_radius.is_some(), norms.one.powi(2), base / ri),
        InequalityCheck::new(
            "sphere_half_height",
            inner_radius.is_some() && m > 0.0,
            norms.half.powi(2),
            base / (m * ri),
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueReport {
    pub vertices_checked: usize,
    /// Largest distance of h(v) outside [min, max] of h on the patch boundary.
    pub max_excess: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Discrete maximum principle for h at interior vertices: h(v) must lie
/// between the extremes of h at the P2 nodes of the boundary of the vertex
/// patch, within `tol_c`·h².
pub fn mean_value_check(field: &Field, z: Point2, tol_c: f64) -> MeanValueReport {
    let mesh = field.mesh();
    let space = &field.space;
    let on_boundary: HashSet<usize> = mesh.boundary_edges.iter().flat_map(|e| e.nodes).collect();
    let mut patches: HashMap<usize, Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            if !on_boundary.contains(&v) {
                patches.entry(v).or_default().push(t);
            }
        }
    }
    let h_at = |dof: usize| {
        let x = space.node_position(dof);
        0.5 * dot(sub(x, z), sub(x, z)) - field.coeffs[dof]
    };
    let mut keys: Vec<usize> = patches.keys().copied().collect();
    keys.sort_unstable();
    let max_excess = keys
        .par_iter()
        .map(|v| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &t in &patches[v] {
                let dofs = space.tri_dofs[t];
                let k = (0..3).find(|&k| mesh.triangles[t][k] == *v).unwrap_or(0);
                // the edge opposite the vertex: its two vertices and midpoint
                for d in [dofs[(k + 1) % 3], dofs[(k + 2) % 3], dofs[3 + (k + 1) % 3]] {
                    let val = h_at(d);
                    lo = lo.min(val);
                    hi = hi.max(val);
                }
            }
            let c = h_at(*v);
            (lo - c).max(c - hi).max(0.0)
        })
        .reduce(|| 0.0, f64::max);
    let tolerance = tol_c * mesh.h * mesh.h;
    MeanValueReport {
        vertices_checked: keys.len(),
        max_excess,
        tolerance,
        pass: max_excess <= tolerance,
    }
}

/// Tolerances and switches of the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateOptions {
    /// Slack constant C in C h² for the pointwise lemma checks.
    pub slack_c: f64,
    /// Relative residual accepted for the Pohozaev and fundamental identities.
    pub identity_relative_tol: f64,
    /// Absolute residual accepted when both sides are at discretization level.
    pub identity_absolute_c: f64,
    /// Constant for the fundamental identity; `None` uses the computed R.
    pub c: Option<f64>,
    pub delta_mode: DeltaMode,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            slack_c: 1.0,
            identity_relative_tol: 0.05,
            identity_absolute_c: 1.0,
            c: None,
            delta_mode: DeltaMode::Interpolated,
        }
    }
}

/// One pass/fail entry of the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Every identity and lemma check for one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub h: f64,
    pub triangles: usize,
    pub solver_residual: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub z: ZCenter,
    pub deficit: f64,
    pub lipschitz: f64,
    pub m: f64,
    pub inner_radius: Option<f64>,
    pub identities: Vec<IdentityReport>,
    pub c_independence: f64,
    pub h_quantities: HQuantities,
    pub weighted_norms: WeightedNorms,
    pub lemma42: Lemma42Report,
    pub lemma45: Vec<InequalityCheck>,
    pub grad_h: GradHReport,
    pub mean_gradient_defect: f64,
    pub mean_value: MeanValueReport,
    pub options: CertificateOptions,
    pub checks: Vec<CertificateCheck>,
    pub pass: bool,
}

/// Accepts an identity report when its relative residual is within
/// `rel`, or its absolute residual within `abs` (both sides at the level of
/// the discretization error, as in the rigid case).
fn identity_ok(r: &IdentityReport, rel: f64, abs: f64) -> bool {
    r.relative <= rel || r.residual <= abs
}

/// Runs every identity and inequality check on a solved field.
pub fn certificate(field: &Field, spec: &DomainSpec, options: &CertificateOptions) -> Result<Certificate, IdentityError> {
    let mesh = field.mesh();
    let r = compute_r(field)?;
    let z = compute_z(field);
    let zc = z.surface;
    let deficit = deficit_norm(field, r);
    let lipschitz = field.lipschitz_bound();
    let m = mesh.vertices.iter().map(|x| x[1]).fold(f64::INFINITY, f64::min);
    let inner_radius = spec.inner_radius;
    let c = options.c.unwrap_or(r);
    let poh = pohozaev_report(field);
    let fun = fundamental_report(field, c);
    let c_independence = c_independence_integral(field);
    let hq = h_quantities(field, zc, spec.cone_a);
    let norms = weighted_norms(field, zc, options.delta_mode);
    let l42 = lemma42_check(field, inner_radius, options.slack_c, options.delta_mode);
    let l45 = lemma45_checks(&norms, deficit, lipschitz, m, inner_radius);
    let grad_h = grad_h_bound_check(field, zc);
    let mgd = mean_gradient_defect(field, zc);
    let mv = mean_value_check(field, zc, options.slack_c);
    let h2 = mesh.h * mesh.h;
    let abs_tol = options.identity_absolute_c * h2;
    let max_delta = mesh.delta.iter().copied().fold(0.0, f64::max);
    let min_deficit = (0..mesh.triangles.len())
        .map(|t| hessian_deficit(field, t))
        .fold(f64::INFINITY, f64::min);

    let mut checks = Vec::new();
    let mut add = |name: &str, pass: bool, detail: String| {
        checks.push(CertificateCheck {
            name: name.to_string(),
            pass,
            detail,
        })
    };
    add(
        "solver_residual",
        field.residual <= RESIDUAL_TOLERANCE,
        format!("{:.3e} <= {RESIDUAL_TOLERANCE:.0e}", field.residual),
    );
    add(
        "sign",
        field.sign.positive_nodes == 0,
        format!("max nodal value {:.3e}", field.sign.max_nodal_value),
    );
    add(
        "pohozaev",
        identity_ok(&poh, options.identity_relative_tol, abs_tol),
        format!("relative {:.3e}, absolute {:.3e}", poh.relative, poh.residual),
    );
    add(
        "fundamental",
        identity_ok(&fun, options.identity_relative_tol, abs_tol),
        format!("relative {:.3e}, absolute {:.3e} (c = {c})", fun.relative, fun.residual),
    );
    add(
        "fundamental_lhs_nonnegative",
        fun.lhs >= -1e-10 && min_deficit >= -1e-12,
        format!("lhs {:.3e}, min element deficit {:.3e}", fun.lhs, min_deficit),
    );
    add(
        "gap_bound",
        hq.holds,
        format!(
            "gap {:.3e} <= {:.3e} (8/d), {:.3e} (8/a)",
            hq.gap, hq.bound_diameter, hq.bound_cone
        ),
    );
    add(
        "lemma42",
        l42.pass(),
        format!("{} violations beyond slack {:.3e}", l42.violations + l42.linear_violations.unwrap_or(0), l42.slack),
    );
    for item in &l45 {
        add(
            &format!("lemma45_{}", item.name),
            item.holds,
            match item.rhs {
                Some(rhs) => format!("{:.3e} <= {:.3e}", item.lhs, rhs),
                None => "not applicable".to_string(),
            },
        );
    }
    add(
        "grad_h_bound",
        grad_h.pass,
        format!("{:.3e} <= {:.3e}", grad_h.grad_h_inf, grad_h.bound),
    );
    add(
        "weighted_norms_monotone",
        max_delta > 1.0 || (norms.three_half <= norms.one && norms.one <= norms.half),
        format!("{:.3e}, {:.3e}, {:.3e}", norms.half, norms.one, norms.three_half),
    );
    add(
        "mean_value",
        mv.pass,
        format!("excess {:.3e} <= {:.3e}", mv.max_excess, mv.tolerance),
    );
    let pass = checks.iter().all(|c| c.pass);
    Ok(Certificate {
        h: mesh.h,
        triangles: mesh.triangles.len(),
        solver_residual: field.residual,
        r,
        z,
        deficit,
        lipschitz,
        m,
        inner_radius,
        identities: vec![poh, fun],
        c_independence,
        h_quantities: hq,
        weighted_norms: norms,
        lemma42: l42,
        lemma45: l45,
        grad_h,
        mean_gradient_defect: mgd,
        mean_value: mv,
        options: options.clone(),
        checks,
        pass,
    })
}

fn dot_slice(a: &[f64], b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_symmetric_cap;
    use crate::mesh::triangulate;
    use crate::P2Space;
    use std::sync::Arc;

    fn lens_space(h: f64) -> Arc<P2Space> {
        let spec = make_symmetric_cap(2, 1.0, &[0.0]).unwrap();
        Arc::new(P2Space::new(Arc::new(triangulate(&spec, h).unwrap())))
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(2, 1.0).unwrap(), 1.0);
        assert!((kappa(3, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((kappa(4, 1.5).unwrap() - 0.4).abs() < 1e-15);
        for tau in [0.25, 0.5, 1.5, 3.0] {
            assert!((kappa(2, tau).unwrap() - 1.0 / tau).abs() < 1e-15);
        }
        assert!(kappa(1, 1.0).is_err());
        assert!(kappa(2, 0.0).is_err());
        let err = kappa(2, -1.0).unwrap_err().to_string();
        assert!(err.contains("tau > 0"), "{err}");
    }

    #[test]
    fn alpha_examples() {
        assert!((alpha_pq(3, 2.0, 1e12).unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((alpha_pq(3, 2.0, f64::INFINITY).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((alpha_pq(2, 1.0, 4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(alpha_pq(3, 3.0, 6.0).is_err());
        assert!(alpha_pq(3, 2.0, 2.0).is_err());
        assert!(alpha_pq(3, 2.0, 2.5).is_err());
    }

    #[test]
    fn report_fields() {
        let r = IdentityReport::new("x", 2.0, -1.0);
        assert_eq!((r.residual, r.scale, r.relative), (3.0, 2.0, 1.5));
        let z = IdentityReport::new("zero", 0.0, 0.0);
        assert_eq!(z.relative, 0.0);
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("note"));
        let back: IdentityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn interpolated_rigid_solution_has_no_deficit() {
        let z = [0.0, 2f64.sqrt()];
        let f = Field::interpolate(lens_space(0.1), |x| 0.5 * ((x[0] - z[0]).powi(2) + (x[1] - z[1]).powi(2) - 1.0));
        for t in 0..f.mesh().triangles.len() {
            assert!(hessian_deficit(&f, t).abs() < 1e-10);
            assert!(hessian_h_squared(&f, t) < 1e-10);
        }
        assert!(fundamental_lhs(&f).abs() < 1e-12);
        let w = weighted_norms(&f, z, DeltaMode::Interpolated);
        assert!(w.half < 1e-6 && w.one < 1e-6 && w.three_half < 1e-6);
        assert!(grad_h_bound_check(&f, z).grad_h_inf < 1e-9);
    }

    #[test]
    fn zero_field_degenerate_cases() {
        let f = Field::interpolate(lens_space(0.1), |_| 0.0);
        let p = pohozaev_report(&f);
        assert_eq!((p.lhs, p.rhs), (0.0, 0.0));
        let mesh = f.mesh();
        let area = mesh.area();
        let centroid = [mesh.volume_integral(|x| x[0]) / area, mesh.volume_integral(|x| x[1]) / area];
        let z = compute_z(&f);
        assert!((z.surface[0] - centroid[0]).abs() < 1e-14 && (z.surface[1] - centroid[1]).abs() < 1e-14);
        let l42 = lemma42_check(&f, None, 1.0, DeltaMode::Interpolated);
        assert!(l42.violations > 0);
    }

    #[test]
    fn offsetting_z_inflates_grad_h_by_at_most_the_offset() {
        let z = [0.0, 2f64.sqrt()];
        let f = Field::interpolate(lens_space(0.1), |x| 0.5 * ((x[0] - z[0]).powi(2) + (x[1] - z[1]).powi(2) - 1.0));
        let w = [0.03, -0.04];
        let g = grad_h_bound_check(&f, [z[0] + w[0], z[1] + w[1]]).grad_h_inf;
        assert!(g <= 0.05 + 1e-9 && g >= 0.05 - 1e-9, "{g}");
    }
}
