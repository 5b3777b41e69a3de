//! Perturbation sweeps: one solve and certificate per amplitude, the
//! discretization floor from the rigid member of the family, log–log
//! exponent fits of gap against deficit, and the inequality certificates of
//! the stability theorems.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::StabilityError;
use crate::fem::{solve_on, Field};
use crate::geometry::{
    boundary_polyline, cone_condition_check, make_perturbed_domain, ConeCheckConfig, DomainSpec,
    PerturbationProfile, Point2,
};
use crate::identities::{certificate, Certificate, CertificateOptions};
use crate::mesh::{triangulate, Mesh};

/// Minimum number of usable records for an exponent fit.
pub const MIN_FIT_RECORDS: usize = 4;
/// Records count as signal only above this multiple of the floor.
pub const FLOOR_FACTOR: f64 = 10.0;
/// Largest growth of the constant under refinement still called stable.
pub const STABILITY_FACTOR: f64 = 2.0;
/// Fraction of the theorem exponent the fitted slope must reach.
pub const SLOPE_TOLERANCE: f64 = 0.9;
/// Boundary segments of the polyline used for the cone certificate.
const CONE_POLYLINE_SEGMENTS: usize = 256;

/// Meshes `spec` at `h_target`, refines `refinements` times with boundary
/// reprojection and solves.
pub fn solve_lens(spec: &DomainSpec, h_target: f64, refinements: usize) -> Result<Field, StabilityError> {
    let mut mesh = triangulate(spec, h_target)?;
    for _ in 0..refinements {
        mesh = mesh.refine(spec)?;
    }
    Ok(solve_on(Arc::new(mesh))?)
}

/// CSV header of sweep tables.
pub const CSV_HEADER: &str = "eps,h,R,z1,z2,deficit,gap,osc_h,L,m,w_half,w_one,w_threehalf,cert";

/// One data point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub h: f64,
    pub refinements: usize,
    pub triangles: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub z: Point2,
    pub deficit: f64,
    pub gap: f64,
    pub osc_h: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub m: f64,
    pub w_half: f64,
    pub w_one: f64,
    pub w_threehalf: f64,
    pub cone: bool,
    /// Every check of the solve certificate passed.
    pub cert: bool,
    /// The checks required on every sweep instance: the quadratic
    /// distance bound for −u, the first weighted Hessian bound and the
    /// gradient bound for h.
    pub lemmas: bool,
    pub certificate: Certificate,
}

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            self.eps,
            self.h,
            self.r,
            self.z[0],
            self.z[1],
            self.deficit,
            self.gap,
            self.osc_h,
            self.lipschitz,
            self.m,
            self.w_half,
            self.w_one,
            self.w_threehalf,
            if self.cert { "PASS" } else { "FAIL" }
        )
    }
}

/// CSV table of records under [`CSV_HEADER`].
pub fn records_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Solves one member of the family and evaluates its certificate.
pub fn sweep_record(
    base: &DomainSpec,
    eps: f64,
    profile: &PerturbationProfile,
    h_target: f64,
    refinements: usize,
    options: &CertificateOptions,
) -> Result<SweepRecord, StabilityError> {
    let spec = if eps == 0.0 {
        base.clone()
    } else {
        make_perturbed_domain(base, eps, profile)?
    };
    let field = solve_lens(&spec, h_target, refinements)?;
    let cert = certificate(&field, &spec, options)?;
    let poly = boundary_polyline(&spec, CONE_POLYLINE_SEGMENTS)?;
    let cone = cone_condition_check(&poly, spec.cone_theta, spec.cone_a, &ConeCheckConfig::default()).pass;
    let lemmas = cert.lemma42.pass() && cert.lemma45[0].holds && cert.grad_h.pass;
    let mesh: &Mesh = field.mesh();
    Ok(SweepRecord {
        eps,
        h: mesh.h,
        refinements,
        triangles: mesh.triangles.len(),
        r: cert.r,
        z: cert.z.surface,
        deficit: cert.deficit,
        gap: cert.h_quantities.gap,
        osc_h: cert.h_quantities.osc_h,
        lipschitz: cert.lipschitz,
        m: cert.m,
        w_half: cert.weighted_norms.half,
        w_one: cert.weighted_norms.one,
        w_threehalf: cert.weighted_norms.three_half,
        cone,
        cert: cert.pass,
        lemmas,
        certificate: cert,
    })
}

/// Deficit and gap of the rigid member at the sweep's mesh policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Floor {
    pub deficit: f64,
    pub gap: f64,
}

impl Floor {
    pub const ZERO: Floor = Floor { deficit: 0.0, gap: 0.0 };

    /// Whether a record carries signal above the floor.
    pub fn usable(&self, r: &SweepRecord) -> bool {
        r.deficit > FLOOR_FACTOR * self.deficit && r.gap > FLOOR_FACTOR * self.gap
    }
}

/// A member of the family whose solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub eps: f64,
    pub refinements: usize,
    pub diagnostic: String,
}

/// Sweep settings shared by every member of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub h_target: f64,
    pub refinements: usize,
    pub eps: Vec<f64>,
    pub certificate: CertificateOptions,
}

/// `n` values spaced logarithmically over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            h_target: 0.1,
            refinements: 3,
            eps: log_spaced(0.005, 0.16, 6),
            certificate: CertificateOptions::default(),
        }
    }
}

/// Records of a sweep with its floor and the refined re-runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub config: SweepConfig,
    /// Ordered by ε.
    pub records: Vec<SweepRecord>,
    /// The ε = 0 member at the same mesh policy.
    pub rigid: Option<SweepRecord>,
    pub floor: Floor,
    /// The two smallest ε again, one refinement finer.
    pub refined: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
}

impl Sweep {
    pub fn usable(&self) -> Vec<&SweepRecord> {
        self.records.iter().filter(|r| self.floor.usable(r)).collect()
    }
}

/// Runs the family `base` perturbed by `profile` at every ε of `config`,
/// plus the rigid member (the floor) and the two smallest ε at one more
/// refinement.  Failed solves are recorded and skipped.
pub fn run_sweep(base: &DomainSpec, profile: &PerturbationProfile, config: &SweepConfig) -> Result<Sweep, StabilityError> {
    if config.eps.is_empty() {
        return Err(StabilityError::Invalid("empty amplitude list".into()));
    }
    if config.eps.iter().any(|e| !e.is_finite()) {
        return Err(StabilityError::Invalid("amplitudes must be finite".into()));
    }
    let mut eps = config.eps.clone();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let smallest: Vec<f64> = eps.iter().copied().take(2).collect();
    // (ε, refinements) jobs: the family, the rigid member, the refined pair
    let mut jobs: Vec<(f64, usize)> = eps.iter().map(|&e| (e, config.refinements)).collect();
    jobs.push((0.0, config.refinements));
    jobs.extend(smallest.iter().map(|&e| (e, config.refinements + 1)));
    let results: Vec<Result<SweepRecord, StabilityError>> = jobs
        .par_iter()
        .map(|&(e, r)| sweep_record(base, e, profile, config.h_target, r, &config.certificate))
        .collect();
    let mut records = Vec::new();
    let mut refined = Vec::new();
    let mut rigid = None;
    let mut failures = Vec::new();
    let n_family = eps.len();
    for (k, (res, &(e, r))) in results.into_iter().zip(&jobs).enumerate() {
        match res {
            Ok(rec) if k < n_family => records.push(rec),
            Ok(rec) if k == n_family => rigid = Some(rec),
            Ok(rec) => refined.push(rec),
            Err(err) => failures.push(SweepFailure {
                eps: e,
                refinements: r,
                diagnostic: err.to_string(),
            }),
        }
    }
    let floor = rigid
        .as_ref()
        .map(|r| Floor { deficit: r.deficit, gap: r.gap })
        .unwrap_or(Floor::ZERO);
    Ok(Sweep {
        config: config.clone(),
        records,
        rigid,
        floor,
        refined,
        failures,
    })
}

/// Least-squares line log(gap) = slope·log(deficit) + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    /// log c.
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    pub eps_range: [f64; 2],
    pub used: usize,
}

/// Fits the usable records (deficit and gap above 10× the floor).
pub fn fit_exponent(records: &[SweepRecord], floor: &Floor) -> Result<ExponentFit, StabilityError> {
    let used: Vec<&SweepRecord> = records.iter().filter(|r| floor.usable(r)).collect();
    if used.len() < MIN_FIT_RECORDS {
        return Err(StabilityError::TooFewRecords {
            needed: MIN_FIT_RECORDS,
            have: used.len(),
        });
    }
    let pts: Vec<(f64, f64)> = used.iter().map(|r| (r.deficit.ln(), r.gap.ln())).collect();
    let (slope, intercept, residual) = least_squares(&pts);
    let eps_lo = used.iter().map(|r| r.eps).fold(f64::INFINITY, f64::min);
    let eps_hi = used.iter().map(|r| r.eps).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        eps_range: [eps_lo, eps_hi],
        used: used.len(),
    })
}

/// (slope, intercept, rms residual) of the least-squares line through `pts`.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// The stability theorems whose inequality forms are certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Σ stays away from the flat part of B₊ (m > 0).
    #[serde(rename = "T1.1")]
    T1_1,
    /// Uniform interior sphere condition (r_i).
    #[serde(rename = "T1.2")]
    T1_2,
    /// Both m > 0 and r_i.
    #[serde(rename = "T1.3")]
    T1_3,
    /// Cone condition only.
    #[serde(rename = "T4.8")]
    T4_8,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::T1_1, Theorem::T1_2, Theorem::T1_3, Theorem::T4_8];

    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::T1_1 => "T1.1",
            Theorem::T1_2 => "T1.2",
            Theorem::T1_3 => "T1.3",
            Theorem::T4_8 => "T4.8",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = StabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| StabilityError::Invalid(format!("unknown theorem {s}")))
    }
}

/// Parameters of the theorem shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub dimension: usize,
    /// η ∈ (0, 1) of the planar general-stability exponent.
    pub eta: f64,
}

impl Default for TheoremParams {
    fn default() -> Self {
        TheoremParams { dimension: 2, eta: 0.1 }
    }
}

/// t^{1/2} max{log(t^{−1/2}), 1}, guarded so that the log factor is 1 for t ≥ 1.
fn half_log(t: f64) -> f64 {
    let s = t.sqrt();
    let l = if t >= 1.0 { 1.0 } else { (1.0 / s).ln().max(1.0) };
    s * l
}

/// Power of the deficit in the theorem bound (the log factor aside).
pub fn theorem_exponent(theorem: Theorem, params: &TheoremParams) -> f64 {
    let n = params.dimension as f64;
    match theorem {
        Theorem::T1_1 | Theorem::T1_2 => {
            if params.dimension == 2 {
                0.5
            } else {
                1.0 / n
            }
        }
        Theorem::T1_3 => {
            if params.dimension <= 3 {
                0.5
            } else {
                1.0 / (n - 1.0)
            }
        }
        Theorem::T4_8 => {
            if params.dimension == 2 {
                1.0 / (3.0 + 2.0 * params.eta)
            } else {
                1.0 / (n + 1.0)
            }
        }
    }
}

/// Shape function of the deficit t in the bound ρ_e − ρ_i ≤ c·shape(t).
pub fn theorem_shape(theorem: Theorem, params: &TheoremParams, t: f64) -> f64 {
    let t = t.max(0.0);
    match (theorem, params.dimension) {
        (Theorem::T1_1 | Theorem::T1_2, 2) => half_log(t),
        (Theorem::T1_3, 3) => half_log(t),
        _ => t.powf(theorem_exponent(theorem, params)),
    }
}

/// Certificate of one theorem over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCertificate {
    pub theorem: Theorem,
    /// Smallest c with gap ≤ c·shape(deficit) on every usable record.
    pub c_min: f64,
    /// The same constant with the two smallest ε replaced by their refined runs.
    pub c_refined: f64,
    /// Fitted log–log slope, absent with too few usable records.
    pub slope: Option<f64>,
    pub exponent: f64,
    pub applicable: bool,
    pub pass: bool,
    /// "PASS", "FAIL" or "not applicable".
    pub verdict: String,
    pub detail: String,
}

fn c_over<'a, I: Iterator<Item = &'a SweepRecord>>(records: I, theorem: Theorem, params: &TheoremParams) -> f64 {
    records
        .map(|r| r.gap / theorem_shape(theorem, params, r.deficit))
        .fold(0.0, f64::max)
}

/// Certifies gap ≤ c·shape(deficit) over the usable records of a sweep.
///
/// PASS requires the theorem's hypotheses (cone condition everywhere, m > 0
/// for T1.1 and T1.3, r_i for T1.2 and T1.3), a finite constant that grows
/// by at most 2× when the two smallest-ε records are refined, and a fitted
/// slope of at least 90% of the theorem exponent.
pub fn check_theorem_bound(sweep: &Sweep, theorem: Theorem, params: &TheoremParams) -> TheoremCertificate {
    let exponent = theorem_exponent(theorem, params);
    let all = sweep.records.iter().chain(sweep.rigid.iter()).chain(sweep.refined.iter());
    let mut missing = Vec::new();
    let mut any = false;
    let (mut cone, mut height, mut sphere) = (true, true, true);
    for r in all {
        any = true;
        cone &= r.cone;
        height &= r.m > 0.0;
        sphere &= r.certificate.inner_radius.is_some();
    }
    if !any {
        missing.push("no records");
    }
    if !cone {
        missing.push("cone condition fails on some member");
    }
    if matches!(theorem, Theorem::T1_1 | Theorem::T1_3) && !height {
        missing.push("m = 0 on some member");
    }
    if matches!(theorem, Theorem::T1_2 | Theorem::T1_3) && !sphere {
        missing.push("interior sphere radius r_i not set");
    }
    let usable = sweep.usable();
    let c_min = c_over(usable.iter().copied(), theorem, params);
    let smallest: Vec<f64> = {
        let mut e: Vec<f64> = sweep.records.iter().map(|r| r.eps).collect();
        e.sort_by(f64::total_cmp);
        e.into_iter().take(2).collect()
    };
    let refined_set = usable
        .iter()
        .copied()
        .filter(|r| !smallest.contains(&r.eps))
        .chain(sweep.refined.iter().filter(|r| sweep.floor.usable(r)));
    let c_refined = c_over(refined_set, theorem, params);
    let fit = fit_exponent(&sweep.records, &sweep.floor);
    let slope = fit.as_ref().ok().map(|f| f.slope);
    if !missing.is_empty() {
        return TheoremCertificate {
            theorem,
            c_min,
            c_refined,
            slope,
            exponent,
            applicable: false,
            pass: false,
            verdict: "not applicable".into(),
            detail: missing.join("; "),
        };
    }
    let mut problems = Vec::new();
    if usable.is_empty() {
        problems.push("no record above the discretization floor".to_string());
    }
    if !c_min.is_finite() || !c_refined.is_finite() {
        problems.push("constant is not finite".to_string());
    }
    if c_refined > STABILITY_FACTOR * c_min {
        problems.push(format!("constant grows from {c_min:.3e} to {c_refined:.3e} under refinement"));
    }
    match &fit {
        Ok(f) if f.slope < SLOPE_TOLERANCE * exponent => problems.push(format!(
            "fitted slope {:.3} below {:.3}",
            f.slope,
            SLOPE_TOLERANCE * exponent
        )),
        Ok(_) => {}
        Err(e) => problems.push(e.to_string()),
    }
    let pass = problems.is_empty();
    TheoremCertificate {
        theorem,
        c_min,
        c_refined,
        slope,
        exponent,
        applicable: true,
        pass,
        verdict: if pass { "PASS".into() } else { "FAIL".into() },
        detail: if pass {
            format!("{} usable records", usable.len())
        } else {
            problems.join("; ")
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(points: &[(f64, f64)]) -> Vec<SweepRecord> {
        let base = crate::geometry::make_symmetric_cap(2, 1.0, &[0.0]).unwrap();
        let field = solve_lens(&base, 0.1, 0).unwrap();
        let cert = certificate(&field, &base, &CertificateOptions::default()).unwrap();
        points
            .iter()
            .enumerate()
            .map(|(k, &(deficit, gap))| SweepRecord {
                eps: 0.01 * (k + 1) as f64,
                h: 0.1,
                refinements: 0,
                triangles: 0,
                r: 1.0,
                z: [0.0, 2f64.sqrt()],
                deficit,
                gap,
                osc_h: 0.0,
                lipschitz: 1.0,
                m: 0.4,
                w_half: 0.0,
                w_one: 0.0,
                w_threehalf: 0.0,
                cone: true,
                cert: true,
                lemmas: true,
                certificate: cert.clone(),
            })
            .collect()
    }

    #[test]
    fn slopes_of_synthetic_data() {
        let ds: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 0.5];
        let half = synthetic(&ds.map(|d| (d, d.sqrt())));
        let f = fit_exponent(&half, &Floor::ZERO).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        let lin = synthetic(&ds.map(|d| (d, 3.0 * d)));
        let f = fit_exponent(&lin, &Floor::ZERO).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        let scaled = synthetic(&ds.map(|d| (7.0 * d, 3.0 * d)));
        let g = fit_exponent(&scaled, &Floor::ZERO).unwrap();
        assert!((g.slope - f.slope).abs() < 1e-12);
        assert!((g.intercept - f.intercept).abs() > 1.0);
    }

    #[test]
    fn too_few_records() {
        let r = synthetic(&[(1e-2, 1e-2), (1e-1, 1e-1), (1e-3, 1e-3)]);
        assert!(matches!(
            fit_exponent(&r, &Floor::ZERO),
            Err(StabilityError::TooFewRecords { needed: 4, have: 3 })
        ));
        let floor = Floor { deficit: 1e-3, gap: 0.0 };
        let r = synthetic(&[(1e-3, 1.0), (5e-3, 1.0), (2e-2, 1.0), (1e-1, 1.0)]);
        assert!(matches!(
            fit_exponent(&r, &floor),
            Err(StabilityError::TooFewRecords { have: 2, .. })
        ));
    }

    #[test]
    fn shapes() {
        let p = TheoremParams::default();
        assert!((theorem_shape(Theorem::T1_1, &p, 1e-4) - 1e-2 * 100f64.ln()).abs() < 1e-15);
        assert_eq!(theorem_shape(Theorem::T1_1, &p, 4.0), 2.0);
        assert!((theorem_shape(Theorem::T1_3, &p, 0.25) - 0.5).abs() < 1e-15);
        assert!((theorem_exponent(Theorem::T4_8, &p) - 1.0 / 3.2).abs() < 1e-15);
        let p3 = TheoremParams { dimension: 3, eta: 0.1 };
        assert!((theorem_shape(Theorem::T1_1, &p3, 0.125) - 0.5).abs() < 1e-15);
        assert!((theorem_exponent(Theorem::T4_8, &p3) - 0.25).abs() < 1e-15);
        let p5 = TheoremParams { dimension: 5, eta: 0.1 };
        assert!((theorem_exponent(Theorem::T1_3, &p5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn log_spacing() {
        let e = log_spaced(0.005, 0.16, 6);
        for (a, b) in e.iter().zip([0.005, 0.01, 0.02, 0.04, 0.08, 0.16]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn missing_height_is_not_applicable() {
        let mut recs = synthetic(&[(1e-3, 1e-2), (1e-2, 3e-2), (1e-1, 1e-1), (0.3, 0.2)]);
        recs[1].m = 0.0;
        let sweep = Sweep {
            config: SweepConfig::default(),
            records: recs,
            rigid: None,
            floor: Floor::ZERO,
            refined: vec![],
            failures: vec![],
        };
        let p = TheoremParams::default();
        let c = check_theorem_bound(&sweep, Theorem::T1_1, &p);
        assert!(!c.applicable && !c.pass && c.verdict == "not applicable");
        let g = check_theorem_bound(&sweep, Theorem::T4_8, &p);
        assert!(g.applicable);
        let s = check_theorem_bound(&sweep, Theorem::T1_2, &p);
        assert_eq!(s.verdict, "not applicable");
    }
}
