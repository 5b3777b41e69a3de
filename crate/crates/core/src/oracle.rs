//! Ground truth for the rigid case: the closed-form solution on symmetric
//! caps and mesh-free adaptive quadrature of the integral identities it
//! satisfies, in the plane and for axisymmetric caps in space.
//!
//! Lens integrals are written in polar coordinates about the cap center z.
//! A ray from z in direction e enters the unit ball at
//! ρ₁ = −⟨z, e⟩ − sqrt(⟨z, e⟩² − (|z|² − 1)) and leaves the lens on Σ at
//! r(φ).  At the corners the ray is tangent to the unit sphere, so ρ₁ has a
//! square-root singularity there; the angle is parametrized as
//! φ = φ_c + β sin s, which makes the outer integrand smooth in s.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::geometry::{make_symmetric_cap, BoundaryTag, DomainSpec};
use crate::identities::IdentityReport;
use crate::quadrature::{adaptive_gk15, fixed_gk15, Integral};

/// Default absolute tolerance of the identity reports.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const CERTIFICATION_SAMPLES: usize = 1000;
const CERTIFICATION_TOLERANCE: f64 = 1e-12;
const MAX_PANELS: usize = 20_000;
/// Radial panels of the inner rule; G7-K15 is exact for polynomials of
/// degree 22 on each panel.
const RADIAL_PANELS: usize = 2;

/// u(x) = ½(|x − z|² − R²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub dimension: usize,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl ExactSolution {
    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * (dist2(x, &self.center) - self.radius * self.radius)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, b)| a - b).collect()
    }

    pub fn hessian(&self, _x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dimension;
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        let h = self.hessian(x);
        (0..self.dimension).map(|i| h[i][i]).sum()
    }

    /// P = ½|∇u|² − u.
    pub fn p_function(&self, x: &[f64]) -> f64 {
        let g = self.gradient(x);
        0.5 * dot(&g, &g) - self.value(x)
    }

    /// |∇²u|² − (Δu)²/N.
    pub fn hessian_deficit(&self, x: &[f64]) -> f64 {
        let h = self.hessian(x);
        let frob: f64 = h.iter().flatten().map(|v| v * v).sum();
        let tr = self.laplacian(x);
        frob - tr * tr / self.dimension as f64
    }

    /// X^u = x_N ∇u − u e_N.
    pub fn xu_field(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dimension;
        let u = self.value(x);
        let mut v: Vec<f64> = self.gradient(x).iter().map(|g| x[n - 1] * g).collect();
        v[n - 1] -= u;
        v
    }

    /// Checks Δu = N, u = 0 on |x − z| = R and u_ν = u on the unit sphere
    /// at deterministic low-discrepancy samples.
    pub fn certify(&self) -> Result<(), OracleError> {
        let n = self.dimension;
        let r2 = self.radius * self.radius;
        let z2 = dot(&self.center, &self.center);
        for k in 0..CERTIFICATION_SAMPLES {
            let s = sphere_sample(n, k);
            let on_cap: Vec<f64> = self.center.iter().zip(&s).map(|(c, d)| c + self.radius * d).collect();
            let u = self.value(&on_cap);
            if u.abs() > CERTIFICATION_TOLERANCE * (1.0 + r2) {
                return Err(OracleError::Certification(format!(
                    "u = {u:.3e} on the cap sphere at sample {k}"
                )));
            }
            let flux = dot(&self.gradient(&s), &s) - self.value(&s);
            if flux.abs() > CERTIFICATION_TOLERANCE * (1.0 + z2) {
                return Err(OracleError::Certification(format!(
                    "u_nu - u = {flux:.3e} on the unit sphere at sample {k}"
                )));
            }
            let inner: Vec<f64> = self.center.iter().zip(&s).map(|(c, d)| c + 0.5 * self.radius * d).collect();
            let lap = self.laplacian(&inner) - n as f64;
            if lap.abs() > CERTIFICATION_TOLERANCE * n as f64 {
                return Err(OracleError::Certification(format!(
                    "Laplacian differs from N by {lap:.3e} at sample {k}"
                )));
            }
        }
        Ok(())
    }
}

/// The closed-form solution on the symmetric cap with center
/// z = (z', sqrt(1 + R² − |z'|²)), certified before it is returned.
pub fn exact_solution(dimension: usize, radius: f64, z_prime: &[f64]) -> Result<ExactSolution, OracleError> {
    let spec = make_symmetric_cap(dimension, radius, z_prime)?;
    let sol = ExactSolution {
        dimension,
        center: spec.cap_center.clone(),
        radius,
    };
    sol.certify()?;
    Ok(sol)
}

/// X^q = x_N x − ½(|x|² + 1) e_N.
pub fn killing_field(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let xn = x[n - 1];
    let half = 0.5 * (dot(x, x) + 1.0);
    let mut v: Vec<f64> = x.iter().map(|xi| xn * xi).collect();
    v[n - 1] -= half;
    v
}

/// Mesh-free quadrature over a lens and its two boundary pieces.
#[derive(Debug, Clone)]
pub enum LensQuadrature {
    /// Any planar lens, perturbed or not.
    Planar(DomainSpec),
    /// A spatial cap with center (0, …, 0, z_N), reduced to the meridian
    /// half-plane; integrands must be invariant under rotations about e_N
    /// and are evaluated at points (x₁, 0, …, 0, x_N).
    Axisymmetric { dimension: usize, zn: f64, radius: f64 },
}

impl LensQuadrature {
    pub fn new(spec: &DomainSpec) -> Result<Self, OracleError> {
        let n = spec.dimension;
        let tilt = spec.cap_center[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        match n {
            2 => Ok(LensQuadrature::Planar(spec.clone())),
            3 if tilt == 0.0 && spec.perturbation.is_identity() => Ok(LensQuadrature::Axisymmetric {
                dimension: 3,
                zn: spec.cap_center[n - 1],
                radius: spec.cap_radius,
            }),
            _ => Err(OracleError::Unsupported { dim: n, tilt }),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            LensQuadrature::Planar(_) => 2,
            LensQuadrature::Axisymmetric { dimension, .. } => *dimension,
        }
    }

    /// ∫_Ω f dx.
    pub fn volume<F: Fn(&[f64]) -> f64>(&self, f: F, tol: f64) -> Integral {
        match self {
            LensQuadrature::Planar(spec) => {
                let z = spec.center();
                let zz = z[0] * z[0] + z[1] * z[1];
                let [a, b] = spec.sigma_window();
                let (c, beta) = (0.5 * (a + b), 0.5 * (b - a));
                adaptive_gk15(
                    |s| {
                        let phi = c + beta * s.sin();
                        let e = [phi.cos(), phi.sin()];
                        let rho1 = entry_distance(z[0] * e[0] + z[1] * e[1], zz);
                        let inner = fixed_gk15(
                            |rho| f(&[z[0] + rho * e[0], z[1] + rho * e[1]]) * rho,
                            rho1,
                            spec.radius_at(phi),
                            RADIAL_PANELS,
                        );
                        inner * beta * s.cos()
                    },
                    -0.5 * PI,
                    0.5 * PI,
                    tol,
                    MAX_PANELS,
                )
            }
            &LensQuadrature::Axisymmetric { dimension, zn, radius } => {
                let beta = (radius / zn).acos();
                let zz = zn * zn;
                adaptive_gk15(
                    |s| {
                        let phi = beta * s.sin();
                        let (sp, cp) = phi.sin_cos();
                        let rho1 = entry_distance(-zn * cp, zz);
                        let inner = fixed_gk15(
                            |rho| {
                                let x = meridian_point(dimension, rho * sp, zn - rho * cp);
                                f(&x[..dimension]) * 2.0 * PI * rho * rho * sp
                            },
                            rho1,
                            radius,
                            RADIAL_PANELS,
                        );
                        inner * beta * s.cos()
                    },
                    0.0,
                    0.5 * PI,
                    tol,
                    MAX_PANELS,
                )
            }
        }
    }

    /// ∫ f(x, ν) dS over Σ or T.
    pub fn boundary<F: Fn(&[f64], &[f64]) -> f64>(&self, tag: BoundaryTag, f: F, tol: f64) -> Integral {
        match (self, tag) {
            (LensQuadrature::Planar(spec), BoundaryTag::Sigma) => {
                let z = spec.center();
                let [a, b] = spec.sigma_window();
                adaptive_gk15(
                    |phi| {
                        let (r, dr) = (spec.radius_at(phi), spec.radius_derivative(phi));
                        let (sn, cs) = phi.sin_cos();
                        let speed = r.hypot(dr);
                        let x = [z[0] + r * cs, z[1] + r * sn];
                        // outward normal of the polar curve, r e − r' e⊥
                        let nu = [(r * cs + dr * sn) / speed, (r * sn - dr * cs) / speed];
                        f(&x, &nu) * speed
                    },
                    a,
                    b,
                    tol,
                    MAX_PANELS,
                )
            }
            (LensQuadrature::Planar(spec), BoundaryTag::TArc) => {
                let [p0, p1] = spec.t_window();
                adaptive_gk15(
                    |psi| {
                        let x = [psi.cos(), psi.sin()];
                        f(&x, &x)
                    },
                    p0,
                    p1,
                    tol,
                    MAX_PANELS,
                )
            }
            (&LensQuadrature::Axisymmetric { dimension, zn, radius }, BoundaryTag::Sigma) => {
                let beta = (radius / zn).acos();
                adaptive_gk15(
                    |phi| {
                        let (sp, cp) = phi.sin_cos();
                        let x = meridian_point(dimension, radius * sp, zn - radius * cp);
                        let nu = meridian_point(dimension, sp, -cp);
                        f(&x[..dimension], &nu[..dimension]) * 2.0 * PI * radius * radius * sp
                    },
                    0.0,
                    beta,
                    tol,
                    MAX_PANELS,
                )
            }
            (&LensQuadrature::Axisymmetric { dimension, zn, .. }, BoundaryTag::TArc) => {
                let top = (1.0 / zn).acos();
                adaptive_gk15(
                    |psi| {
                        let (sp, cp) = psi.sin_cos();
                        let x = meridian_point(dimension, sp, cp);
                        f(&x[..dimension], &x[..dimension]) * 2.0 * PI * sp
                    },
                    0.0,
                    top,
                    tol,
                    MAX_PANELS,
                )
            }
        }
    }
}

/// Reports for the rigid cap: the Pohozaev identity, the fundamental
/// identity with c = R and with c = 0, the formula for R and the
/// divergence theorem for X^u.  Every integral is computed to `tol / 10`.
pub fn oracle_identity_report(
    dimension: usize,
    radius: f64,
    z_prime: &[f64],
    tol: f64,
) -> Result<Vec<IdentityReport>, OracleError> {
    let tilt = z_prime.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(dimension == 2 || (dimension == 3 && tilt == 0.0)) {
        return Err(OracleError::Unsupported { dim: dimension, tilt });
    }
    let sol = exact_solution(dimension, radius, z_prime)?;
    let spec = make_symmetric_cap(dimension, radius, z_prime)?;
    let quad = LensQuadrature::new(&spec)?;
    let itol = tol / 10.0;
    let nf = dimension as f64;
    let last = dimension - 1;
    let u_nu = |x: &[f64], nu: &[f64]| dot(&sol.gradient(x), nu);

    let moment = quad.volume(|x| x[last], itol);
    let sigma_moment = quad.boundary(BoundaryTag::Sigma, |x, _| x[last], itol);

    let p_lhs = quad.volume(|x| nf * x[last] * sol.p_function(x), itol);
    let p_rhs = quad.boundary(
        BoundaryTag::Sigma,
        |x, nu| {
            let g = u_nu(x, nu);
            0.5 * g * g * dot(&killing_field(x), nu)
        },
        itol,
    );

    let f_lhs = quad.volume(|x| x[last] * (-sol.value(x)) * sol.hessian_deficit(x), itol);
    let f_rhs = |c: f64| {
        quad.boundary(
            BoundaryTag::Sigma,
            |x, nu| {
                let g = u_nu(x, nu);
                0.5 * (g * g - c * c) * (x[last] * g - dot(&killing_field(x), nu))
            },
            itol,
        )
    };
    let f_rhs_r = f_rhs(radius);
    let f_rhs_0 = f_rhs(0.0);

    let xu = |tag| quad.boundary(tag, |x: &[f64], nu: &[f64]| dot(&sol.xu_field(x), nu), itol);
    let (xu_sigma, xu_t) = (xu(BoundaryTag::Sigma), xu(BoundaryTag::TArc));

    let r_value = nf * moment.value / sigma_moment.value;
    let r_error = r_value * (moment.error / moment.value.abs() + sigma_moment.error / sigma_moment.value.abs());

    Ok(vec![
        IdentityReport::new("pohozaev", p_lhs.value, p_rhs.value).with_quad_error(p_lhs.error + p_rhs.error),
        IdentityReport::new("fundamental_c_eq_R", f_lhs.value, f_rhs_r.value)
            .with_quad_error(f_lhs.error + f_rhs_r.error)
            .with_note(format!("c = {radius}")),
        IdentityReport::new("fundamental_c_eq_0", f_lhs.value, f_rhs_0.value)
            .with_quad_error(f_lhs.error + f_rhs_0.error)
            .with_note("c = 0".to_string()),
        IdentityReport::new("r_formula", r_value, radius).with_quad_error(r_error),
        IdentityReport::new("xu_closure", nf * moment.value, xu_sigma.value + xu_t.value)
            .with_quad_error(nf * moment.error + xu_sigma.error + xu_t.error),
    ])
}

/// Distance from z along a unit direction e (with ⟨z, e⟩ = `ze`,
/// |z|² = `zz`) to the first crossing of the unit sphere.
fn entry_distance(ze: f64, zz: f64) -> f64 {
    let disc = (ze * ze - (zz - 1.0)).max(0.0);
    -ze - disc.sqrt()
}

/// (x₁, 0, …, 0, x_N) padded to the largest supported dimension.
fn meridian_point(dimension: usize, radial: f64, axial: f64) -> [f64; 3] {
    let mut p = [0.0; 3];
    p[0] = radial;
    p[dimension - 1] = axial;
    p
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Van der Corput radical inverse.
fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let (mut v, mut f) = (0.0, 1.0 / base as f64);
    while k > 0 {
        v += (k % base) as f64 * f;
        k /= base;
        f /= base as f64;
    }
    v
}

/// Deterministic unit vector number `k`: golden-angle points on the circle,
/// Fibonacci points on the sphere, normalized Halton points beyond.
fn sphere_sample(n: usize, k: usize) -> Vec<f64> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    match n {
        2 => {
            let t = 2.0 * PI * (k as f64 * golden).fract();
            vec![t.cos(), t.sin()]
        }
        3 => {
            let zc = 1.0 - 2.0 * (k as f64 + 0.5) / CERTIFICATION_SAMPLES as f64;
            let r = (1.0 - zc * zc).max(0.0).sqrt();
            let t = 2.0 * PI * (k as f64 * golden).fract();
            vec![r * t.cos(), r * t.sin(), zc]
        }
        _ => {
            const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
            let mut j = k + 1;
            loop {
                let v: Vec<f64> = (0..n)
                    .map(|i| 2.0 * radical_inverse(j, PRIMES[i % PRIMES.len()] + 40 * (i / PRIMES.len())) - 1.0)
                    .collect();
                let l = dot(&v, &v).sqrt();
                if l > 0.1 {
                    return v.iter().map(|c| c / l).collect();
                }
                j += CERTIFICATION_SAMPLES;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_perturbed_domain, PerturbationProfile};

    #[test]
    fn exact_solution_examples() {
        let s = exact_solution(2, 1.0, &[0.0]).unwrap();
        let r2 = 2f64.sqrt();
        assert!(s.value(&[0.0, r2 - 1.0]).abs() < 1e-15);
        assert!((s.value(&[0.0, r2]) + 0.5).abs() < 1e-15);
        let x = [0.3, r2 - (1.0f64 - 0.09).sqrt()];
        let nu: Vec<f64> = s.gradient(&x);
        assert!((dot(&nu, &nu).sqrt() - 1.0).abs() < 1e-14);
        assert!((s.p_function(&[0.1, 0.8]) - 0.5).abs() < 1e-14);
        assert_eq!(s.hessian_deficit(&[0.2, 0.5]), 0.0);
    }

    #[test]
    fn inadmissible_cap_is_rejected() {
        assert!(exact_solution(2, 1.0, &[2.0]).is_err());
        assert!(exact_solution(2, -1.0, &[0.0]).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = exact_solution(3, 0.5, &[0.0, 0.0]).unwrap();
        let step = 1e-4;
        for k in 0..50 {
            let x: Vec<f64> = sphere_sample(3, k).iter().map(|c| 0.7 * c).collect();
            let g = s.gradient(&x);
            let h = s.hessian(&x);
            for i in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += step;
                xm[i] -= step;
                let fd = (s.value(&xp) - s.value(&xm)) / (2.0 * step);
                assert!((fd - g[i]).abs() < 1e-6);
                let gp = s.gradient(&xp);
                let gm = s.gradient(&xm);
                for j in 0..3 {
                    assert!(((gp[j] - gm[j]) / (2.0 * step) - h[i][j]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn killing_field_examples() {
        assert_eq!(killing_field(&[0.0, 1.0]), vec![0.0, 0.0]);
        for k in 0..20 {
            for n in [2, 3] {
                let x = sphere_sample(n, k);
                assert!(dot(&killing_field(&x), &x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn killing_field_divergence() {
        let step = 1e-5;
        for k in 0..40 {
            for n in [2, 3, 4] {
                let x: Vec<f64> = sphere_sample(n, k).iter().map(|c| 1.3 * c).collect();
                let div: f64 = (0..n)
                    .map(|i| {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[i] += step;
                        xm[i] -= step;
                        (killing_field(&xp)[i] - killing_field(&xm)[i]) / (2.0 * step)
                    })
                    .sum();
                assert!((div - n as f64 * x[n - 1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn planar_lens_area_and_lengths() {
        let spec = make_symmetric_cap(2, 1.0, &[0.0]).unwrap();
        let q = LensQuadrature::new(&spec).unwrap();
        let area = q.volume(|_| 1.0, 1e-12);
        assert!((area.value - (0.5 * PI - 1.0)).abs() < 1e-11, "{area:?}");
        let sig = q.boundary(BoundaryTag::Sigma, |_, _| 1.0, 1e-12).value;
        let t = q.boundary(BoundaryTag::TArc, |_, _| 1.0, 1e-12).value;
        assert!((sig - 0.5 * PI).abs() < 1e-11);
        assert!((t - 0.5 * PI).abs() < 1e-11);
    }

    #[test]
    fn axisymmetric_volume_matches_planar_revolution() {
        let spec = make_symmetric_cap(3, 1.0, &[0.0, 0.0]).unwrap();
        let q = LensQuadrature::new(&spec).unwrap();
        let zn = 2f64.sqrt();
        let xm = 1.0 / zn;
        let cap = |h: f64, r: f64| PI * h * h * (3.0 * r - h) / 3.0;
        // lens = {|x| < 1} ∩ {|x − z| < 1}: cap of the ball of z below the
        // plane plus cap of the unit ball above it
        let lower = cap(xm - (zn - 1.0), 1.0);
        let upper = cap(1.0 - xm, 1.0);
        let v = q.volume(|_| 1.0, 1e-12);
        assert!((v.value - (lower + upper)).abs() < 1e-10, "{} vs {}", v.value, lower + upper);
    }

    #[test]
    fn reports_vanish_in_the_rigid_case() {
        for (n, r) in [(2, 1.0), (2, 0.5), (3, 1.0), (3, 0.5)] {
            let zp = vec![0.0; n - 1];
            for rep in oracle_identity_report(n, r, &zp, 1e-9).unwrap() {
                assert!(rep.residual <= 1e-9, "{n} {r} {rep:?}");
            }
        }
    }

    #[test]
    fn tilted_planar_cap() {
        let reps = oracle_identity_report(2, 0.8, &[0.3], 1e-9).unwrap();
        assert!(reps.iter().all(|r| r.residual <= 1e-9), "{reps:?}");
        assert!(matches!(
            oracle_identity_report(3, 1.0, &[0.2, 0.0], 1e-9),
            Err(OracleError::Unsupported { .. })
        ));
    }

    #[test]
    fn perturbed_lens_divergence_theorem() {
        // ∫_Ω div F = ∮ ⟨F, ν⟩ with F = (x₁x₂, x₂²) on a genuinely curved Σ
        let base = make_symmetric_cap(2, 1.0, &[0.0]).unwrap();
        let spec = make_perturbed_domain(&base, 0.1, &PerturbationProfile::bump(base.sigma_window())).unwrap();
        let q = LensQuadrature::new(&spec).unwrap();
        let div = q.volume(|x| 3.0 * x[1], 1e-12).value;
        let flux = |tag| q.boundary(tag, |x: &[f64], nu: &[f64]| x[0] * x[1] * nu[0] + x[1] * x[1] * nu[1], 1e-12).value;
        assert!((div - flux(BoundaryTag::Sigma) - flux(BoundaryTag::TArc)).abs() < 1e-10);
    }
}
