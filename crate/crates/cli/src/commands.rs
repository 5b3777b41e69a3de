//! The four subcommands.  Each returns the process exit code; I/O failures
//! propagate as errors.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Context;
use lens_torsion::geometry::fixtures::{dumbbell, slit_square};
use lens_torsion::geometry::{
    boundary_polyline, cone_condition_check, john_constant_bound, parallel_set_connected, sigma0, BoundaryPolyline,
    ConeCheckConfig, ConeReport, Polygonal, DEFAULT_CONE_A, DEFAULT_CONE_THETA,
};
use lens_torsion::identities::{certificate, Certificate, IdentityReport};
use lens_torsion::mesh::triangulate_polyline;
use lens_torsion::oracle::oracle_identity_report;
use lens_torsion::stability::{check_theorem_bound, records_csv, run_sweep, solve_lens, TheoremCertificate};
use lens_torsion::{triangulate, MeshError, StabilityError};
use serde::Serialize;

use crate::config::{Fixture, RunConfig};
use crate::plot::gnuplot_script;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

const SOLVE_H: f64 = 0.1;
const GEOMETRY_H: f64 = 0.02;
const FIXTURE_SEGMENT: f64 = 0.02;
const LENS_POLYLINE_SEGMENTS: usize = 256;
/// Multiples of σ₀ in the parallel-set table.
const SIGMA_GRID: [f64; 8] = [0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0, 4.0];

/// Writes named files into an output directory, always with the config echo.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>, config: &RunConfig) -> anyhow::Result<Self> {
        let out = Output { dir };
        if let Some(d) = &out.dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        out.json("config.json", config)?;
        Ok(out)
    }

    pub fn text(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<()> {
        if self.dir.is_none() {
            return Ok(());
        }
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }
}

fn report_table(reports: &[IdentityReport]) -> String {
    let mut s = format!(
        "{:<22} {:>24} {:>24} {:>10} {:>10}\n",
        "identity", "lhs", "rhs", "residual", "quad err"
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{:<22} {:>24.16e} {:>24.16e} {:>10.2e} {:>10}",
            r.identity,
            r.lhs,
            r.rhs,
            r.residual,
            r.quad_error_estimate.map(|e| format!("{e:.1e}")).unwrap_or_else(|| "-".into())
        );
    }
    s
}

pub fn oracle_check(config: &RunConfig, out: &Output) -> anyhow::Result<u8> {
    let zp = config.z_prime();
    let quad_tol = (config.tol / 10.0).max(1e-13);
    let reports = match oracle_identity_report(config.dimension, config.radius, &zp, quad_tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    print!("{}", report_table(&reports));
    out.json("oracle.json", &reports)?;
    let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    if reports.iter().all(|r| r.residual <= config.tol) {
        println!("all residuals <= {:e} (max {worst:.2e})", config.tol);
        Ok(EXIT_OK)
    } else {
        println!("FAIL: max residual {worst:.2e} exceeds {:e}", config.tol);
        Ok(EXIT_FAIL)
    }
}

fn stability_exit(e: &StabilityError) -> u8 {
    match e {
        StabilityError::Fem(_) => EXIT_FAIL,
        StabilityError::Mesh(MeshError::Triangulation(_)) => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

fn certificate_summary(c: &Certificate) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "h = {:.4e}, triangles = {}, solver residual = {:.2e}",
        c.h, c.triangles, c.solver_residual
    );
    let _ = writeln!(
        s,
        "R = {:.10}, z = ({:.10}, {:.10}), deficit = {:.4e}, L = {:.4}, m = {:.4}",
        c.r, c.z.surface[0], c.z.surface[1], c.deficit, c.lipschitz, c.m
    );
    for check in &c.checks {
        let _ = writeln!(s, "  {:<4} {:<32} {}", if check.pass { "ok" } else { "FAIL" }, check.name, check.detail);
    }
    let _ = writeln!(s, "certificate: {}", if c.pass { "PASS" } else { "FAIL" });
    s
}

pub fn solve(config: &RunConfig, out: &Output) -> anyhow::Result<u8> {
    let spec = match config.domain_spec() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    let field = match solve_lens(&spec, config.h_or(SOLVE_H), config.refine) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(stability_exit(&e));
        }
    };
    let cert = match certificate(&field, &spec, &config.certificate) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_FAIL);
        }
    };
    print!("{}", certificate_summary(&cert));
    out.json("domain.json", &spec)?;
    out.text("field.csv", &field.to_csv())?;
    out.text("flux.csv", &field.flux_csv())?;
    out.json("certificate.json", &cert)?;
    Ok(if cert.pass { EXIT_OK } else { EXIT_FAIL })
}

pub fn sweep(config: &RunConfig, out: &Output) -> anyhow::Result<u8> {
    let base = match config.base_domain() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    let sweep_config = config.sweep_config(SOLVE_H);
    let sweep = match run_sweep(&base, &config.profile(&base), &sweep_config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(stability_exit(&e));
        }
    };
    let params = config.theorem_params();
    let certs: Vec<TheoremCertificate> = config
        .theorems
        .iter()
        .map(|&t| check_theorem_bound(&sweep, t, &params))
        .collect();

    println!(
        "{:>12} {:>12} {:>12} {:>6} {:>6}",
        "eps", "deficit", "gap", "usable", "cert"
    );
    for r in sweep.records.iter().chain(sweep.rigid.iter()) {
        println!(
            "{:>12.4e} {:>12.4e} {:>12.4e} {:>6} {:>6}",
            r.eps,
            r.deficit,
            r.gap,
            if sweep.floor.usable(r) { "yes" } else { "no" },
            if r.cert { "PASS" } else { "FAIL" }
        );
    }
    for f in &sweep.failures {
        println!("failed: eps = {:e} at {} refinements: {}", f.eps, f.refinements, f.diagnostic);
    }
    for c in &certs {
        println!(
            "{}: {} (c = {:.4e}, refined c = {:.4e}, slope = {}, exponent = {:.4}){}",
            c.theorem.as_str(),
            c.verdict,
            c.c_min,
            c.c_refined,
            c.slope.map(|s| format!("{s:.4}")).unwrap_or_else(|| "-".into()),
            c.exponent,
            if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) }
        );
    }

    out.text("sweep.csv", &records_csv(&sweep.records))?;
    out.json("sweep.json", &sweep)?;
    out.json("certificates.json", &certs)?;
    out.text("sweep.gp", &gnuplot_script(&certs, &params))?;
    let ok = certs.iter().all(|c| c.pass || !c.applicable);
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Debug, Serialize)]
struct ParallelRow {
    sigma: f64,
    sigma_over_sigma0: f64,
    elements: usize,
    components: usize,
    connected: bool,
}

#[derive(Debug, Serialize)]
struct GeometryReport {
    fixture: Fixture,
    theta: f64,
    a: f64,
    delta0: f64,
    sigma0: f64,
    diameter: f64,
    john_bound: f64,
    cone: ConeReport,
    parallel_sets: Vec<ParallelRow>,
}

pub fn geometry(config: &RunConfig, out: &Output) -> anyhow::Result<u8> {
    let h = config.h_or(GEOMETRY_H);
    let theta = config.cone_theta.unwrap_or(DEFAULT_CONE_THETA);
    let a = config.cone_a.unwrap_or(DEFAULT_CONE_A);
    let built: Result<(BoundaryPolyline, f64, f64, _), String> = match config.fixture {
        Fixture::Lens => config
            .domain_spec()
            .map_err(|e| e.to_string())
            .and_then(|spec| {
                let poly = boundary_polyline(&spec, LENS_POLYLINE_SEGMENTS).map_err(|e| e.to_string())?;
                let mesh = triangulate(&spec, h).map_err(|e| e.to_string())?;
                Ok((poly, spec.cone_theta, spec.cone_a, mesh))
            }),
        Fixture::Slit | Fixture::Dumbbell => {
            let poly = if config.fixture == Fixture::Slit {
                slit_square(FIXTURE_SEGMENT)
            } else {
                dumbbell(FIXTURE_SEGMENT)
            };
            triangulate_polyline(&poly, h, &Polygonal)
                .map(|mesh| (poly, theta, a, mesh))
                .map_err(|e| e.to_string())
        }
    };
    let (poly, theta, a, mesh) = match built {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    let delta0 = 0.25 * a;
    let s0 = sigma0(theta, a, delta0);
    let diameter = poly.diameter();
    let john = john_constant_bound(theta, a, Some(diameter), delta0);
    let cone = cone_condition_check(&poly, theta, a, &ConeCheckConfig::default());
    let parallel_sets: Vec<ParallelRow> = SIGMA_GRID
        .iter()
        .map(|&k| {
            let sigma = k * s0;
            let (elements, components) = match parallel_set_connected(&mesh, sigma) {
                Ok(r) => (r.elements, r.components),
                Err(_) => (0, 0),
            };
            ParallelRow {
                sigma,
                sigma_over_sigma0: k,
                elements,
                components,
                connected: components == 1,
            }
        })
        .collect();

    println!("theta = {theta:.6}, a = {a:.6}, delta0 = {delta0:.6}");
    println!("sigma0 = {s0:.6e}");
    println!("diameter = {diameter:.6}, John bound = {john:.6}");
    match &cone.witness {
        None => println!("cone check: PASS ({} vertices)", cone.vertices_checked),
        Some(w) => println!(
            "cone check: FAIL at vertex {} ({:.6}, {:.6}); axis ({:.4}, {:.4}), apex ({:.6}, {:.6}), outside point ({:.6}, {:.6})",
            w.vertex, w.x[0], w.x[1], w.omega[0], w.omega[1], w.w[0], w.w[1], w.point[0], w.point[1]
        ),
    }
    println!("{:>14} {:>10} {:>10} {:>11} {:>10}", "sigma", "sigma/s0", "elements", "components", "connected");
    for r in &parallel_sets {
        println!(
            "{:>14.6e} {:>10.2} {:>10} {:>11} {:>10}",
            r.sigma, r.sigma_over_sigma0, r.elements, r.components, r.connected
        );
    }

    let report = GeometryReport {
        fixture: config.fixture,
        theta,
        a,
        delta0,
        sigma0: s0,
        diameter,
        john_bound: john,
        cone: cone.clone(),
        parallel_sets,
    };
    out.json("geometry.json", &report)?;
    out.text("boundary.csv", &poly.to_csv())?;
    Ok(if config.require_cone && !cone.pass { EXIT_FAIL } else { EXIT_OK })
}
