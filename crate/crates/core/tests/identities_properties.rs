use lens_torsion::geometry::{make_perturbed_domain, make_symmetric_cap, BoundaryTag, DomainSpec, PerturbationProfile};
use lens_torsion::identities::{
    c_independence_integral, certificate, compute_r, compute_z, compute_z_sigma, deficit_norm, fundamental_report,
    h_quantities, lemma42_check, mean_gradient_defect, mean_value_check, pohozaev_report, weighted_norms,
    CertificateOptions, DeltaMode,
};
use lens_torsion::stability::solve_lens;
use lens_torsion::Field;

fn unit_lens() -> DomainSpec {
    make_symmetric_cap(2, 1.0, &[0.0]).unwrap()
}

fn perturbed(eps: f64) -> DomainSpec {
    let base = unit_lens();
    make_perturbed_domain(&base, eps, &PerturbationProfile::bump(base.sigma_window())).unwrap()
}

fn exact_interpolant(level: usize) -> Field {
    let f = solve_lens(&unit_lens(), 0.1, level).unwrap();
    let z = [0.0, 2f64.sqrt()];
    Field::interpolate(f.space.clone(), |x| 0.5 * ((x[0] - z[0]).powi(2) + (x[1] - z[1]).powi(2) - 1.0))
}

#[test]
fn r_converges_and_stays_positive() {
    let errs: Vec<f64> = (0..3)
        .map(|l| (compute_r(&solve_lens(&unit_lens(), 0.1, l).unwrap()).unwrap() - 1.0).abs())
        .collect();
    assert!(errs[2] < errs[0] && errs[2] < 1e-3, "{errs:?}");
    let r = compute_r(&solve_lens(&perturbed(0.05), 0.1, 1).unwrap()).unwrap();
    assert!(r > 0.0 && (r - 1.0).abs() < 0.05, "{r}");
}

#[test]
fn z_sigma_agrees_with_z_and_tends_to_the_center() {
    let f = solve_lens(&unit_lens(), 0.1, 2).unwrap();
    let z = compute_z(&f);
    let z0 = compute_z_sigma(&f, 0.0).unwrap();
    assert!((z0[0] - z.volume[0]).abs() < 1e-12 && (z0[1] - z.volume[1]).abs() < 1e-12);
    for sigma in [0.005, 0.01, 0.0166] {
        let zs = compute_z_sigma(&f, sigma).unwrap();
        assert!(zs[0].abs() < 1e-3 && (zs[1] - 2f64.sqrt()).abs() < 1e-3, "{sigma} {zs:?}");
    }
    let p = solve_lens(&perturbed(0.1), 0.1, 2).unwrap();
    let base = compute_z_sigma(&p, 0.0).unwrap();
    let gaps: Vec<f64> = [0.016, 0.008, 0.004]
        .iter()
        .map(|&s| {
            let zs = compute_z_sigma(&p, s).unwrap();
            (zs[0] - base[0]).hypot(zs[1] - base[1])
        })
        .collect();
    assert!(gaps[2] <= gaps[1] && gaps[1] <= gaps[0], "{gaps:?}");
    assert!(compute_z_sigma(&f, 10.0).is_err());
}

#[test]
fn pohozaev_converges_on_the_perturbed_lens() {
    let rel: Vec<f64> = (0..3)
        .map(|l| pohozaev_report(&solve_lens(&perturbed(0.1), 0.1, l).unwrap()).relative)
        .collect();
    assert!(rel[1] < rel[0] && rel[2] < rel[1], "{rel:?}");
}

#[test]
fn fundamental_lhs_is_independent_of_c() {
    let f = solve_lens(&perturbed(0.1), 0.1, 1).unwrap();
    let (a, b) = (fundamental_report(&f, 0.0), fundamental_report(&f, 2.0));
    assert_eq!(a.lhs, b.lhs);
    assert!(a.lhs >= -1e-10);
    let integral = c_independence_integral(&f);
    assert!(((b.rhs - a.rhs) - 0.5 * (0.0 - 4.0) * integral).abs() < 1e-12);
    assert!(b.note.as_deref().is_some_and(|n| n.contains("c =")));
}

#[test]
fn c_independence_integral_vanishes_under_refinement() {
    let vals: Vec<f64> = (1..4)
        .map(|l| c_independence_integral(&solve_lens(&perturbed(0.1), 0.1, l).unwrap()).abs())
        .collect();
    assert!(vals[1] < vals[0] && vals[2] < vals[1] && vals[2] < 1e-3, "{vals:?}");
}

#[test]
fn doubled_radius_deficit_is_three_r_squared_length() {
    let f = exact_interpolant(2);
    let len = f.mesh().boundary_length(BoundaryTag::Sigma);
    let d = deficit_norm(&f, 2.0);
    assert!((d - 3.0 * len).abs() < 5e-3 * len, "{d} {}", 3.0 * len);
}

#[test]
fn rigid_lens_has_no_oscillation_and_no_gap() {
    let f = exact_interpolant(1);
    let q = h_quantities(&f, [0.0, 2f64.sqrt()], 0.1);
    assert!(q.osc_h < 1e-12 && q.gap < 1e-12, "{q:?}");
    assert!(q.holds);
}

#[test]
fn oscillation_is_half_the_difference_of_squares() {
    let f = solve_lens(&perturbed(0.1), 0.1, 1).unwrap();
    let z = compute_z(&f).surface;
    let q = h_quantities(&f, z, 0.1);
    assert!((q.osc_h - 0.5 * (q.rho_e.powi(2) - q.rho_i.powi(2))).abs() < 1e-12);
    assert!(q.gap >= 0.0 && q.holds);
    assert!(q.gap <= q.bound_diameter && q.gap <= q.bound_cone);
}

#[test]
fn weighted_norms_vanish_on_the_rigid_lens_and_decrease_in_tau() {
    let w = weighted_norms(&exact_interpolant(1), [0.0, 2f64.sqrt()], DeltaMode::Interpolated);
    assert!(w.half < 1e-6);
    let f = solve_lens(&perturbed(0.16), 0.1, 1).unwrap();
    let z = compute_z(&f).surface;
    for mode in [DeltaMode::Interpolated, DeltaMode::Exact] {
        let w = weighted_norms(&f, z, mode);
        assert!(w.half >= w.one && w.one >= w.three_half && w.three_half > 0.0, "{w:?}");
    }
}

#[test]
fn lemma42_violations_stay_in_the_discretization_band() {
    for l in 0..3 {
        let f = solve_lens(&perturbed(0.1), 0.1, l).unwrap();
        let rep = lemma42_check(&f, None, 1.0, DeltaMode::Interpolated);
        assert!(rep.pass(), "level {l}: {} violations", rep.violations);
    }
}

#[test]
fn mean_gradient_defect_is_second_order() {
    let d: Vec<f64> = (0..3)
        .map(|l| {
            let f = solve_lens(&perturbed(0.1), 0.1, l).unwrap();
            mean_gradient_defect(&f, compute_z(&f).volume) / f.mesh().area()
        })
        .collect();
    assert!(d.iter().all(|v| *v < 1e-10), "{d:?}");
}

#[test]
fn h_satisfies_the_discrete_mean_value_property() {
    let f = solve_lens(&perturbed(0.1), 0.1, 1).unwrap();
    let z = compute_z(&f).surface;
    let rep = mean_value_check(&f, z, 1.0);
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn certificate_passes_and_serializes() {
    let spec = perturbed(0.1);
    let f = solve_lens(&spec, 0.1, 1).unwrap();
    let cert = certificate(&f, &spec, &CertificateOptions::default()).unwrap();
    assert!(cert.pass, "{:?}", cert.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    let json = serde_json::to_string(&cert).unwrap();
    assert!(json.contains("\"R\""));
    let back: lens_torsion::identities::Certificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cert);
}
