use lens_torsion::geometry::{make_symmetric_cap, DomainSpec, PerturbationProfile};
use lens_torsion::stability::{
    check_theorem_bound, fit_exponent, log_spaced, records_csv, run_sweep, Floor, Sweep, SweepConfig, Theorem,
    TheoremParams, CSV_HEADER,
};
use lens_torsion::StabilityError;

fn unit_lens() -> DomainSpec {
    make_symmetric_cap(2, 1.0, &[0.0]).unwrap()
}

fn small_sweep(eps: Vec<f64>) -> Sweep {
    let base = unit_lens();
    let config = SweepConfig {
        h_target: 0.1,
        refinements: 1,
        eps,
        ..SweepConfig::default()
    };
    run_sweep(&base, &PerturbationProfile::bump(base.sigma_window()), &config).unwrap()
}

#[test]
fn sweep_round_trips_through_json() {
    let sweep = small_sweep(log_spaced(0.02, 0.16, 4));
    let json = serde_json::to_string_pretty(&sweep).unwrap();
    let back: Sweep = serde_json::from_str(&json).unwrap();
    assert_eq!(back, sweep);
    for t in Theorem::ALL {
        let cert = check_theorem_bound(&sweep, t, &TheoremParams::default());
        let json = serde_json::to_string(&cert).unwrap();
        assert_eq!(serde_json::from_str::<lens_torsion::stability::TheoremCertificate>(&json).unwrap(), cert);
    }
}

#[test]
fn records_are_ordered_and_grow_with_eps() {
    let sweep = small_sweep(vec![0.16, 0.04, 0.08, 0.02]);
    let eps: Vec<f64> = sweep.records.iter().map(|r| r.eps).collect();
    assert_eq!(eps, vec![0.02, 0.04, 0.08, 0.16]);
    for w in sweep.records.windows(2) {
        assert!(w[0].deficit < w[1].deficit);
    }
    let rigid = sweep.rigid.as_ref().unwrap();
    assert_eq!(sweep.floor, Floor { deficit: rigid.deficit, gap: rigid.gap });
    assert_eq!(sweep.refined.len(), 2);
    assert!(sweep.refined.iter().all(|r| r.refinements == 2));
    for r in sweep.records.iter().chain(sweep.refined.iter()) {
        assert!(r.deficit >= 0.0 && r.gap >= 0.0 && r.cone && r.cert);
    }
}

#[test]
fn rigid_family_sits_at_the_floor() {
    let sweep = small_sweep(vec![0.0]);
    let rec = &sweep.records[0];
    assert_eq!((rec.deficit, rec.gap), (sweep.floor.deficit, sweep.floor.gap));
    assert!(sweep.usable().is_empty());
    assert!(matches!(fit_exponent(&sweep.records, &sweep.floor), Err(StabilityError::TooFewRecords { .. })));
    let cert = check_theorem_bound(&sweep, Theorem::T1_1, &TheoremParams::default());
    assert!(!cert.pass && cert.slope.is_none());
}

#[test]
fn csv_has_one_row_per_record() {
    let sweep = small_sweep(vec![0.05, 0.1]);
    let csv = records_csv(&sweep.records);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.ends_with("PASS"));
    }
}

#[test]
fn invalid_amplitude_lists_are_rejected() {
    let base = unit_lens();
    let profile = PerturbationProfile::bump(base.sigma_window());
    for eps in [vec![], vec![f64::NAN]] {
        let config = SweepConfig { eps, ..SweepConfig::default() };
        assert!(matches!(run_sweep(&base, &profile, &config), Err(StabilityError::Invalid(_))));
    }
}

#[test]
fn inadmissible_members_become_failures() {
    let sweep = small_sweep(vec![0.05, 5.0]);
    assert_eq!(sweep.records.len(), 1);
    assert!(sweep.failures.iter().any(|f| f.eps == 5.0 && !f.diagnostic.is_empty()));
}
