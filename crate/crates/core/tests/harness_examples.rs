use besov_haar::harness::{probe_chi_membership, region_sweep, Classification, ProbeConfig, SweepAxes};
use besov_haar::regions::{chi_membership, classical_extends, classical_membership, functional_verdict, Extension};
use besov_haar::seqnorm::BesovParams;

const INF: f64 = f64::INFINITY;

#[test]
fn two_dimensional_probe_follows_morrey_exponent() {
    let params = BesovParams::new(1.5, 2.0, INF, 0.5, 2).unwrap();
    let report = probe_chi_membership(&params, &ProbeConfig::default()).unwrap();
    assert_eq!(report.classification, Classification::Divergent);
    assert_eq!(report.expected_slope, 1.5);
    assert!((report.fitted_slope - 1.5).abs() < 0.1, "{}", report.fitted_slope);
}

#[test]
fn boundary_q_case_is_caught_by_ratio_test() {
    let params = BesovParams::new(0.5, 2.0, 2.0, 0.0, 2).unwrap();
    let report = probe_chi_membership(&params, &ProbeConfig::default()).unwrap();
    let test = report.boundary_test.as_ref().unwrap();
    assert!(test.fired, "{test:?}");
    assert_eq!(report.classification, Classification::Divergent);
    assert!(report.agrees);
}

#[test]
fn single_point_sweep_matches_predicates() {
    let params = BesovParams::new(0.3, 1.5, 2.0, 0.1, 2).unwrap();
    let rows = region_sweep(&[params], None).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].membership, chi_membership(&params));
    assert_eq!(rows[0].functional, functional_verdict(&params));
    assert!(rows[0].probe.is_none());
}

#[test]
fn tau_zero_slice_matches_classical_regions() {
    let axes = SweepAxes {
        s: (-12..=12).map(|k| k as f64 * 0.25).collect(),
        p: vec![0.5, 1.0, 2.0, INF],
        q: vec![0.5, 1.0, 2.0, INF],
        tau: vec![0.0],
        n: vec![1, 2, 3],
    };
    let rows = region_sweep(&axes.tuples().unwrap(), None).unwrap();
    assert_eq!(rows.len(), 25 * 4 * 4 * 3);
    for row in rows {
        assert_eq!(row.membership.member, classical_membership(&row.params));
        assert_eq!(
            row.functional.value == Extension::Extends,
            classical_extends(&row.params)
        );
    }
}

#[test]
fn sweep_output_is_reproducible() {
    let axes = SweepAxes {
        s: vec![0.25, 0.5, 1.0],
        p: vec![1.0, 2.0],
        q: vec![2.0, INF],
        tau: vec![0.0, 0.25],
        n: vec![1],
    };
    let grid = axes.tuples().unwrap();
    let config = ProbeConfig::default();
    let a = serde_json::to_string(&region_sweep(&grid, Some(&config)).unwrap()).unwrap();
    let b = serde_json::to_string(&region_sweep(&grid, Some(&config)).unwrap()).unwrap();
    assert_eq!(a, b);
}
