use std::path::PathBuf;

use bgp_sdn::experiment::{
    emit, parse_csv, run_case_study, run_sweep, write_csv, CaseStudySpec, ConfigMap, OutputFormat, SweepSpec, Topology,
    CSV_HEADER,
};
use bgp_sdn::{core_convergence_time, TieredCoreSpec};

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/full_mesh_300.csv")
}

fn full_mesh_sweep() -> SweepSpec {
    SweepSpec::new(
        Topology::FullMesh { n: 300, k: 1 },
        SweepSpec::penetration_grid(),
        200,
        42,
    )
}

fn csv_of(spec: &SweepSpec) -> String {
    let mut buf = Vec::new();
    write_csv(&run_sweep(spec).unwrap(), &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

/// Set `BLESS=1` to rewrite the golden file after an intended change.
#[test]
fn full_mesh_sweep_matches_golden_file() {
    let csv = csv_of(&full_mesh_sweep());
    if std::env::var_os("BLESS").is_some() {
        std::fs::create_dir_all(golden_path().parent().unwrap()).unwrap();
        std::fs::write(golden_path(), &csv).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).expect("golden file present");
    assert_eq!(csv, golden);
}

#[test]
fn full_mesh_sweep_is_exact_within_three_standard_errors() {
    let rows = run_sweep(&full_mesh_sweep()).unwrap();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r.error.is_none());
        if r.sweep_value == 1.0 {
            assert_eq!((r.analytic, r.sim_mean), (0.0, 0.0));
            continue;
        }
        let z = (r.analytic - r.sim_mean) / r.sim_std_err;
        assert!(z.abs() < 3.0, "k/N = {}: z = {z:.2}", r.sweep_value);
    }
}

#[test]
fn trivial_sweep_has_one_zero_row() {
    let spec = SweepSpec::new(Topology::FullMesh { n: 300, k: 1 }, vec![1.0], 5, 1);
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].analytic, rows[0].sim_mean, rows[0].rel_error), (0.0, 0.0, 0.0));
    assert!(rows[0].jensen_ok);
}

#[test]
fn sweeps_are_reproducible_byte_for_byte() {
    let spec = SweepSpec::new(
        Topology::Poisson {
            n: 120,
            k: 1,
            p_edge: 0.05,
        },
        vec![0.9, 0.1, 0.5],
        40,
        7,
    );
    let a = csv_of(&spec);
    assert_eq!(a, csv_of(&spec));
    assert!(a.starts_with(&format!("{CSV_HEADER}\n")));
    let values: Vec<f64> = parse_csv(&a).unwrap().iter().map(|r| r.sweep_value).collect();
    assert_eq!(values, vec![0.1, 0.5, 0.9]);
    let other = SweepSpec { master_seed: 8, ..spec };
    assert_ne!(a, csv_of(&other));
}

#[test]
fn emitted_rows_round_trip() {
    let spec = SweepSpec::new(Topology::FullMesh { n: 30, k: 1 }, vec![0.2], 10, 3);
    let rows = run_sweep(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    emit(&rows, OutputFormat::Csv, &path).unwrap();
    let back = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].runs, rows[0].runs);
    assert_eq!(back[0].seed, rows[0].seed);
    assert!((back[0].sim_mean - rows[0].sim_mean).abs() <= 1e-8 * rows[0].sim_mean);
    let json = dir.path().join("rows.json");
    emit(&rows, OutputFormat::Json, &json).unwrap();
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(value[0]["runs"], 10);
    assert!(emit(&rows, OutputFormat::Csv, &dir.path().join("missing/rows.csv")).is_err());
    assert!(emit(&[], OutputFormat::Csv, &path).is_err());
}

#[test]
fn penetration_curve_shape() {
    let mut spec = full_mesh_sweep();
    spec.runs_per_point = 100;
    let rows = run_sweep(&spec).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].analytic <= w[0].analytic);
        assert!(w[1].sim_mean <= w[0].sim_mean + 3.0 * w[0].sim_std_err);
    }
    let at = |v: f64| rows.iter().find(|r| (r.sweep_value - v).abs() < 1e-9).unwrap().analytic;
    assert_eq!(at(1.0), 0.0);
    assert!(
        at(0.5) - at(0.9) > at(0.1) - at(0.5),
        "{} {} {}",
        at(0.1),
        at(0.5),
        at(0.9)
    );
}

#[test]
fn sweep_point_failures_are_recorded() {
    let cfg = ConfigMap::parse("topology = tiered\nsweep = p22\nvalues = 0.2, 0.4\np12 = 0\nruns = 3").unwrap();
    let rows = run_sweep(&SweepSpec::from_config(&cfg).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(
            r.error.as_deref().unwrap_or("").contains("unreachable"),
            "{:?}",
            r.error
        );
        assert!(r.sim_mean.is_nan());
    }
}

fn core(k1: usize, p22: f64) -> TieredCoreSpec<f64> {
    TieredCoreSpec {
        n1: 20,
        n2: 100,
        k1,
        p11: 0.5,
        p12: 0.25,
        p22,
        lambda: 1.0,
    }
}

#[test]
fn full_cluster_with_full_peering_is_peering_bound() {
    let e = core_convergence_time(&core(20, 1.0)).unwrap();
    assert_eq!(e.t_total, e.t_peering);
    assert_eq!(e.t_tier1, 0.0);
}

#[test]
fn analytic_total_is_nonincreasing_in_cluster_size() {
    for p22 in [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0] {
        let totals: Vec<f64> = (1..=20)
            .map(|k1| core_convergence_time(&core(k1, p22)).unwrap().t_total)
            .collect();
        assert!(totals.windows(2).all(|w| w[1] <= w[0]), "p22 = {p22}: {totals:?}");
    }
}

#[test]
fn both_branches_can_dominate() {
    let low = core_convergence_time(&core(1, 0.05)).unwrap();
    assert!(low.t_transit > low.t_peering);
    let high = core_convergence_time(&core(20, 0.9)).unwrap();
    assert!(high.t_peering > high.t_transit);
}

#[test]
fn case_study_reports_best_cluster_sizes() {
    let spec = CaseStudySpec {
        runs_per_point: 50,
        ..CaseStudySpec::from_config(&ConfigMap::parse("p22_values = 0.1, 0.5\nk1_values = 10, 1, 5").unwrap()).unwrap()
    };
    let report = run_case_study(&spec).unwrap();
    assert_eq!(report.cells.len(), 6);
    let order: Vec<(f64, usize)> = report.cells.iter().map(|c| (c.p22, c.k1)).collect();
    assert_eq!(
        order,
        vec![(0.1, 1), (0.1, 5), (0.1, 10), (0.5, 1), (0.5, 5), (0.5, 10)]
    );
    assert_eq!(report.best.len(), 2);
    for b in &report.best {
        let base = core_convergence_time(&core(1, b.p22)).unwrap().t_total;
        assert_eq!(b.baseline, Some(base));
        let expected = [5, 10]
            .into_iter()
            .find(|&k1| core_convergence_time(&core(k1, b.p22)).unwrap().t_total < base);
        assert_eq!(b.k1, expected);
    }
    assert!(report.cells.iter().all(|c| c.error.is_none() && c.rel_error < 0.25));
}
