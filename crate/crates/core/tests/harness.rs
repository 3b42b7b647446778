use knapsack_pareto::construction::Family;
use knapsack_pareto::harness::{
    aggregate, emit_results, read_csv, read_json, run_experiment, ExperimentSummary, Grid, OutputFormat, CSV_HEADER,
};
use knapsack_pareto::verify::hamming_set_size;

fn grid(s: &str) -> Grid {
    s.parse().unwrap()
}

#[test]
fn csv_round_trip_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bi.csv");
    let summary = run_experiment(Family::Bicriteria, &grid("n=10..13;phi=3,7/2"), 20, 99);
    emit_results(&summary, &path, OutputFormat::Csv).unwrap();

    let records = read_csv(&path).unwrap();
    assert_eq!(records, summary.records);
    assert_eq!(aggregate(&records), summary.cells);
    let rebuilt = ExperimentSummary::from_records(Family::Bicriteria, 20, 99, records);
    assert_eq!(rebuilt, summary);
    assert!(std::fs::read_to_string(&path).unwrap().starts_with(CSV_HEADER));
}

#[test]
fn json_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("base.json");
    let summary = run_experiment(Family::Baseline, &grid("n=4..9"), 30, 3);
    assert!(summary.fit.is_some());
    emit_results(&summary, &path, OutputFormat::Json).unwrap();
    assert_eq!(read_json(&path).unwrap(), summary);
}

#[test]
fn one_trial_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let summary = run_experiment(Family::Baseline, &grid("n=5"), 1, 0);
    emit_results(&summary, &path, OutputFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let count = summary.records[0].pareto_count;
    assert!(lines[1].starts_with(&format!("baseline,5,1,1/1,5,0,0,0,{count},")));
}

#[test]
fn empty_experiment_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let summary = run_experiment(Family::Baseline, &grid("n=5"), 0, 0);
    emit_results(&summary, &path, OutputFormat::Csv).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn failed_cells_do_not_abort() {
    let summary = run_experiment(Family::Multicriteria, &grid("n=20,32;d=2;phi=4"), 5, 1);
    assert!(summary.cells[0].error.is_some());
    assert_eq!(summary.cells[1].trials, 5);
}

#[test]
fn runs_are_reproducible() {
    let g = grid("n=10..14;phi=3,5");
    let strip = |s: &ExperimentSummary| -> Vec<(u64, u64, u64)> {
        s.records.iter().map(|r| (r.n, r.trial, r.pareto_count)).collect()
    };
    let a = run_experiment(Family::Bicriteria, &g, 16, 42);
    let b = run_experiment(Family::Bicriteria, &g, 16, 42);
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.cells, b.cells);
}

#[test]
fn baseline_means_increase() {
    let s = run_experiment(Family::Baseline, &grid("n=6..16"), 500, 11);
    let means: Vec<f64> = s.cells.iter().map(|c| c.mean).collect();
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    let fit = s.fit.unwrap();
    assert!((1.6..=2.4).contains(&fit.slope), "{fit:?}");
}

#[test]
fn multicriteria_poly_counts_are_constant() {
    let s = run_experiment(Family::Multicriteria, &grid("n=32,48,64;d=2;phi=4,8"), 10, 5);
    for c in &s.cells {
        assert!(c.error.is_none());
        let expected = hamming_set_size(c.d).pow(c.n_q as u32);
        assert_eq!(c.count_sum, expected * c.trials, "cell {c:?}");
        assert_eq!(c.stddev, 0.0);
    }
}
