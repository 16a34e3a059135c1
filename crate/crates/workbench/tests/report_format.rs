use anacomb_core::scalar::{int, ratio, rational_to_f64};
use anacomb_core::singular::{AsymptoticForm, ScaleElement, SingularExpansion};
use anacomb_core::QSeries;
use anacomb_workbench::{
    compare, emit_report, run_example, ComparisonReport, ReportFormat, RunOptions, Tolerance,
    WorkbenchError, CSV_HEADER,
};
use proptest::prelude::*;
use serde_json::Value;

fn render(r: &ComparisonReport, format: ReportFormat) -> String {
    let mut out = Vec::new();
    emit_report(r, format, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn form(rho: f64, c: f64, alpha: f64, beta: u32) -> AsymptoticForm {
    AsymptoticForm::from(
        SingularExpansion::new(rho, vec![ScaleElement::new(c, alpha, beta)], None).unwrap(),
    )
}

fn catalan_opts() -> RunOptions {
    RunOptions {
        order: Some(300),
        ns: Some(vec![100, 200, 300]),
        tolerance: None,
    }
}

#[test]
fn csv_header_is_fixed() {
    assert_eq!(CSV_HEADER, "n,exact,predicted,rel_error");
    let r = run_example("entropy", &RunOptions::default()).unwrap();
    let csv = render(&r, ReportFormat::Csv);
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), r.rows.len() + 1);
}

#[test]
fn catalan_csv_matches_golden_file() {
    let first = render(
        &run_example("catalan", &catalan_opts()).unwrap(),
        ReportFormat::Csv,
    );
    let second = render(
        &run_example("catalan", &catalan_opts()).unwrap(),
        ReportFormat::Csv,
    );
    assert_eq!(first, second);
    assert_eq!(first, include_str!("golden/catalan.csv"));
}

#[test]
fn geometric_series_against_constant_has_no_error() {
    let r = compare(
        &QSeries::geometric(),
        &form(1.0, 1.0, 1.0, 0),
        &[10, 100, 1000],
        None,
    )
    .unwrap();
    assert!(r.verdict.pass);
    for row in &r.rows {
        assert!(
            row.rel_error.abs() < 1e-12,
            "n = {}: {}",
            row.n,
            row.rel_error
        );
    }
}

#[test]
fn central_binomial_error_is_one_eighth_n() {
    let f = QSeries::sigma_scale(&ratio(1, 2), 0);
    let ns = [50u64, 100, 400];
    let r = compare(&f, &form(1.0, 1.0, 0.5, 0), &ns, None).unwrap();
    let mut oracle = int(1);
    let mut k = 0;
    for row in &r.rows {
        // C(2n, n) / 4^n, built one factor (2k-1)/(2k) at a time.
        while k < row.n {
            k += 1;
            oracle *= ratio(2 * k as i64 - 1, 2 * k as i64);
        }
        let exact = rational_to_f64(&oracle);
        let predicted = 1.0 / (std::f64::consts::PI * row.n as f64).sqrt();
        assert!(((exact - predicted) / exact - row.rel_error).abs() < 1e-12);
        let n = row.n as f64;
        assert!(
            (row.rel_error * 8.0 * n + 1.0).abs() < 2.0 / n,
            "n = {n}: {}",
            row.rel_error
        );
    }
}

#[test]
fn json_report_validates_against_schema() {
    let schema: Value = serde_json::from_str(include_str!(
        "../../../docs/schemas/comparison-report.schema.json"
    ))
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for name in ["catalan", "pattern", "two_three_trees"] {
        let opts = if name == "catalan" {
            catalan_opts()
        } else {
            RunOptions::default()
        };
        let r = run_example(name, &opts).unwrap();
        let doc: Value = serde_json::from_str(&render(&r, ReportFormat::Json)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
    }
}

#[test]
fn markdown_has_one_row_per_index() {
    let r = run_example("catalan", &catalan_opts()).unwrap();
    let md = render(&r, ReportFormat::Markdown);
    let rows = md
        .lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| n "))
        .count();
    assert_eq!(rows, 3);
    assert!(md.contains("**Verdict:** pass"));
}

#[test]
fn unknown_entry_is_an_error() {
    assert!(matches!(
        run_example("no_such_entry", &RunOptions::default()),
        Err(WorkbenchError::UnknownEntry(_))
    ));
}

#[test]
fn tight_tolerance_is_a_violation() {
    let opts = RunOptions {
        order: Some(300),
        ns: Some(vec![100, 300]),
        tolerance: Some(1e-6),
    };
    let r = run_example("catalan", &opts).unwrap();
    assert!(!r.verdict.pass);
    assert!(r.verdict.message.starts_with("tolerance violation"));
    let loose = compare(
        &QSeries::geometric(),
        &form(1.0, 1.0, 1.0, 0),
        &[50],
        Some(Tolerance::new(1e-12, 0)),
    )
    .unwrap();
    assert!(loose.verdict.pass);
}

proptest! {
    #[test]
    fn csv_is_a_function_of_the_report(c in 0.5f64..2.0, alpha in 0.25f64..3.0) {
        let f = QSeries::sigma_scale(&ratio(3, 2), 0);
        let r = compare(&f, &form(1.0, c, alpha, 0), &[10, 20], None).unwrap();
        let csv = render(&r, ReportFormat::Csv);
        prop_assert_eq!(&csv, &render(&r.clone(), ReportFormat::Csv));
        prop_assert_eq!(csv.lines().count(), 3);
    }
}
