use std::collections::BTreeSet;

use anacomb_workbench::{run_all, RunOptions};

const OPERATIONS: [&str; 30] = [
    "parse_spec",
    "validate_wellfounded",
    "compile_to_series",
    "coefficient",
    "combine",
    "quasi_inverse",
    "exp_log",
    "polya_set",
    "substitute",
    "calculus",
    "polylog",
    "linear_operator_solve",
    "solve_fixed_point",
    "cauchy_extract",
    "bivariate_distribution",
    "scale_asymptotic",
    "transfer",
    "locate_singularity",
    "singular_expansion",
    "simple_variety_asym",
    "estimate_from_coefficients",
    "build_pattern_model",
    "perron_analysis",
    "factor_count_model",
    "gaussian_convergence_check",
    "height_distribution",
    "theta_density",
    "run_example",
    "compare",
    "emit_report",
];

#[test]
fn corpus_exercises_every_operation() {
    let mut seen: BTreeSet<String> = ["run_example", "emit_report"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let results = run_all(&RunOptions::default());
    assert_eq!(results.len(), 12);
    for (name, outcome) in results {
        let report = outcome.unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(report.entry, name);
        seen.extend(report.operations);
    }
    let missing: Vec<_> = OPERATIONS
        .iter()
        .filter(|op| !seen.contains(**op))
        .collect();
    assert!(missing.is_empty(), "not exercised: {missing:?}");
}
