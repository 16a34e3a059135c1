use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use anacomb_core::limitlaw::KsRow;
use anacomb_core::scalar::rational_ln_abs;
use anacomb_core::singular::{AsymptoticForm, Estimate, SingularError};
use anacomb_core::{QSeries, Rational};
use num_traits::{Signed, Zero};
use serde::Serialize;

pub const CSV_HEADER: &str = "n,exact,predicted,rel_error";

/// One comparison point. Values are printed in scientific notation with
/// twelve significant digits so that huge counts survive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub exact: String,
    pub predicted: String,
    /// `(exact - predicted) / exact`, or `predicted` itself when the exact
    /// value is zero.
    pub rel_error: f64,
}

/// A named side condition of an entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Check {
            name: name.into(),
            value,
            pass,
        }
    }

    /// `value < limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check::new(name, value, value < limit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub message: String,
}

/// Rows with `n >= from_n` must have `|rel_error| <= max_rel_error`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub max_rel_error: f64,
    pub from_n: u64,
}

impl Tolerance {
    pub fn new(max_rel_error: f64, from_n: u64) -> Self {
        Tolerance {
            max_rel_error,
            from_n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub entry: String,
    pub rows: Vec<ComparisonRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<AsymptoticForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
    /// Kolmogorov distances, for entries with a limit law.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ks: Vec<KsRow>,
    /// Library operations the run went through.
    pub operations: Vec<String>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl ComparisonReport {
    pub fn new(entry: impl Into<String>) -> Self {
        ComparisonReport {
            entry: entry.into(),
            rows: Vec::new(),
            tolerance: None,
            checks: Vec::new(),
            asymptotic: None,
            estimate: None,
            ks: Vec::new(),
            operations: Vec::new(),
            notes: Vec::new(),
            verdict: Verdict {
                pass: true,
                message: String::new(),
            },
        }
    }

    /// Settle the verdict from the tolerance and the checks. A nonempty
    /// `message` replaces the default wording on success.
    pub fn conclude(mut self, message: &str) -> Self {
        self.rows.sort_by_key(|r| r.n);
        let mut failures = Vec::new();
        if let Some(tol) = self.tolerance {
            for r in self.rows.iter().filter(|r| r.n >= tol.from_n) {
                if r.rel_error.is_nan() || r.rel_error.abs() > tol.max_rel_error {
                    failures.push(format!(
                        "n={} relative error {:.3e} exceeds {:.3e}",
                        r.n, r.rel_error, tol.max_rel_error
                    ));
                }
            }
        }
        for c in self.checks.iter().filter(|c| !c.pass) {
            failures.push(format!("check {} failed ({:.6e})", c.name, c.value));
        }
        self.verdict = if failures.is_empty() {
            Verdict {
                pass: true,
                message: if message.is_empty() {
                    "pass".into()
                } else {
                    message.into()
                },
            }
        } else {
            Verdict {
                pass: false,
                message: format!("tolerance violation: {}", failures.join("; ")),
            }
        };
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `±m·10^e` from `ln|x|`, twelve significant digits.
pub fn sci_from_ln(ln_abs: f64, negative: bool) -> String {
    if ln_abs == f64::NEG_INFINITY {
        return "0".into();
    }
    if !ln_abs.is_finite() {
        return if ln_abs.is_nan() {
            "NaN".into()
        } else {
            "inf".into()
        };
    }
    let log10 = ln_abs / std::f64::consts::LN_10;
    let mut e = log10.floor();
    let mut m = 10f64.powf(log10 - e);
    if format!("{m:.11}").starts_with("10") {
        m /= 10.0;
        e += 1.0;
    }
    format!("{}{m:.11}e{}", if negative { "-" } else { "" }, e as i64)
}

pub fn sci(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    sci_from_ln(x.abs().ln(), x < 0.0)
}

/// Row for an exact value against a prediction given as `(ln|p|, sign)`.
pub fn row_from_logs(n: u64, exact: (f64, f64), predicted: (f64, f64)) -> ComparisonRow {
    let (le, se) = exact;
    let (lp, sp) = predicted;
    let rel_error = if se == 0.0 {
        sp * lp.exp()
    } else if sp == 0.0 {
        1.0
    } else {
        1.0 - se * sp * (lp - le).exp()
    };
    ComparisonRow {
        n,
        exact: if se == 0.0 {
            "0".into()
        } else {
            sci_from_ln(le, se < 0.0)
        },
        predicted: if sp == 0.0 {
            "0".into()
        } else {
            sci_from_ln(lp, sp < 0.0)
        },
        rel_error,
    }
}

pub fn row_f64(n: u64, exact: f64, predicted: f64) -> ComparisonRow {
    let logs = |x: f64| {
        if x == 0.0 {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (x.abs().ln(), x.signum())
        }
    };
    row_from_logs(n, logs(exact), logs(predicted))
}

pub fn rational_logs(q: &Rational) -> (f64, f64) {
    if q.is_zero() {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (rational_ln_abs(q), if q.is_negative() { -1.0 } else { 1.0 })
    }
}

/// `(ln|a_n|, sign)` of a predicted coefficient.
pub fn predicted_logs(a: &AsymptoticForm, n: u64) -> Result<(f64, f64), SingularError> {
    let s = a.eval_scaled(n)?;
    if s == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    Ok((s.abs().ln() - n as f64 * a.rho.ln(), s.signum()))
}

/// Compare exact coefficients with an asymptotic form.
pub fn compare(
    f: &QSeries,
    a: &AsymptoticForm,
    ns: &[u64],
    tolerance: Option<Tolerance>,
) -> Result<ComparisonReport, SingularError> {
    let mut report = ComparisonReport::new("compare");
    for &n in ns {
        report.rows.push(row_from_logs(
            n,
            rational_logs(&f.coeff(n as usize)),
            predicted_logs(a, n)?,
        ));
    }
    report.tolerance = tolerance;
    report.asymptotic = Some(a.clone());
    report.operations = vec!["compare".into(), "transfer".into()];
    Ok(report.conclude(""))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format {other:?} (csv, json, markdown)")),
        }
    }
}

/// Write a report. Output depends only on the report, byte for byte.
pub fn emit_report(
    r: &ComparisonReport,
    format: ReportFormat,
    mut out: impl Write,
) -> io::Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in &r.rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.n, row.exact, row.predicted, row.rel_error
                )?;
            }
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, r)?;
            writeln!(out)?;
        }
        ReportFormat::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "## {}\n", r.entry);
            let _ = writeln!(s, "| n | exact | predicted | rel_error |");
            let _ = writeln!(s, "|---|---|---|---|");
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {:.3e} |",
                    row.n, row.exact, row.predicted, row.rel_error
                );
            }
            if !r.checks.is_empty() {
                let _ = writeln!(s, "\nChecks:\n");
                for c in &r.checks {
                    let _ = writeln!(
                        s,
                        "- {}: {} ({})",
                        c.name,
                        c.value,
                        if c.pass { "pass" } else { "fail" }
                    );
                }
            }
            for note in &r.notes {
                let _ = writeln!(s, "\n> {note}");
            }
            let status = if r.verdict.pass { "pass" } else { "FAIL" };
            if r.verdict.message == status {
                let _ = writeln!(s, "\n**Verdict:** {status}");
            } else {
                let _ = writeln!(s, "\n**Verdict:** {status} ({})", r.verdict.message);
            }
            out.write_all(s.as_bytes())?;
        }
    }
    Ok(())
}
