use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anacomb_core::limitlaw::{
    build_pattern_model, factor_count_model, height_distribution, noncrossing_quasi_power,
    noncrossing_series, pattern_distributions, perron_analysis, write_distributions_csv,
    DistributionTable, QuasiPowerModel,
};
use anacomb_core::scalar::ratio;
use anacomb_core::series::bivariate_distribution;
use anacomb_core::series::table::write_table;
use anacomb_core::singular::{
    estimate_from_coefficients, scale_asymptotic, AsymptoticForm, ScaleElement, SingularExpansion,
};
use anacomb_core::specdsl::{compile_to_series, counts, parse_spec, SpecSystem};
use anacomb_core::QSeries;
use anacomb_workbench::{
    compare, corpus, emit_report, run_all, run_example, ComparisonReport, ReportFormat, RunOptions,
    Tolerance, WorkbenchError,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "anacomb",
    version,
    about = "Exact enumeration against singularity analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Truncation order.
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated indices.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Output file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest admissible relative error.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficients of a class, as an `n,numerator,denominator` table.
    Coeffs {
        /// Specification text, or `@file`.
        spec: String,
        /// Class to extract; defaults to the first definition.
        #[arg(long)]
        class: Option<String>,
        /// Print object counts (`n!` times the coefficient when labelled).
        #[arg(long)]
        counts: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Asymptotic estimates: from a specification, or one scale element.
    Asym {
        /// Specification text, or `@file`. Omit with `--alpha`.
        spec: Option<String>,
        #[arg(long)]
        class: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        beta: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Compare a specification with `c ρ^{-n} n^{α-1} (log n)^β / Γ(α)`.
    Compare {
        spec: String,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        rho: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        beta: u32,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact distributions: `pattern:<word>`, `height`, `factors` or `noncrossing`.
    Dist {
        model: String,
        #[command(flatten)]
        common: Common,
    },
    /// Quasi-power data: `pattern:<word>`, `factors` or `noncrossing`.
    Qp { model: String },
    /// The named example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Run one entry, or `all`.
    Run {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// List the entries.
    List,
}

fn read_spec(arg: &str) -> Result<SpecSystem, WorkbenchError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => arg.to_string(),
    };
    Ok(parse_spec(&text)?)
}

fn compile(
    spec: &str,
    class: Option<&str>,
    order: usize,
) -> Result<(SpecSystem, QSeries), WorkbenchError> {
    let system = read_spec(spec)?;
    let class = match class {
        Some(c) => c.to_string(),
        None => system
            .names()
            .next()
            .ok_or_else(|| WorkbenchError::Invalid("empty specification".into()))?
            .to_string(),
    };
    let f = compile_to_series(&system, &class, order)?;
    Ok((system, f))
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, WorkbenchError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn json(value: &impl serde::Serialize, out: &Option<PathBuf>) -> Result<(), WorkbenchError> {
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

fn emit(r: &ComparisonReport, common: &Common) -> Result<bool, WorkbenchError> {
    let mut w = output(&common.out)?;
    emit_report(r, common.format, &mut w)?;
    w.flush()?;
    Ok(r.verdict.pass)
}

fn pattern_model(model: &str) -> Option<&str> {
    model.strip_prefix("pattern:")
}

fn binary_alphabet() -> [(char, anacomb_core::Rational); 2] {
    [('a', ratio(1, 2)), ('b', ratio(1, 2))]
}

fn run(cli: Cli) -> Result<bool, WorkbenchError> {
    match cli.command {
        Command::Coeffs {
            spec,
            class,
            counts: as_counts,
            common,
        } => {
            let order = common.order.unwrap_or(20);
            let (system, f) = compile(&spec, class.as_deref(), order)?;
            let f = if as_counts {
                QSeries::polynomial(counts(&system, &f, order))
            } else {
                f
            };
            let mut w = output(&common.out)?;
            write_table(&f, order, &mut w)?;
            Ok(true)
        }
        Command::Asym {
            spec,
            class,
            alpha,
            beta,
            common,
        } => {
            if let Some(alpha) = alpha {
                let ns = common.n.unwrap_or_else(|| vec![10, 100, 1000]);
                let rows: Vec<(u64, f64)> = ns
                    .iter()
                    .map(|&n| Ok((n, scale_asymptotic(alpha, beta, n)?)))
                    .collect::<Result<_, WorkbenchError>>()?;
                json(&rows, &common.out)?;
                return Ok(true);
            }
            let spec = spec
                .ok_or_else(|| WorkbenchError::Invalid("give a specification or --alpha".into()))?;
            let order = common.order.unwrap_or(400);
            let (_, f) = compile(&spec, class.as_deref(), order)?;
            let estimate = estimate_from_coefficients(&f.coeffs(order), order / 2..order + 1)?;
            json(&estimate, &common.out)?;
            Ok(true)
        }
        Command::Compare {
            spec,
            class,
            rho,
            alpha,
            beta,
            c,
            common,
        } => {
            let ns = common
                .n
                .clone()
                .unwrap_or_else(|| vec![100, 250, 500, 1000]);
            let order = common
                .order
                .unwrap_or(0)
                .max(ns.iter().copied().max().unwrap_or(0) as usize);
            let (_, f) = compile(&spec, class.as_deref(), order)?;
            let se = SingularExpansion::new(rho, vec![ScaleElement::new(c, alpha, beta)], None)?;
            let tolerance = common.tolerance.map(|t| Tolerance::new(t, 0));
            let report = compare(&f, &AsymptoticForm::from(se), &ns, tolerance)?;
            emit(&report, &common)
        }
        Command::Dist { model, common } => {
            let ns: Vec<usize> = common
                .n
                .clone()
                .unwrap_or_else(|| vec![10, 20, 40])
                .into_iter()
                .map(|n| n as usize)
                .collect();
            let tables: Vec<DistributionTable> = if let Some(word) = pattern_model(&model) {
                let m = build_pattern_model(word, &binary_alphabet())?;
                pattern_distributions(&m, &ns)?
            } else {
                match model.as_str() {
                    "height" => ns.iter().map(|&n| height_distribution(n, n)).collect(),
                    "factors" => {
                        let top = ns.iter().copied().max().unwrap_or(0);
                        let f = factor_count_model(2, top)?;
                        ns.iter()
                            .map(|&n| bivariate_distribution(&f, n))
                            .collect::<Result<_, _>>()?
                    }
                    "noncrossing" => {
                        let top = ns.iter().copied().max().unwrap_or(0);
                        let f = noncrossing_series(top)?;
                        ns.iter()
                            .map(|&n| bivariate_distribution(&f, n))
                            .collect::<Result<_, _>>()?
                    }
                    other => {
                        return Err(WorkbenchError::Invalid(format!("unknown model {other:?}")))
                    }
                }
            };
            let mut w = output(&common.out)?;
            write_distributions_csv(&tables, &mut w)?;
            Ok(true)
        }
        Command::Qp { model } => {
            let qp = if let Some(word) = pattern_model(&model) {
                perron_analysis(&build_pattern_model(word, &binary_alphabet())?)?
            } else {
                match model.as_str() {
                    "factors" => QuasiPowerModel::movable_exponent(1.0, 1.0, 0.0),
                    "noncrossing" => noncrossing_quasi_power()?,
                    other => {
                        return Err(WorkbenchError::Invalid(format!("unknown model {other:?}")))
                    }
                }
            };
            let summary = serde_json::json!({
                "model": qp,
                "mean_coefficient": qp.mean_coefficient(),
                "variance_coefficient": qp.variance_coefficient(),
            });
            json(&summary, &None)?;
            Ok(true)
        }
        Command::Corpus {
            action: CorpusAction::List,
        } => {
            for e in corpus() {
                println!("{:<16} {}", e.name, e.construction);
            }
            Ok(true)
        }
        Command::Corpus {
            action: CorpusAction::Run { name, common },
        } => {
            let opts = RunOptions {
                order: common.order,
                ns: common.n.clone(),
                tolerance: common.tolerance,
            };
            if name != "all" {
                return emit(&run_example(&name, &opts)?, &common);
            }
            let mut pass = true;
            let mut w = output(&common.out)?;
            for (entry, outcome) in run_all(&opts) {
                match outcome {
                    Ok(r) => {
                        pass &= r.verdict.pass;
                        emit_report(&r, common.format, &mut w)?;
                    }
                    Err(e) => return Err(WorkbenchError::Invalid(format!("{entry}: {e}"))),
                }
            }
            w.flush()?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(WorkbenchError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
