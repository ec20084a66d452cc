//! Command-line surface.
//!
//! Exit codes: 0 ok, 1 consistency-check failure, 2 I/O or load or usage
//! error, 3 statistical precondition violated.

use std::error::Error;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::decomposition::WeightScheme;
use crate::fit::{
    calibrate_convention, fit_hyper_poisson, fit_poisson, CalibrationTargets, ExpectedConvention,
    FitError, ShiftSpec,
};
use crate::notation::{
    format_components, format_connections, parse_components, parse_connections, Dataset,
};
use crate::report::{
    build_report, discrepancies_tsv, render_calibration, render_fit, render_histogram_svg,
    render_run_test, render_text, render_tsv_files, ComplexityColumn,
};
use crate::stats::{run_test_with_policy, FrequencyTable, StatsError, TiePolicy};

/// Directory override for the bundled data files.
pub const DATA_DIR_ENV: &str = "SCRIPTOMETRICS_DATA";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_STATISTICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "scriptometrics",
    version,
    about = "Glyph-complexity scoring, uniformity testing, and count-model fits for writing systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check stated complexities against the decomposition arithmetic
    Check {
        /// Dataset TSV (defaults to the bundled table)
        dataset: Option<PathBuf>,
        /// Weight scheme: default | altmann2004
        #[arg(long, default_value = "default")]
        scheme: String,
    },
    /// Runs test for uniformity of the complexity distribution
    Runtest {
        /// Dataset TSV (defaults to the bundled table)
        dataset: Option<PathBuf>,
        /// Complexity column to test
        #[arg(long, value_enum, default_value_t = ColumnArg::Stated)]
        column: ColumnArg,
        /// Weight scheme used for the computed column
        #[arg(long, default_value = "default")]
        scheme: String,
        /// What to do when a frequency equals E exactly
        #[arg(long = "tie-policy", value_enum, default_value_t = TieArg::Error)]
        tie_policy: TieArg,
        /// Printed decimal places
        #[arg(long, default_value_t = 2)]
        precision: usize,
    },
    /// Fit a count model to the component or connection counts
    Fit {
        /// Dataset TSV (defaults to the bundled table)
        dataset: Option<PathBuf>,
        /// Model family
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Which counts to fit
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Poisson displacement: auto | N (poisson only)
        #[arg(long)]
        shift: Option<String>,
        /// Expected-frequency convention: auto | truncate | tailpool | renormalize
        #[arg(long, default_value = "auto")]
        convention: String,
        /// Printed decimal places
        #[arg(long, default_value_t = 2)]
        precision: usize,
    },
    /// Write the full report bundle to a directory
    Report {
        /// Dataset TSV (defaults to the bundled table)
        dataset: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Output directory
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Complexity column feeding the distribution sections
        #[arg(long, value_enum, default_value_t = ColumnArg::Stated)]
        column: ColumnArg,
        /// Weight scheme
        #[arg(long, default_value = "default")]
        scheme: String,
        /// Printed decimal places (text format)
        #[arg(long, default_value_t = 2)]
        precision: usize,
    },
    /// Parse a decomposition expression and print its reading
    Parse {
        expression: String,
        #[arg(long, value_enum)]
        context: ContextArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColumnArg {
    Stated,
    Computed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieArg {
    Error,
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Poisson,
    #[value(name = "hyper-poisson")]
    HyperPoisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Components,
    Connections,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Tsv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContextArg {
    Components,
    Connections,
}

fn print_error(err: &dyn Error) {
    eprintln!("error: {err}");
    let mut source = err.source();
    while let Some(inner) = source {
        eprintln!("  caused by: {inner}");
        source = inner.source();
    }
}

fn usage_error(message: &str) -> i32 {
    eprintln!("error: {message}");
    EXIT_IO
}

fn resolve_dataset(path: Option<&Path>) -> Result<Dataset, crate::notation::LoadError> {
    match path {
        Some(p) => Dataset::load(p),
        None => match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => Dataset::load(Path::new(&dir).join("vai_table1.tsv")),
            None => Ok(Dataset::vai().clone()),
        },
    }
}

fn resolve_scheme(name: &str) -> Result<WeightScheme, String> {
    WeightScheme::by_name(name)
        .ok_or_else(|| format!("unknown weight scheme `{name}` (expected default | altmann2004)"))
}

fn stats_exit(err: &StatsError) -> i32 {
    print_error(err);
    EXIT_STATISTICAL
}

fn fit_exit(err: &FitError) -> i32 {
    print_error(err);
    match err {
        FitError::Stats(StatsError::HistogramFormat { .. }) => EXIT_IO,
        _ => EXIT_STATISTICAL,
    }
}

pub fn run(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Check { dataset, scheme } => cmd_check(dataset.as_deref(), scheme),
        Command::Runtest {
            dataset,
            column,
            scheme,
            tie_policy,
            precision,
        } => cmd_runtest(dataset.as_deref(), *column, scheme, *tie_policy, *precision),
        Command::Fit {
            dataset,
            model,
            target,
            shift,
            convention,
            precision,
        } => cmd_fit(
            dataset.as_deref(),
            *model,
            *target,
            shift.as_deref(),
            convention,
            *precision,
        ),
        Command::Report {
            dataset,
            format,
            out,
            column,
            scheme,
            precision,
        } => cmd_report(
            dataset.as_deref(),
            *format,
            out,
            *column,
            scheme,
            *precision,
        ),
        Command::Parse {
            expression,
            context,
        } => cmd_parse(expression, *context),
    }
}

fn cmd_check(dataset: Option<&Path>, scheme: &str) -> i32 {
    let scheme = match resolve_scheme(scheme) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let dataset = match resolve_dataset(dataset) {
        Ok(d) => d,
        Err(e) => {
            print_error(&e);
            return EXIT_IO;
        }
    };
    let discrepancies = dataset.consistency_report(&scheme);
    print!("{}", discrepancies_tsv(&discrepancies));
    if discrepancies.is_empty() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_runtest(
    dataset: Option<&Path>,
    column: ColumnArg,
    scheme: &str,
    tie_policy: TieArg,
    precision: usize,
) -> i32 {
    let scheme = match resolve_scheme(scheme) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let dataset = match resolve_dataset(dataset) {
        Ok(d) => d,
        Err(e) => {
            print_error(&e);
            return EXIT_IO;
        }
    };
    let column = match column {
        ColumnArg::Stated => ComplexityColumn::Stated,
        ColumnArg::Computed => ComplexityColumn::Computed,
    };
    let values = match column {
        ComplexityColumn::Stated => match dataset.stated_complexities() {
            Ok(v) => v,
            Err(id) => {
                eprintln!("error: record {id} has no stated complexity");
                return EXIT_IO;
            }
        },
        ComplexityColumn::Computed => dataset.computed_complexities(&scheme),
    };
    let hist = match FrequencyTable::from_values(&values) {
        Ok(h) => h,
        Err(e) => return stats_exit(&e),
    };
    let policy = match tie_policy {
        TieArg::Error => TiePolicy::Error,
        TieArg::Exclude => TiePolicy::Exclude,
    };
    let result = match run_test_with_policy(&hist, policy) {
        Ok(r) => r,
        Err(e) => return stats_exit(&e),
    };
    println!(
        "dataset: {} ({} records)\ncolumn: {}",
        dataset.name(),
        dataset.len(),
        column.label()
    );
    print!("{}", render_run_test(&result, precision));
    EXIT_OK
}

fn cmd_fit(
    dataset: Option<&Path>,
    model: ModelArg,
    target: TargetArg,
    shift: Option<&str>,
    convention: &str,
    precision: usize,
) -> i32 {
    if model == ModelArg::HyperPoisson && shift.is_some() {
        return usage_error("--shift only applies to --model poisson");
    }
    let shift_spec = match shift.unwrap_or("auto") {
        "auto" => ShiftSpec::Auto,
        text => match text.parse::<u64>() {
            Ok(n) => ShiftSpec::Fixed(n),
            Err(_) => return usage_error(&format!("invalid --shift `{text}` (expected auto | N)")),
        },
    };
    let dataset = match resolve_dataset(dataset) {
        Ok(d) => d,
        Err(e) => {
            print_error(&e);
            return EXIT_IO;
        }
    };

    let components = FrequencyTable::from_values(&dataset.component_counts());
    let connections = FrequencyTable::from_values(&dataset.connection_counts());
    let (components, connections) = match (components, connections) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return stats_exit(&e),
    };

    println!("dataset: {} ({} records)", dataset.name(), dataset.len());
    let observed = match target {
        TargetArg::Components => &components,
        TargetArg::Connections => &connections,
    };
    println!(
        "target: {} (support {}..{}, N = {})",
        match target {
            TargetArg::Components => "components",
            TargetArg::Connections => "connections",
        },
        observed.support_min(),
        observed.support_max(),
        observed.total()
    );

    let chosen = match convention {
        "auto" => {
            let calibration =
                calibrate_convention(&components, &connections, &CalibrationTargets::vai());
            println!("convention: {} (auto-calibrated)", calibration.winner);
            print!("{}", render_calibration(&calibration, precision));
            calibration.winner
        }
        name => match ExpectedConvention::by_name(name) {
            Some(c) => c,
            None => return usage_error(&format!(
                "unknown convention `{name}` (expected auto | truncate | tailpool | renormalize)"
            )),
        },
    };

    let fit = match model {
        ModelArg::Poisson => fit_poisson(observed, shift_spec, chosen),
        ModelArg::HyperPoisson => fit_hyper_poisson(observed, chosen),
    };
    match fit {
        Ok(fit) => {
            print!("{}", render_fit(observed, &fit, precision));
            EXIT_OK
        }
        Err(e) => fit_exit(&e),
    }
}

fn cmd_report(
    dataset: Option<&Path>,
    format: FormatArg,
    out: &Path,
    column: ColumnArg,
    scheme: &str,
    precision: usize,
) -> i32 {
    let scheme = match resolve_scheme(scheme) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let dataset = match resolve_dataset(dataset) {
        Ok(d) => d,
        Err(e) => {
            print_error(&e);
            return EXIT_IO;
        }
    };
    let column = match column {
        ColumnArg::Stated => ComplexityColumn::Stated,
        ColumnArg::Computed => ComplexityColumn::Computed,
    };
    let bundle = build_report(&dataset, &scheme, column, TiePolicy::Error);

    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return EXIT_IO;
    }
    let mut files: Vec<(String, String)> = Vec::new();
    match format {
        FormatArg::Text => files.push(("report.txt".to_owned(), render_text(&bundle, precision))),
        FormatArg::Tsv => {
            for (name, content) in render_tsv_files(&bundle) {
                files.push((name.to_owned(), content));
            }
        }
        FormatArg::Svg => match bundle.complexity_hist.present() {
            Some(hist) => {
                let title = format!(
                    "complexity distribution ({}, {} column)",
                    bundle.dataset_name,
                    bundle.column.label()
                );
                files.push((
                    "complexity_hist.svg".to_owned(),
                    render_histogram_svg(hist, &title),
                ));
            }
            None => {
                eprintln!("error: no complexity histogram to plot");
                return EXIT_STATISTICAL;
            }
        },
    }
    for (name, content) in &files {
        let path = out.join(name);
        if let Err(e) = std::fs::write(&path, content) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_IO;
        }
        println!("wrote {}", path.display());
    }
    EXIT_OK
}

fn cmd_parse(expression: &str, context: ContextArg) -> i32 {
    match context {
        ContextArg::Components => match parse_components(expression) {
            Ok(counts) => {
                println!("context: components");
                for (kind, count) in counts.iter() {
                    println!("{kind}: {count}");
                }
                println!("total count: {}", counts.total());
                println!("canonical: {}", format_components(&counts));
                EXIT_OK
            }
            Err(e) => {
                print_error(&e);
                EXIT_IO
            }
        },
        ContextArg::Connections => match parse_connections(expression) {
            Ok(counts) => {
                println!("context: connections");
                for (kind, count) in counts.iter() {
                    println!("{kind}: {count}");
                }
                println!("total count: {}", counts.total());
                println!("canonical: {}", format_connections(&counts));
                EXIT_OK
            }
            Err(e) => {
                print_error(&e);
                EXIT_IO
            }
        },
    }
}
