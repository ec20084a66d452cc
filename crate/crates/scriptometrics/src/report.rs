//! Report assembly and rendering: text, TSV, and SVG output.
//!
//! Output is deterministic: identical inputs and flags produce identical
//! bytes. Numbers are printed with `{:.N}` formatting (round half to even) at
//! a caller-chosen precision.

use crate::decomposition::WeightScheme;
use crate::fit::{
    calibrate_convention, fit_hyper_poisson, fit_poisson, CalibrationResult, CalibrationTargets,
    CountModel, FitResult, ShiftSpec,
};
use crate::notation::{Dataset, Discrepancy};
use crate::stats::{run_test_with_policy, FrequencyTable, RunTestResult, TiePolicy};

/// Which complexity column feeds the distribution statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComplexityColumn {
    /// The published values, as transcribed.
    #[default]
    Stated,
    /// Values recomputed from the decompositions.
    Computed,
}

impl ComplexityColumn {
    pub fn label(self) -> &'static str {
        match self {
            ComplexityColumn::Stated => "stated",
            ComplexityColumn::Computed => "computed",
        }
    }
}

/// A report section that either computed or explains why it did not.
#[derive(Debug, Clone, PartialEq)]
pub enum Section<T> {
    Present(T),
    Skipped { reason: String },
}

impl<T> Section<T> {
    pub fn present(&self) -> Option<&T> {
        match self {
            Section::Present(v) => Some(v),
            Section::Skipped { .. } => None,
        }
    }

    fn from_result<E: std::fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Section::Present(v),
            Err(e) => Section::Skipped {
                reason: e.to_string(),
            },
        }
    }
}

/// Everything the `report` command emits, computed once.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub dataset_name: String,
    pub source_note: String,
    pub record_count: usize,
    pub scheme_label: String,
    pub column: ComplexityColumn,
    pub dataset_tsv: String,
    pub discrepancies: Vec<Discrepancy>,
    pub complexity_hist: Section<FrequencyTable>,
    pub run_test: Section<RunTestResult>,
    pub components_hist: Section<FrequencyTable>,
    pub connections_hist: Section<FrequencyTable>,
    pub calibration: Section<CalibrationResult>,
    pub poisson_fit: Section<FitResult>,
    pub hyper_poisson_fit: Section<FitResult>,
}

/// Run the whole pipeline over one dataset.
pub fn build_report(
    dataset: &Dataset,
    scheme: &WeightScheme,
    column: ComplexityColumn,
    tie_policy: TiePolicy,
) -> ReportBundle {
    let discrepancies = dataset.consistency_report(scheme);

    let complexities: Result<Vec<u64>, String> = match column {
        ComplexityColumn::Stated => dataset
            .stated_complexities()
            .map_err(|id| format!("record {id} has no stated complexity")),
        ComplexityColumn::Computed => Ok(dataset.computed_complexities(scheme)),
    };
    let complexity_hist = Section::from_result(
        complexities.and_then(|v| FrequencyTable::from_values(&v).map_err(|e| e.to_string())),
    );
    let run_test = match complexity_hist.present() {
        Some(hist) => Section::from_result(run_test_with_policy(hist, tie_policy)),
        None => Section::Skipped {
            reason: "no complexity histogram".to_owned(),
        },
    };

    let components_hist =
        Section::from_result(FrequencyTable::from_values(&dataset.component_counts()));
    let connections_hist =
        Section::from_result(FrequencyTable::from_values(&dataset.connection_counts()));

    let (calibration, poisson_fit, hyper_poisson_fit) =
        match (components_hist.present(), connections_hist.present()) {
            (Some(components), Some(connections)) => {
                let calibration =
                    calibrate_convention(components, connections, &CalibrationTargets::vai());
                let convention = calibration.winner;
                let poisson_fit =
                    Section::from_result(fit_poisson(components, ShiftSpec::Auto, convention));
                let hyper_fit = Section::from_result(fit_hyper_poisson(connections, convention));
                (Section::Present(calibration), poisson_fit, hyper_fit)
            }
            _ => {
                let reason = "count histograms unavailable".to_owned();
                (
                    Section::Skipped {
                        reason: reason.clone(),
                    },
                    Section::Skipped {
                        reason: reason.clone(),
                    },
                    Section::Skipped { reason },
                )
            }
        };

    ReportBundle {
        dataset_name: dataset.name().to_owned(),
        source_note: dataset.source_note().to_owned(),
        record_count: dataset.len(),
        scheme_label: scheme.label().to_owned(),
        column,
        dataset_tsv: dataset.to_tsv(),
        discrepancies,
        complexity_hist,
        run_test,
        components_hist,
        connections_hist,
        calibration,
        poisson_fit,
        hyper_poisson_fit,
    }
}

/// Discrepancy list as TSV, matching `data/known_discrepancies.tsv`.
pub fn discrepancies_tsv(discrepancies: &[Discrepancy]) -> String {
    let mut out = String::from("id\ttranslit\tstated\tcomputed\n");
    for d in discrepancies {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            d.id, d.transliteration, d.stated, d.computed
        ));
    }
    out
}

/// Human-readable runs-test block.
pub fn render_run_test(result: &RunTestResult, precision: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("I = {}  R = {}\n", result.inventory, result.range));
    out.push_str(&format!(
        "E = {} ≈ {:.precision$}\n",
        result.expected,
        result.expected.value(),
    ));
    out.push_str(&format!(
        "n = {}  n1 = {}  n2 = {}\n",
        result.n, result.below, result.above
    ));
    if result.ties_excluded > 0 {
        out.push_str(&format!("ties excluded: {}\n", result.ties_excluded));
    }
    out.push_str(&format!(
        "r = {}  E(r) = {:.precision$}  sigma_r = {:.precision$}\n",
        result.runs, result.expected_runs, result.sigma_runs,
    ));
    out.push_str(&format!("z = {:.precision$}\n", result.z));
    out.push_str(&format!(
        "decision: {} uniformity at 1.96\n",
        if result.reject_uniformity {
            "REJECT"
        } else {
            "RETAIN"
        }
    ));
    out
}

/// Human-readable calibration block.
pub fn render_calibration(result: &CalibrationResult, precision: usize) -> String {
    let mut out = String::new();
    out.push_str("convention\tchi2[components]\tchi2[connections]\tdeviation\n");
    for score in &result.scores {
        let marker = if score.convention == result.winner {
            "\t<- selected"
        } else {
            ""
        };
        out.push_str(&format!(
            "{}\t{:.precision$}\t{:.precision$}\t{:.precision$}{}\n",
            score.convention,
            score.components_chi2,
            score.connections_chi2,
            score.total_deviation,
            marker,
        ));
    }
    if result.tied.len() > 1 {
        let names: Vec<&str> = result.tied.iter().map(|c| c.label()).collect();
        out.push_str(&format!(
            "tie within 0.01 between {}; selected by fixed priority\n",
            names.join(", ")
        ));
    }
    out.push_str(&format!(
        "reference chi2 targets reproduced within 0.5: {}\n",
        if result.targets_reproduced {
            "yes"
        } else {
            "no"
        }
    ));
    out
}

/// Human-readable fit block with the per-class table.
pub fn render_fit(observed: &FrequencyTable, fit: &FitResult, precision: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("model: {}\n", fit.model.label()));
    match &fit.model {
        CountModel::Poisson(p) => {
            out.push_str(&format!(
                "lambda = {:.precision$}  shift = {}\n",
                p.lambda(),
                p.shift(),
            ));
        }
        CountModel::HyperPoisson(h) => {
            out.push_str(&format!(
                "a = {:.precision$}  b = {:.precision$}\n",
                h.a(),
                h.b(),
            ));
            if h.a() == 0.0 || h.b() <= 1e-9 {
                out.push_str("note: a parameter sits on its bound\n");
            }
        }
    }
    out.push_str(&format!("convention: {}\n", fit.convention));
    out.push_str("x\tobserved\texpected\n");
    for ((value, count), expected) in observed.iter().zip(&fit.expected) {
        out.push_str(&format!("{value}\t{count}\t{expected:.precision$}\n"));
    }
    out.push_str(&format!(
        "chi2 = {:.precision$}  df = {}  p = {:.precision$}\n",
        fit.chi2, fit.df, fit.p_value,
    ));
    out
}

fn render_section<T>(
    out: &mut String,
    title: &str,
    section: &Section<T>,
    render: impl Fn(&T) -> String,
) {
    out.push_str(&format!("[{title}]\n"));
    match section {
        Section::Present(value) => out.push_str(&render(value)),
        Section::Skipped { reason } => out.push_str(&format!("skipped: {reason}\n")),
    }
    out.push('\n');
}

fn render_histogram_text(table: &FrequencyTable, precision: usize) -> String {
    let mut out = format!(
        "support: {}..{}  total: {}  mean: {:.precision$}",
        table.support_min(),
        table.support_max(),
        table.total(),
        table.sample_mean(),
    );
    if let Ok(variance) = table.sample_variance() {
        out.push_str(&format!("  variance: {variance:.precision$}"));
    }
    out.push('\n');
    out.push_str(&table.to_tsv());
    out
}

/// The full text rendition of a report bundle.
pub fn render_text(bundle: &ReportBundle, precision: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "dataset: {} ({} records)\n",
        bundle.dataset_name, bundle.record_count
    ));
    out.push_str(&format!("source: {}\n", bundle.source_note));
    out.push_str(&format!("weight scheme: {}\n", bundle.scheme_label));
    out.push_str(&format!("complexity column: {}\n\n", bundle.column.label()));

    out.push_str("[consistency]\n");
    out.push_str(&format!(
        "discrepant rows: {}\n",
        bundle.discrepancies.len()
    ));
    out.push_str(&discrepancies_tsv(&bundle.discrepancies));
    out.push('\n');

    render_section(
        &mut out,
        "complexity distribution",
        &bundle.complexity_hist,
        |t| render_histogram_text(t, precision),
    );
    render_section(&mut out, "runs test", &bundle.run_test, |r| {
        render_run_test(r, precision)
    });
    render_section(&mut out, "component counts", &bundle.components_hist, |t| {
        render_histogram_text(t, precision)
    });
    render_section(
        &mut out,
        "connection counts",
        &bundle.connections_hist,
        |t| render_histogram_text(t, precision),
    );
    render_section(
        &mut out,
        "convention calibration",
        &bundle.calibration,
        |c| render_calibration(c, precision),
    );

    match (&bundle.poisson_fit, bundle.components_hist.present()) {
        (Section::Present(fit), Some(observed)) => {
            out.push_str("[poisson fit: component counts]\n");
            out.push_str(&render_fit(observed, fit, precision));
            out.push('\n');
        }
        (section, _) => render_section(
            &mut out,
            "poisson fit: component counts",
            section,
            |_| unreachable!(),
        ),
    }
    match (&bundle.hyper_poisson_fit, bundle.connections_hist.present()) {
        (Section::Present(fit), Some(observed)) => {
            out.push_str("[hyper-poisson fit: connection counts]\n");
            out.push_str(&render_fit(observed, fit, precision));
        }
        (section, _) => render_section(
            &mut out,
            "hyper-poisson fit: connection counts",
            section,
            |_| unreachable!(),
        ),
    }
    out
}

/// The TSV renditions: `(file name, content)` pairs.
pub fn render_tsv_files(bundle: &ReportBundle) -> Vec<(&'static str, String)> {
    let mut files = vec![
        ("table1.tsv", bundle.dataset_tsv.clone()),
        (
            "discrepancies.tsv",
            discrepancies_tsv(&bundle.discrepancies),
        ),
    ];
    if let Some(hist) = bundle.complexity_hist.present() {
        files.push(("complexity_hist.tsv", hist.to_tsv()));
    }
    if let Some(hist) = bundle.components_hist.present() {
        files.push(("components_hist.tsv", hist.to_tsv()));
    }
    if let Some(hist) = bundle.connections_hist.present() {
        files.push(("connections_hist.tsv", hist.to_tsv()));
    }
    files
}

/// Deterministic bar chart of a frequency table: one bar per support cell
/// (zero counts get zero-height bars), linear scale.
pub fn render_histogram_svg(table: &FrequencyTable, title: &str) -> String {
    const WIDTH: f64 = 900.0;
    const HEIGHT: f64 = 420.0;
    const MARGIN_LEFT: f64 = 60.0;
    const MARGIN_RIGHT: f64 = 20.0;
    const MARGIN_TOP: f64 = 40.0;
    const MARGIN_BOTTOM: f64 = 50.0;
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let baseline = MARGIN_TOP + plot_h;

    let n = table.support_len() as f64;
    let y_max = table.counts().iter().copied().max().unwrap_or(1).max(1) as f64;
    let slot = plot_w / n;
    let bar_w = slot * 0.8;

    let mut svg = format!(
        r#"<svg version="1.1" width="{WIDTH}" height="{HEIGHT}" xmlns="http://www.w3.org/2000/svg">"#
    );
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="monospace" font-size="16">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        title
    ));
    svg.push('\n');

    // y gridlines and labels
    let step = (y_max / 5.0).ceil().max(1.0);
    let mut tick = 0.0;
    while tick <= y_max {
        let y = baseline - tick / y_max * plot_h;
        svg.push_str(&format!(
            r##"<line x1="{MARGIN_LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#cccccc" stroke-width="1"/>"##,
            MARGIN_LEFT + plot_w
        ));
        svg.push('\n');
        svg.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="monospace" font-size="12">{}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            tick as u64
        ));
        svg.push('\n');
        tick += step;
    }

    // bars
    for (i, (value, count)) in table.iter().enumerate() {
        let height = count as f64 / y_max * plot_h;
        let x = MARGIN_LEFT + i as f64 * slot + slot * 0.1;
        let y = baseline - height;
        svg.push_str(&format!(
            r##"<rect class="bar" x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{height:.2}" fill="#4a7aa7"/>"##
        ));
        svg.push('\n');
        if value % 5 == 0 {
            svg.push_str(&format!(
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="monospace" font-size="12">{}</text>"#,
                x + bar_w / 2.0,
                baseline + 16.0,
                value
            ));
            svg.push('\n');
        }
    }

    // axes
    svg.push_str(&format!(
        r#"<line x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{baseline:.2}" stroke="black" stroke-width="1"/>"#
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<line x1="{MARGIN_LEFT:.2}" y1="{baseline:.2}" x2="{:.2}" y2="{baseline:.2}" stroke="black" stroke-width="1"/>"#,
        MARGIN_LEFT + plot_w
    ));
    svg.push_str("\n</svg>\n");
    svg
}
