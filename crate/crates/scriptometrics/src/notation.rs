//! Decomposition-expression grammar and dataset ingestion.
//!
//! Table cells use the compact notation `COUNT×CODE` joined by `+`, where the
//! code doubles as the default weight: `4×1+1×2+2×3` reads "4 points, 1 line,
//! 2 arches". A trailing `*` on a weight-2 component term marks a filled area
//! (`1×2*`), which is how fills stay distinguishable from lines even though
//! they share the code. A dash (`—` or `-`) or an empty cell means "none".
//!
//! Codes are decoded by context: in a connections cell `1`/`2`/`3` mean
//! continuous/crisp/crossing, and the fill marker is not allowed.
//!
//! ```
//! use scriptometrics::decomposition::ComponentKind;
//! use scriptometrics::notation::{format_components, parse_components};
//!
//! let counts = parse_components("4×1+1×2+2×3").unwrap();
//! assert_eq!(counts.get(ComponentKind::Point), 4);
//! assert_eq!(format_components(&counts), "4×1+1×2+2×3");
//! ```
//!
//! Datasets are tab-separated files with the header
//! `id\ttranslit\tcomponents\tconnections\tcomplexity` (the complexity column
//! may be absent). Blank lines and lines starting with `#` are skipped.

use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::decomposition::{
    ComponentCounts, ComponentKind, ConnectionCounts, ConnectionKind, GlyphRecord, WeightScheme,
};

/// Which table column an expression cell comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpressionContext {
    Components,
    Connections,
}

impl fmt::Display for ExpressionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpressionContext::Components => "components",
            ExpressionContext::Connections => "connections",
        })
    }
}

/// A parsed cell from either column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParsedExpression {
    Components(ComponentCounts),
    Connections(ConnectionCounts),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed term `{term}`: expected COUNT×CODE")]
    MalformedTerm { term: String },
    #[error("count must be at least 1 in term `{term}`")]
    ZeroCount { term: String },
    #[error("unknown {context} kind code in term `{term}`")]
    UnknownCode {
        term: String,
        context: ExpressionContext,
    },
    #[error("fill marker `*` is only valid on a weight-2 component term (term `{term}`)")]
    BadFillMarker { term: String },
    #[error("count overflow in term `{term}`")]
    CountOverflow { term: String },
}

fn is_dash(text: &str) -> bool {
    matches!(text, "" | "-" | "—")
}

/// Split a term `COUNT×CODE[*]` into `(count, code, fill)`.
fn split_term(raw: &str) -> Result<(u32, &str, bool), ParseError> {
    let term = raw.trim();
    let malformed = || ParseError::MalformedTerm {
        term: term.to_owned(),
    };
    let (body, fill) = match term.strip_suffix('*') {
        Some(body) => (body.trim_end(), true),
        None => (term, false),
    };
    let (count_text, code) = body.split_once(['×', 'x']).ok_or_else(malformed)?;
    let count: u32 = count_text.trim().parse().map_err(|_| malformed())?;
    if count == 0 {
        return Err(ParseError::ZeroCount {
            term: term.to_owned(),
        });
    }
    let code = code.trim();
    if code.is_empty() {
        return Err(malformed());
    }
    Ok((count, code, fill))
}

/// Parse a components cell into per-kind counts. Duplicate kinds are summed.
pub fn parse_components(text: &str) -> Result<ComponentCounts, ParseError> {
    let text = text.trim();
    let mut counts = ComponentCounts::new();
    if is_dash(text) {
        return Ok(counts);
    }
    for raw in text.split('+') {
        let (count, code, fill) = split_term(raw)?;
        let kind = match (code, fill) {
            ("1", false) => ComponentKind::Point,
            ("2", false) => ComponentKind::Line,
            ("3", false) => ComponentKind::Arch,
            ("2", true) => ComponentKind::Fill,
            (_, true) => {
                return Err(ParseError::BadFillMarker {
                    term: raw.trim().to_owned(),
                })
            }
            _ => {
                return Err(ParseError::UnknownCode {
                    term: raw.trim().to_owned(),
                    context: ExpressionContext::Components,
                })
            }
        };
        let total =
            counts
                .get(kind)
                .checked_add(count)
                .ok_or_else(|| ParseError::CountOverflow {
                    term: raw.trim().to_owned(),
                })?;
        counts.set(kind, total);
    }
    Ok(counts)
}

/// Parse a connections cell into per-kind counts. Duplicate kinds are summed.
pub fn parse_connections(text: &str) -> Result<ConnectionCounts, ParseError> {
    let text = text.trim();
    let mut counts = ConnectionCounts::new();
    if is_dash(text) {
        return Ok(counts);
    }
    for raw in text.split('+') {
        let (count, code, fill) = split_term(raw)?;
        if fill {
            return Err(ParseError::BadFillMarker {
                term: raw.trim().to_owned(),
            });
        }
        let kind = match code {
            "1" => ConnectionKind::Continuous,
            "2" => ConnectionKind::Crisp,
            "3" => ConnectionKind::Crossing,
            _ => {
                return Err(ParseError::UnknownCode {
                    term: raw.trim().to_owned(),
                    context: ExpressionContext::Connections,
                })
            }
        };
        let total =
            counts
                .get(kind)
                .checked_add(count)
                .ok_or_else(|| ParseError::CountOverflow {
                    term: raw.trim().to_owned(),
                })?;
        counts.set(kind, total);
    }
    Ok(counts)
}

/// Parse a cell in the given context.
pub fn parse_expression(
    text: &str,
    context: ExpressionContext,
) -> Result<ParsedExpression, ParseError> {
    match context {
        ExpressionContext::Components => parse_components(text).map(ParsedExpression::Components),
        ExpressionContext::Connections => {
            parse_connections(text).map(ParsedExpression::Connections)
        }
    }
}

/// Canonical rendering: kinds in point/line/arch/fill order, zero counts
/// omitted, `—` for the empty multiset. `parse(format(m)) == m`.
pub fn format_components(counts: &ComponentCounts) -> String {
    let mut terms = Vec::new();
    for (kind, count) in counts.iter() {
        if count == 0 {
            continue;
        }
        let code = match kind {
            ComponentKind::Point => "1",
            ComponentKind::Line => "2",
            ComponentKind::Arch => "3",
            ComponentKind::Fill => "2*",
        };
        terms.push(format!("{count}×{code}"));
    }
    if terms.is_empty() {
        "—".to_owned()
    } else {
        terms.join("+")
    }
}

/// Canonical rendering: kinds in continuous/crisp/crossing order, zero counts
/// omitted, `—` for the empty multiset.
pub fn format_connections(counts: &ConnectionCounts) -> String {
    let mut terms = Vec::new();
    for (kind, count) in counts.iter() {
        if count == 0 {
            continue;
        }
        let code = match kind {
            ConnectionKind::Continuous => "1",
            ConnectionKind::Crisp => "2",
            ConnectionKind::Crossing => "3",
        };
        terms.push(format!("{count}×{code}"));
    }
    if terms.is_empty() {
        "—".to_owned()
    } else {
        terms.join("+")
    }
}

/// Exact header of a decomposition TSV file.
pub const DATASET_HEADER: &str = "id\ttranslit\tcomponents\tconnections\tcomplexity";
const DATASET_HEADER_NO_COMPLEXITY: &str = "id\ttranslit\tcomponents\tconnections";

const BUNDLED_VAI: &str = include_str!("../../../data/vai_table1.tsv");

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing header line, expected `{DATASET_HEADER}`")]
    MissingHeader,
    #[error("line {line}: bad header `{found}`, expected `{DATASET_HEADER}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: expected {expected} tab-separated fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid id `{text}`")]
    BadId { line: usize, text: String },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: u32 },
    #[error("line {line}: ids must be strictly increasing ({id} after {previous})")]
    UnorderedId { line: usize, id: u32, previous: u32 },
    #[error("line {line} ({column} column): {source}")]
    Expression {
        line: usize,
        column: ExpressionContext,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: non-integer complexity `{text}`")]
    BadComplexity { line: usize, text: String },
    #[error("line {line}: record has no components")]
    NoComponents { line: usize },
    #[error("empty dataset")]
    Empty,
}

/// A discrepant row found by [`Dataset::consistency_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub id: u32,
    pub transliteration: String,
    pub stated: u64,
    pub computed: u64,
}

/// An ordered, validated collection of glyph records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    records: Vec<GlyphRecord>,
    source_note: String,
}

impl Dataset {
    /// Parse a dataset from TSV text. See the module docs for the format.
    pub fn from_tsv(
        name: impl Into<String>,
        text: &str,
        source_note: impl Into<String>,
    ) -> Result<Self, LoadError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

        let (header_line, header) = lines.next().ok_or(LoadError::MissingHeader)?;
        let has_complexity = match header.trim_end() {
            DATASET_HEADER => true,
            DATASET_HEADER_NO_COMPLEXITY => false,
            other => {
                return Err(LoadError::BadHeader {
                    line: header_line,
                    found: other.to_owned(),
                })
            }
        };
        let expected_fields = if has_complexity { 5 } else { 4 };

        let mut records: Vec<GlyphRecord> = Vec::new();
        for (line, raw) in lines {
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != expected_fields {
                return Err(LoadError::FieldCount {
                    line,
                    expected: expected_fields,
                    found: fields.len(),
                });
            }
            let id: u32 = fields[0]
                .trim()
                .parse()
                .ok()
                .filter(|&id| id > 0)
                .ok_or_else(|| LoadError::BadId {
                    line,
                    text: fields[0].to_owned(),
                })?;
            if let Some(prev) = records.last() {
                if id == prev.id {
                    return Err(LoadError::DuplicateId { line, id });
                }
                if id < prev.id {
                    return Err(LoadError::UnorderedId {
                        line,
                        id,
                        previous: prev.id,
                    });
                }
            }
            let components =
                parse_components(fields[2]).map_err(|source| LoadError::Expression {
                    line,
                    column: ExpressionContext::Components,
                    source,
                })?;
            let connections =
                parse_connections(fields[3]).map_err(|source| LoadError::Expression {
                    line,
                    column: ExpressionContext::Connections,
                    source,
                })?;
            let stated_complexity = if has_complexity {
                let cell = fields[4].trim();
                if cell.is_empty() {
                    None
                } else {
                    Some(cell.parse().map_err(|_| LoadError::BadComplexity {
                        line,
                        text: cell.to_owned(),
                    })?)
                }
            } else {
                None
            };
            let record = GlyphRecord {
                id,
                transliteration: fields[1].to_owned(),
                components,
                connections,
                stated_complexity,
            };
            record
                .validate()
                .map_err(|_| LoadError::NoComponents { line })?;
            records.push(record);
        }
        if records.is_empty() {
            return Err(LoadError::Empty);
        }
        Ok(Dataset {
            name: name.into(),
            records,
            source_note: source_note.into(),
        })
    }

    /// Load a dataset from a TSV file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_owned());
        Dataset::from_tsv(name, &text, format!("loaded from {}", path.display()))
    }

    /// The bundled Vai syllabary table: 229 signs with their decompositions
    /// and published complexity values, transcribed as printed (including the
    /// handful of rows whose stated complexity disagrees with their own
    /// decomposition; see [`Dataset::consistency_report`]).
    pub fn vai() -> &'static Dataset {
        static VAI: OnceLock<Dataset> = OnceLock::new();
        VAI.get_or_init(|| {
            Dataset::from_tsv(
                "vai",
                BUNDLED_VAI,
                "Vai syllabary, 229 signs, decompositions and published complexities",
            )
            .expect("bundled dataset is valid")
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source_note(&self) -> &str {
        &self.source_note
    }

    pub fn records(&self) -> &[GlyphRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Every row whose recomputed complexity disagrees with the stated one,
    /// in id order. Rows without a stated value are skipped.
    pub fn consistency_report(&self, scheme: &WeightScheme) -> Vec<Discrepancy> {
        self.records
            .iter()
            .filter_map(|record| {
                let report = record.check_consistency(scheme)?;
                if report.matches {
                    None
                } else {
                    Some(Discrepancy {
                        id: record.id,
                        transliteration: record.transliteration.clone(),
                        stated: report.stated,
                        computed: report.computed,
                    })
                }
            })
            .collect()
    }

    /// Stated complexities in record order; `Err` carries the first id
    /// lacking a stated value.
    pub fn stated_complexities(&self) -> Result<Vec<u64>, u32> {
        self.records
            .iter()
            .map(|r| r.stated_complexity.ok_or(r.id))
            .collect()
    }

    /// Recomputed complexities in record order.
    pub fn computed_complexities(&self, scheme: &WeightScheme) -> Vec<u64> {
        self.records.iter().map(|r| r.complexity(scheme)).collect()
    }

    /// Per-record component counts in record order.
    pub fn component_counts(&self) -> Vec<u64> {
        self.records
            .iter()
            .map(|r| u64::from(r.component_count()))
            .collect()
    }

    /// Per-record connection counts in record order.
    pub fn connection_counts(&self) -> Vec<u64> {
        self.records
            .iter()
            .map(|r| u64::from(r.connection_count()))
            .collect()
    }

    /// Serialize back to the TSV format with canonical expression cells.
    /// Reloading the output yields an equal dataset.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(DATASET_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.id,
                r.transliteration,
                format_components(&r.components),
                format_connections(&r.connections),
                r.stated_complexity
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
            ));
        }
        out
    }
}
