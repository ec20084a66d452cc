//! Frequency tables, sample moments, and the runs test for uniformity.
//!
//! The uniformity question asks whether the frequencies `f_c` over an
//! observed value range look like draws around the common expectation
//! `E = I/(R+1)`, where `I` is the inventory size (total count) and `R` the
//! range. A *run* is a maximal block of consecutive frequencies that are all
//! above or all below `E`; too few runs means the frequencies drift in long
//! waves instead of fluctuating around `E`.
//!
//! With `n = R + 1` cells, `n1` of them below `E` and `n2` above, the run
//! count `r` is compared against
//!
//! ```text
//! E(r) = 1 + 2·n1·n2/n
//! σ_r  = sqrt( 2·n1·n2·(2·n1·n2 − n) / (n²·(n − 1)) )
//! z    = (|r − E(r)| − 0.5) / σ_r
//! ```
//!
//! and uniformity is rejected when `z ≥ 1.96`.
//!
//! `E` is kept as an exact rational so that "below/above" classifications
//! never depend on floating-point rounding. A frequency exactly equal to `E`
//! leaves the dichotomy undefined; that case is an error unless ties are
//! explicitly excluded via [`TiePolicy::Exclude`].

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("cannot build a histogram from an empty value list")]
    EmptyInput,
    #[error("support span {span} is too large for a dense histogram")]
    SupportTooLarge { span: u64 },
    #[error("counts must be non-empty with nonzero first and last entries")]
    UntrimmedCounts,
    #[error("need at least {needed} observations, have {have}")]
    InsufficientData { needed: u64, have: u64 },
    #[error("runs test needs at least 2 cells, have {have}")]
    SupportTooShort { have: usize },
    #[error(
        "tied frequency at value {value}: runs test undefined under the dichotomy below/above E"
    )]
    TiedFrequency { value: u64 },
    #[error("count total overflows")]
    Overflow,
    #[error("line {line}: {reason}")]
    HistogramFormat { line: usize, reason: String },
}

/// An exact ratio of two integers, used for the expected uniform frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub numer: u64,
    pub denom: u64,
}

impl Fraction {
    pub fn value(self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// Counts over a contiguous integer support, trimmed to the observed range:
/// the first and last counts are nonzero, interior zeros are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    support_min: u64,
    counts: Vec<u64>,
}

const MAX_SUPPORT_SPAN: u64 = 1 << 24;

impl FrequencyTable {
    /// Build the histogram of a list of values. The support spans the
    /// observed minimum..maximum.
    pub fn from_values(values: &[u64]) -> Result<Self, StatsError> {
        let min = *values.iter().min().ok_or(StatsError::EmptyInput)?;
        let max = *values.iter().max().expect("non-empty");
        let span = max - min;
        if span >= MAX_SUPPORT_SPAN {
            return Err(StatsError::SupportTooLarge { span });
        }
        let mut counts = vec![0u64; span as usize + 1];
        for &v in values {
            counts[(v - min) as usize] += 1;
        }
        Ok(FrequencyTable {
            support_min: min,
            counts,
        })
    }

    /// Build a table from explicit counts. The slice must be trimmed (nonzero
    /// first and last entries).
    pub fn from_parts(support_min: u64, counts: Vec<u64>) -> Result<Self, StatsError> {
        match (counts.first(), counts.last()) {
            (Some(&first), Some(&last)) if first > 0 && last > 0 => Ok(FrequencyTable {
                support_min,
                counts,
            }),
            _ => Err(StatsError::UntrimmedCounts),
        }
    }

    pub fn support_min(&self) -> u64 {
        self.support_min
    }

    pub fn support_max(&self) -> u64 {
        self.support_min + self.counts.len() as u64 - 1
    }

    /// Number of support cells (`R + 1`).
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    /// Observed range `R = max − min`.
    pub fn range(&self) -> u64 {
        self.counts.len() as u64 - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Count at `value`; zero outside the support.
    pub fn count(&self, value: u64) -> u64 {
        if value < self.support_min {
            return 0;
        }
        self.counts
            .get((value - self.support_min) as usize)
            .copied()
            .unwrap_or(0)
    }

    /// Inventory size `I`: the total count.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Iterate `(value, count)` over the support.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.support_min + i as u64, c))
    }

    /// Count-weighted mean.
    pub fn sample_mean(&self) -> f64 {
        let total = self.total();
        let weighted: u128 = self
            .iter()
            .map(|(v, c)| u128::from(v) * u128::from(c))
            .sum();
        weighted as f64 / total as f64
    }

    /// Population-style variance `Σ f·(x − μ)² / N`. Needs at least two
    /// observations.
    pub fn sample_variance(&self) -> Result<f64, StatsError> {
        let total = self.total();
        if total < 2 {
            return Err(StatsError::InsufficientData {
                needed: 2,
                have: total,
            });
        }
        let mean = self.sample_mean();
        let ss: f64 = self
            .iter()
            .map(|(v, c)| {
                let d = v as f64 - mean;
                c as f64 * d * d
            })
            .sum();
        Ok(ss / total as f64)
    }

    /// Render as a two-column TSV (`value\tcount`) over the full support.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("value\tcount\n");
        for (value, count) in self.iter() {
            out.push_str(&format!("{value}\t{count}\n"));
        }
        out
    }

    /// Parse the output of [`to_tsv`](Self::to_tsv). Values must be
    /// contiguous and ascending.
    pub fn from_tsv(text: &str) -> Result<Self, StatsError> {
        let mut support_min = None;
        let mut counts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "value\tcount" {
                continue;
            }
            let (v, c) = line.split_once('\t').ok_or(StatsError::HistogramFormat {
                line: line_no,
                reason: "expected `value\\tcount`".to_owned(),
            })?;
            let value: u64 = v.trim().parse().map_err(|_| StatsError::HistogramFormat {
                line: line_no,
                reason: format!("bad value `{v}`"),
            })?;
            let count: u64 = c.trim().parse().map_err(|_| StatsError::HistogramFormat {
                line: line_no,
                reason: format!("bad count `{c}`"),
            })?;
            match support_min {
                None => support_min = Some(value),
                Some(min) => {
                    if value != min + counts.len() as u64 {
                        return Err(StatsError::HistogramFormat {
                            line: line_no,
                            reason: format!("non-contiguous value {value}"),
                        });
                    }
                }
            }
            counts.push(count);
        }
        let support_min = support_min.ok_or(StatsError::EmptyInput)?;
        FrequencyTable::from_parts(support_min, counts)
    }
}

/// What to do with a frequency exactly equal to `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Report an error. Matches the formulation of the test, which only
    /// defines "below" and "above".
    #[default]
    Error,
    /// Drop tied cells from the sequence; `n` shrinks to `n1 + n2` and runs
    /// are counted over the remaining cells. An extension of the test, not
    /// part of its original formulation.
    Exclude,
}

/// Every intermediate quantity of the uniformity runs test.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTestResult {
    /// Inventory size `I` (total count).
    pub inventory: u64,
    /// Observed range `R` (support length − 1, including any tied cells).
    pub range: u64,
    /// Expected uniform frequency `E = I/(R+1)`, exact.
    pub expected: Fraction,
    /// Cells entering the dichotomy: `R + 1`, minus excluded ties.
    pub n: u64,
    /// Cells with frequency below `E` (`n1`).
    pub below: u64,
    /// Cells with frequency above `E` (`n2`).
    pub above: u64,
    /// Number of runs `r`.
    pub runs: u64,
    /// `E(r) = 1 + 2·n1·n2/n`.
    pub expected_runs: f64,
    /// `σ_r`.
    pub sigma_runs: f64,
    /// `z = (|r − E(r)| − 0.5)/σ_r`. Negative when `r` sits within half a
    /// run of its expectation.
    pub z: f64,
    /// `z ≥ 1.96`.
    pub reject_uniformity: bool,
    /// Cells dropped under [`TiePolicy::Exclude`] (always 0 otherwise).
    pub ties_excluded: u64,
}

/// Runs test over a frequency table, erroring on ties at `E`.
pub fn run_test(table: &FrequencyTable) -> Result<RunTestResult, StatsError> {
    run_test_counts(table.support_min, table.counts(), TiePolicy::Error)
}

/// Runs test over a frequency table with an explicit tie policy.
pub fn run_test_with_policy(
    table: &FrequencyTable,
    policy: TiePolicy,
) -> Result<RunTestResult, StatsError> {
    run_test_counts(table.support_min, table.counts(), policy)
}

/// Runs test over a raw counts sequence (one cell per consecutive value
/// starting at `support_min`; interior zeros are ordinary counts).
pub fn run_test_counts(
    support_min: u64,
    counts: &[u64],
    policy: TiePolicy,
) -> Result<RunTestResult, StatsError> {
    if counts.len() < 2 {
        return Err(StatsError::SupportTooShort { have: counts.len() });
    }
    let inventory = counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or(StatsError::Overflow)?;
    let cells = counts.len() as u64;

    // classify each cell against E = I/cells exactly: c <=> I/cells  iff  c·cells <=> I
    let mut classes: Vec<bool> = Vec::with_capacity(counts.len());
    let mut ties_excluded = 0u64;
    for (i, &c) in counts.iter().enumerate() {
        match (u128::from(c) * u128::from(cells)).cmp(&u128::from(inventory)) {
            Ordering::Less => classes.push(false),
            Ordering::Greater => classes.push(true),
            Ordering::Equal => match policy {
                TiePolicy::Error => {
                    return Err(StatsError::TiedFrequency {
                        value: support_min + i as u64,
                    })
                }
                TiePolicy::Exclude => ties_excluded += 1,
            },
        }
    }
    if classes.len() < 2 {
        return Err(StatsError::SupportTooShort {
            have: classes.len(),
        });
    }

    let n = classes.len() as u64;
    let above = classes.iter().filter(|&&c| c).count() as u64;
    let below = n - above;
    let runs = 1 + classes.windows(2).filter(|w| w[0] != w[1]).count() as u64;

    let two_n1_n2 = 2.0 * below as f64 * above as f64;
    let n_f = n as f64;
    let expected_runs = 1.0 + two_n1_n2 / n_f;
    let sigma_runs = (two_n1_n2 * (two_n1_n2 - n_f) / (n_f * n_f * (n_f - 1.0))).sqrt();
    let z = ((runs as f64 - expected_runs).abs() - 0.5) / sigma_runs;

    Ok(RunTestResult {
        inventory,
        range: cells - 1,
        expected: Fraction {
            numer: inventory,
            denom: cells,
        },
        n,
        below,
        above,
        runs,
        expected_runs,
        sigma_runs,
        z,
        reject_uniformity: z >= 1.96,
        ties_excluded,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn histogram_of_constant_values() {
        let t = FrequencyTable::from_values(&[5, 5, 5]).unwrap();
        assert_eq!(t.support_min(), 5);
        assert_eq!(t.counts(), &[3]);
        assert_eq!(t.total(), 3);
        assert_eq!(t.sample_mean(), 5.0);
        assert_eq!(t.sample_variance().unwrap(), 0.0);
    }

    #[test]
    fn histogram_keeps_interior_zeros() {
        let t = FrequencyTable::from_values(&[1, 1, 4]).unwrap();
        assert_eq!(t.support_min(), 1);
        assert_eq!(t.counts(), &[2, 0, 0, 1]);
        assert_eq!(t.range(), 3);
    }

    #[test]
    fn histogram_rejects_empty_input() {
        assert!(matches!(
            FrequencyTable::from_values(&[]),
            Err(StatsError::EmptyInput)
        ));
    }

    #[test]
    fn from_parts_requires_trimmed_counts() {
        assert!(FrequencyTable::from_parts(0, vec![1, 0, 2]).is_ok());
        assert!(matches!(
            FrequencyTable::from_parts(0, vec![0, 2]),
            Err(StatsError::UntrimmedCounts)
        ));
        assert!(matches!(
            FrequencyTable::from_parts(0, vec![2, 0]),
            Err(StatsError::UntrimmedCounts)
        ));
        assert!(matches!(
            FrequencyTable::from_parts(0, vec![]),
            Err(StatsError::UntrimmedCounts)
        ));
    }

    #[test]
    fn weighted_moments_of_the_bundled_count_tables() {
        let components =
            FrequencyTable::from_parts(2, vec![7, 22, 41, 49, 48, 35, 17, 8, 2]).unwrap();
        assert!((components.sample_mean() - 1250.0 / 229.0).abs() < 1e-12);

        let connections = FrequencyTable::from_parts(
            0,
            vec![17, 9, 30, 24, 33, 33, 34, 16, 10, 10, 5, 3, 4, 0, 1],
        )
        .unwrap();
        assert!((connections.sample_mean() - 1069.0 / 229.0).abs() < 1e-12);
        // exact rational: (6791·229 − 1069²) / 229²
        assert!((connections.sample_variance().unwrap() - 412378.0 / 52441.0).abs() < 1e-9);
    }

    #[test]
    fn variance_needs_two_observations() {
        let t = FrequencyTable::from_parts(7, vec![1]).unwrap();
        assert!(matches!(
            t.sample_variance(),
            Err(StatsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn run_test_hand_evaluated_example() {
        // counts [6,4,6,4,6]: I=26, E=5.2, alternating classes
        let t = FrequencyTable::from_parts(0, vec![6, 4, 6, 4, 6]).unwrap();
        let r = run_test(&t).unwrap();
        assert_eq!(r.inventory, 26);
        assert_eq!(r.range, 4);
        assert_eq!(
            r.expected,
            Fraction {
                numer: 26,
                denom: 5
            }
        );
        assert_eq!((r.below, r.above), (2, 3));
        assert_eq!(r.runs, 5);
        assert!(close(r.expected_runs, 3.4, 1e-12));
        assert!(close(r.sigma_runs, 0.916515138991168, 1e-12));
        assert!(close(r.z, 1.2001983962979581, 1e-12));
        assert!(!r.reject_uniformity);
    }

    #[test]
    fn run_test_symmetric_two_cell_case() {
        // [10, 0]: r = E(r) = 2 and sigma_r = 0, so z = -0.5/0 = -inf
        let r = run_test_counts(0, &[10, 0], TiePolicy::Error).unwrap();
        assert_eq!((r.below, r.above), (1, 1));
        assert_eq!(r.runs, 2);
        assert_eq!(r.expected_runs, 2.0);
        assert_eq!(r.sigma_runs, 0.0);
        assert!(r.z < 0.0);
        assert!(!r.reject_uniformity);
    }

    #[test]
    fn run_test_reports_tie_position() {
        // I=6 over 3 cells: E=2, the middle cell ties
        let err = run_test_counts(4, &[1, 2, 3], TiePolicy::Error).unwrap_err();
        assert_eq!(err, StatsError::TiedFrequency { value: 5 });
    }

    #[test]
    fn run_test_tie_exclusion() {
        let r = run_test_counts(4, &[1, 2, 3], TiePolicy::Exclude).unwrap();
        assert_eq!(r.ties_excluded, 1);
        assert_eq!(r.n, 2);
        assert_eq!((r.below, r.above), (1, 1));
        assert_eq!(r.runs, 2);
        // the full-range quantities keep their definitions
        assert_eq!(r.range, 2);
        assert_eq!(r.expected, Fraction { numer: 6, denom: 3 });
    }

    #[test]
    fn run_test_needs_two_cells() {
        assert!(matches!(
            run_test_counts(0, &[5], TiePolicy::Error),
            Err(StatsError::SupportTooShort { have: 1 })
        ));
        // exclusion can also leave too few cells
        assert!(matches!(
            run_test_counts(0, &[2, 2, 2], TiePolicy::Exclude),
            Err(StatsError::SupportTooShort { have: 0 })
        ));
    }

    #[test]
    fn tsv_round_trip() {
        let t = FrequencyTable::from_parts(4, vec![2, 0, 7, 1]).unwrap();
        let text = t.to_tsv();
        assert_eq!(FrequencyTable::from_tsv(&text).unwrap(), t);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Trimmed counts sequences that produce no tie at E.
        fn arb_untied_counts() -> impl Strategy<Value = Vec<u64>> {
            prop::collection::vec(0u64..40, 2..30)
                .prop_map(|mut counts| {
                    if counts[0] == 0 {
                        counts[0] = 1;
                    }
                    if *counts.last().unwrap() == 0 {
                        *counts.last_mut().unwrap() = 1;
                    }
                    counts
                })
                .prop_filter("no count ties with E", |counts| {
                    let total: u64 = counts.iter().sum();
                    let n = counts.len() as u64;
                    counts.iter().all(|&c| c * n != total)
                })
        }

        proptest! {
            #[test]
            fn histogram_total_is_input_length(values in prop::collection::vec(0u64..100, 1..200)) {
                let t = FrequencyTable::from_values(&values).unwrap();
                prop_assert_eq!(t.total(), values.len() as u64);
            }

            #[test]
            fn run_test_scale_invariance(counts in arb_untied_counts(), k in 2u64..20) {
                let base = run_test_counts(0, &counts, TiePolicy::Error).unwrap();
                let scaled: Vec<u64> = counts.iter().map(|&c| c * k).collect();
                let s = run_test_counts(0, &scaled, TiePolicy::Error).unwrap();
                prop_assert_eq!(s.below, base.below);
                prop_assert_eq!(s.above, base.above);
                prop_assert_eq!(s.runs, base.runs);
                prop_assert_eq!(s.z, base.z);
                prop_assert_eq!(s.inventory, base.inventory * k);
            }

            #[test]
            fn run_test_reversal_equivariance(counts in arb_untied_counts()) {
                let base = run_test_counts(0, &counts, TiePolicy::Error).unwrap();
                let reversed: Vec<u64> = counts.iter().rev().copied().collect();
                let r = run_test_counts(0, &reversed, TiePolicy::Error).unwrap();
                prop_assert_eq!(r.below, base.below);
                prop_assert_eq!(r.above, base.above);
                prop_assert_eq!(r.runs, base.runs);
                prop_assert_eq!(r.z, base.z);
            }

            #[test]
            fn run_bounds(counts in arb_untied_counts()) {
                let r = run_test_counts(0, &counts, TiePolicy::Error).unwrap();
                prop_assert!(r.runs >= 1 && r.runs <= r.n);
                prop_assert_eq!(r.below + r.above, r.n);
                // a trimmed sequence with fractional E always has both classes
                prop_assert!(r.below >= 1 && r.above >= 1);
            }
        }
    }
}
