//! Complexity scoring for writing systems via the composition method,
//! with distribution statistics and count-model fits.
//!
//! The pipeline, end to end:
//!
//! 1. [`decomposition`] — a glyph is a multiset of geometric components
//!    (point, line, arch, fill) and connections (continuous, crisp,
//!    crossing); its complexity is the weighted sum of all counts under a
//!    [`decomposition::WeightScheme`].
//! 2. [`notation`] — the compact `4×1+1×2+2×3` cell grammar, TSV dataset
//!    ingestion, round-trip serialization, and the bundled 229-sign Vai
//!    syllabary table ([`notation::Dataset::vai`]).
//! 3. [`stats`] — frequency tables over complexities or counts, sample
//!    moments, and the runs test for the uniformity hypothesis.
//! 4. [`dist`] — Poisson and hyper-Poisson mass functions, the confluent
//!    hypergeometric normalizer `₁F₁(1; b; a)`, and the chi-square survival
//!    function.
//! 5. [`fit`] — expected-frequency conventions, Pearson chi-square,
//!    moment/minimum-chi-square estimation, and convention calibration
//!    against published reference values.
//! 6. [`report`] / [`cli`] — deterministic text, TSV, and SVG reports and
//!    the `scriptometrics` command-line tool.
//!
//! ```
//! use scriptometrics::decomposition::WeightScheme;
//! use scriptometrics::notation::Dataset;
//! use scriptometrics::stats::{run_test, FrequencyTable};
//!
//! let vai = Dataset::vai();
//! let complexities = vai.stated_complexities().unwrap();
//! let hist = FrequencyTable::from_values(&complexities).unwrap();
//! let runs = run_test(&hist).unwrap();
//! assert!(runs.reject_uniformity); // complexities are not uniform
//! ```

pub mod cli;
pub mod decomposition;
pub mod dist;
pub mod fit;
pub mod guide;
pub mod notation;
pub mod report;
pub mod stats;
