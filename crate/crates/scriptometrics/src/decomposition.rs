//! Core domain types for glyph decompositions and the complexity score.
//!
//! A glyph is described by what it is made of: geometric *components*
//! (points, straight lines, arches, filled areas) and the *connections*
//! between them (continuous, crisp, crossing). Each kind carries an integer
//! weight, and the complexity of a glyph is the weighted sum of all its
//! component and connection counts.
//!
//! ```
//! use scriptometrics::decomposition::{
//!     ComponentCounts, ComponentKind, ConnectionCounts, ConnectionKind, GlyphRecord,
//!     WeightScheme,
//! };
//!
//! // the syllable "a": 4 points, 1 line, 2 arches; 2 continuous + 1 crisp connection
//! let record = GlyphRecord {
//!     id: 1,
//!     transliteration: "a".into(),
//!     components: ComponentCounts::new()
//!         .with(ComponentKind::Point, 4)
//!         .with(ComponentKind::Line, 1)
//!         .with(ComponentKind::Arch, 2),
//!     connections: ConnectionCounts::new()
//!         .with(ConnectionKind::Continuous, 2)
//!         .with(ConnectionKind::Crisp, 1),
//!     stated_complexity: Some(16),
//! };
//! assert_eq!(record.complexity(&WeightScheme::default()), 16);
//! ```

use std::fmt;

/// Geometric primitive of a glyph body.
///
/// `Fill` is a distinct kind even though its default weight coincides with
/// `Line`: alternate weight schemes (see [`WeightScheme::altmann2004`])
/// re-weight filled areas without touching lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    Point,
    Line,
    Arch,
    Fill,
}

impl ComponentKind {
    /// All kinds in canonical order.
    pub const ALL: [ComponentKind; 4] = [
        ComponentKind::Point,
        ComponentKind::Line,
        ComponentKind::Arch,
        ComponentKind::Fill,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComponentKind::Point => "point",
            ComponentKind::Line => "line",
            ComponentKind::Arch => "arch",
            ComponentKind::Fill => "fill",
        }
    }

    fn index(self) -> usize {
        match self {
            ComponentKind::Point => 0,
            ComponentKind::Line => 1,
            ComponentKind::Arch => 2,
            ComponentKind::Fill => 3,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Junction between two components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConnectionKind {
    Continuous,
    Crisp,
    Crossing,
}

impl ConnectionKind {
    /// All kinds in canonical order.
    pub const ALL: [ConnectionKind; 3] = [
        ConnectionKind::Continuous,
        ConnectionKind::Crisp,
        ConnectionKind::Crossing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConnectionKind::Continuous => "continuous",
            ConnectionKind::Crisp => "crisp",
            ConnectionKind::Crossing => "crossing",
        }
    }

    fn index(self) -> usize {
        match self {
            ConnectionKind::Continuous => 0,
            ConnectionKind::Crisp => 1,
            ConnectionKind::Crossing => 2,
        }
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Multiset of components, one count per [`ComponentKind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct ComponentCounts([u32; 4]);

impl ComponentCounts {
    pub const fn new() -> Self {
        ComponentCounts([0; 4])
    }

    pub fn get(&self, kind: ComponentKind) -> u32 {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: ComponentKind, count: u32) {
        self.0[kind.index()] = count;
    }

    pub fn add(&mut self, kind: ComponentKind, count: u32) {
        self.0[kind.index()] += count;
    }

    /// Builder-style [`set`](Self::set).
    pub fn with(mut self, kind: ComponentKind, count: u32) -> Self {
        self.set(kind, count);
        self
    }

    /// Total number of components, regardless of kind.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Iterate `(kind, count)` in canonical order, including zero counts.
    pub fn iter(&self) -> impl Iterator<Item = (ComponentKind, u32)> + '_ {
        ComponentKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }
}

/// Multiset of connections, one count per [`ConnectionKind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct ConnectionCounts([u32; 3]);

impl ConnectionCounts {
    pub const fn new() -> Self {
        ConnectionCounts([0; 3])
    }

    pub fn get(&self, kind: ConnectionKind) -> u32 {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: ConnectionKind, count: u32) {
        self.0[kind.index()] = count;
    }

    pub fn add(&mut self, kind: ConnectionKind, count: u32) {
        self.0[kind.index()] += count;
    }

    /// Builder-style [`set`](Self::set).
    pub fn with(mut self, kind: ConnectionKind, count: u32) -> Self {
        self.set(kind, count);
        self
    }

    /// Total number of connections, regardless of kind.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Iterate `(kind, count)` in canonical order, including zero counts.
    pub fn iter(&self) -> impl Iterator<Item = (ConnectionKind, u32)> + '_ {
        ConnectionKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }
}

/// Weight assignment for the seven kinds.
///
/// The standard scheme is point 1, line 2, arch 3, fill 2 for components and
/// continuous 1, crisp 2, crossing 3 for connections. The `altmann2004`
/// variant differs only in weighting filled areas 1 instead of 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightScheme {
    label: String,
    component_weights: [u32; 4],
    connection_weights: [u32; 3],
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme {
            label: "default".to_owned(),
            component_weights: [1, 2, 3, 2],
            connection_weights: [1, 2, 3],
        }
    }
}

impl WeightScheme {
    /// Variant weighting filled areas 1 instead of 2.
    pub fn altmann2004() -> Self {
        WeightScheme {
            label: "altmann2004".to_owned(),
            component_weights: [1, 2, 3, 1],
            connection_weights: [1, 2, 3],
        }
    }

    /// A custom scheme. Weights are given in [`ComponentKind::ALL`] and
    /// [`ConnectionKind::ALL`] order.
    pub fn custom(
        label: impl Into<String>,
        component_weights: [u32; 4],
        connection_weights: [u32; 3],
    ) -> Self {
        WeightScheme {
            label: label.into(),
            component_weights,
            connection_weights,
        }
    }

    /// Look up one of the named schemes (`"default"`, `"altmann2004"`).
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "default" => Some(WeightScheme::default()),
            "altmann2004" => Some(WeightScheme::altmann2004()),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn component_weight(&self, kind: ComponentKind) -> u32 {
        self.component_weights[kind.index()]
    }

    pub fn connection_weight(&self, kind: ConnectionKind) -> u32 {
        self.connection_weights[kind.index()]
    }
}

/// One row of a decomposition table.
///
/// `stated_complexity` is the value printed in the source table, kept
/// separate from anything recomputed here: published tables occasionally
/// disagree with their own decomposition columns, and such rows must be
/// surfaced (see [`GlyphRecord::check_consistency`]) rather than silently
/// repaired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphRecord {
    pub id: u32,
    pub transliteration: String,
    pub components: ComponentCounts,
    pub connections: ConnectionCounts,
    pub stated_complexity: Option<u64>,
}

impl GlyphRecord {
    /// A glyph must have a body: at least one component. Connections may all
    /// be zero.
    pub fn validate(&self) -> Result<(), InvalidRecord> {
        if self.components.is_empty() {
            return Err(InvalidRecord::NoComponents { id: self.id });
        }
        Ok(())
    }

    /// Weighted sum of all component and connection counts.
    pub fn complexity(&self, scheme: &WeightScheme) -> u64 {
        let components: u64 = self
            .components
            .iter()
            .map(|(k, c)| u64::from(c) * u64::from(scheme.component_weight(k)))
            .sum();
        let connections: u64 = self
            .connections
            .iter()
            .map(|(k, c)| u64::from(c) * u64::from(scheme.connection_weight(k)))
            .sum();
        components + connections
    }

    /// Number of components, regardless of kind (not their weighted sum).
    pub fn component_count(&self) -> u32 {
        self.components.total()
    }

    /// Number of connections, regardless of kind.
    pub fn connection_count(&self) -> u32 {
        self.connections.total()
    }

    /// Compare the recomputed complexity against the stated one.
    ///
    /// Returns `None` when there is no stated value to check against.
    pub fn check_consistency(&self, scheme: &WeightScheme) -> Option<ConsistencyReport> {
        let stated = self.stated_complexity?;
        let computed = self.complexity(scheme);
        Some(ConsistencyReport {
            computed,
            stated,
            matches: computed == stated,
        })
    }
}

/// Outcome of checking one record's stated complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub computed: u64,
    pub stated: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidRecord {
    #[error("record {id} has no components")]
    NoComponents { id: u32 },
}
