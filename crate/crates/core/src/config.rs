//! Tunables for synthesis and execution.

use serde::{Deserialize, Serialize};

use crate::cluster::ScoringWeights;

/// Neighbor geometry for box documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig {
    /// Minimum overlap of perpendicular extents, as a fraction of the smaller
    /// extent, for a box to count as a path-program neighbor.
    pub min_perpendicular_overlap: f64,
    /// Blueprint neighbors farther than this many box widths (horizontal) or
    /// heights (vertical) are `Absent`.
    pub summary_reach: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { min_perpendicular_overlap: 0.25, summary_reach: 3.0 }
    }
}

/// Bounds of the box path-program search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumerationConfig {
    pub max_motions: usize,
    /// Absolute motions step `1..=max_k` boxes.
    pub max_k: usize,
    pub max_subset_size: usize,
    /// Random training subsets of size 2..=max_subset_size sampled in addition to all singletons.
    pub random_subsets: usize,
    pub max_ngram: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_motions: 4, max_k: 4, max_subset_size: 3, random_subsets: 20, max_ngram: 5 }
    }
}

/// Bounds of the tree selector search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectorConfig {
    pub max_steps: usize,
    pub max_atoms_per_step: usize,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig { max_steps: 4, max_atoms_per_step: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthesisConfig {
    pub weights: ScoringWeights,
    /// Average ROI-blueprint distance at or below which clusters merge.
    pub merge_threshold: f64,
    /// Blueprint distance accepted by the extraction gate.
    pub blueprint_threshold: f64,
    pub geometry: GeometryConfig,
    pub enumeration: EnumerationConfig,
    pub selectors: SelectorConfig,
    /// Nesting limit for disambiguating guard programs.
    pub hierarchy_depth: usize,
    pub seed: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            weights: ScoringWeights::default(),
            merge_threshold: 0.0,
            blueprint_threshold: 0.0,
            geometry: GeometryConfig::default(),
            enumeration: EnumerationConfig::default(),
            selectors: SelectorConfig::default(),
            hierarchy_depth: 2,
            seed: 0,
        }
    }
}
