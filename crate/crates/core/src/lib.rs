//! Landmark-anchored extraction of fields from semi-structured documents.
//!
//! Documents are either ordered labeled trees (normalized HTML) or lists of
//! geometric text boxes (OCR output). Training documents carry per-field
//! annotations. Synthesis clusters the documents by the local structure
//! around a *landmark* phrase, learns a region program that grows a region
//! of interest from the landmark, records a blueprint of that region, and
//! learns a value program that pulls the field out of the region. At
//! extraction time a region is only used when its blueprint matches.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; file formats and the command line live in a companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod blueprint;
pub mod cluster;
pub mod config;
pub mod docmodel;
pub mod error;
pub mod pattern;
pub mod region_box;
pub mod region_tree;
pub mod runtime;
pub mod value_extract;

mod geometry;

pub use blueprint::{Blueprint, BoxBlueprint, BoxSummary, CommonValueIndex, Neighbor, TreeBlueprint};
pub use cluster::{Cluster, ClusterLandmark, LandmarkCandidate, ScoringWeights};
pub use config::SynthesisConfig;
pub use docmodel::{
    AggKind, Annotation, BoxDocument, DocKind, Document, Location, NodeId, Region, TextBox, TreeDocument,
    TreeNode, TreePath, TreeRegion,
};
pub use error::{Error, Result};
pub use pattern::PatternToken;
pub use region_box::{Direction, DisjunctProgram, Motion, PathProgram};
pub use region_tree::HopsProgram;
pub use runtime::{ExtractionProgram, ExtractionTuple, FieldValue, RegionProgram, Synthesis};
pub use value_extract::{NodeSelector, SelectorAtom, TextProgram, ValueProgram};
