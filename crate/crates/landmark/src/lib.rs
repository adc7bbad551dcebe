//! File formats, program bundles, evaluation, corpus generation and the
//! pipeline used by the `landmark` command line tool.

pub mod bundle;
pub mod corpus;
pub mod eval;
pub mod formats;
pub mod html;
pub mod pipeline;
pub mod report;
pub mod settings;

pub use bundle::{Bundle, BundleError};
pub use eval::{evaluate, EvalReport};
pub use formats::{AnnotationFile, Prediction};
