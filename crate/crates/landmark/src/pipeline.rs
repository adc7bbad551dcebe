//! Training and batch extraction over named documents.

use std::collections::BTreeSet;

use landmark_core::runtime::{extract, lrsyn, Synthesis};
use landmark_core::{Annotation, Document, SynthesisConfig};
use rayon::prelude::*;

use crate::bundle::Bundle;
use crate::formats::{AnnotationFile, Prediction};
use crate::report::synthesis_report;

#[derive(Debug, thiserror::Error)]
#[error("field {field:?}: {source}")]
pub struct TrainError {
    pub field: String,
    pub source: landmark_core::Error,
}

pub struct Trained {
    pub bundle: Bundle,
    pub syntheses: Vec<Synthesis>,
    /// One report per field.
    pub reports: Vec<String>,
}

/// Fields named in an annotation file.
pub fn fields_of(annotations: &AnnotationFile) -> Vec<String> {
    let set: BTreeSet<&String> = annotations.values().flat_map(|f| f.keys()).collect();
    set.into_iter().cloned().collect()
}

/// Documents annotated for `field`, in corpus order.
pub fn training_set(
    corpus: &[(String, Document)],
    annotations: &AnnotationFile,
    field: &str,
) -> (Vec<String>, Vec<Document>, Vec<Annotation>) {
    let mut names = Vec::new();
    let mut docs = Vec::new();
    let mut anns = Vec::new();
    for (name, doc) in corpus {
        if let Some(a) = annotations.get(name).and_then(|f| f.get(field)) {
            names.push(name.clone());
            docs.push(doc.clone());
            anns.push(a.clone());
        }
    }
    (names, docs, anns)
}

/// Synthesizes one program per field, fields in parallel.
pub fn train(
    corpus: &[(String, Document)],
    annotations: &AnnotationFile,
    fields: &[String],
    config: &SynthesisConfig,
) -> Result<Trained, TrainError> {
    let results: Vec<Result<(Synthesis, String), TrainError>> = fields
        .par_iter()
        .map(|field| {
            let (names, docs, anns) = training_set(corpus, annotations, field);
            let s = lrsyn(field, &docs, &anns, config).map_err(|source| TrainError { field: field.clone(), source })?;
            let covered: Vec<bool> =
                docs.iter().zip(&anns).map(|(d, a)| extract(d, &s.program) == a.field_value()).collect();
            let report = synthesis_report(&s, &names, &docs, &covered);
            Ok((s, report))
        })
        .collect();
    let mut syntheses = Vec::new();
    let mut reports = Vec::new();
    for r in results {
        let (s, report) = r?;
        syntheses.push(s);
        reports.push(report);
    }
    let bundle = Bundle::new(syntheses.iter().map(|s| s.program.clone()).collect());
    Ok(Trained { bundle, syntheses, reports })
}

/// Runs every program of the bundle on every document, documents in
/// parallel. Records are ordered by document, then field.
pub fn extract_all(bundle: &Bundle, corpus: &[(String, Document)]) -> Vec<Prediction> {
    corpus
        .par_iter()
        .flat_map_iter(|(name, doc)| {
            bundle.programs.iter().map(move |p| Prediction {
                doc: name.clone(),
                field: p.field.clone(),
                value: extract(doc, p),
            })
        })
        .collect()
}
