//! Precision, recall and F1 of predictions against gold annotations.
//! A null prediction abstains: it lowers recall but never precision.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formats::{AnnotationFile, Prediction};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub correct: usize,
    pub incorrect: usize,
    pub bottom: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(flatten)]
    pub counts: Counts,
    /// Documents whose gold annotation defines the field.
    pub defined: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fields: BTreeMap<String, FieldReport>,
    pub documents: BTreeMap<String, Counts>,
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn evaluate(predictions: &[Prediction], gold: &AnnotationFile) -> EvalReport {
    let mut report = EvalReport::default();
    for (doc, fields) in gold {
        for field in fields.keys() {
            report.fields.entry(field.clone()).or_default().defined += 1;
        }
        report.documents.entry(doc.clone()).or_default();
    }
    for p in predictions {
        let expected = gold.get(&p.doc).and_then(|f| f.get(&p.field)).and_then(|a| a.field_value());
        let field = report.fields.entry(p.field.clone()).or_default();
        let doc = report.documents.entry(p.doc.clone()).or_default();
        for c in [&mut field.counts, doc] {
            match &p.value {
                None => c.bottom += 1,
                Some(v) if Some(v) == expected.as_ref() => c.correct += 1,
                Some(_) => c.incorrect += 1,
            }
        }
    }
    for r in report.fields.values_mut() {
        let answered = r.counts.correct + r.counts.incorrect;
        r.precision = if answered == 0 { 0.0 } else { r.counts.correct as f64 / answered as f64 };
        r.recall = if r.defined == 0 { 0.0 } else { r.counts.correct as f64 / r.defined as f64 };
        r.f1 = f1(r.precision, r.recall);
    }
    report
}
