//! Document, annotation and prediction files.
//!
//! * Tree documents: normalized JSON (`{"tag", "attributes", "ownText",
//!   "children"}`) or HTML.
//! * Box documents: a JSON array of `{"text", "x", "y", "w", "h"}` records
//!   (or an object with a `boxes` array).
//! * Annotations: `{doc name: {field: {"locations", "agg", "values"}}}`.
//! * Predictions: one JSON record per line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use landmark_core::{Annotation, BoxDocument, Document, FieldValue, TextBox, TreeDocument, TreeNode};
use serde::{Deserialize, Serialize};

use crate::html::{parse_html, HtmlError};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Html { path: PathBuf, source: HtmlError },
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: landmark_core::Error },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

/// Annotations of one document, by field.
pub type DocAnnotations = BTreeMap<String, Annotation>;
/// Annotations of a corpus, by document name.
pub type AnnotationFile = BTreeMap<String, DocAnnotations>;

/// Extensions recognized as documents.
pub const TREE_JSON: &str = ".tree.json";
pub const BOXES_JSON: &str = ".boxes.json";

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> FormatError + '_ {
    move |source| FormatError::Io { path: path.to_path_buf(), source }
}

fn json(path: &Path) -> impl FnOnce(serde_json::Error) -> FormatError + '_ {
    move |source| FormatError::Json { path: path.to_path_buf(), source }
}

pub fn parse_tree(src: &str) -> Result<TreeDocument, String> {
    let trimmed = src.trim_start();
    if trimmed.starts_with('{') {
        let node: TreeNode = serde_json::from_str(src).map_err(|e| e.to_string())?;
        Ok(TreeDocument::new(node))
    } else {
        parse_html(src).map(TreeDocument::new).map_err(|e| e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BoxFile {
    List(Vec<TextBox>),
    Object { boxes: Vec<TextBox> },
}

pub fn parse_boxes(src: &str) -> Result<BoxDocument, String> {
    let boxes = match serde_json::from_str::<BoxFile>(src).map_err(|e| e.to_string())? {
        BoxFile::List(b) | BoxFile::Object { boxes: b } => b,
    };
    BoxDocument::new(boxes).map_err(|e| e.to_string())
}

/// Reads one document; the kind follows from the file name.
pub fn read_document(path: &Path) -> Result<Document, FormatError> {
    let src = fs::read_to_string(path).map_err(io(path))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    if name.ends_with(BOXES_JSON) {
        let boxes = match serde_json::from_str::<BoxFile>(&src).map_err(json(path))? {
            BoxFile::List(b) | BoxFile::Object { boxes: b } => b,
        };
        let doc = BoxDocument::new(boxes).map_err(|source| FormatError::Document { path: path.into(), source })?;
        return Ok(Document::Boxes(doc));
    }
    if name.ends_with(TREE_JSON) {
        let node: TreeNode = serde_json::from_str(&src).map_err(json(path))?;
        return Ok(Document::Tree(TreeDocument::new(node)));
    }
    if name.ends_with(".html") || name.ends_with(".htm") {
        let node = parse_html(&src).map_err(|source| FormatError::Html { path: path.into(), source })?;
        return Ok(Document::Tree(TreeDocument::new(node)));
    }
    Err(FormatError::Invalid { path: path.into(), message: "unknown document extension".into() })
}

/// Document name: the file name without its document extension.
pub fn document_name(path: &Path) -> Option<String> {
    let name = path.file_name()?.to_str()?;
    [TREE_JSON, BOXES_JSON, ".html", ".htm"].iter().find_map(|ext| name.strip_suffix(ext).map(str::to_string))
}

/// Every document of a directory, sorted by name.
pub fn read_corpus(dir: &Path) -> Result<Vec<(String, Document)>, FormatError> {
    let mut paths: Vec<(String, PathBuf)> = fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter_map(|p| document_name(&p).map(|n| (n, p)))
        .collect();
    paths.sort();
    paths.into_iter().map(|(n, p)| read_document(&p).map(|d| (n, d))).collect()
}

pub fn tree_json(doc: &TreeDocument) -> String {
    let mut s = serde_json::to_string_pretty(&doc.to_tree()).expect("tree serializes");
    s.push('\n');
    s
}

pub fn boxes_json(doc: &BoxDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc.boxes()).expect("boxes serialize");
    s.push('\n');
    s
}

/// Writes a document as `<name>.tree.json` or `<name>.boxes.json`.
pub fn write_document(dir: &Path, name: &str, doc: &Document) -> Result<PathBuf, FormatError> {
    let (path, body) = match doc {
        Document::Tree(t) => (dir.join(format!("{name}{TREE_JSON}")), tree_json(t)),
        Document::Boxes(b) => (dir.join(format!("{name}{BOXES_JSON}")), boxes_json(b)),
    };
    fs::write(&path, body).map_err(io(&path))?;
    Ok(path)
}

pub fn read_annotations(path: &Path) -> Result<AnnotationFile, FormatError> {
    let src = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&src).map_err(json(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut s = serde_json::to_string_pretty(value).map_err(json(path))?;
    s.push('\n');
    fs::write(path, s).map_err(io(path))
}

/// One extraction result; `value: null` is an abstention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub doc: String,
    pub field: String,
    pub value: Option<FieldValue>,
}

pub fn predictions_jsonl(preds: &[Prediction]) -> String {
    preds.iter().map(|p| serde_json::to_string(p).expect("prediction serializes") + "\n").collect()
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>, FormatError> {
    let src = fs::read_to_string(path).map_err(io(path))?;
    src.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(json(path)))
        .collect()
}
