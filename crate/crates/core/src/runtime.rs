//! Extraction programs: execution, synthesis over a training set, and
//! guard programs that pick which landmark occurrences may be used.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::blueprint::{self, Blueprint, CommonValueIndex};
use crate::cluster::{self, Cluster, Clustering, LandmarkGroup};
use crate::config::{GeometryConfig, SynthesisConfig};
use crate::docmodel::{data_at, AggKind, Annotation, DocKind, Document, Location, NodeId, Region};
pub use crate::docmodel::FieldValue;
use crate::error::{Error, Result};
use crate::region_box::{self, DisjunctProgram, PathExample};
use crate::region_tree::{self, HopsExample, HopsProgram};
use crate::value_extract::{self, TreeValueExample, ValueProgram};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionProgram {
    Hops(HopsProgram),
    Disjunct(DisjunctProgram),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionTuple {
    pub landmark: String,
    pub region_program: RegionProgram,
    pub blueprint: Blueprint,
    /// Common values (trees) or frequent n-grams (boxes) the blueprint was built with.
    pub layout: CommonValueIndex,
    pub value_program: ValueProgram,
    /// Selects the landmark occurrences this tuple may use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<Box<ExtractionProgram>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionProgram {
    pub field: String,
    pub agg: AggKind,
    /// Largest accepted blueprint distance.
    pub threshold: f64,
    pub geometry: GeometryConfig,
    pub tuples: Vec<ExtractionTuple>,
}

fn occurrences(doc: &Document, landmark: &str) -> Vec<usize> {
    match doc {
        Document::Tree(t) => t.locate_ids(landmark),
        Document::Boxes(b) => b.locate_ids(landmark),
    }
}

fn run_region(doc: &Document, occurrence: usize, prog: &RegionProgram, geometry: &GeometryConfig) -> Option<Region> {
    match (doc, prog) {
        (Document::Tree(t), RegionProgram::Hops(h)) => region_tree::exec_hops(t, occurrence, h).map(Region::Tree),
        (Document::Boxes(b), RegionProgram::Disjunct(d)) => d.exec(b, occurrence, geometry).map(Region::Boxes),
        _ => None,
    }
}

fn run_value(doc: &Document, region: &Region, prog: &ValueProgram) -> Option<Vec<String>> {
    match (doc, region, prog) {
        (Document::Tree(t), Region::Tree(r), ValueProgram::Tree { selector, text }) => {
            value_extract::exec_tree_value(t, r, selector, text)
        }
        (Document::Boxes(b), Region::Boxes(r), ValueProgram::Boxes { text, joiner }) => {
            value_extract::exec_box_value(b, r, text, joiner).map(|v| alloc::vec![v])
        }
        _ => None,
    }
}

/// Region of one occurrence if it passes the blueprint gate.
fn gated_region(doc: &Document, occurrence: usize, tuple: &ExtractionTuple, program: &ExtractionProgram) -> Option<Region> {
    let region = run_region(doc, occurrence, &tuple.region_program, &program.geometry)?;
    let bp = blueprint::blueprint_of(&region, doc, &tuple.layout, &program.geometry).ok()?;
    let d = blueprint::delta(&bp, &tuple.blueprint).ok()?;
    (d <= program.threshold).then_some(region)
}

/// Landmark occurrences a tuple may use, after its guard.
fn usable_occurrences(doc: &Document, tuple: &ExtractionTuple) -> Vec<usize> {
    let all = occurrences(doc, &tuple.landmark);
    match &tuple.guard {
        None => all,
        Some(guard) => match extract_nodes(doc, guard) {
            None => Vec::new(),
            Some(keep) => all.into_iter().filter(|o| keep.contains(o)).collect(),
        },
    }
}

/// Values produced by each usable occurrence of one tuple.
pub fn tuple_values(doc: &Document, tuple: &ExtractionTuple, program: &ExtractionProgram) -> Vec<(usize, Vec<String>)> {
    usable_occurrences(doc, tuple)
        .into_iter()
        .filter_map(|o| {
            let region = gated_region(doc, o, tuple, program)?;
            run_value(doc, &region, &tuple.value_program).map(|v| (o, v))
        })
        .collect()
}

/// Nodes selected by a guard program (tree documents only).
pub fn extract_nodes(doc: &Document, program: &ExtractionProgram) -> Option<BTreeSet<NodeId>> {
    let t = doc.as_tree()?;
    for tuple in &program.tuples {
        let ValueProgram::Tree { selector, .. } = &tuple.value_program else { continue };
        let mut nodes = BTreeSet::new();
        for o in usable_occurrences(doc, tuple) {
            if let Some(Region::Tree(r)) = gated_region(doc, o, tuple, program) {
                nodes.extend(selector.select(t, &r).unwrap_or_default());
            }
        }
        if !nodes.is_empty() {
            return Some(nodes);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractTrace {
    pub value: Option<FieldValue>,
    /// Tuple that produced the value.
    pub tuple: Option<usize>,
    /// Every tuple that would produce values on this document.
    pub matching: Vec<usize>,
}

/// Runs the tuples in order; the first tuple producing any value decides
/// the result.
pub fn extract(doc: &Document, program: &ExtractionProgram) -> Option<FieldValue> {
    for tuple in &program.tuples {
        let parts: Vec<String> = tuple_values(doc, tuple, program).into_iter().flat_map(|(_, v)| v).collect();
        if !parts.is_empty() {
            return program.agg.aggregate(parts);
        }
    }
    None
}

/// Like [`extract`], also reporting every tuple that would match.
pub fn extract_traced(doc: &Document, program: &ExtractionProgram) -> ExtractTrace {
    let mut trace = ExtractTrace { value: None, tuple: None, matching: Vec::new() };
    for (i, tuple) in program.tuples.iter().enumerate() {
        let parts: Vec<String> = tuple_values(doc, tuple, program).into_iter().flat_map(|(_, v)| v).collect();
        if parts.is_empty() {
            continue;
        }
        if trace.tuple.is_none() {
            trace.tuple = Some(i);
            trace.value = program.agg.aggregate(parts);
        }
        trace.matching.push(i);
    }
    trace
}

/// Outcome of synthesis: the program plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub program: ExtractionProgram,
    pub clustering: Clustering,
    pub notes: Vec<String>,
}

struct Member<'a> {
    id: usize,
    doc: &'a Document,
    ann: &'a Annotation,
    groups: Vec<LandmarkGroup>,
}

impl Member<'_> {
    fn targets(&self, g: &LandmarkGroup) -> Result<Vec<usize>> {
        g.values.iter().map(|&v| self.doc.order_index(&self.ann.locations[v])).collect()
    }
}

fn layout_for(members: &[Member<'_>], config: &SynthesisConfig) -> Result<CommonValueIndex> {
    let docs: Vec<&Document> = members.iter().map(|m| m.doc).collect();
    cluster::layout_index(&docs, docs.len(), config.weights.max_n)
}

/// Builds the tuples of one cluster around `landmark`; one tuple per
/// distinct training blueprint, most frequent first.
pub fn synthesize_tuples(
    docs: &[Document],
    annotations: &[Annotation],
    cluster: &Cluster,
    landmark: &str,
    config: &SynthesisConfig,
) -> Result<(Vec<ExtractionTuple>, Vec<String>)> {
    let mut notes = Vec::new();
    let members = cluster
        .doc_ids
        .iter()
        .map(|&id| {
            let groups = cluster::landmark_groups(&docs[id], landmark, &annotations[id])
                .map_err(|_| Error::LandmarkNotFound { landmark: landmark.into(), doc: id })?;
            Ok(Member { id, doc: &docs[id], ann: &annotations[id], groups })
        })
        .collect::<Result<Vec<_>>>()?;
    let agg = annotations[cluster.doc_ids[0]].agg.clone();
    let layout = layout_for(&members, config)?;
    let geometry = &config.geometry;

    let (region_program, regions, value_program) = match cluster.kind {
        DocKind::Tree => {
            let mut owned = Vec::new();
            for m in &members {
                for g in &m.groups {
                    owned.push((m.doc.as_tree().expect("tree cluster"), g.occurrence, m.targets(g)?, m, g));
                }
            }
            let examples: Vec<HopsExample<'_>> =
                owned.iter().map(|(t, o, v, _, _)| HopsExample { doc: t, landmark: *o, values: v }).collect();
            let hops = region_tree::learn_region_program(&examples).map_err(|e| match e {
                Error::RegionSynthesis { reason, .. } => Error::RegionSynthesis { doc: members[0].id, reason },
                other => other,
            })?;
            let mut regions = Vec::new();
            let mut value_examples = Vec::new();
            for (t, o, targets, m, g) in &owned {
                let r = region_tree::exec_hops(t, *o, &hops).expect("learned program covers its examples");
                let values: Vec<String> = g.values.iter().map(|&v| m.ann.values[v].clone()).collect();
                value_examples.push(TreeValueExample { doc: t, region: r.clone(), targets: targets.clone(), values });
                regions.push((m.doc, Region::Tree(r)));
            }
            let vp = value_extract::synthesize_tree_value(&value_examples, &config.selectors)
                .map_err(|e| with_doc(e, members[0].id))?;
            (RegionProgram::Hops(hops), regions, vp)
        }
        DocKind::Boxes => {
            let mut owned = Vec::new();
            for m in &members {
                for g in &m.groups {
                    if agg == AggKind::OrderedList && g.values.len() > 1 {
                        return Err(Error::RegionSynthesis {
                            doc: m.id,
                            reason: "box list fields need one location per landmark occurrence".into(),
                        });
                    }
                    owned.push((m, g, m.targets(g)?));
                }
            }
            let examples: Vec<PathExample<'_>> = owned
                .iter()
                .map(|(m, g, t)| PathExample {
                    doc: m.doc.as_boxes().expect("box cluster"),
                    landmark: g.occurrence,
                    values: t.clone(),
                })
                .collect();
            // stop patterns usually sit just outside the region, so profile every box
            let texts: Vec<&str> = members
                .iter()
                .flat_map(|m| m.doc.as_boxes().expect("box cluster").boxes().iter().map(|b| b.text.as_str()))
                .collect();
            let patterns = region_box::profile_patterns(texts);
            let ds = region_box::synthesize_disjunct(&examples, &patterns, geometry, &config.enumeration, config.seed);
            if !ds.covered.iter().any(|c| *c) {
                return Err(Error::RegionSynthesis { doc: members[0].id, reason: "no path program found".into() });
            }
            let missed = ds.covered.iter().filter(|c| !**c).count();
            if missed > 0 {
                notes.push(format!("landmark {landmark:?}: path programs cover {} of {} examples", ds.covered.len() - missed, ds.covered.len()));
            }
            let joiner = agg.separator().to_string();
            let mut regions = Vec::new();
            let mut joined = Vec::new();
            for ((m, g, _), ok) in owned.iter().zip(&ds.covered) {
                if !ok {
                    continue;
                }
                let b = m.doc.as_boxes().expect("box cluster");
                let r = ds.program.exec(b, g.occurrence, geometry).expect("covered example");
                let expected: Vec<&str> = g.values.iter().map(|&v| m.ann.values[v].as_str()).collect();
                joined.push((value_extract::join_boxes(b, &r, &joiner), expected.join(&joiner)));
                regions.push((m.doc, Region::Boxes(r)));
            }
            let pairs: Vec<(&str, &str)> = joined.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let vp = value_extract::synthesize_box_value(&pairs, &joiner).map_err(|e| with_doc(e, members[0].id))?;
            (RegionProgram::Disjunct(ds.program), regions, vp)
        }
    };

    let blueprints = regions
        .iter()
        .map(|(doc, r)| blueprint::blueprint_of(r, doc, &layout, geometry))
        .collect::<Result<Vec<_>>>()?;
    let ranked = blueprint::rank_by_frequency(&blueprints);
    if ranked.len() > 1 {
        notes.push(format!("landmark {landmark:?}: {} distinct region blueprints", ranked.len()));
    }
    let tuples = ranked
        .into_iter()
        .map(|(bp, _)| ExtractionTuple {
            landmark: landmark.to_string(),
            region_program: region_program.clone(),
            blueprint: bp,
            layout: layout.clone(),
            value_program: value_program.clone(),
            guard: None,
        })
        .collect();
    Ok((tuples, notes))
}

fn with_doc(e: Error, doc: usize) -> Error {
    match e {
        Error::ValueSynthesis { reason, .. } => Error::ValueSynthesis { example: doc, reason },
        other => other,
    }
}

fn program_of(field: &str, agg: &AggKind, tuples: Vec<ExtractionTuple>, config: &SynthesisConfig) -> ExtractionProgram {
    ExtractionProgram {
        field: field.to_string(),
        agg: agg.clone(),
        threshold: config.blueprint_threshold,
        geometry: config.geometry.clone(),
        tuples,
    }
}

/// Documents of `ids` on which `program` does not reproduce the annotation.
fn unsound(docs: &[Document], annotations: &[Annotation], ids: &[usize], program: &ExtractionProgram) -> Vec<usize> {
    ids.iter().copied().filter(|&i| extract(&docs[i], program) != annotations[i].field_value()).collect()
}

/// Adds a guard when some landmark occurrences yield values outside the
/// annotation. Returns `None` when no guard is needed or none can be built.
pub fn hierarchical_guard(
    docs: &[Document],
    annotations: &[Annotation],
    cluster: &Cluster,
    program: &ExtractionProgram,
    config: &SynthesisConfig,
    depth: usize,
) -> Result<Option<ExtractionProgram>> {
    if depth == 0 || cluster.kind != DocKind::Tree {
        return Ok(None);
    }
    let mut guard_docs = Vec::new();
    let mut guard_anns = Vec::new();
    let mut spurious = false;
    for &i in &cluster.doc_ids {
        let doc = &docs[i];
        let gold: BTreeSet<&str> = annotations[i].values.iter().map(String::as_str).collect();
        let Some(tuple) = program.tuples.iter().find(|t| !tuple_values(doc, t, program).is_empty()) else {
            return Ok(None);
        };
        let mut good = Vec::new();
        for (o, vals) in tuple_values(doc, tuple, program) {
            if vals.iter().all(|v| gold.contains(v.as_str())) {
                good.push(o);
            } else {
                spurious = true;
            }
        }
        if good.is_empty() {
            return Ok(None);
        }
        let locations: Vec<Location> = good.iter().map(|&o| doc.location_of(o)).collect();
        let values = locations.iter().map(|l| data_at(doc, l).map(str::to_string)).collect::<Result<Vec<_>>>()?;
        guard_docs.push(doc.clone());
        guard_anns.push(Annotation { locations, agg: AggKind::OrderedList, values });
    }
    if !spurious {
        return Ok(None);
    }
    let inner = lrsyn_depth(&format!("{}#guard", program.field), &guard_docs, &guard_anns, config, depth - 1)?;
    Ok(Some(inner.program))
}

/// Synthesizes an extraction program for one field. `annotations[i]`
/// annotates `docs[i]`; all share one aggregation kind.
pub fn lrsyn(field: &str, docs: &[Document], annotations: &[Annotation], config: &SynthesisConfig) -> Result<Synthesis> {
    lrsyn_depth(field, docs, annotations, config, config.hierarchy_depth)
}

fn lrsyn_depth(
    field: &str,
    docs: &[Document],
    annotations: &[Annotation],
    config: &SynthesisConfig,
    depth: usize,
) -> Result<Synthesis> {
    if docs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if docs.len() != annotations.len() {
        return Err(Error::InvalidAnnotation("one annotation per document expected".into()));
    }
    for (d, a) in docs.iter().zip(annotations) {
        a.validate(d)?;
    }
    let agg = annotations[0].agg.clone();
    if annotations.iter().any(|a| a.agg != agg) {
        return Err(Error::InvalidAnnotation("aggregation kinds differ between documents".into()));
    }
    let clustering = cluster::infer_landmarks_and_cluster(docs, annotations, config)?;
    let mut order: Vec<usize> = (0..clustering.clusters.len()).collect();
    order.sort_by_key(|&i| (core::cmp::Reverse(clustering.clusters[i].cluster.doc_ids.len()), i));

    let mut notes = Vec::new();
    let mut tuples = Vec::new();
    for ci in order {
        let cl = &clustering.clusters[ci];
        let ids = &cl.cluster.doc_ids;
        if cl.candidates.is_empty() {
            notes.push(format!("cluster {ids:?}: no landmark shared by all documents, skipped"));
            continue;
        }
        let mut fallback: Option<(Vec<ExtractionTuple>, Vec<String>)> = None;
        let mut chosen = None;
        for cand in &cl.candidates {
            let (cand_tuples, cand_notes) = match synthesize_tuples(docs, annotations, &cl.cluster, &cand.ngram, config) {
                Ok(r) => r,
                Err(e) => {
                    notes.push(format!("cluster {ids:?}: landmark {:?} failed: {e}", cand.ngram));
                    continue;
                }
            };
            let mut prog = program_of(field, &agg, cand_tuples, config);
            if unsound(docs, annotations, ids, &prog).is_empty() {
                chosen = Some((prog.tuples, cand_notes));
                break;
            }
            if let Some(guard) = hierarchical_guard(docs, annotations, &cl.cluster, &prog, config, depth)? {
                let guarded: Vec<ExtractionTuple> = prog
                    .tuples
                    .iter()
                    .cloned()
                    .map(|mut t| {
                        t.guard = Some(Box::new(guard.clone()));
                        t
                    })
                    .collect();
                let gp = program_of(field, &agg, guarded, config);
                if unsound(docs, annotations, ids, &gp).is_empty() {
                    let mut n = cand_notes.clone();
                    n.push(format!("landmark {:?}: guarded by an outer landmark program", cand.ngram));
                    chosen = Some((gp.tuples, n));
                    break;
                }
            }
            if fallback.is_none() {
                let bad = unsound(docs, annotations, ids, &prog);
                let mut n = cand_notes;
                n.push(format!("landmark {:?}: training documents {bad:?} not reproduced", cand.ngram));
                fallback = Some((core::mem::take(&mut prog.tuples), n));
            }
        }
        match chosen.or(fallback) {
            Some((t, n)) => {
                notes.extend(n.into_iter().map(|n| format!("cluster {ids:?}: {n}")));
                tuples.extend(t);
            }
            None => notes.push(format!("cluster {ids:?}: synthesis failed for every candidate, skipped")),
        }
    }
    if tuples.is_empty() {
        return Err(Error::NoTuples);
    }
    let program = program_of(field, &agg, tuples, config);
    for (i, doc) in docs.iter().enumerate() {
        let trace = extract_traced(doc, &program);
        if trace.matching.len() > 1 {
            notes.push(format!("training document {i}: tuples {:?} all match", trace.matching));
        }
    }
    Ok(Synthesis { program, clustering, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{TreeDocument, TreeNode};
    use alloc::vec;

    fn flight(day: &str, dep: &str) -> Document {
        Document::Tree(TreeDocument::new(
            TreeNode::new("body").child(TreeNode::leaf("h1", "Itinerary")).child(
                TreeNode::new("table").child(
                    TreeNode::new("tr")
                        .child(TreeNode::leaf("td", "Depart:"))
                        .child(TreeNode::leaf("td", format!("{day} {dep}"))),
                ),
            ),
        ))
    }

    fn ann(doc: &Document, value: &str) -> Annotation {
        let t = doc.as_tree().unwrap();
        Annotation::single(Location::Tree(t.path(t.locate_ids(value)[0])), value)
    }

    #[test]
    fn depart_tuple() {
        let docs = vec![flight("Friday, Apr 3", "8:18 PM"), flight("Monday, May 11", "6:02 AM"), flight("Sunday, Jun 7", "11:45 PM")];
        let anns: Vec<Annotation> = docs.iter().zip(["8:18 PM", "6:02 AM", "11:45 PM"]).map(|(d, v)| ann(d, v)).collect();
        let s = lrsyn("depart", &docs, &anns, &SynthesisConfig::default()).unwrap();
        assert_eq!(s.program.tuples.len(), 1);
        let t = &s.program.tuples[0];
        assert_eq!(t.landmark, "Depart:");
        assert_eq!(t.region_program, RegionProgram::Hops(HopsProgram::new(0, 0, 1)));
        let Blueprint::Tree(bp) = &t.blueprint else { panic!() };
        assert_eq!(bp.paths.iter().map(String::as_str).collect::<Vec<_>>(), ["/td"]);
        for (d, a) in docs.iter().zip(&anns) {
            assert_eq!(extract(d, &s.program), a.field_value());
        }
    }

    #[test]
    fn empty_training_set() {
        assert_eq!(lrsyn("f", &[], &[], &SynthesisConfig::default()).unwrap_err(), Error::EmptyTrainingSet);
    }
}
