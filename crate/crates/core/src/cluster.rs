//! Joint clustering and landmark inference.
//!
//! Documents are first grouped by exact whole-document blueprint. Each
//! group gets a ranked list of landmark candidates; groups whose
//! region-of-interest blueprints agree around a shared candidate are then
//! merged, and every final cluster is paired with its best candidate.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::blueprint::{self, Blueprint, CommonValueIndex};
use crate::config::SynthesisConfig;
use crate::docmodel::{assign_to_nearest, tree_enclosing, Annotation, DocKind, Document};
use crate::error::{Error, Result};
use crate::geometry::{center, distance, Rect};

const STOP_WORDS: &[&str] = &[
    "a", "an", "the", "and", "or", "of", "to", "in", "on", "at", "for", "with", "by", "from", "as", "is", "are",
    "was", "were", "be", "been", "it", "its", "this", "that", "these", "those", "i", "you", "he", "she", "we",
    "they", "me", "him", "her", "us", "them", "my", "your", "his", "our", "their",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringWeights {
    pub w_distance: f64,
    pub w_region_size: f64,
    pub stop_words: BTreeSet<String>,
    /// Longest landmark n-gram, in tokens.
    pub max_n: usize,
    /// Candidates kept per cluster.
    pub top_k: usize,
}

impl Default for ScoringWeights {
    fn default() -> Self {
        ScoringWeights {
            w_distance: 1.0,
            w_region_size: 1.0,
            stop_words: STOP_WORDS.iter().map(|w| w.to_string()).collect(),
            max_n: 5,
            top_k: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cluster {
    /// Indices into the training set, ascending.
    pub doc_ids: Vec<usize>,
    pub kind: DocKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkCandidate {
    pub ngram: String,
    pub score: f64,
    /// Mean distance feature over the cluster's documents.
    pub distance: f64,
    /// Mean region-size feature over the cluster's documents.
    pub region_size: f64,
    /// Mean number of occurrences per document.
    pub occurrences: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLandmark {
    pub cluster: Cluster,
    /// Ranked candidates recomputed on the final cluster; may be empty.
    pub candidates: Vec<LandmarkCandidate>,
}

impl ClusterLandmark {
    pub fn landmark(&self) -> Option<&str> {
        self.candidates.first().map(|c| c.ngram.as_str())
    }
}

/// Per-document ROI blueprints keyed by candidate n-gram.
pub type RoiMap = BTreeMap<usize, Vec<(String, Blueprint)>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub initial: Vec<Cluster>,
    pub roi_blueprints: RoiMap,
    pub clusters: Vec<ClusterLandmark>,
}

/// One landmark occurrence with the annotated locations nearest to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkGroup {
    /// Order index (pre-order id or box index) of the occurrence.
    pub occurrence: usize,
    /// Indices into the annotation's locations.
    pub values: Vec<usize>,
}

/// Groups the annotated locations of `doc` by nearest landmark occurrence;
/// occurrences without locations are dropped.
pub fn landmark_groups(doc: &Document, landmark: &str, ann: &Annotation) -> Result<Vec<LandmarkGroup>> {
    let occurrences = match doc {
        Document::Tree(t) => t.locate_ids(landmark),
        Document::Boxes(b) => b.locate_ids(landmark),
    };
    if occurrences.is_empty() {
        return Err(Error::LandmarkNotFound { landmark: landmark.into(), doc: 0 });
    }
    let targets = ann.locations.iter().map(|l| doc.order_index(l)).collect::<Result<Vec<_>>>()?;
    let groups = assign_to_nearest(&occurrences, &targets);
    Ok(occurrences
        .into_iter()
        .zip(groups)
        .filter(|(_, g)| !g.is_empty())
        .map(|(occurrence, values)| LandmarkGroup { occurrence, values })
        .collect())
}

fn check_kinds(docs: &[Document]) -> Result<DocKind> {
    let kind = docs.first().ok_or(Error::EmptyTrainingSet)?.kind();
    if let Some(d) = docs.iter().find(|d| d.kind() != kind) {
        return Err(Error::KindMismatch { expected: kind, found: d.kind() });
    }
    Ok(kind)
}

/// Common-value index over a set of documents; tree values need support in
/// at least `min_support` documents.
pub fn layout_index(docs: &[&Document], min_support: usize, max_n: usize) -> Result<CommonValueIndex> {
    let kind = docs.first().ok_or(Error::EmptyTrainingSet)?.kind();
    match kind {
        DocKind::Tree => {
            let trees = docs
                .iter()
                .map(|d| d.as_tree().ok_or(Error::KindMismatch { expected: kind, found: d.kind() }))
                .collect::<Result<Vec<_>>>()?;
            Ok(blueprint::common_values_with_support(&trees, min_support))
        }
        DocKind::Boxes => {
            let boxes = docs
                .iter()
                .map(|d| d.as_boxes().ok_or(Error::KindMismatch { expected: kind, found: d.kind() }))
                .collect::<Result<Vec<_>>>()?;
            Ok(blueprint::frequent_ngrams(&boxes, max_n))
        }
    }
}

/// Index used for corpus-wide comparisons: values shared by at least two
/// documents (all of them when there is just one).
fn corpus_index(docs: &[Document], config: &SynthesisConfig) -> Result<CommonValueIndex> {
    let refs: Vec<&Document> = docs.iter().collect();
    layout_index(&refs, docs.len().min(2), config.weights.max_n)
}

/// Groups documents with identical whole-document blueprints, ordered by
/// smallest member.
pub fn initial_clusters(docs: &[Document], config: &SynthesisConfig) -> Result<Vec<Cluster>> {
    let kind = check_kinds(docs)?;
    let index = corpus_index(docs, config)?;
    let mut groups: Vec<(Blueprint, Vec<usize>)> = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let bp = blueprint::blueprint_document(doc, &index, &config.geometry)?;
        match groups.iter_mut().find(|(b, _)| *b == bp) {
            Some((_, ids)) => ids.push(i),
            None => groups.push((bp, alloc::vec![i])),
        }
    }
    Ok(groups.into_iter().map(|(_, doc_ids)| Cluster { doc_ids, kind }).collect())
}

fn is_punctuation(token: &str) -> bool {
    token.chars().all(|c| !c.is_alphanumeric())
}

fn ngram_allowed(tokens: &[&str], weights: &ScoringWeights) -> bool {
    let bad = |t: &str| {
        is_punctuation(t) || {
            let core = t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
            weights.stop_words.contains(&core)
        }
    };
    !(bad(tokens[0]) || bad(tokens[tokens.len() - 1]))
}

fn doc_texts(doc: &Document) -> Vec<&str> {
    match doc {
        Document::Tree(t) => (0..t.len()).map(|id| t.own_text(id)).collect(),
        Document::Boxes(b) => b.boxes().iter().map(|b| b.text.as_str()).collect(),
    }
}

fn locate_ids(doc: &Document, s: &str) -> Vec<usize> {
    match doc {
        Document::Tree(t) => t.locate_ids(s),
        Document::Boxes(b) => b.locate_ids(s),
    }
}

/// Distance and size features of one landmark group.
fn group_features(doc: &Document, occurrence: usize, values: &[usize]) -> (f64, f64) {
    match doc {
        Document::Tree(t) => {
            let dist: f64 = values
                .iter()
                .map(|&v| {
                    let lca = t.lca(occurrence, v);
                    let path_nodes = t.depth(occurrence) + t.depth(v) - 2 * t.depth(lca) + 1;
                    (path_nodes + occurrence.abs_diff(v)) as f64
                })
                .sum::<f64>()
                / values.len() as f64;
            let mut ids = values.to_vec();
            ids.push(occurrence);
            let region = tree_enclosing(t, &ids);
            let size = t.region_range(&region).map(|r| r.len()).unwrap_or(t.len());
            (dist, size as f64)
        }
        Document::Boxes(b) => {
            let h = match b.median_height() {
                h if h > 0.0 => h,
                _ => 1.0,
            };
            let o = center(&b.boxes()[occurrence]);
            let dist: f64 =
                values.iter().map(|&v| distance(o, center(&b.boxes()[v]))).sum::<f64>() / values.len() as f64;
            let rect = values
                .iter()
                .map(|&v| Rect::of(&b.boxes()[v]))
                .fold(Rect::of(&b.boxes()[occurrence]), Rect::union);
            (dist / h, rect.area() / (h * h))
        }
    }
}

fn doc_features(doc: &Document, landmark: &str, ann: &Annotation) -> Result<(f64, f64)> {
    let groups = landmark_groups(doc, landmark, ann)?;
    let targets = ann.locations.iter().map(|l| doc.order_index(l)).collect::<Result<Vec<_>>>()?;
    let (mut d, mut s) = (0.0, 0.0);
    for g in &groups {
        let values: Vec<usize> = g.values.iter().map(|&i| targets[i]).collect();
        let (gd, gs) = group_features(doc, g.occurrence, &values);
        d += gd;
        s += gs;
    }
    let n = groups.len().max(1) as f64;
    Ok((d / n, s / n))
}

/// Ranked landmark candidates of a cluster, best first, at most `top_k`.
pub fn landmark_candidates(
    docs: &[Document],
    annotations: &[Annotation],
    cluster: &Cluster,
    weights: &ScoringWeights,
) -> Result<Vec<LandmarkCandidate>> {
    let members: Vec<(&Document, &Annotation)> =
        cluster.doc_ids.iter().map(|&i| (&docs[i], &annotations[i])).collect();
    let Some(&(first, _)) = members.first() else { return Ok(Vec::new()) };

    let mut ngrams: BTreeSet<String> = BTreeSet::new();
    for text in doc_texts(first) {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        for i in 0..tokens.len() {
            for n in 1..=weights.max_n.min(tokens.len() - i) {
                if ngram_allowed(&tokens[i..i + n], weights) {
                    ngrams.insert(tokens[i..i + n].join(" "));
                }
            }
        }
    }

    let values: Vec<&str> = members
        .iter()
        .flat_map(|(_, a)| a.values.iter().map(String::as_str))
        .filter(|v| !v.is_empty())
        .collect();
    // located occurrences per document, used to collapse equivalent candidates
    let mut by_locations: BTreeMap<Vec<Vec<usize>>, String> = BTreeMap::new();
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for g in ngrams {
        if values.iter().any(|v| v.contains(g.as_str()) || g.contains(v)) {
            continue;
        }
        let located: Vec<Vec<usize>> = members.iter().map(|(d, _)| locate_ids(d, &g)).collect();
        if located.iter().any(Vec::is_empty) {
            continue;
        }
        let total: usize = located.iter().map(Vec::len).sum();
        counts.insert(g.clone(), total as f64 / members.len() as f64);
        let key = |s: &str| (s.split_whitespace().count(), s.len(), core::cmp::Reverse(s.to_string()));
        match by_locations.get_mut(&located) {
            Some(best) if key(&g) > key(best) => *best = g,
            Some(_) => {}
            None => {
                by_locations.insert(located, g);
            }
        }
    }

    let mut out = Vec::new();
    for g in by_locations.into_values() {
        let (mut d, mut s) = (0.0, 0.0);
        for (doc, ann) in &members {
            let (dd, ds) = doc_features(doc, &g, ann)?;
            d += dd;
            s += ds;
        }
        let n = members.len() as f64;
        let (distance, region_size) = (d / n, s / n);
        let score = 1.0 / (1.0 + weights.w_distance * distance + weights.w_region_size * region_size);
        let occurrences = counts[&g];
        out.push(LandmarkCandidate { ngram: g, score, distance, region_size, occurrences });
    }
    // equal scores: fewer occurrences, then more tokens, then lexicographic
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.occurrences.total_cmp(&b.occurrences))
            .then_with(|| b.ngram.split_whitespace().count().cmp(&a.ngram.split_whitespace().count()))
            .then_with(|| a.ngram.cmp(&b.ngram))
    });
    out.truncate(weights.top_k);
    Ok(out)
}

/// ROI blueprint per document and candidate, under `index`.
pub fn roi_blueprints(
    docs: &[Document],
    annotations: &[Annotation],
    cluster: &Cluster,
    candidates: &[LandmarkCandidate],
    index: &CommonValueIndex,
    config: &SynthesisConfig,
) -> Result<RoiMap> {
    let mut out = RoiMap::new();
    for &i in &cluster.doc_ids {
        let (doc, ann) = (&docs[i], &annotations[i]);
        let mut entries = Vec::new();
        for c in candidates {
            let groups = landmark_groups(doc, &c.ngram, ann)?;
            let g = &groups[0];
            let mut locs: Vec<_> = g.values.iter().map(|&v| ann.locations[v].clone()).collect();
            locs.push(doc.location_of(g.occurrence));
            let region = crate::docmodel::enc_rgn(&locs, doc)?;
            entries.push((c.ngram.clone(), blueprint::blueprint_of(&region, doc, index, &config.geometry)?));
        }
        out.insert(i, entries);
    }
    Ok(out)
}

/// Document distance: smallest blueprint distance over shared candidates,
/// `None` when no candidate is shared.
fn doc_distance(a: &[(String, Blueprint)], b: &[(String, Blueprint)]) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for (m1, b1) in a {
        for (m2, b2) in b {
            if m1 == m2 {
                let d = blueprint::delta(b1, b2)?;
                best = Some(best.map_or(d, |x: f64| x.min(d)));
            }
        }
    }
    Ok(best)
}

/// Average-linkage merging: the closest pair at or below `threshold` is
/// merged until no pair qualifies.
pub fn merge_clusters(mut clusters: Vec<Cluster>, roi: &RoiMap, threshold: f64) -> Result<Vec<Cluster>> {
    let empty = Vec::new();
    let mut pair_cache: BTreeMap<(usize, usize), Option<f64>> = BTreeMap::new();
    let mut dist = |a: usize, b: usize| -> Result<Option<f64>> {
        let key = (a.min(b), a.max(b));
        if let Some(d) = pair_cache.get(&key) {
            return Ok(*d);
        }
        let d = doc_distance(roi.get(&a).unwrap_or(&empty), roi.get(&b).unwrap_or(&empty))?;
        pair_cache.insert(key, d);
        Ok(d)
    };
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let mut total = 0.0;
                let mut finite = true;
                for &a in &clusters[i].doc_ids {
                    for &b in &clusters[j].doc_ids {
                        match dist(a, b)? {
                            Some(d) => total += d,
                            None => finite = false,
                        }
                    }
                }
                if !finite {
                    continue;
                }
                let avg = total / (clusters[i].doc_ids.len() * clusters[j].doc_ids.len()) as f64;
                if avg <= threshold && best.is_none_or(|(b, _, _)| avg < b) {
                    best = Some((avg, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let absorbed = clusters.remove(j);
        clusters[i].doc_ids.extend(absorbed.doc_ids);
        clusters[i].doc_ids.sort_unstable();
    }
    clusters.sort_by_key(|c| c.doc_ids[0]);
    Ok(clusters)
}

/// Full clustering pipeline. `annotations[i]` annotates `docs[i]`.
pub fn infer_landmarks_and_cluster(
    docs: &[Document],
    annotations: &[Annotation],
    config: &SynthesisConfig,
) -> Result<Clustering> {
    if docs.len() != annotations.len() {
        return Err(Error::InvalidAnnotation("one annotation per document expected".into()));
    }
    let initial = initial_clusters(docs, config)?;
    let index = corpus_index(docs, config)?;
    let mut roi = RoiMap::new();
    for c in &initial {
        let candidates = landmark_candidates(docs, annotations, c, &config.weights)?;
        roi.append(&mut roi_blueprints(docs, annotations, c, &candidates, &index, config)?);
    }
    let merged = merge_clusters(initial.clone(), &roi, config.merge_threshold)?;
    let clusters = merged
        .into_iter()
        .map(|cluster| {
            let candidates = landmark_candidates(docs, annotations, &cluster, &config.weights)?;
            Ok(ClusterLandmark { cluster, candidates })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Clustering { initial, roi_blueprints: roi, clusters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{Location, TreeDocument, TreeNode, TreePath};
    use alloc::format;
    use alloc::vec;

    fn leg(day: &str, dep: &str, arr: &str) -> TreeNode {
        TreeNode::new("table")
            .child(TreeNode::new("tr").child(TreeNode::leaf("td", "Depart:")).child(TreeNode::leaf("td", format!("{day} {dep}"))))
            .child(TreeNode::new("tr").child(TreeNode::leaf("td", "Arrive:")).child(TreeNode::leaf("td", format!("{day} {arr}"))))
    }

    fn itinerary(day: &str, dep: &str, arr: &str, extra: bool) -> Document {
        let mut body = TreeNode::new("body").child(TreeNode::leaf("h1", "Your trip")).child(leg(day, dep, arr));
        if extra {
            body = body.child(TreeNode::new("table").child(TreeNode::new("tr").child(TreeNode::leaf("th", "Depart:"))));
        }
        Document::Tree(TreeDocument::new(body))
    }

    fn departure(doc: &Document, dep: &str) -> Annotation {
        let t = doc.as_tree().unwrap();
        let id = t.locate_ids(dep)[0];
        Annotation::single(Location::Tree(t.path(id)), dep)
    }

    #[test]
    fn same_structure_one_cluster() {
        let docs = vec![itinerary("Fri, Apr 3", "8:18 PM", "9:40 PM", false), itinerary("Mon, May 11", "6:02 AM", "7:15 AM", false)];
        let c = initial_clusters(&docs, &SynthesisConfig::default()).unwrap();
        assert_eq!(c, vec![Cluster { doc_ids: vec![0, 1], kind: DocKind::Tree }]);
    }

    #[test]
    fn extra_section_splits_initial_clusters() {
        let docs = vec![itinerary("Fri, Apr 3", "8:18 PM", "9:40 PM", false), itinerary("Mon, May 11", "6:02 AM", "7:15 AM", true)];
        let c = initial_clusters(&docs, &SynthesisConfig::default()).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn mixed_kinds_rejected() {
        let b = crate::docmodel::BoxDocument::new(vec![crate::docmodel::TextBox::new("x", 0.0, 0.0, 1.0, 1.0)]).unwrap();
        let docs = vec![itinerary("Fri, Apr 3", "8:18 PM", "9:40 PM", false), Document::Boxes(b)];
        assert!(matches!(initial_clusters(&docs, &SynthesisConfig::default()), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn depart_outranks_arrive() {
        let docs = vec![itinerary("Fri, Apr 3", "8:18 PM", "9:40 PM", false), itinerary("Mon, May 11", "6:02 AM", "7:15 AM", false)];
        let anns = vec![departure(&docs[0], "8:18 PM"), departure(&docs[1], "6:02 AM")];
        let c = Cluster { doc_ids: vec![0, 1], kind: DocKind::Tree };
        let ranked = landmark_candidates(&docs, &anns, &c, &ScoringWeights::default()).unwrap();
        let pos = |s: &str| ranked.iter().position(|c| c.ngram == s).unwrap();
        assert_eq!(ranked[0].ngram, "Depart:");
        assert!(pos("Depart:") < pos("Arrive:"));
        assert!(ranked.iter().all(|c| c.ngram != "8:18 PM"));
    }

    #[test]
    fn symmetric_candidates_tie_lexicographically() {
        // value cell between two label cells at equal distance
        let doc = Document::Tree(TreeDocument::new(
            TreeNode::new("tr").child(TreeNode::leaf("td", "Left")).child(TreeNode::leaf("td", "42")).child(TreeNode::leaf("td", "Right")),
        ));
        let ann = Annotation::single(Location::Tree(TreePath(vec![1])), "42");
        let c = Cluster { doc_ids: vec![0], kind: DocKind::Tree };
        let docs = vec![doc];
        let ranked = landmark_candidates(&docs, &[ann], &c, &ScoringWeights::default()).unwrap();
        assert_eq!(ranked[0].score, ranked[1].score);
        assert_eq!((ranked[0].ngram.as_str(), ranked[1].ngram.as_str()), ("Left", "Right"));
    }

    #[test]
    fn roi_outside_changes_merge() {
        let docs = vec![itinerary("Fri, Apr 3", "8:18 PM", "9:40 PM", false), itinerary("Mon, May 11", "6:02 AM", "7:15 AM", true)];
        let anns = vec![departure(&docs[0], "8:18 PM"), departure(&docs[1], "6:02 AM")];
        let result = infer_landmarks_and_cluster(&docs, &anns, &SynthesisConfig::default()).unwrap();
        assert_eq!(result.initial.len(), 2);
        assert_eq!(result.clusters.len(), 1);
        assert_eq!(result.clusters[0].landmark(), Some("Depart:"));
    }

    #[test]
    fn no_shared_candidate_never_merges() {
        let roi: RoiMap = [(0, vec![]), (1, vec![])].into_iter().collect();
        let clusters = vec![
            Cluster { doc_ids: vec![0], kind: DocKind::Tree },
            Cluster { doc_ids: vec![1], kind: DocKind::Tree },
        ];
        assert_eq!(merge_clusters(clusters.clone(), &roi, 1.0).unwrap(), clusters);
    }

    #[test]
    fn differing_roi_blueprints_stay_apart() {
        let bp = |p: &str| Blueprint::Tree(blueprint::TreeBlueprint { paths: [String::from(p)].into_iter().collect() });
        let roi: RoiMap =
            [(0, vec![("m".into(), bp("/td"))]), (1, vec![("m".into(), bp("/th"))])].into_iter().collect();
        let clusters = vec![
            Cluster { doc_ids: vec![0], kind: DocKind::Tree },
            Cluster { doc_ids: vec![1], kind: DocKind::Tree },
        ];
        assert_eq!(merge_clusters(clusters.clone(), &roi, 0.0).unwrap().len(), 2);
        assert_eq!(merge_clusters(clusters, &roi, 1.0).unwrap().len(), 1);
    }
}
