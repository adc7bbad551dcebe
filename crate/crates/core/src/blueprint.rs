//! Structural fingerprints of regions.
//!
//! A tree blueprint is the set of tag paths (positions stripped) from the
//! region's top nodes to every node whose text is a common value of the
//! cluster. A box blueprint lists, in document order, a [`BoxSummary`] for
//! every box carrying a frequent n-gram: the n-gram plus the content type of
//! its nearest neighbor in each direction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::config::GeometryConfig;
use crate::docmodel::{BoxDocument, DocKind, NodeId, Region, TreeDocument, TreeRegion};
use crate::error::{Error, Result};
use crate::geometry::{center, distance, overlap};
use crate::region_box::Direction;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TreeBlueprint {
    pub paths: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Neighbor {
    Absent,
    Frequent(String),
    VariableText,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxSummary {
    pub ngram: String,
    pub top: Neighbor,
    pub left: Neighbor,
    pub right: Neighbor,
    pub bottom: Neighbor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BoxBlueprint {
    pub summaries: Vec<BoxSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Blueprint {
    Tree(TreeBlueprint),
    Boxes(BoxBlueprint),
}

impl Blueprint {
    pub fn kind(&self) -> DocKind {
        match self {
            Blueprint::Tree(_) => DocKind::Tree,
            Blueprint::Boxes(_) => DocKind::Boxes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramCount {
    pub ngram: String,
    /// Number of documents containing the n-gram.
    pub count: usize,
}

/// Frequent n-grams of a box cluster, ranked by document frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequentNGrams {
    pub ranked: Vec<NGramCount>,
    pub documents: usize,
    pub max_n: usize,
}

impl FrequentNGrams {
    /// N-grams usable in blueprints: retained by the ranking and present in
    /// at least half of the cluster's documents.
    pub fn blueprint_set(&self) -> BTreeMap<&str, usize> {
        self.ranked
            .iter()
            .filter(|g| 2 * g.count >= self.documents)
            .map(|g| (g.ngram.as_str(), g.count))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommonValueIndex {
    Tree { values: BTreeSet<String> },
    Boxes(FrequentNGrams),
}

impl CommonValueIndex {
    pub fn kind(&self) -> DocKind {
        match self {
            CommonValueIndex::Tree { .. } => DocKind::Tree,
            CommonValueIndex::Boxes(_) => DocKind::Boxes,
        }
    }
}

/// Whitespace-token n-grams of `text`, `1..=max_n` tokens, in order of
/// start position then length.
pub fn ngrams(text: &str, max_n: usize) -> Vec<String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut out = Vec::new();
    for i in 0..tokens.len() {
        for n in 1..=max_n.min(tokens.len() - i) {
            out.push(tokens[i..i + n].join(" "));
        }
    }
    out
}

/// Node values (trimmed, non-empty) present in every document.
pub fn common_values(cluster: &[&TreeDocument]) -> CommonValueIndex {
    common_values_with_support(cluster, cluster.len())
}

/// Node values present in at least `min_docs` documents.
pub fn common_values_with_support(cluster: &[&TreeDocument], min_docs: usize) -> CommonValueIndex {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in cluster {
        let distinct: BTreeSet<&str> =
            (0..doc.len()).map(|id| doc.data(id).trim()).filter(|v| !v.is_empty()).collect();
        for v in distinct {
            *counts.entry(v).or_default() += 1;
        }
    }
    let values = counts.into_iter().filter(|(_, c)| *c >= min_docs.max(1)).map(|(v, _)| v.into()).collect();
    CommonValueIndex::Tree { values }
}

/// Document-frequency ranking of box-text n-grams; the top half (rounded
/// up) of the distinct n-grams is retained, ties broken lexicographically.
pub fn frequent_ngrams(cluster: &[&BoxDocument], max_n: usize) -> CommonValueIndex {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for doc in cluster {
        let mut seen = BTreeSet::new();
        for b in doc.boxes() {
            seen.extend(ngrams(&b.text, max_n));
        }
        for g in seen {
            *counts.entry(g).or_default() += 1;
        }
    }
    let mut ranked: Vec<NGramCount> = counts.into_iter().map(|(ngram, count)| NGramCount { ngram, count }).collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.ngram.cmp(&b.ngram)));
    let keep = ranked.len().div_ceil(2);
    ranked.truncate(keep);
    CommonValueIndex::Boxes(FrequentNGrams { ranked, documents: cluster.len(), max_n })
}

fn tag_path(doc: &TreeDocument, top: NodeId, node: NodeId) -> String {
    let mut tags = Vec::new();
    let mut cur = node;
    loop {
        tags.push(doc.tag(cur));
        if cur == top {
            break;
        }
        cur = doc.parent(cur).expect("node lies under top");
    }
    let mut s = String::new();
    for t in tags.iter().rev() {
        s.push('/');
        s.push_str(t);
    }
    s
}

pub fn blueprint_tree(region: &TreeRegion, doc: &TreeDocument, values: &BTreeSet<String>) -> Result<TreeBlueprint> {
    let mut paths = BTreeSet::new();
    for top in doc.region_tops(region)? {
        for id in doc.subtree(top) {
            if values.contains(doc.data(id).trim()) {
                paths.insert(tag_path(doc, top, id));
            }
        }
    }
    Ok(TreeBlueprint { paths })
}

/// Longest frequent n-gram of a box (then most frequent, then lexicographic).
fn box_ngram<'a>(text: &str, frequent: &BTreeMap<&'a str, usize>, max_n: usize) -> Option<&'a str> {
    let mut best: Option<(&'a str, usize, usize)> = None;
    for g in ngrams(text, max_n) {
        if let Some((&key, &count)) = frequent.get_key_value(g.as_str()) {
            let len = key.split(' ').count();
            let better = match best {
                None => true,
                Some((bk, bl, bc)) => (len, count, core::cmp::Reverse(key)) > (bl, bc, core::cmp::Reverse(bk)),
            };
            if better {
                best = Some((key, len, count));
            }
        }
    }
    best.map(|(k, _, _)| k)
}

/// Nearest box inside the 90 degree cone in `dir` whose perpendicular
/// projection overlaps, within `reach` box extents.
pub fn summary_neighbor(doc: &BoxDocument, from: usize, dir: Direction, geometry: &GeometryConfig) -> Option<usize> {
    let boxes = doc.boxes();
    let s = &boxes[from];
    let sc = center(s);
    let mut best: Option<(f64, usize)> = None;
    for (i, o) in boxes.iter().enumerate() {
        if i == from {
            continue;
        }
        let oc = center(o);
        let (dx, dy) = (oc.0 - sc.0, oc.1 - sc.1);
        let (along, perp, proj, gap, extent) = match dir {
            Direction::Right => (dx, dy, overlap(s.y, s.y + s.h, o.y, o.y + o.h), o.x - (s.x + s.w), s.w),
            Direction::Left => (-dx, dy, overlap(s.y, s.y + s.h, o.y, o.y + o.h), s.x - (o.x + o.w), s.w),
            Direction::Bottom => (dy, dx, overlap(s.x, s.x + s.w, o.x, o.x + o.w), o.y - (s.y + s.h), s.h),
            Direction::Top => (-dy, dx, overlap(s.x, s.x + s.w, o.x, o.x + o.w), s.y - (o.y + o.h), s.h),
        };
        if along <= 0.0 || perp.abs() > along || proj <= 0.0 || gap > geometry.summary_reach * extent {
            continue;
        }
        let d = distance(sc, oc);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i)
}

pub fn blueprint_box(
    region_boxes: &[usize],
    doc: &BoxDocument,
    index: &FrequentNGrams,
    geometry: &GeometryConfig,
) -> Result<BoxBlueprint> {
    let frequent = index.blueprint_set();
    let mut ids = region_boxes.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut summaries = Vec::new();
    for &i in &ids {
        let b = doc.boxes().get(i).ok_or_else(|| Error::InvalidLocation(alloc::format!("box {i}")))?;
        let Some(ngram) = box_ngram(&b.text, &frequent, index.max_n) else { continue };
        let classify = |dir| match summary_neighbor(doc, i, dir, geometry) {
            None => Neighbor::Absent,
            Some(j) => match box_ngram(&doc.boxes()[j].text, &frequent, index.max_n) {
                Some(g) => Neighbor::Frequent(g.into()),
                None => Neighbor::VariableText,
            },
        };
        summaries.push(BoxSummary {
            ngram: ngram.into(),
            top: classify(Direction::Top),
            left: classify(Direction::Left),
            right: classify(Direction::Right),
            bottom: classify(Direction::Bottom),
        });
    }
    Ok(BoxBlueprint { summaries })
}

/// Blueprint of a region under a cluster's common-value index.
pub fn blueprint_of(
    region: &Region,
    doc: &crate::docmodel::Document,
    index: &CommonValueIndex,
    geometry: &GeometryConfig,
) -> Result<Blueprint> {
    use crate::docmodel::Document;
    match (region, doc, index) {
        (Region::Tree(r), Document::Tree(t), CommonValueIndex::Tree { values }) => {
            Ok(Blueprint::Tree(blueprint_tree(r, t, values)?))
        }
        (Region::Boxes(ids), Document::Boxes(b), CommonValueIndex::Boxes(f)) => {
            Ok(Blueprint::Boxes(blueprint_box(ids, b, f, geometry)?))
        }
        _ => Err(Error::KindMismatch { expected: index.kind(), found: doc.kind() }),
    }
}

/// Blueprint of a whole document.
pub fn blueprint_document(
    doc: &crate::docmodel::Document,
    index: &CommonValueIndex,
    geometry: &GeometryConfig,
) -> Result<Blueprint> {
    use crate::docmodel::Document;
    let region = match doc {
        Document::Tree(_) => Region::Tree(TreeRegion { anchor: None, start: 0, end: 0 }),
        Document::Boxes(b) => Region::Boxes((0..b.len()).collect()),
    };
    blueprint_of(&region, doc, index, geometry)
}

/// Blueprint distance in `[0, 1]`: Jaccard distance of path sets for trees;
/// normalized edit distance `2d / (|a| + |b| + d)` of summary sequences for boxes.
pub fn delta(b1: &Blueprint, b2: &Blueprint) -> Result<f64> {
    match (b1, b2) {
        (Blueprint::Tree(a), Blueprint::Tree(b)) => {
            let union = a.paths.union(&b.paths).count();
            if union == 0 {
                return Ok(0.0);
            }
            let inter = a.paths.intersection(&b.paths).count();
            Ok(1.0 - inter as f64 / union as f64)
        }
        (Blueprint::Boxes(a), Blueprint::Boxes(b)) => {
            let d = levenshtein(&a.summaries, &b.summaries);
            let denom = a.summaries.len() + b.summaries.len() + d;
            if denom == 0 {
                return Ok(0.0);
            }
            Ok(2.0 * d as f64 / denom as f64)
        }
        _ => Err(Error::KindMismatch { expected: b1.kind(), found: b2.kind() }),
    }
}

fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = (up + 1).min(row[j] + 1).min(diag + usize::from(x != y));
            diag = up;
        }
    }
    row[b.len()]
}

/// Distinct blueprints with their multiplicities, most frequent first, ties
/// by first occurrence.
pub fn rank_by_frequency(blueprints: &[Blueprint]) -> Vec<(Blueprint, usize)> {
    let mut out: Vec<(Blueprint, usize, usize)> = Vec::new();
    for (i, b) in blueprints.iter().enumerate() {
        match out.iter_mut().find(|(x, _, _)| x == b) {
            Some(entry) => entry.1 += 1,
            None => out.push((b.clone(), 1, i)),
        }
    }
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    out.into_iter().map(|(b, n, _)| (b, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{TextBox, TreeNode};
    use alloc::vec;
    use alloc::vec::Vec;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| String::from(*s)).collect()
    }

    fn doc(cells: &[&str]) -> TreeDocument {
        TreeDocument::new(TreeNode::new("tr").children(cells.iter().map(|c| TreeNode::leaf("td", *c))))
    }

    #[test]
    fn single_document_common_values_are_all_values() {
        let d = doc(&["Depart:", "8:18 PM"]);
        let CommonValueIndex::Tree { values } = common_values(&[&d]) else { panic!() };
        assert_eq!(values, set(&["Depart:", "8:18 PM", "Depart: 8:18 PM"]));
    }

    #[test]
    fn common_values_intersect() {
        let a = doc(&["Depart:", "8:18 PM", "Arrive:", "9:40 PM"]);
        let b = doc(&["Depart:", "6:02 AM", "Arrive:", "7:15 AM"]);
        // brute-force intersection of the per-document value sets
        let vals = |d: &TreeDocument| (0..d.len()).map(|i| String::from(d.data(i))).collect::<BTreeSet<_>>();
        let oracle: BTreeSet<String> = vals(&a).intersection(&vals(&b)).cloned().collect();
        let CommonValueIndex::Tree { values } = common_values(&[&a, &b]) else { panic!() };
        assert_eq!(values, oracle);
        assert_eq!(values, set(&["Depart:", "Arrive:"]));
    }

    #[test]
    fn disjoint_documents_share_nothing() {
        let CommonValueIndex::Tree { values } = common_values(&[&doc(&["a"]), &doc(&["b"])]) else { panic!() };
        assert!(values.is_empty());
    }

    fn boxes(texts: &[&str]) -> BoxDocument {
        BoxDocument::new(
            texts.iter().enumerate().map(|(i, t)| TextBox::new(*t, 10.0, 20.0 * i as f64, 50.0, 12.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn shared_ngram_is_frequent() {
        let docs: Vec<BoxDocument> =
            (0..4).map(|i| boxes(&["Engine number", &alloc::format!("47138721982{i:02}")])).collect();
        let refs: Vec<&BoxDocument> = docs.iter().collect();
        let CommonValueIndex::Boxes(f) = frequent_ngrams(&refs, 5) else { panic!() };
        assert!(f.ranked.iter().any(|g| g.ngram == "Engine number"));
    }

    #[test]
    fn rare_ngram_is_excluded() {
        // 10 docs share "alpha" and "beta"; "rare" is in one doc only
        let mut docs: Vec<BoxDocument> = (0..9).map(|_| boxes(&["alpha", "beta"])).collect();
        docs.push(boxes(&["alpha", "beta", "rare"]));
        let refs: Vec<&BoxDocument> = docs.iter().collect();
        let CommonValueIndex::Boxes(f) = frequent_ngrams(&refs, 5) else { panic!() };
        // oracle: 3 distinct n-grams, ceil(3/2) = 2 retained
        assert_eq!(f.ranked.len(), 2);
        assert!(f.ranked.iter().all(|g| g.ngram != "rare"));
    }

    #[test]
    fn identical_single_boxes_retained() {
        let docs: Vec<BoxDocument> = (0..3).map(|_| boxes(&["Total"])).collect();
        let refs: Vec<&BoxDocument> = docs.iter().collect();
        let CommonValueIndex::Boxes(f) = frequent_ngrams(&refs, 5) else { panic!() };
        assert_eq!(f.ranked, vec![NGramCount { ngram: "Total".into(), count: 3 }]);
    }

    #[test]
    fn tag_paths_drop_positions() {
        let t = TreeDocument::new(
            TreeNode::new("body").children([
                TreeNode::new("table"),
                TreeNode::new("table"),
                TreeNode::new("table"),
                TreeNode::new("table").children([
                    TreeNode::new("tr"),
                    TreeNode::new("tr"),
                    TreeNode::new("tr").children([TreeNode::leaf("td", "x"), TreeNode::leaf("td", "Depart:")]),
                ]),
            ]),
        );
        let whole = TreeRegion { anchor: None, start: 0, end: 0 };
        let bp = blueprint_tree(&whole, &t, &set(&["Depart:"])).unwrap();
        assert_eq!(bp.paths, set(&["/body/table/tr/td"]));
        let none = blueprint_tree(&whole, &t, &set(&["nothing"])).unwrap();
        assert!(none.paths.is_empty());
    }

    #[test]
    fn sibling_permutation_keeps_tree_blueprint() {
        let a = TreeDocument::new(
            TreeNode::new("div")
                .child(TreeNode::new("p").child(TreeNode::leaf("b", "Name")))
                .child(TreeNode::leaf("span", "Total")),
        );
        let b = TreeDocument::new(
            TreeNode::new("div")
                .child(TreeNode::leaf("span", "Total"))
                .child(TreeNode::new("p").child(TreeNode::leaf("b", "Name"))),
        );
        let r = TreeRegion { anchor: None, start: 0, end: 0 };
        let v = set(&["Name", "Total"]);
        assert_eq!(blueprint_tree(&r, &a, &v).unwrap(), blueprint_tree(&r, &b, &v).unwrap());
    }

    fn invoice(dx: f64, dy: f64) -> BoxDocument {
        let t = |s: &str, x: f64, y: f64, w: f64| TextBox::new(s, x + dx, y + dy, w, 12.0);
        BoxDocument::new(vec![
            t("Chassis number", 10.0, 100.0, 110.0),
            t("Engine number", 150.0, 100.0, 110.0),
            t("Reg Date", 290.0, 100.0, 80.0),
            t("WDX 28298", 10.0, 120.0, 70.0),
            t("4713872198212", 150.0, 120.0, 100.0),
            t("12/03/2020", 290.0, 120.0, 80.0),
        ])
        .unwrap()
    }

    fn invoice_index() -> FrequentNGrams {
        FrequentNGrams {
            ranked: ["Chassis number", "Engine number", "Reg Date", "number", "Chassis", "Engine", "Reg", "Date"]
                .iter()
                .map(|g| NGramCount { ngram: String::from(*g), count: 4 })
                .collect(),
            documents: 4,
            max_n: 5,
        }
    }

    #[test]
    fn engine_number_summary() {
        let d = invoice(0.0, 0.0);
        let bp = blueprint_box(&[1], &d, &invoice_index(), &GeometryConfig::default()).unwrap();
        assert_eq!(
            bp.summaries,
            vec![BoxSummary {
                ngram: "Engine number".into(),
                top: Neighbor::Absent,
                left: Neighbor::Frequent("Chassis number".into()),
                right: Neighbor::Frequent("Reg Date".into()),
                bottom: Neighbor::VariableText,
            }]
        );
    }

    #[test]
    fn region_without_frequent_boxes_has_empty_blueprint() {
        let d = invoice(0.0, 0.0);
        let bp = blueprint_box(&[3, 4], &d, &invoice_index(), &GeometryConfig::default()).unwrap();
        assert!(bp.summaries.is_empty());
    }

    #[test]
    fn translation_keeps_box_blueprint() {
        let g = GeometryConfig::default();
        let all: Vec<usize> = (0..6).collect();
        let a = blueprint_box(&all, &invoice(0.0, 0.0), &invoice_index(), &g).unwrap();
        let b = blueprint_box(&all, &invoice(50.0, 50.0), &invoice_index(), &g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn delta_examples() {
        let t = |p: &[&str]| Blueprint::Tree(TreeBlueprint { paths: set(p) });
        assert_eq!(delta(&t(&["a", "b"]), &t(&["a", "b"])).unwrap(), 0.0);
        assert!((delta(&t(&["a", "b"]), &t(&["a", "c"])).unwrap() - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(delta(&t(&["a"]), &t(&["b"])).unwrap(), 1.0);
        assert_eq!(delta(&t(&[]), &t(&[])).unwrap(), 0.0);
        let b = Blueprint::Boxes(BoxBlueprint::default());
        assert!(matches!(delta(&t(&[]), &b), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn mode_prefers_first_on_ties() {
        let t = |p: &[&str]| Blueprint::Tree(TreeBlueprint { paths: set(p) });
        let ranked = rank_by_frequency(&[t(&["x"]), t(&["y"]), t(&["y"]), t(&["x"]), t(&["z"])]);
        assert_eq!(ranked.iter().map(|(_, n)| *n).collect::<Vec<_>>(), vec![2, 2, 1]);
        assert_eq!(ranked[0].0, t(&["x"]));
    }
}
