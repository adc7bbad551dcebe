//! Uniform document model: tree documents, box documents, locations,
//! regions and field annotations.
//!
//! Both document kinds are immutable once built. A [`TreeDocument`] is stored
//! as a pre-order arena so that every subtree is a contiguous id range and
//! every region is a contiguous range as well.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Rect;

/// Pre-order index of a node inside a [`TreeDocument`].
pub type NodeId = usize;

/// Owned, nested form of a tree node. This is the construction and
/// interchange form; [`TreeDocument`] indexes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub tag: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
    #[serde(default, rename = "ownText", skip_serializing_if = "String::is_empty")]
    pub own_text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn new(tag: impl Into<String>) -> Self {
        TreeNode { tag: tag.into(), attributes: BTreeMap::new(), own_text: String::new(), children: Vec::new() }
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        self.own_text = text.into();
        self
    }

    pub fn attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    pub fn child(mut self, child: TreeNode) -> Self {
        self.children.push(child);
        self
    }

    pub fn children(mut self, children: impl IntoIterator<Item = TreeNode>) -> Self {
        self.children.extend(children);
        self
    }

    /// Leaf with a tag and text.
    pub fn leaf(tag: impl Into<String>, text: impl Into<String>) -> Self {
        TreeNode::new(tag).text(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    tag: String,
    attributes: BTreeMap<String, String>,
    own_text: String,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    depth: usize,
    index_in_parent: usize,
    end: NodeId,
    data: String,
}

/// An ordered labeled tree, indexed in pre-order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "TreeNode", into = "TreeNode")]
pub struct TreeDocument {
    nodes: Vec<Node>,
}

impl From<TreeNode> for TreeDocument {
    fn from(root: TreeNode) -> Self {
        TreeDocument::new(root)
    }
}

impl From<TreeDocument> for TreeNode {
    fn from(doc: TreeDocument) -> Self {
        doc.to_tree()
    }
}

impl TreeDocument {
    pub fn new(root: TreeNode) -> Self {
        let mut nodes = Vec::new();
        flatten(root, None, 0, 0, &mut nodes);
        // data = pre-order own texts of the subtree, trimmed, single-space joined
        for id in (0..nodes.len()).rev() {
            let mut parts: Vec<&str> = Vec::new();
            for n in &nodes[id..nodes[id].end] {
                let t = n.own_text.trim();
                if !t.is_empty() {
                    parts.push(t);
                }
            }
            let data = parts.join(" ");
            nodes[id].data = data;
        }
        TreeDocument { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tag(&self, id: NodeId) -> &str {
        &self.nodes[id].tag
    }

    pub fn attributes(&self, id: NodeId) -> &BTreeMap<String, String> {
        &self.nodes[id].attributes
    }

    pub fn own_text(&self, id: NodeId) -> &str {
        &self.nodes[id].own_text
    }

    /// Concatenated text of the node and its descendants.
    pub fn data(&self, id: NodeId) -> &str {
        &self.nodes[id].data
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn child_ids(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id].depth
    }

    pub fn index_in_parent(&self, id: NodeId) -> usize {
        self.nodes[id].index_in_parent
    }

    /// Exclusive end of the pre-order range of `id`'s subtree.
    pub fn subtree_end(&self, id: NodeId) -> NodeId {
        self.nodes[id].end
    }

    pub fn subtree(&self, id: NodeId) -> Range<NodeId> {
        id..self.nodes[id].end
    }

    pub fn is_ancestor_or_self(&self, ancestor: NodeId, node: NodeId) -> bool {
        ancestor <= node && node < self.nodes[ancestor].end
    }

    /// `hops`-th ancestor, `Some(id)` for zero hops.
    pub fn ancestor(&self, mut id: NodeId, hops: usize) -> Option<NodeId> {
        for _ in 0..hops {
            id = self.nodes[id].parent?;
        }
        Some(id)
    }

    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a, b);
        while self.depth(a) > self.depth(b) {
            a = self.nodes[a].parent.expect("depth > 0 has a parent");
        }
        while self.depth(b) > self.depth(a) {
            b = self.nodes[b].parent.expect("depth > 0 has a parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("distinct roots are impossible");
            b = self.nodes[b].parent.expect("distinct roots are impossible");
        }
        a
    }

    /// The child of `ancestor` on the path to `node` (`node` strictly below).
    pub fn child_towards(&self, ancestor: NodeId, node: NodeId) -> Option<NodeId> {
        if ancestor == node || !self.is_ancestor_or_self(ancestor, node) {
            return None;
        }
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            if p == ancestor {
                return Some(cur);
            }
            cur = p;
        }
        None
    }

    pub fn path(&self, id: NodeId) -> TreePath {
        let mut steps = Vec::with_capacity(self.depth(id));
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            steps.push(self.nodes[cur].index_in_parent);
            cur = p;
        }
        steps.reverse();
        TreePath(steps)
    }

    pub fn resolve(&self, path: &TreePath) -> Option<NodeId> {
        let mut cur = 0;
        if self.nodes.is_empty() {
            return None;
        }
        for &step in &path.0 {
            cur = *self.nodes[cur].children.get(step)?;
        }
        Some(cur)
    }

    /// Deepest nodes whose data contains `landmark`, in pre-order.
    pub fn locate_ids(&self, landmark: &str) -> Vec<NodeId> {
        if landmark.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if !node.data.contains(landmark) {
                continue;
            }
            let deeper = node.children.iter().any(|&c| self.nodes[c].data.contains(landmark));
            if !deeper {
                out.push(id);
            }
        }
        out
    }

    /// Rebuilds the nested form.
    pub fn to_tree(&self) -> TreeNode {
        fn build(doc: &TreeDocument, id: NodeId) -> TreeNode {
            let n = &doc.nodes[id];
            TreeNode {
                tag: n.tag.clone(),
                attributes: n.attributes.clone(),
                own_text: n.own_text.clone(),
                children: n.children.iter().map(|&c| build(doc, c)).collect(),
            }
        }
        build(self, 0)
    }

    /// Pre-order node range covered by a tree region.
    pub fn region_range(&self, region: &TreeRegion) -> Result<Range<NodeId>> {
        let bad = || Error::InvalidLocation(region.to_string());
        if region.start > region.end {
            return Err(bad());
        }
        match &region.anchor {
            None => {
                if region.start != 0 || region.end != 0 {
                    return Err(bad());
                }
                Ok(0..self.nodes.len())
            }
            Some(anchor) => {
                let a = self.resolve(anchor).ok_or_else(bad)?;
                let kids = &self.nodes[a].children;
                if region.end >= kids.len() {
                    return Err(bad());
                }
                Ok(kids[region.start]..self.nodes[kids[region.end]].end)
            }
        }
    }

    /// Top-level nodes of a region (the spanned siblings), in order.
    pub fn region_tops(&self, region: &TreeRegion) -> Result<Vec<NodeId>> {
        match &region.anchor {
            None => {
                self.region_range(region)?;
                Ok(alloc::vec![0])
            }
            Some(anchor) => {
                self.region_range(region)?;
                let a = self.resolve(anchor).expect("validated by region_range");
                Ok(self.nodes[a].children[region.start..=region.end].to_vec())
            }
        }
    }

    /// Region consisting of exactly the subtree at `id`.
    pub fn subtree_region(&self, id: NodeId) -> TreeRegion {
        match self.nodes[id].parent {
            None => TreeRegion { anchor: None, start: 0, end: 0 },
            Some(p) => {
                let i = self.nodes[id].index_in_parent;
                TreeRegion { anchor: Some(self.path(p)), start: i, end: i }
            }
        }
    }
}

fn flatten(node: TreeNode, parent: Option<NodeId>, depth: usize, index: usize, out: &mut Vec<Node>) -> NodeId {
    let id = out.len();
    out.push(Node {
        tag: node.tag,
        attributes: node.attributes,
        own_text: node.own_text,
        parent,
        children: Vec::with_capacity(node.children.len()),
        depth,
        index_in_parent: index,
        end: id + 1,
        data: String::new(),
    });
    for (i, child) in node.children.into_iter().enumerate() {
        let c = flatten(child, Some(id), depth + 1, i, out);
        out[id].children.push(c);
    }
    out[id].end = out.len();
    id
}

/// A text box of OCR output, in pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBox {
    pub text: String,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl TextBox {
    pub fn new(text: impl Into<String>, x: f64, y: f64, w: f64, h: f64) -> Self {
        TextBox { text: text.into(), x, y, w, h }
    }
}

/// Text boxes in document order (rows top to bottom, left to right inside a row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoxDocument")]
pub struct BoxDocument {
    boxes: Vec<TextBox>,
}

#[derive(Deserialize)]
struct RawBoxDocument {
    boxes: Vec<TextBox>,
}

impl TryFrom<RawBoxDocument> for BoxDocument {
    type Error = Error;
    fn try_from(raw: RawBoxDocument) -> Result<Self> {
        BoxDocument::new(raw.boxes)
    }
}

impl BoxDocument {
    /// Validates and sorts into document order with the default row
    /// tolerance (half the median box height).
    pub fn new(boxes: Vec<TextBox>) -> Result<Self> {
        validate_boxes(&boxes)?;
        let tol = 0.5 * median_height(&boxes);
        Ok(BoxDocument { boxes: sort_document_order(boxes, tol) })
    }

    pub fn with_row_tolerance(boxes: Vec<TextBox>, row_tolerance: f64) -> Result<Self> {
        validate_boxes(&boxes)?;
        Ok(BoxDocument { boxes: sort_document_order(boxes, row_tolerance) })
    }

    pub fn boxes(&self) -> &[TextBox] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn median_height(&self) -> f64 {
        median_height(&self.boxes)
    }

    pub fn locate_ids(&self, landmark: &str) -> Vec<usize> {
        if landmark.is_empty() {
            return Vec::new();
        }
        self.boxes.iter().enumerate().filter(|(_, b)| b.text.contains(landmark)).map(|(i, _)| i).collect()
    }

    /// Boxes intersecting the bounding rectangle of `ids`, in document order.
    pub fn enclosing(&self, ids: &[usize]) -> Vec<usize> {
        let Some(rect) = self.bounding_rect(ids) else { return Vec::new() };
        (0..self.boxes.len()).filter(|&i| Rect::of(&self.boxes[i]).intersects(&rect)).collect()
    }

    pub(crate) fn bounding_rect(&self, ids: &[usize]) -> Option<Rect> {
        ids.iter().map(|&i| Rect::of(&self.boxes[i])).reduce(Rect::union)
    }
}

fn validate_boxes(boxes: &[TextBox]) -> Result<()> {
    for (index, b) in boxes.iter().enumerate() {
        let fields = [b.x, b.y, b.w, b.h];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBox { index, reason: "non-finite coordinate".into() });
        }
        if b.x < 0.0 || b.y < 0.0 {
            return Err(Error::InvalidBox { index, reason: "negative position".into() });
        }
        if b.w <= 0.0 || b.h <= 0.0 {
            return Err(Error::InvalidBox { index, reason: "non-positive dimension".into() });
        }
    }
    Ok(())
}

fn median_height(boxes: &[TextBox]) -> f64 {
    if boxes.is_empty() {
        return 0.0;
    }
    let mut hs: Vec<f64> = boxes.iter().map(|b| b.h).collect();
    hs.sort_by(f64::total_cmp);
    let n = hs.len();
    if n % 2 == 1 {
        hs[n / 2]
    } else {
        (hs[n / 2 - 1] + hs[n / 2]) / 2.0
    }
}

/// Row bucketing: boxes sorted by top edge; a box joins the current row when
/// its top is within `tol` of the row's first box; rows are sorted by x.
fn sort_document_order(mut boxes: Vec<TextBox>, tol: f64) -> Vec<TextBox> {
    boxes.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    let mut out = Vec::with_capacity(boxes.len());
    let mut row: Vec<TextBox> = Vec::new();
    let mut row_y = f64::NAN;
    for b in boxes {
        if !row.is_empty() && b.y - row_y > tol {
            row.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
            out.append(&mut row);
        }
        if row.is_empty() {
            row_y = b.y;
        }
        row.push(b);
    }
    row.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    out.append(&mut row);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DocKind {
    Tree,
    Boxes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Document {
    Tree(TreeDocument),
    Boxes(BoxDocument),
}

impl Document {
    pub fn kind(&self) -> DocKind {
        match self {
            Document::Tree(_) => DocKind::Tree,
            Document::Boxes(_) => DocKind::Boxes,
        }
    }

    pub fn as_tree(&self) -> Option<&TreeDocument> {
        match self {
            Document::Tree(t) => Some(t),
            Document::Boxes(_) => None,
        }
    }

    pub fn as_boxes(&self) -> Option<&BoxDocument> {
        match self {
            Document::Boxes(b) => Some(b),
            Document::Tree(_) => None,
        }
    }

    /// Position of a location in document order (pre-order id or box index).
    pub fn order_index(&self, loc: &Location) -> Result<usize> {
        match (self, loc) {
            (Document::Tree(t), Location::Tree(p)) => t.resolve(p).ok_or_else(|| Error::InvalidLocation(loc.to_string())),
            (Document::Boxes(b), Location::Box(i)) if *i < b.len() => Ok(*i),
            _ => Err(Error::InvalidLocation(loc.to_string())),
        }
    }

    pub fn location_of(&self, order_index: usize) -> Location {
        match self {
            Document::Tree(t) => Location::Tree(t.path(order_index)),
            Document::Boxes(_) => Location::Box(order_index),
        }
    }
}

impl From<TreeDocument> for Document {
    fn from(t: TreeDocument) -> Self {
        Document::Tree(t)
    }
}

impl From<BoxDocument> for Document {
    fn from(b: BoxDocument) -> Self {
        Document::Boxes(b)
    }
}

/// Sequence of child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TreePath(pub Vec<usize>);

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for step in &self.0 {
            write!(f, "/{step}")?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for TreePath {
    fn from(v: Vec<usize>) -> Self {
        TreePath(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Location {
    Tree(TreePath),
    Box(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Tree(p) => write!(f, "node {p}"),
            Location::Box(i) => write!(f, "box {i}"),
        }
    }
}

/// Siblings `start..=end` under `anchor`, with all their descendants.
/// `anchor: None` is the whole document (the root is the only "sibling").
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeRegion {
    pub anchor: Option<TreePath>,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for TreeRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.anchor {
            None => write!(f, "document[{}..={}]", self.start, self.end),
            Some(p) => write!(f, "{p}[{}..={}]", self.start, self.end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Tree(TreeRegion),
    /// Box indices; document order for enclosing regions, visit order for paths.
    Boxes(Vec<usize>),
}

impl Region {
    pub fn contains(&self, doc: &Document, loc: &Location) -> bool {
        match (self, doc, loc) {
            (Region::Tree(r), Document::Tree(t), Location::Tree(p)) => {
                match (t.region_range(r), t.resolve(p)) {
                    (Ok(range), Some(id)) => range.contains(&id),
                    _ => false,
                }
            }
            (Region::Boxes(ids), Document::Boxes(_), Location::Box(i)) => ids.contains(i),
            _ => false,
        }
    }
}

/// Data value at a location.
pub fn data_at<'d>(doc: &'d Document, loc: &Location) -> Result<&'d str> {
    match (doc, loc) {
        (Document::Tree(t), Location::Tree(p)) => {
            let id = t.resolve(p).ok_or_else(|| Error::InvalidLocation(loc.to_string()))?;
            Ok(t.data(id))
        }
        (Document::Boxes(b), Location::Box(i)) => {
            b.boxes.get(*i).map(|b| b.text.as_str()).ok_or_else(|| Error::InvalidLocation(loc.to_string()))
        }
        _ => Err(Error::InvalidLocation(loc.to_string())),
    }
}

/// All deepest locations whose data contains `landmark`, in document order.
pub fn locate(doc: &Document, landmark: &str) -> Vec<Location> {
    match doc {
        Document::Tree(t) => t.locate_ids(landmark).into_iter().map(|id| Location::Tree(t.path(id))).collect(),
        Document::Boxes(b) => b.locate_ids(landmark).into_iter().map(Location::Box).collect(),
    }
}

/// Smallest region containing every location.
pub fn enc_rgn(locs: &[Location], doc: &Document) -> Result<Region> {
    if locs.is_empty() {
        return Err(Error::EmptyLocations);
    }
    let ids = locs.iter().map(|l| doc.order_index(l)).collect::<Result<Vec<_>>>()?;
    match doc {
        Document::Tree(t) => Ok(Region::Tree(tree_enclosing(t, &ids))),
        Document::Boxes(b) => Ok(Region::Boxes(b.enclosing(&ids))),
    }
}

/// Smallest sibling span (under the lowest common ancestor) covering `ids`.
pub fn tree_enclosing(t: &TreeDocument, ids: &[NodeId]) -> TreeRegion {
    let lca = ids.iter().copied().reduce(|a, b| t.lca(a, b)).expect("non-empty");
    if ids.contains(&lca) {
        return t.subtree_region(lca);
    }
    let mut lo = usize::MAX;
    let mut hi = 0;
    for &id in ids {
        let c = t.child_towards(lca, id).expect("lca is a strict ancestor");
        let i = t.index_in_parent(c);
        lo = lo.min(i);
        hi = hi.max(i);
    }
    TreeRegion { anchor: Some(t.path(lca)), start: lo, end: hi }
}

/// How located values combine into a field value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AggKind {
    Single,
    OrderedList,
    ConcatWithSeparator(String),
}

/// A field value: a single string or an ordered list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValue {
    Text(String),
    List(Vec<String>),
}

impl AggKind {
    /// `None` when `Single` receives anything but exactly one part, or when
    /// there is nothing to aggregate.
    pub fn aggregate(&self, parts: Vec<String>) -> Option<FieldValue> {
        if parts.is_empty() {
            return None;
        }
        match self {
            AggKind::Single => {
                if parts.len() == 1 {
                    parts.into_iter().next().map(FieldValue::Text)
                } else {
                    None
                }
            }
            AggKind::OrderedList => Some(FieldValue::List(parts)),
            AggKind::ConcatWithSeparator(sep) => Some(FieldValue::Text(parts.join(sep))),
        }
    }

    /// Separator used when several values of one region are joined into one string.
    pub fn separator(&self) -> &str {
        match self {
            AggKind::ConcatWithSeparator(sep) => sep,
            _ => " ",
        }
    }
}

/// Annotated occurrence of one field in one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub locations: Vec<Location>,
    pub agg: AggKind,
    /// One value per location; each is a substring of the location's data.
    pub values: Vec<String>,
}

impl Annotation {
    pub fn single(loc: Location, value: impl Into<String>) -> Self {
        Annotation { locations: alloc::vec![loc], agg: AggKind::Single, values: alloc::vec![value.into()] }
    }

    pub fn validate(&self, doc: &Document) -> Result<()> {
        if self.locations.is_empty() {
            return Err(Error::InvalidAnnotation("no locations".into()));
        }
        if self.values.len() != self.locations.len() {
            return Err(Error::InvalidAnnotation("values do not align with locations".into()));
        }
        if self.agg == AggKind::Single && self.locations.len() != 1 {
            return Err(Error::InvalidAnnotation("single value needs exactly one location".into()));
        }
        let mut prev = None;
        for (loc, value) in self.locations.iter().zip(&self.values) {
            let idx = doc.order_index(loc)?;
            if prev.is_some_and(|p| p >= idx) {
                return Err(Error::InvalidAnnotation("locations not in document order".into()));
            }
            prev = Some(idx);
            let data = data_at(doc, loc)?;
            if !data.contains(value.as_str()) {
                return Err(Error::InvalidAnnotation(alloc::format!("value {value:?} not found at {loc}")));
            }
        }
        Ok(())
    }

    /// The field value `Agg(values)`.
    pub fn field_value(&self) -> Option<FieldValue> {
        self.agg.aggregate(self.values.clone())
    }
}

/// Assigns each location (by order index) to its nearest occurrence in
/// document order; ties go to the earlier occurrence. Returns, per
/// occurrence, the indices into `targets` assigned to it.
pub fn assign_to_nearest(occurrences: &[usize], targets: &[usize]) -> Vec<Vec<usize>> {
    let mut groups = alloc::vec![Vec::new(); occurrences.len()];
    if occurrences.is_empty() {
        return groups;
    }
    for (ti, &t) in targets.iter().enumerate() {
        let best = occurrences
            .iter()
            .enumerate()
            .min_by(|(ia, a), (ib, b)| a.abs_diff(t).cmp(&b.abs_diff(t)).then(ia.cmp(ib)))
            .map(|(i, _)| i)
            .expect("non-empty");
        groups[best].push(ti);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn flight_row() -> TreeDocument {
        TreeDocument::new(
            TreeNode::new("tr").child(TreeNode::leaf("td", "Depart:")).child(TreeNode::leaf("td", "8:18 PM")),
        )
    }

    #[test]
    fn data_of_leaf_is_own_text() {
        let doc = Document::Tree(flight_row());
        assert_eq!(data_at(&doc, &Location::Tree(vec![0].into())).unwrap(), "Depart:");
    }

    #[test]
    fn data_joins_descendants_in_preorder() {
        let t = TreeDocument::new(
            TreeNode::new("td").child(TreeNode::leaf("span", "Friday,")).child(TreeNode::leaf("span", "Apr 3")),
        );
        // manual pre-order walk: td "" -> span "Friday," -> span "Apr 3"
        assert_eq!(t.data(0), "Friday, Apr 3");
    }

    #[test]
    fn box_data_is_text() {
        let doc = Document::Boxes(BoxDocument::new(vec![TextBox::new("SAGDQU", 1.0, 1.0, 10.0, 5.0)]).unwrap());
        assert_eq!(data_at(&doc, &Location::Box(0)).unwrap(), "SAGDQU");
    }

    #[test]
    fn invalid_location_is_an_error() {
        let doc = Document::Tree(flight_row());
        assert!(data_at(&doc, &Location::Tree(vec![5].into())).is_err());
        assert!(data_at(&doc, &Location::Box(0)).is_err());
    }

    #[test]
    fn absent_landmark_locates_nothing() {
        assert!(locate(&Document::Tree(flight_row()), "ZZZ").is_empty());
    }

    #[test]
    fn locate_returns_deepest_nodes_in_preorder() {
        let t = TreeDocument::new(
            TreeNode::new("table")
                .child(TreeNode::new("tr").child(TreeNode::leaf("td", "Date")).child(TreeNode::leaf("td", "x")))
                .child(TreeNode::new("tr").child(TreeNode::leaf("td", "y")).child(TreeNode::leaf("td", "Date")))
                .child(TreeNode::leaf("tr", "Date")),
        );
        let doc = Document::Tree(t);
        let found = locate(&doc, "Date");
        let expected: Vec<Location> =
            [vec![0, 0], vec![1, 1], vec![2]].into_iter().map(|p| Location::Tree(p.into())).collect();
        assert_eq!(found, expected);
    }

    #[test]
    fn enc_rgn_of_sibling_leaves() {
        let t = TreeDocument::new(TreeNode::new("p").children((0..5).map(|i| TreeNode::leaf("td", alloc::format!("c{i}")))));
        let doc = Document::Tree(t);
        let r = enc_rgn(&[Location::Tree(vec![1].into()), Location::Tree(vec![3].into())], &doc).unwrap();
        assert_eq!(r, Region::Tree(TreeRegion { anchor: Some(TreePath::default()), start: 1, end: 3 }));
    }

    #[test]
    fn enc_rgn_of_single_location_is_its_subtree() {
        let doc = Document::Tree(flight_row());
        let r = enc_rgn(&[Location::Tree(vec![1].into())], &doc).unwrap();
        assert_eq!(r, Region::Tree(TreeRegion { anchor: Some(TreePath::default()), start: 1, end: 1 }));
        let root = enc_rgn(&[Location::Tree(TreePath::default())], &doc).unwrap();
        assert_eq!(root, Region::Tree(TreeRegion { anchor: None, start: 0, end: 0 }));
    }

    #[test]
    fn enc_rgn_of_landmark_and_value_spans_two_cells() {
        let doc = Document::Tree(flight_row());
        let r = enc_rgn(&[Location::Tree(vec![0].into()), Location::Tree(vec![1].into())], &doc).unwrap();
        let Region::Tree(r) = r else { panic!() };
        assert_eq!(r.end - r.start + 1, 2);
    }

    #[test]
    fn enc_rgn_empty_is_error() {
        assert_eq!(enc_rgn(&[], &Document::Tree(flight_row())), Err(Error::EmptyLocations));
    }

    #[test]
    fn box_enclosing_region_covers_intersecting_boxes() {
        let b = BoxDocument::new(vec![
            TextBox::new("a", 0.0, 0.0, 10.0, 10.0),
            TextBox::new("b", 50.0, 0.0, 10.0, 10.0),
            TextBox::new("c", 25.0, 2.0, 10.0, 4.0),
            TextBox::new("d", 25.0, 40.0, 10.0, 4.0),
        ])
        .unwrap();
        let doc = Document::Boxes(b);
        let r = enc_rgn(&[Location::Box(0), Location::Box(2)], &doc).unwrap();
        // a, c (middle), b in x order; d is below
        assert_eq!(r, Region::Boxes(vec![0, 1, 2]));
    }

    #[test]
    fn single_box_ingest() {
        let b = BoxDocument::new(vec![TextBox::new("Date", 10.0, 10.0, 40.0, 12.0)]).unwrap();
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn equal_rows_sort_by_x() {
        let b = BoxDocument::new(vec![TextBox::new("r", 100.0, 10.0, 5.0, 5.0), TextBox::new("l", 10.0, 10.0, 5.0, 5.0)])
            .unwrap();
        assert_eq!(b.boxes()[0].text, "l");
    }

    #[test]
    fn row_tolerance_groups_nearby_tops() {
        let b = BoxDocument::with_row_tolerance(
            vec![TextBox::new("r", 100.0, 10.0, 5.0, 5.0), TextBox::new("l", 10.0, 13.0, 5.0, 5.0)],
            5.0,
        )
        .unwrap();
        assert_eq!(b.boxes()[0].text, "l");
        let strict = BoxDocument::with_row_tolerance(
            vec![TextBox::new("r", 100.0, 10.0, 5.0, 5.0), TextBox::new("l", 10.0, 13.0, 5.0, 5.0)],
            1.0,
        )
        .unwrap();
        assert_eq!(strict.boxes()[0].text, "r");
    }

    #[test]
    fn bad_boxes_are_rejected() {
        assert!(BoxDocument::new(vec![TextBox::new("x", 1.0, 1.0, -1.0, 2.0)]).is_err());
        assert!(BoxDocument::new(vec![TextBox::new("x", 1.0, f64::NAN, 1.0, 2.0)]).is_err());
    }

    #[test]
    fn nearest_assignment_prefers_earlier_on_ties() {
        assert_eq!(assign_to_nearest(&[2, 6], &[4, 7, 0]), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn single_aggregation_rejects_many() {
        assert_eq!(AggKind::Single.aggregate(vec!["a".into(), "b".into()]), None);
        assert_eq!(
            AggKind::ConcatWithSeparator("-".into()).aggregate(vec!["a".into(), "b".into()]),
            Some(FieldValue::Text("a-b".into()))
        );
    }
}
