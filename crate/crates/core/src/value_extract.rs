//! Value programs: a node selector (trees) followed by a substring program.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::config::SelectorConfig;
use crate::docmodel::{NodeId, TreeDocument, TreeRegion};
use crate::error::{Error, Result};
use crate::pattern::PatternToken;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SelectorAtom {
    Tag(String),
    Class(String),
    Id(String),
    AttrContains(String, String),
    /// 1-based position among siblings; for the region's top nodes, among
    /// the spanned siblings.
    NthChild(usize),
}

impl fmt::Display for SelectorAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectorAtom::Tag(t) => f.write_str(t),
            SelectorAtom::Class(c) => write!(f, ".{c}"),
            SelectorAtom::Id(i) => write!(f, "#{i}"),
            SelectorAtom::AttrContains(n, v) => write!(f, "[{n}*={v:?}]"),
            SelectorAtom::NthChild(n) => write!(f, ":nth-child({n})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    Children,
    Descendants,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SelectorStep {
    pub axis: Axis,
    pub filter: Vec<SelectorAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct NodeSelector {
    pub steps: Vec<SelectorStep>,
}

impl fmt::Display for NodeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            match (i, s.axis) {
                (_, Axis::Children) => f.write_str(if i == 0 { "> " } else { " > " })?,
                (0, Axis::Descendants) => {}
                (_, Axis::Descendants) => f.write_str(" ")?,
            }
            if s.filter.iter().all(|a| !matches!(a, SelectorAtom::Tag(_))) {
                f.write_str("*")?;
            }
            for a in &s.filter {
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

impl NodeSelector {
    pub fn atom_count(&self) -> usize {
        self.steps.iter().map(|s| s.filter.len()).sum()
    }

    /// Matched nodes inside `region`, in document order.
    pub fn select(&self, doc: &TreeDocument, region: &TreeRegion) -> Option<Vec<NodeId>> {
        let tops = doc.region_tops(region).ok()?;
        let position = |id: NodeId| match tops.iter().position(|&t| t == id) {
            Some(p) => p + 1,
            None => doc.index_in_parent(id) + 1,
        };
        let matches = |id: NodeId, atom: &SelectorAtom| match atom {
            SelectorAtom::Tag(t) => doc.tag(id) == t,
            SelectorAtom::Class(c) => {
                doc.attributes(id).get("class").is_some_and(|v| v.split_whitespace().any(|x| x == c))
            }
            SelectorAtom::Id(i) => doc.attributes(id).get("id").is_some_and(|v| v == i),
            SelectorAtom::AttrContains(n, v) => doc.attributes(id).get(n).is_some_and(|x| x.contains(v.as_str())),
            SelectorAtom::NthChild(n) => position(id) == *n,
        };
        let mut current: Option<BTreeSet<NodeId>> = None;
        for step in &self.steps {
            let mut next = BTreeSet::new();
            let mut consider = |id: NodeId| {
                if step.filter.iter().all(|a| matches(id, a)) {
                    next.insert(id);
                }
            };
            match (&current, step.axis) {
                (None, Axis::Children) => tops.iter().for_each(|&t| consider(t)),
                (None, Axis::Descendants) => tops.iter().flat_map(|&t| doc.subtree(t)).for_each(&mut consider),
                (Some(set), Axis::Children) => {
                    set.iter().flat_map(|&n| doc.child_ids(n).iter().copied()).for_each(&mut consider)
                }
                (Some(set), Axis::Descendants) => {
                    set.iter().flat_map(|&n| doc.subtree(n).skip(1)).for_each(&mut consider)
                }
            }
            current = Some(next);
        }
        let out: Vec<NodeId> = current?.into_iter().collect();
        (!out.is_empty()).then_some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PosToken {
    /// Start of the text.
    Start,
    Pattern(PatternToken),
    Literal(String),
}

impl PosToken {
    fn find_all(&self, text: &str) -> Vec<(usize, usize)> {
        match self {
            PosToken::Start => alloc::vec![(0, 0)],
            PosToken::Pattern(p) => p.find_all(text),
            PosToken::Literal(l) => text.match_indices(l.as_str()).map(|(i, m)| (i, i + m.len())).collect(),
        }
    }

    /// Ranking class: constant delimiters, then literal words, then patterns.
    fn class(&self) -> u8 {
        match self {
            PosToken::Start | PosToken::Pattern(PatternToken::EndOfLine) => 0,
            PosToken::Literal(l) if l.chars().count() == 1 && l.chars().all(is_boundary_char) => 0,
            PosToken::Literal(_) => 1,
            PosToken::Pattern(_) => 2,
        }
    }
}

impl fmt::Display for PosToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosToken::Start => f.write_str("START"),
            PosToken::Pattern(p) => write!(f, "{p}"),
            PosToken::Literal(l) => write!(f, "{l:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Before,
    After,
}

/// The boundary before or after the `k`-th match of a token (`k < 0`
/// counts from the end).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub token: PosToken,
    pub k: i32,
    pub side: Side,
}

impl Position {
    pub fn resolve(&self, text: &str) -> Option<usize> {
        let found = self.token.find_all(text);
        let idx = if self.k > 0 {
            usize::try_from(self.k - 1).ok()?
        } else {
            found.len().checked_sub(usize::try_from(-self.k).ok()?)?
        };
        let (a, b) = *found.get(idx)?;
        Some(if self.side == Side::Before { a } else { b })
    }

    fn rank(&self) -> (u8, u32, bool, &PosToken, Side) {
        (self.token.class(), self.k.unsigned_abs(), self.k < 0, &self.token, self.side)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.side == Side::Before { "before" } else { "after" };
        write!(f, "{side} {}#{}", self.token, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TextProgram {
    Identity,
    Extract(Position, Position),
    Concat(Vec<TextProgram>),
}

impl fmt::Display for TextProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TextProgram::Identity => f.write_str("Identity"),
            TextProgram::Extract(a, b) => write!(f, "Extract({a}, {b})"),
            TextProgram::Concat(parts) => {
                f.write_str("Concat(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl TextProgram {
    /// Extracted text, whitespace-trimmed; `None` when a position is missing,
    /// out of order or the result is empty.
    pub fn exec(&self, text: &str) -> Option<String> {
        match self {
            TextProgram::Identity => Some(text.trim().to_string()).filter(|s| !s.is_empty()),
            TextProgram::Extract(a, b) => {
                let (i, j) = (a.resolve(text)?, b.resolve(text)?);
                let s = text.get(i..j)?.trim();
                (!s.is_empty()).then(|| s.to_string())
            }
            TextProgram::Concat(parts) => {
                let mut out = String::new();
                for p in parts {
                    out.push_str(&p.exec(text)?);
                }
                Some(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValueProgram {
    Tree { selector: NodeSelector, text: TextProgram },
    /// Region box texts joined with `joiner` in visit order.
    Boxes { text: TextProgram, joiner: String },
}

impl fmt::Display for ValueProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueProgram::Tree { selector, text } => write!(f, "{selector} | {text}"),
            ValueProgram::Boxes { text, joiner } => write!(f, "join({joiner:?}) | {text}"),
        }
    }
}

/// Runs a tree value program: one string per matched node.
pub fn exec_tree_value(
    doc: &TreeDocument,
    region: &TreeRegion,
    selector: &NodeSelector,
    text: &TextProgram,
) -> Option<Vec<String>> {
    selector.select(doc, region)?.into_iter().map(|id| text.exec(doc.data(id))).collect()
}

/// Joins region box texts for a box value program.
pub fn join_boxes(doc: &crate::docmodel::BoxDocument, region: &[usize], joiner: &str) -> String {
    let parts: Vec<&str> = region.iter().map(|&i| doc.boxes()[i].text.trim()).collect();
    parts.join(joiner)
}

/// Runs a box value program over a region.
pub fn exec_box_value(doc: &crate::docmodel::BoxDocument, region: &[usize], text: &TextProgram, joiner: &str) -> Option<String> {
    text.exec(&join_boxes(doc, region, joiner))
}

fn is_boundary_char(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Candidate boundary tokens for one example: the start anchor, pattern
/// tokens, punctuation characters of the text, and the words next to
/// each occurrence of the expected value.
fn boundary_tokens(text: &str, expected: &str) -> BTreeSet<PosToken> {
    let mut out = BTreeSet::new();
    out.insert(PosToken::Start);
    let mut digit_lengths = BTreeSet::new();
    let mut run = 0;
    for c in text.chars().chain(core::iter::once(' ')) {
        if c.is_ascii_digit() {
            run += 1;
        } else {
            if run > 0 {
                digit_lengths.insert(run);
            }
            run = 0;
        }
        if is_boundary_char(c) {
            out.insert(PosToken::Literal(c.to_string()));
        }
    }
    for n in digit_lengths {
        out.insert(PosToken::Pattern(PatternToken::DigitRun(n)));
    }
    for p in PatternToken::FIXED.into_iter().chain([PatternToken::AlnumRun]) {
        out.insert(PosToken::Pattern(p));
    }
    for (i, _) in text.match_indices(expected) {
        if let Some(w) = text[..i].split_whitespace().next_back() {
            out.insert(PosToken::Literal(w.to_string()));
        }
        if let Some(w) = text[i + expected.len()..].split_whitespace().next() {
            out.insert(PosToken::Literal(w.to_string()));
        }
    }
    out
}

/// Positions of `token` in `text` at which `accept` holds, with both
/// forward and backward occurrence indices.
fn positions_where(token: &PosToken, text: &str, accept: impl Fn(usize) -> bool) -> Vec<Position> {
    let found = token.find_all(text);
    let n = found.len() as i32;
    let mut out = Vec::new();
    for (j, &(a, b)) in found.iter().enumerate() {
        let j = j as i32;
        for (side, at) in [(Side::Before, a), (Side::After, b)] {
            if matches!(token, PosToken::Start | PosToken::Pattern(PatternToken::EndOfLine)) && side == Side::After {
                continue;
            }
            if accept(at) {
                out.push(Position { token: token.clone(), k: j + 1, side });
                if !matches!(token, PosToken::Start | PosToken::Pattern(PatternToken::EndOfLine)) {
                    out.push(Position { token: token.clone(), k: j - n, side });
                }
            }
        }
    }
    out
}

/// Acceptable start and end offsets of each occurrence of `expected`
/// (surrounding whitespace may be included, it is trimmed on output).
fn occurrence_windows(text: &str, expected: &str) -> Vec<((usize, usize), (usize, usize))> {
    text.match_indices(expected)
        .map(|(i, m)| {
            let end = i + m.len();
            let ws_before = text[..i].len() - text[..i].trim_end().len();
            let ws_after = text[end..].len() - text[end..].trim_start().len();
            ((i - ws_before, i), (end, end + ws_after))
        })
        .collect()
}

/// Learns a substring program reproducing every `(text, expected)` pair.
pub fn synthesize_text_program(examples: &[(&str, &str)]) -> Result<TextProgram> {
    let fail = |i: usize, reason: &str| Error::ValueSynthesis { example: i, reason: reason.into() };
    if examples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    for (i, (text, expected)) in examples.iter().enumerate() {
        if expected.trim().is_empty() || !text.contains(expected) {
            return Err(fail(i, "expected value is not a substring of the text"));
        }
    }
    if examples.iter().all(|(t, e)| t.trim() == e.trim()) {
        return Ok(TextProgram::Identity);
    }
    let (text0, expected0) = examples[0];
    let windows0 = occurrence_windows(text0, expected0.trim());
    let tokens = boundary_tokens(text0, expected0.trim());
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for t in &tokens {
        starts.extend(positions_where(t, text0, |at| windows0.iter().any(|(s, _)| s.0 <= at && at <= s.1)));
        ends.extend(positions_where(t, text0, |at| windows0.iter().any(|(_, e)| e.0 <= at && at <= e.1)));
    }
    starts.sort_by(|a, b| a.rank().cmp(&b.rank()));
    ends.sort_by(|a, b| a.rank().cmp(&b.rank()));
    let start_ok = |p: &Position| {
        examples.iter().all(|(t, e)| {
            let windows = occurrence_windows(t, e.trim());
            p.resolve(t).is_some_and(|at| windows.iter().any(|(s, _)| s.0 <= at && at <= s.1))
        })
    };
    let reproduces = |prog: &TextProgram| examples.iter().all(|(t, e)| prog.exec(t).as_deref() == Some(e.trim()));
    for s in starts.iter().filter(|p| start_ok(p)) {
        for e in &ends {
            let prog = TextProgram::Extract(s.clone(), e.clone());
            if reproduces(&prog) {
                return Ok(prog);
            }
        }
    }
    Err(fail(0, "no boundary pair reproduces every example"))
}

/// One tree example: region, value nodes (document order) and their values.
#[derive(Debug, Clone)]
pub struct TreeValueExample<'a> {
    pub doc: &'a TreeDocument,
    pub region: TreeRegion,
    pub targets: Vec<NodeId>,
    pub values: Vec<String>,
}

fn node_atoms(doc: &TreeDocument, id: NodeId, tops: &[NodeId]) -> Vec<SelectorAtom> {
    let mut atoms = alloc::vec![SelectorAtom::Tag(doc.tag(id).to_string())];
    let attrs = doc.attributes(id);
    if let Some(i) = attrs.get("id").filter(|v| !v.is_empty()) {
        atoms.push(SelectorAtom::Id(i.clone()));
    }
    if let Some(c) = attrs.get("class") {
        atoms.extend(c.split_whitespace().map(|c| SelectorAtom::Class(c.to_string())));
    }
    for (n, v) in attrs {
        if n != "id" && n != "class" && !v.is_empty() {
            atoms.push(SelectorAtom::AttrContains(n.clone(), v.clone()));
        }
    }
    let pos = match tops.iter().position(|&t| t == id) {
        Some(p) => p + 1,
        None => doc.index_in_parent(id) + 1,
    };
    atoms.push(SelectorAtom::NthChild(pos));
    atoms
}

fn atom_subsets(atoms: &[SelectorAtom], size: usize) -> Vec<Vec<SelectorAtom>> {
    match size {
        1 => atoms.iter().map(|a| alloc::vec![a.clone()]).collect(),
        2 => {
            let mut out = Vec::new();
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    out.push(alloc::vec![atoms[i].clone(), atoms[j].clone()]);
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Every way to write `total` as `parts` sizes in `1..=max`.
fn compositions(total: usize, parts: usize, max: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { alloc::vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=max.min(total) {
        for mut rest in compositions(total - first, parts - 1, max) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Selectors for the chain `chain[0] (top) .. chain[last] (target)` using
/// exactly `cost` atoms.
fn selectors_of_cost(
    doc: &TreeDocument,
    chain: &[NodeId],
    tops: &[NodeId],
    cost: usize,
    config: &SelectorConfig,
) -> Vec<NodeSelector> {
    let m = chain.len();
    let atoms: Vec<Vec<SelectorAtom>> = chain.iter().map(|&n| node_atoms(doc, n, tops)).collect();
    let mut out = Vec::new();
    // subsets of chain indices that end with the target
    let inner = m - 1;
    for mask in 0u32..(1u32 << inner) {
        let mut idx: Vec<usize> = (0..inner).filter(|i| mask & (1 << i) != 0).collect();
        idx.push(m - 1);
        if idx.len() > config.max_steps || cost < idx.len() || cost > idx.len() * config.max_atoms_per_step {
            continue;
        }
        for sizes in compositions(cost, idx.len(), config.max_atoms_per_step) {
            let mut partial: Vec<Vec<SelectorStep>> = alloc::vec![Vec::new()];
            for (s, (&ci, &size)) in idx.iter().zip(&sizes).enumerate() {
                let axis = match s {
                    0 if ci == 0 => Axis::Children,
                    0 => Axis::Descendants,
                    _ if ci == idx[s - 1] + 1 => Axis::Children,
                    _ => Axis::Descendants,
                };
                let choices = atom_subsets(&atoms[ci], size);
                let mut next = Vec::new();
                for p in &partial {
                    for c in &choices {
                        let mut q = p.clone();
                        q.push(SelectorStep { axis, filter: c.clone() });
                        next.push(q);
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|steps| NodeSelector { steps }));
        }
    }
    out
}

fn nth_count(s: &NodeSelector) -> usize {
    s.steps.iter().flat_map(|st| &st.filter).filter(|a| matches!(a, SelectorAtom::NthChild(_))).count()
}

/// Cheapest selector matching exactly the targets of every example:
/// fewest atoms, then fewest positional atoms, then textual order.
pub fn synthesize_selector(examples: &[TreeValueExample<'_>], config: &SelectorConfig) -> Result<NodeSelector> {
    let first = examples.first().ok_or(Error::EmptyTrainingSet)?;
    let doc = first.doc;
    let tops = doc.region_tops(&first.region)?;
    let target = *first.targets.first().ok_or(Error::ValueSynthesis { example: 0, reason: "no target".into() })?;
    let mut chain = alloc::vec![target];
    while !tops.contains(chain.last().expect("non-empty")) {
        let p = doc.parent(*chain.last().expect("non-empty"));
        match p {
            Some(p) => chain.push(p),
            None => return Err(Error::ValueSynthesis { example: 0, reason: "target outside region".into() }),
        }
    }
    chain.reverse();
    let consistent = |s: &NodeSelector| {
        examples.iter().all(|e| s.select(e.doc, &e.region).is_some_and(|found| found == e.targets))
    };
    let max_cost = config.max_steps * config.max_atoms_per_step;
    for cost in 1..=max_cost {
        let mut cands = selectors_of_cost(doc, &chain, &tops, cost, config);
        let mut keyed: Vec<(usize, String, NodeSelector)> =
            cands.drain(..).map(|s| (nth_count(&s), s.to_string(), s)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        if let Some((_, _, s)) = keyed.into_iter().find(|(_, _, s)| consistent(s)) {
            return Ok(s);
        }
    }
    Err(Error::ValueSynthesis { example: 0, reason: "no selector matches exactly the value nodes".into() })
}

/// Learns a tree value program from examples whose targets are known.
pub fn synthesize_tree_value(examples: &[TreeValueExample<'_>], config: &SelectorConfig) -> Result<ValueProgram> {
    for (i, e) in examples.iter().enumerate() {
        if e.targets.is_empty() || e.targets.len() != e.values.len() {
            return Err(Error::ValueSynthesis { example: i, reason: "targets and values differ in length".into() });
        }
        let range = e.doc.region_range(&e.region)?;
        if e.targets.iter().any(|t| !range.contains(t)) {
            return Err(Error::ValueSynthesis { example: i, reason: "value node outside the region".into() });
        }
    }
    let selector = synthesize_selector(examples, config)?;
    let pairs: Vec<(&str, &str)> = examples
        .iter()
        .flat_map(|e| e.targets.iter().zip(&e.values).map(|(&t, v)| (e.doc.data(t), v.as_str())))
        .collect();
    let text = synthesize_text_program(&pairs)?;
    Ok(ValueProgram::Tree { selector, text })
}

/// Deepest nodes of the region whose data contains `value`, document order.
pub fn value_nodes(doc: &TreeDocument, region: &TreeRegion, value: &str) -> Result<Vec<NodeId>> {
    let range = doc.region_range(region)?;
    Ok(range
        .clone()
        .filter(|&id| {
            doc.data(id).contains(value) && !doc.child_ids(id).iter().any(|&c| doc.data(c).contains(value))
        })
        .collect())
}

/// Learns a tree value program when only the expected values are known:
/// targets are the first value-bearing node per expected value.
pub fn synthesize_value_program(
    examples: &[(&TreeDocument, TreeRegion, Vec<String>)],
    config: &SelectorConfig,
) -> Result<ValueProgram> {
    let mut full = Vec::new();
    for (i, (doc, region, values)) in examples.iter().enumerate() {
        let mut targets = Vec::new();
        for v in values {
            let found = value_nodes(doc, region, v)?;
            let t = found
                .into_iter()
                .find(|t| !targets.contains(t))
                .ok_or_else(|| Error::ValueSynthesis { example: i, reason: alloc::format!("{v:?} not in region") })?;
            targets.push(t);
        }
        full.push(TreeValueExample { doc, region: region.clone(), targets, values: values.clone() });
    }
    synthesize_tree_value(&full, config)
}

/// Learns a box value program from `(joined region text, expected)` pairs.
pub fn synthesize_box_value(examples: &[(&str, &str)], joiner: &str) -> Result<ValueProgram> {
    Ok(ValueProgram::Boxes { text: synthesize_text_program(examples)?, joiner: joiner.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{TreeNode, TreePath};
    use alloc::vec;

    fn lit(s: &str) -> PosToken {
        PosToken::Literal(s.into())
    }

    #[test]
    fn identity_when_equal() {
        assert_eq!(synthesize_text_program(&[("8:18 PM", "8:18 PM")]).unwrap(), TextProgram::Identity);
    }

    #[test]
    fn after_colon_before_end() {
        let ex = [("Date: 12/03/2020", "12/03/2020"), ("Date: 1/4/2021", "1/4/2021"), ("Date: 30.11.19", "30.11.19")];
        let p = synthesize_text_program(&ex).unwrap();
        assert_eq!(
            p,
            TextProgram::Extract(
                Position { token: lit(":"), k: 1, side: Side::After },
                Position { token: PosToken::Pattern(PatternToken::EndOfLine), k: 1, side: Side::Before },
            )
        );
        for (t, e) in ex {
            // manual oracle: text after the first ':' trimmed
            assert_eq!(p.exec(t).unwrap(), t.split_once(':').unwrap().1.trim());
            assert_eq!(p.exec(t).unwrap(), e);
        }
    }

    #[test]
    fn between_parentheses() {
        let p = synthesize_text_program(&[("To Denver (DEN)", "DEN"), ("To Austin (AUS)", "AUS")]).unwrap();
        assert_eq!(
            p,
            TextProgram::Extract(
                Position { token: lit("("), k: 1, side: Side::After },
                Position { token: lit(")"), k: 1, side: Side::Before },
            )
        );
    }

    #[test]
    fn time_substring() {
        let ex = [("Friday, Apr 3 8:18 PM", "8:18 PM"), ("Monday, May 11 6:02 AM", "6:02 AM")];
        let p = synthesize_text_program(&ex).unwrap();
        for (t, e) in ex {
            assert_eq!(p.exec(t).as_deref(), Some(e));
        }
        assert_eq!(p.exec("Sunday, Jun 7 11:45 PM").as_deref(), Some("11:45 PM"));
    }

    #[test]
    fn extract_never_escapes_its_input() {
        let p = TextProgram::Extract(
            Position { token: lit(":"), k: 1, side: Side::After },
            Position { token: PosToken::Pattern(PatternToken::EndOfLine), k: 1, side: Side::Before },
        );
        assert_eq!(p.exec("no delimiter"), None);
    }

    fn roi(value: &str) -> TreeDocument {
        TreeDocument::new(
            TreeNode::new("table").child(
                TreeNode::new("tr")
                    .child(TreeNode::leaf("td", "Depart:"))
                    .child(TreeNode::leaf("td", value))
                    .child(TreeNode::leaf("td", "Terminal 2")),
            ),
        )
    }

    #[test]
    fn second_cell_selector() {
        let docs = [roi("8:18 PM"), roi("6:02 AM"), roi("11:45 PM")];
        let region = TreeRegion { anchor: Some(TreePath(vec![0])), start: 0, end: 2 };
        let examples: Vec<_> = docs.iter().map(|d| (d, region.clone(), vec![String::from(d.data(3))])).collect();
        let p = synthesize_value_program(&examples, &SelectorConfig::default()).unwrap();
        let ValueProgram::Tree { selector, text } = &p else { panic!() };
        assert_eq!(
            *selector,
            NodeSelector { steps: vec![SelectorStep { axis: Axis::Children, filter: vec![SelectorAtom::NthChild(2)] }] }
        );
        assert_eq!(*text, TextProgram::Identity);
        assert_eq!(selector.to_string(), "> *:nth-child(2)");
    }

    #[test]
    fn selector_stays_inside_region() {
        let d = roi("8:18 PM");
        let region = TreeRegion { anchor: Some(TreePath(vec![0])), start: 1, end: 1 };
        let all_td = NodeSelector {
            steps: vec![SelectorStep { axis: Axis::Descendants, filter: vec![SelectorAtom::Tag("td".into())] }],
        };
        assert_eq!(all_td.select(&d, &region), Some(vec![3]));
    }
}
