//! Tree region programs: climb `parent_hops` ancestors from the landmark
//! node, then span siblings to the left and right of the node reached.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::docmodel::{NodeId, TreeDocument, TreeRegion};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct HopsProgram {
    pub parent_hops: usize,
    pub sibling_hops_left: usize,
    pub sibling_hops_right: usize,
}

impl HopsProgram {
    pub const fn new(parent_hops: usize, left: usize, right: usize) -> Self {
        HopsProgram { parent_hops, sibling_hops_left: left, sibling_hops_right: right }
    }
}

/// Minimal hops program for one document.
pub fn learn_hops(doc: &TreeDocument, landmark: NodeId, values: &[NodeId]) -> HopsProgram {
    let n = values.iter().fold(landmark, |acc, &v| doc.lca(acc, v));
    if n == landmark {
        return HopsProgram::new(0, 0, 0);
    }
    if values.contains(&n) {
        // a value encloses the landmark: take that value's whole subtree
        return HopsProgram::new(doc.depth(landmark) - doc.depth(n), 0, 0);
    }
    let c = doc.child_towards(n, landmark).expect("n is a strict ancestor of the landmark");
    let i = doc.index_in_parent(c);
    let (mut lo, mut hi) = (i, i);
    for &v in values {
        let j = doc.index_in_parent(doc.child_towards(n, v).expect("n is a strict ancestor of every value"));
        lo = lo.min(j);
        hi = hi.max(j);
    }
    HopsProgram::new(doc.depth(landmark) - doc.depth(c), i - lo, hi - i)
}

/// Combines per-document programs: the highest climb wins, and sibling
/// offsets come from the documents that needed that climb (lower climbs lie
/// inside the reached node's subtree and need no offset).
pub fn reconcile_hops(programs: &[HopsProgram]) -> Option<HopsProgram> {
    let p = programs.iter().map(|h| h.parent_hops).max()?;
    let top = programs.iter().filter(|h| h.parent_hops == p);
    let left = top.clone().map(|h| h.sibling_hops_left).max().unwrap_or(0);
    let right = top.map(|h| h.sibling_hops_right).max().unwrap_or(0);
    Some(HopsProgram::new(p, left, right))
}

/// Region selected by `prog` from the landmark node; `None` when the climb
/// leaves the tree or the span leaves the parent's children.
pub fn exec_hops(doc: &TreeDocument, landmark: NodeId, prog: &HopsProgram) -> Option<TreeRegion> {
    let n1 = doc.ancestor(landmark, prog.parent_hops)?;
    let Some(parent) = doc.parent(n1) else {
        let whole = prog.sibling_hops_left == 0 && prog.sibling_hops_right == 0;
        return whole.then_some(TreeRegion { anchor: None, start: 0, end: 0 });
    };
    let i = doc.index_in_parent(n1);
    let start = i.checked_sub(prog.sibling_hops_left)?;
    let end = i + prog.sibling_hops_right;
    if end >= doc.child_ids(parent).len() {
        return None;
    }
    Some(TreeRegion { anchor: Some(doc.path(parent)), start, end })
}

/// One training example: landmark occurrence and the value nodes it anchors.
#[derive(Debug, Clone, Copy)]
pub struct HopsExample<'a> {
    pub doc: &'a TreeDocument,
    pub landmark: NodeId,
    pub values: &'a [NodeId],
}

fn covers(ex: &HopsExample<'_>, prog: &HopsProgram) -> bool {
    let Some(region) = exec_hops(ex.doc, ex.landmark, prog) else { return false };
    let Ok(range) = ex.doc.region_range(&region) else { return false };
    range.contains(&ex.landmark) && ex.values.iter().all(|v| range.contains(v))
}

/// Learns and reconciles programs over all examples. If the reconciled
/// program misses an example (sibling counts differ between documents), the
/// climb is raised one level at a time with no sibling offsets until every
/// example is covered.
pub fn learn_region_program(examples: &[HopsExample<'_>]) -> Result<HopsProgram> {
    let learned: Vec<HopsProgram> = examples.iter().map(|e| learn_hops(e.doc, e.landmark, e.values)).collect();
    let mut prog = reconcile_hops(&learned).ok_or(Error::EmptyTrainingSet)?;
    if examples.iter().all(|e| covers(e, &prog)) {
        return Ok(prog);
    }
    let max_depth = examples.iter().map(|e| e.doc.depth(e.landmark)).min().unwrap_or(0);
    for p in prog.parent_hops + 1..=max_depth {
        prog = HopsProgram::new(p, 0, 0);
        if examples.iter().all(|e| covers(e, &prog)) {
            return Ok(prog);
        }
    }
    Err(Error::RegionSynthesis { doc: 0, reason: "no hops program covers every example".into() })
}
