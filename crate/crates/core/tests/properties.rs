use std::collections::BTreeSet;
use std::ops::Range;

use landmark_core::blueprint::{blueprint_box, blueprint_tree, delta, frequent_ngrams, CommonValueIndex};
use landmark_core::config::GeometryConfig;
use landmark_core::docmodel::tree_enclosing;
use landmark_core::region_box::{disjunct_coverage, exec_path, greedy_select, Outcome};
use landmark_core::region_tree::{exec_hops, learn_hops};
use landmark_core::value_extract::synthesize_text_program;
use landmark_core::{
    Blueprint, BoxBlueprint, BoxDocument, BoxSummary, Direction, Motion, Neighbor, NodeId, PathProgram,
    PatternToken, TextBox, TreeBlueprint, TreeDocument, TreeNode,
};
use proptest::prelude::*;

// ---------------------------------------------------------------- trees

/// Random tree from a parent choice per node; texts drawn from a small
/// alphabet so that landmarks repeat.
fn tree_strategy(max: usize) -> impl Strategy<Value = TreeDocument> {
    prop::collection::vec((any::<prop::sample::Index>(), "[ab]{0,3}", prop::sample::select(vec!["td", "tr", "div", "b"])), 1..max)
        .prop_map(|nodes| {
            let mut parent = vec![None];
            let mut texts = vec![String::new()];
            let mut tags = vec!["body"];
            for (p, text, tag) in nodes {
                parent.push(Some(p.index(parent.len())));
                texts.push(text);
                tags.push(tag);
            }
            fn build(id: usize, parent: &[Option<usize>], texts: &[String], tags: &[&str]) -> TreeNode {
                let kids = (0..parent.len()).filter(|&c| parent[c] == Some(id));
                TreeNode::new(tags[id]).text(texts[id].clone()).children(kids.map(|c| build(c, parent, texts, tags)).collect::<Vec<_>>())
            }
            TreeDocument::new(build(0, &parent, &texts, &tags))
        })
}

/// Smallest sibling span, under any anchor, holding every node of `ids`.
fn minimal_span(t: &TreeDocument, ids: &[NodeId]) -> Range<NodeId> {
    let mut best = 0..t.len();
    for a in 0..t.len() {
        let kids = t.child_ids(a);
        for s in 0..kids.len() {
            for e in s..kids.len() {
                let r = kids[s]..t.subtree_end(kids[e]);
                if ids.iter().all(|i| r.contains(i)) && r.len() < best.len() {
                    best = r;
                }
            }
        }
    }
    best
}

fn node_sets() -> impl Strategy<Value = Vec<prop::sample::Index>> {
    prop::collection::vec(any::<prop::sample::Index>(), 1..4)
}

proptest! {
    #[test]
    fn located_nodes_are_deepest_holders(t in tree_strategy(30), landmark in "[ab]{1,2}") {
        let found: BTreeSet<NodeId> = t.locate_ids(&landmark).into_iter().collect();
        let oracle: BTreeSet<NodeId> = (0..t.len())
            .filter(|&n| t.data(n).contains(&landmark) && t.child_ids(n).iter().all(|&c| !t.data(c).contains(&landmark)))
            .collect();
        prop_assert_eq!(found, oracle);
    }

    #[test]
    fn enclosing_region_is_minimal(t in tree_strategy(30), picks in node_sets()) {
        let ids: Vec<NodeId> = picks.iter().map(|p| p.index(t.len())).collect();
        let r = t.region_range(&tree_enclosing(&t, &ids)).unwrap();
        prop_assert!(ids.iter().all(|i| r.contains(i)));
        prop_assert_eq!(r.len(), minimal_span(&t, &ids).len());
    }

    #[test]
    fn enclosing_region_grows_with_its_input(t in tree_strategy(30), a in node_sets(), b in node_sets()) {
        let small: Vec<NodeId> = a.iter().map(|p| p.index(t.len())).collect();
        let mut big = small.clone();
        big.extend(b.iter().map(|p| p.index(t.len())));
        let rs = t.region_range(&tree_enclosing(&t, &small)).unwrap();
        let rb = t.region_range(&tree_enclosing(&t, &big)).unwrap();
        prop_assert!(rb.start <= rs.start && rs.end <= rb.end);
    }

    #[test]
    fn learned_hops_give_the_minimal_region(t in tree_strategy(30), l in any::<prop::sample::Index>(), v in node_sets()) {
        let landmark = l.index(t.len());
        let values: Vec<NodeId> = v.iter().map(|p| p.index(t.len())).filter(|&x| x != landmark).collect();
        prop_assume!(!values.is_empty());
        let prog = learn_hops(&t, landmark, &values);
        let r = t.region_range(&exec_hops(&t, landmark, &prog).unwrap()).unwrap();
        let mut all = values.clone();
        all.push(landmark);
        prop_assert!(all.iter().all(|i| r.contains(i)));
        // a value enclosing the landmark takes that value's subtree, which is minimal too
        prop_assert_eq!(r.len(), minimal_span(&t, &all).len());
    }

    #[test]
    fn tree_blueprint_ignores_the_outside(t in tree_strategy(20), picks in node_sets(), extra in "[ab]{1,3}") {
        let ids: Vec<NodeId> = picks.iter().map(|p| p.index(t.len())).collect();
        let region = tree_enclosing(&t, &ids);
        prop_assume!(region.anchor.is_some());
        let values: BTreeSet<String> = ["a", "ab", "b", "ba"].iter().map(|s| s.to_string()).collect();
        let before = blueprint_tree(&region, &t, &values).unwrap();
        // appending a subtree after the root's last child leaves every path of the region intact
        let grown = TreeDocument::new(t.to_tree().child(TreeNode::new("div").child(TreeNode::leaf("td", extra))));
        let after = blueprint_tree(&region, &grown, &values).unwrap();
        prop_assert_eq!(before, after);
    }
}

// ---------------------------------------------------------------- blueprints

fn tree_blueprint() -> impl Strategy<Value = Blueprint> {
    prop::collection::btree_set("/(td|tr|b){1,3}", 0..6).prop_map(|paths| Blueprint::Tree(TreeBlueprint { paths }))
}

fn neighbor() -> impl Strategy<Value = Neighbor> {
    prop_oneof![Just(Neighbor::Absent), Just(Neighbor::VariableText), "[xy]".prop_map(Neighbor::Frequent)]
}

fn box_blueprint() -> impl Strategy<Value = Blueprint> {
    prop::collection::vec(
        ("[pq]", neighbor(), neighbor(), neighbor(), neighbor())
            .prop_map(|(ngram, top, left, right, bottom)| BoxSummary { ngram, top, left, right, bottom }),
        0..5,
    )
    .prop_map(|summaries| Blueprint::Boxes(BoxBlueprint { summaries }))
}

fn check_metric(a: &Blueprint, b: &Blueprint, c: &Blueprint) -> Result<(), TestCaseError> {
    let ab = delta(a, b).unwrap();
    prop_assert_eq!(delta(a, a).unwrap(), 0.0);
    prop_assert_eq!(ab, delta(b, a).unwrap());
    prop_assert!((0.0..=1.0).contains(&ab));
    prop_assert!(ab <= delta(a, c).unwrap() + delta(c, b).unwrap() + 1e-12);
    Ok(())
}

proptest! {
    #[test]
    fn tree_delta_is_a_pseudo_metric((a, b, c) in (tree_blueprint(), tree_blueprint(), tree_blueprint())) {
        check_metric(&a, &b, &c)?;
    }

    #[test]
    fn box_delta_is_a_pseudo_metric((a, b, c) in (box_blueprint(), box_blueprint(), box_blueprint())) {
        check_metric(&a, &b, &c)?;
    }
}

#[test]
fn delta_rejects_mixed_kinds() {
    let t = Blueprint::Tree(TreeBlueprint::default());
    let b = Blueprint::Boxes(BoxBlueprint::default());
    assert!(delta(&t, &b).is_err());
}

// ---------------------------------------------------------------- boxes

/// Boxes on a coarse grid so that neighbors exist in every direction.
fn box_doc() -> impl Strategy<Value = BoxDocument> {
    prop::collection::btree_set((0u8..5, 0u8..6), 1..16).prop_flat_map(|cells| {
        let n = cells.len();
        (Just(cells), prop::collection::vec(prop::sample::select(vec!["Total:", "12.50", "2024-03-01", "1234567890123", "abc"]), n))
            .prop_map(|(cells, texts)| {
                let boxes = cells
                    .into_iter()
                    .zip(texts)
                    .map(|((c, r), t)| TextBox::new(t, 10.0 + 60.0 * f64::from(c), 10.0 + 30.0 * f64::from(r), 40.0, 14.0))
                    .collect();
                BoxDocument::new(boxes).unwrap()
            })
    })
}

fn motion() -> impl Strategy<Value = Motion> {
    let dir = prop::sample::select(Direction::ALL.to_vec());
    prop_oneof![
        (dir.clone(), 1usize..3).prop_map(|(dir, k)| Motion::Absolute { dir, k }),
        (dir, prop::sample::select(vec![PatternToken::Date, PatternToken::Currency, PatternToken::DigitRun(13)]), any::<bool>())
            .prop_map(|(dir, pattern, inclusive)| Motion::Relative { dir, pattern, inclusive }),
    ]
}

fn translated(doc: &BoxDocument, dx: f64, dy: f64) -> BoxDocument {
    BoxDocument::new(doc.boxes().iter().map(|b| TextBox::new(b.text.clone(), b.x + dx, b.y + dy, b.w, b.h)).collect()).unwrap()
}

proptest! {
    #[test]
    fn path_execution_is_deterministic_and_translation_invariant(
        doc in box_doc(),
        start in any::<prop::sample::Index>(),
        motions in prop::collection::vec(motion(), 0..4),
        dx in 0.0f64..500.0,
        dy in 0.0f64..500.0,
    ) {
        let g = GeometryConfig::default();
        let prog = PathProgram { motions };
        let from = start.index(doc.len());
        let first = exec_path(&doc, from, &prog, &g);
        prop_assert_eq!(&first, &exec_path(&doc, from, &prog, &g));
        prop_assert_eq!(&first, &exec_path(&translated(&doc, dx, dy), from, &prog, &g));
        if let Some(r) = first {
            prop_assert_eq!(r[0], from);
        }
    }

    #[test]
    fn box_blueprint_is_translation_invariant(doc in box_doc(), dx in 0.0f64..500.0, dy in 0.0f64..500.0) {
        let g = GeometryConfig::default();
        let moved = translated(&doc, dx, dy);
        let CommonValueIndex::Boxes(f) = frequent_ngrams(&[&doc], 3) else { unreachable!() };
        let all: Vec<usize> = (0..doc.len()).collect();
        prop_assert_eq!(blueprint_box(&all, &doc, &f, &g).unwrap(), blueprint_box(&all, &moved, &f, &g).unwrap());
    }
}

// ---------------------------------------------------------------- text and cover

proptest! {
    #[test]
    fn text_programs_reproduce_their_examples(
        rows in prop::collection::vec(("[A-Z][a-z]{0,5}", "[0-9]{1,6}", "[a-z ]{0,6}"), 1..4),
    ) {
        let texts: Vec<(String, String)> = rows.iter().map(|(pre, v, post)| (format!("{pre}: {v}{post}"), v.clone())).collect();
        let examples: Vec<(&str, &str)> = texts.iter().map(|(t, v)| (t.as_str(), v.as_str())).collect();
        if let Ok(p) = synthesize_text_program(&examples) {
            for (t, v) in &examples {
                let out = p.exec(t);
                prop_assert_eq!(out.as_deref(), Some(*v));
            }
        }
    }

    #[test]
    fn text_program_output_is_a_substring(
        rows in prop::collection::vec(("[A-Z][a-z]{0,5}", "[0-9]{1,6}"), 1..3),
        probe in "[A-Za-z0-9: ]{0,20}",
    ) {
        let texts: Vec<(String, String)> = rows.iter().map(|(pre, v)| (format!("{pre}: {v}"), v.clone())).collect();
        let examples: Vec<(&str, &str)> = texts.iter().map(|(t, v)| (t.as_str(), v.as_str())).collect();
        if let Ok(p) = synthesize_text_program(&examples) {
            if let Some(out) = p.exec(&probe) {
                prop_assert!(probe.contains(&out));
            }
        }
    }

    #[test]
    fn greedy_cover_beats_every_single_candidate(
        rows in prop::collection::vec(prop::collection::vec(0u8..3, 6), 1..8),
        sizes in prop::collection::vec(1usize..5, 8),
    ) {
        let outcomes: Vec<Vec<Outcome>> = rows
            .iter()
            .map(|r| r.iter().map(|o| [Outcome::Correct, Outcome::Bottom, Outcome::Wrong][*o as usize]).collect())
            .collect();
        let picks = greedy_select(&outcomes, &sizes[..outcomes.len()]);
        let covered = disjunct_coverage(&outcomes, &picks).iter().filter(|c| **c).count();
        for row in &outcomes {
            prop_assert!(covered >= row.iter().filter(|o| **o == Outcome::Correct).count());
        }
    }
}
