use landmark::corpus::{generate_doc, DocOptions, Perturbation, PerturbationSpec, Template};
use landmark::formats::{AnnotationFile, Prediction};
use landmark::{evaluate, Bundle, BundleError};
use landmark_core::{Annotation, FieldValue, Location, TreeNode, TreePath};

fn gold(n: usize) -> AnnotationFile {
    (0..n)
        .map(|i| {
            let ann = Annotation::single(Location::Tree(TreePath(vec![0])), format!("v{i}"));
            (format!("d{i}"), [("f".to_string(), ann)].into_iter().collect())
        })
        .collect()
}

fn pred(i: usize, value: Option<&str>) -> Prediction {
    Prediction { doc: format!("d{i}"), field: "f".into(), value: value.map(|v| FieldValue::Text(v.into())) }
}

#[test]
fn one_wrong_in_ten() {
    let g = gold(10);
    let preds: Vec<Prediction> =
        (0..10).map(|i| if i == 3 { pred(i, Some("nope")) } else { pred(i, Some(&format!("v{i}"))) }).collect();
    let r = &evaluate(&preds, &g).fields["f"];
    assert_eq!((r.counts.correct, r.counts.incorrect, r.counts.bottom), (9, 1, 0));
    assert_eq!(r.precision, 0.9);
    assert_eq!(r.recall, 0.9);
    assert!((r.f1 - 0.9).abs() < 1e-12);
}

#[test]
fn one_abstention_in_ten() {
    let g = gold(10);
    let preds: Vec<Prediction> =
        (0..10).map(|i| if i == 7 { pred(i, None) } else { pred(i, Some(&format!("v{i}"))) }).collect();
    let r = &evaluate(&preds, &g).fields["f"];
    assert_eq!(r.precision, 1.0);
    assert_eq!(r.recall, 0.9);
    assert!((r.f1 - 2.0 * 0.9 / 1.9).abs() < 1e-12);
}

#[test]
fn nothing_answered() {
    let preds: Vec<Prediction> = (0..4).map(|i| pred(i, None)).collect();
    let r = &evaluate(&preds, &gold(4)).fields["f"];
    assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
}

#[test]
fn bundle_round_trip() {
    let b = Bundle::new(Vec::new());
    let again = Bundle::from_json(&b.to_json()).unwrap();
    assert_eq!(again, b);
    assert_eq!(again.to_json(), b.to_json());
}

#[test]
fn bundle_header_errors() {
    let v2 = r#"{"format": "landmark-bundle", "version": 2, "programs": []}"#;
    assert!(matches!(Bundle::from_json(v2), Err(BundleError::Version { found: 2 })));
    let other = r#"{"format": "something-else", "version": 1, "programs": []}"#;
    assert!(matches!(Bundle::from_json(other), Err(BundleError::Corrupt(_))));
    assert!(matches!(Bundle::from_json("{"), Err(BundleError::Corrupt(_))));
}

/// Every tree obtained from `t` by deleting one non-root subtree.
fn deletions(t: &TreeNode) -> Vec<TreeNode> {
    let mut out = Vec::new();
    for i in 0..t.children.len() {
        let mut cut = t.clone();
        cut.children.remove(i);
        out.push(cut);
        for sub in deletions(&t.children[i]) {
            let mut c = t.clone();
            c.children[i] = sub;
            out.push(c);
        }
    }
    out
}

#[test]
fn inserted_section_is_one_extra_subtree() {
    for index in 0..12 {
        let plain = generate_doc(Template::Flight, 21, index, &DocOptions::default(), &[]);
        let spec = PerturbationSpec { kind: Perturbation::InsertSectionOutsideRoi, seed: 4, count: 1 };
        let perturbed = generate_doc(Template::Flight, 21, index, &DocOptions::default(), &[spec]);
        let before = plain.document.as_tree().unwrap().to_tree();
        let after = perturbed.document.as_tree().unwrap().to_tree();
        assert!(deletions(&after).contains(&before), "doc {index}");
        assert_eq!(plain.annotations.len(), perturbed.annotations.len());
    }
}

#[test]
fn translation_moves_every_box() {
    let spec = PerturbationSpec { kind: Perturbation::TranslateBoxes, seed: 2, count: 1 };
    let plain = generate_doc(Template::Invoice, 8, 0, &DocOptions::default(), &[]);
    let moved = generate_doc(Template::Invoice, 8, 0, &DocOptions::default(), &[spec]);
    let (a, b) = (plain.document.as_boxes().unwrap().boxes(), moved.document.as_boxes().unwrap().boxes());
    assert_eq!(a.len(), b.len());
    let (dx, dy) = (b[0].x - a[0].x, b[0].y - a[0].y);
    assert!(dx != 0.0 || dy != 0.0);
    for (p, q) in a.iter().zip(b) {
        assert_eq!(p.text, q.text);
        assert!((q.x - p.x - dx).abs() < 1e-9 && (q.y - p.y - dy).abs() < 1e-9);
    }
}
