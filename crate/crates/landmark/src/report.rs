//! Human-readable synthesis and clustering reports.

use std::fmt::Write;

use landmark_core::blueprint::Neighbor;
use landmark_core::cluster::Clustering;
use landmark_core::runtime::{ExtractionProgram, RegionProgram, Synthesis};
use landmark_core::{Blueprint, Document};

fn doc_list(ids: &[usize], names: &[String]) -> String {
    ids.iter().map(|&i| names.get(i).map_or_else(|| i.to_string(), Clone::clone)).collect::<Vec<_>>().join(", ")
}

fn neighbor(n: &Neighbor) -> String {
    match n {
        Neighbor::Absent => "-".into(),
        Neighbor::Frequent(g) => format!("{g:?}"),
        Neighbor::VariableText => "*".into(),
    }
}

pub fn blueprint_text(bp: &Blueprint) -> String {
    match bp {
        Blueprint::Tree(t) => format!("{{{}}}", t.paths.iter().cloned().collect::<Vec<_>>().join(", ")),
        Blueprint::Boxes(b) => b
            .summaries
            .iter()
            .map(|s| {
                format!(
                    "{:?}[t:{} l:{} r:{} b:{}]",
                    s.ngram,
                    neighbor(&s.top),
                    neighbor(&s.left),
                    neighbor(&s.right),
                    neighbor(&s.bottom)
                )
            })
            .collect::<Vec<_>>()
            .join(" "),
    }
}

pub fn region_text(r: &RegionProgram) -> String {
    match r {
        RegionProgram::Hops(h) => {
            format!("hops(parent {}, left {}, right {})", h.parent_hops, h.sibling_hops_left, h.sibling_hops_right)
        }
        RegionProgram::Disjunct(d) => {
            format!("Disjunct({})", d.paths.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
        }
    }
}

pub fn clustering_report(clustering: &Clustering, names: &[String]) -> String {
    let mut out = String::new();
    writeln!(out, "initial clusters: {}", clustering.initial.len()).unwrap();
    for (i, c) in clustering.initial.iter().enumerate() {
        writeln!(out, "  [{i}] {}", doc_list(&c.doc_ids, names)).unwrap();
    }
    writeln!(out, "final clusters: {}", clustering.clusters.len()).unwrap();
    for (i, c) in clustering.clusters.iter().enumerate() {
        writeln!(out, "  [{i}] {:?} docs: {}", c.cluster.kind, doc_list(&c.cluster.doc_ids, names)).unwrap();
        for cand in c.candidates.iter().take(5) {
            writeln!(
                out,
                "      {:<28} score {:.4}  distance {:.2}  region {:.2}",
                format!("{:?}", cand.ngram),
                cand.score,
                cand.distance,
                cand.region_size
            )
            .unwrap();
        }
    }
    out
}

pub fn program_report(p: &ExtractionProgram) -> String {
    let mut out = String::new();
    writeln!(out, "field {:?}: agg {:?}, threshold {}", p.field, p.agg, p.threshold).unwrap();
    for (i, t) in p.tuples.iter().enumerate() {
        writeln!(out, "  tuple {i}: landmark {:?}", t.landmark).unwrap();
        writeln!(out, "    region    {}", region_text(&t.region_program)).unwrap();
        writeln!(out, "    blueprint {}", blueprint_text(&t.blueprint)).unwrap();
        writeln!(out, "    value     {}", t.value_program).unwrap();
        if let Some(g) = &t.guard {
            let landmarks: Vec<&str> = g.tuples.iter().map(|t| t.landmark.as_str()).collect();
            writeln!(out, "    guard     landmarks {landmarks:?}").unwrap();
        }
    }
    out
}

/// Report of one field's synthesis, with training coverage.
pub fn synthesis_report(s: &Synthesis, names: &[String], docs: &[Document], covered: &[bool]) -> String {
    let mut out = program_report(&s.program);
    out.push_str(&clustering_report(&s.clustering, names));
    let n = covered.iter().filter(|c| **c).count();
    writeln!(out, "training coverage: {n}/{}", docs.len()).unwrap();
    for (i, ok) in covered.iter().enumerate() {
        if !ok {
            writeln!(out, "  not reproduced: {}", doc_list(&[i], names)).unwrap();
        }
    }
    for note in &s.notes {
        writeln!(out, "note: {note}").unwrap();
    }
    out
}
