//! Box region programs: paths of expansion motions over neighboring boxes,
//! combined into first-success disjunctions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{EnumerationConfig, GeometryConfig};
use crate::docmodel::BoxDocument;
use crate::geometry::{center, distance, overlap};
use crate::pattern::PatternToken;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Top,
    Left,
    Right,
    Bottom,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Top, Direction::Left, Direction::Right, Direction::Bottom];
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Motion {
    Absolute { dir: Direction, k: usize },
    Relative { dir: Direction, pattern: PatternToken, inclusive: bool },
}

impl fmt::Display for Motion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Motion::Absolute { dir, k } => write!(f, "Abs({dir:?}, {k})"),
            Motion::Relative { dir, pattern, inclusive } => write!(f, "Rel({dir:?}, {pattern}, {inclusive})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct PathProgram {
    pub motions: Vec<Motion>,
}

impl fmt::Display for PathProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::from("input");
        for m in &self.motions {
            s = alloc::format!("Expand({s}, {m})");
        }
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DisjunctProgram {
    pub paths: Vec<PathProgram>,
}

impl DisjunctProgram {
    /// Region of the first path that does not fail.
    pub fn exec(&self, doc: &BoxDocument, landmark: usize, geometry: &GeometryConfig) -> Option<Vec<usize>> {
        self.paths.iter().find_map(|p| exec_path(doc, landmark, p, geometry))
    }
}

/// Boxes whose center lies strictly in `dir` from `from`'s center and whose
/// perpendicular extent overlaps enough, nearest first (ties by index).
pub fn neighbors(doc: &BoxDocument, from: usize, dir: Direction, geometry: &GeometryConfig) -> Vec<usize> {
    let boxes = doc.boxes();
    let s = &boxes[from];
    let sc = center(s);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (i, o) in boxes.iter().enumerate() {
        if i == from {
            continue;
        }
        let oc = center(o);
        let (ahead, ov, smaller) = match dir {
            Direction::Right => (oc.0 > sc.0, overlap(s.y, s.y + s.h, o.y, o.y + o.h), s.h.min(o.h)),
            Direction::Left => (oc.0 < sc.0, overlap(s.y, s.y + s.h, o.y, o.y + o.h), s.h.min(o.h)),
            Direction::Bottom => (oc.1 > sc.1, overlap(s.x, s.x + s.w, o.x, o.x + o.w), s.w.min(o.w)),
            Direction::Top => (oc.1 < sc.1, overlap(s.x, s.x + s.w, o.x, o.x + o.w), s.w.min(o.w)),
        };
        if ahead && ov > 0.0 && ov >= geometry.min_perpendicular_overlap * smaller {
            out.push((distance(sc, oc), i));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out.into_iter().map(|(_, i)| i).collect()
}

/// Walk state: boxes visited so far and the current box.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Walk {
    visited: Vec<usize>,
    current: usize,
}

fn step(doc: &BoxDocument, walk: &mut Walk, motion: &Motion, geometry: &GeometryConfig) -> Option<()> {
    let push = |walk: &mut Walk, b: usize| {
        if !walk.visited.contains(&b) {
            walk.visited.push(b);
        }
        walk.current = b;
    };
    match *motion {
        Motion::Absolute { dir, k } => {
            for _ in 0..k {
                let next = *neighbors(doc, walk.current, dir, geometry).first()?;
                push(walk, next);
            }
        }
        Motion::Relative { dir, pattern, inclusive } => loop {
            let next = *neighbors(doc, walk.current, dir, geometry).first()?;
            if pattern.matches_whole(&doc.boxes()[next].text) {
                if inclusive {
                    push(walk, next);
                }
                break;
            }
            push(walk, next);
        },
    }
    Some(())
}

/// Boxes visited by `prog` from the landmark box, in visit order.
pub fn exec_path(doc: &BoxDocument, landmark: usize, prog: &PathProgram, geometry: &GeometryConfig) -> Option<Vec<usize>> {
    let mut walk = Walk { visited: alloc::vec![landmark], current: landmark };
    for m in &prog.motions {
        step(doc, &mut walk, m, geometry)?;
    }
    Some(walk.visited)
}

/// Pattern alphabet for a cluster: a digit-run token per distinct run length
/// seen in `texts`, then the fixed tokens.
pub fn profile_patterns<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vec<PatternToken> {
    let mut lengths = BTreeSet::new();
    for t in texts {
        let mut run = 0;
        for c in t.chars().chain(core::iter::once(' ')) {
            if c.is_ascii_digit() {
                run += 1;
            } else {
                if run > 0 {
                    lengths.insert(run);
                }
                run = 0;
            }
        }
    }
    let mut out: Vec<PatternToken> = lengths.into_iter().map(PatternToken::DigitRun).collect();
    out.extend(PatternToken::FIXED);
    out
}

/// One training example for path programs.
#[derive(Debug, Clone)]
pub struct PathExample<'a> {
    pub doc: &'a BoxDocument,
    pub landmark: usize,
    pub values: Vec<usize>,
}

/// A region is correct when, from the first value box on, it holds exactly
/// the value boxes in their document order (its text is joined in visit
/// order).
pub fn region_correct(region: &[usize], values: &[usize]) -> bool {
    match region.iter().position(|b| values.contains(b)) {
        None => values.is_empty(),
        Some(first) => region[first..] == *values,
    }
}

/// Can the walk still become correct: the value boxes seen so far are a
/// prefix of `values` with nothing else after the first.
fn suffix_ok(region: &[usize], values: &[usize]) -> bool {
    match region.iter().position(|b| values.contains(b)) {
        None => true,
        Some(first) => values.starts_with(&region[first..]),
    }
}

fn motions(patterns: &[PatternToken], config: &EnumerationConfig) -> Vec<Motion> {
    let mut out = Vec::new();
    for dir in Direction::ALL {
        for k in 1..=config.max_k {
            out.push(Motion::Absolute { dir, k });
        }
    }
    for dir in Direction::ALL {
        for &pattern in patterns.iter().filter(|p| p.matches_boxes()) {
            for inclusive in [false, true] {
                out.push(Motion::Relative { dir, pattern, inclusive });
            }
        }
    }
    out
}

fn region_size(walks: &[Walk]) -> usize {
    walks.iter().map(|w| w.visited.len()).sum()
}

/// All path programs (up to the motion bound) correct on every example,
/// best first: smaller regions, fewer motions, then program order.
pub fn enumerate_paths(
    examples: &[PathExample<'_>],
    patterns: &[PatternToken],
    geometry: &GeometryConfig,
    config: &EnumerationConfig,
) -> Vec<PathProgram> {
    let start: Vec<Walk> =
        examples.iter().map(|e| Walk { visited: alloc::vec![e.landmark], current: e.landmark }).collect();
    let correct = |walks: &[Walk]| examples.iter().zip(walks).all(|(e, w)| region_correct(&w.visited, &e.values));
    let mut found: Vec<(usize, PathProgram)> = Vec::new();
    if correct(&start) {
        found.push((region_size(&start), PathProgram::default()));
        return found.into_iter().map(|(_, p)| p).collect();
    }
    let all_motions = motions(patterns, config);
    let mut frontier: Vec<(PathProgram, Vec<Walk>)> = alloc::vec![(PathProgram::default(), start)];
    let mut seen: BTreeSet<Vec<Walk>> = BTreeSet::new();
    for _ in 0..config.max_motions {
        let mut next = Vec::new();
        for (prog, walks) in &frontier {
            for m in &all_motions {
                let mut extended = walks.clone();
                let ok = extended
                    .iter_mut()
                    .zip(examples)
                    .all(|(w, e)| step(e.doc, w, m, geometry).is_some() && suffix_ok(&w.visited, &e.values));
                if !ok {
                    continue;
                }
                let mut p = prog.clone();
                p.motions.push(m.clone());
                if correct(&extended) {
                    found.push((region_size(&extended), p));
                } else if seen.insert(extended.clone()) {
                    next.push((p, extended));
                }
            }
        }
        frontier = next;
    }
    found.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.motions.len().cmp(&b.1.motions.len())).then(a.1.cmp(&b.1)));
    found.dedup_by(|a, b| a.1 == b.1);
    found.into_iter().map(|(_, p)| p).collect()
}

/// Result of running one candidate on one example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Bottom,
    Correct,
    Wrong,
}

/// Greedy first-success cover. `outcomes[c][d]` is candidate `c` on example
/// `d`. Each round considers the examples every earlier pick failed on and
/// picks the candidate with the best F1 there (precision over its non-failing
/// examples, recall over the open ones), ties by smaller `sizes` then index.
/// A wrong region can never be repaired by a later path, so candidates with
/// no wrong outcome on the open examples are preferred over any that have
/// one. Stops when no candidate is correct on an open example.
pub fn greedy_select(outcomes: &[Vec<Outcome>], sizes: &[usize]) -> Vec<usize> {
    let n = outcomes.first().map_or(0, Vec::len);
    let mut open: Vec<bool> = alloc::vec![true; n];
    let mut picks = Vec::new();
    loop {
        let open_count = open.iter().filter(|o| **o).count();
        if open_count == 0 {
            break;
        }
        let mut best: Option<(bool, f64, usize, usize)> = None;
        for (c, row) in outcomes.iter().enumerate() {
            if picks.contains(&c) {
                continue;
            }
            let (mut tp, mut fp) = (0usize, 0usize);
            for (d, o) in row.iter().enumerate() {
                if open[d] {
                    match o {
                        Outcome::Correct => tp += 1,
                        Outcome::Wrong => fp += 1,
                        Outcome::Bottom => {}
                    }
                }
            }
            if tp == 0 {
                continue;
            }
            let f1 = 2.0 * tp as f64 / (tp + fp + open_count) as f64;
            let safe = fp == 0;
            let better = match best {
                None => true,
                Some((bsafe, bf, bs, _)) => {
                    (safe, f1) > (bsafe, bf) || (safe == bsafe && f1 == bf && sizes[c] < bs)
                }
            };
            if better {
                best = Some((safe, f1, sizes[c], c));
            }
        }
        let Some((_, _, _, c)) = best else { break };
        picks.push(c);
        for (d, o) in outcomes[c].iter().enumerate() {
            if *o != Outcome::Bottom {
                open[d] = false;
            }
        }
    }
    picks
}

/// Examples solved by running the picks in order with first-success semantics.
pub fn disjunct_coverage(outcomes: &[Vec<Outcome>], picks: &[usize]) -> Vec<bool> {
    let n = outcomes.first().map_or(0, Vec::len);
    (0..n)
        .map(|d| {
            picks.iter().map(|&c| outcomes[c][d]).find(|o| *o != Outcome::Bottom) == Some(Outcome::Correct)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctSynthesis {
    pub program: DisjunctProgram,
    /// Every enumerated candidate, in rank order.
    pub candidates: Vec<PathProgram>,
    /// Per example, whether the program solves it.
    pub covered: Vec<bool>,
}

fn outcome(ex: &PathExample<'_>, prog: &PathProgram, geometry: &GeometryConfig) -> Outcome {
    match exec_path(ex.doc, ex.landmark, prog, geometry) {
        None => Outcome::Bottom,
        Some(r) if region_correct(&r, &ex.values) => Outcome::Correct,
        Some(_) => Outcome::Wrong,
    }
}

/// Training subsets: every singleton plus seeded random subsets of size
/// `2..=max_subset_size`.
pub fn training_subsets(n: usize, config: &EnumerationConfig, seed: u64) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (0..n).map(|i| alloc::vec![i]).collect();
    let hi = config.max_subset_size.min(n);
    if hi >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..config.random_subsets {
            let size = rng.random_range(2..=hi);
            let mut s = sample(&mut rng, n, size).into_vec();
            s.sort_unstable();
            if !subsets.contains(&s) {
                subsets.push(s);
            }
        }
    }
    subsets
}

/// Selection cost of a path. Walking up to (not onto) a stop pattern is the
/// cheapest motion: it still holds when the value spans more boxes.
pub fn path_cost(p: &PathProgram) -> usize {
    p.motions.iter().map(|m| if matches!(m, Motion::Relative { inclusive: false, .. }) { 1 } else { 2 }).sum()
}

/// Enumerates candidates on training subsets and selects a disjunction
/// over all examples.
pub fn synthesize_disjunct(
    examples: &[PathExample<'_>],
    patterns: &[PatternToken],
    geometry: &GeometryConfig,
    config: &EnumerationConfig,
    seed: u64,
) -> DisjunctSynthesis {
    let mut rank: BTreeMap<PathProgram, (usize, usize)> = BTreeMap::new();
    for subset in training_subsets(examples.len(), config, seed) {
        let sub: Vec<PathExample<'_>> = subset.iter().map(|&i| examples[i].clone()).collect();
        for (r, p) in enumerate_paths(&sub, patterns, geometry, config).into_iter().enumerate() {
            let key = (r, rank.len());
            rank.entry(p).or_insert(key);
        }
    }
    let mut candidates: Vec<(PathProgram, (usize, usize))> = rank.into_iter().collect();
    candidates.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let candidates: Vec<PathProgram> = candidates.into_iter().map(|(p, _)| p).collect();
    let outcomes: Vec<Vec<Outcome>> =
        candidates.iter().map(|p| examples.iter().map(|e| outcome(e, p, geometry)).collect()).collect();
    let sizes: Vec<usize> = candidates.iter().map(path_cost).collect();
    let picks = greedy_select(&outcomes, &sizes);
    let covered = if outcomes.is_empty() { alloc::vec![false; examples.len()] } else { disjunct_coverage(&outcomes, &picks) };
    let program = DisjunctProgram { paths: picks.iter().map(|&c| candidates[c].clone()).collect() };
    DisjunctSynthesis { program, candidates, covered }
}
