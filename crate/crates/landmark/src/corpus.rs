//! Seeded synthetic corpora with gold annotations.
//!
//! Two templates: `flight`, an itinerary email (tree documents), and
//! `invoice`, a vehicle invoice scan (box documents). Each document is
//! built from a small model; perturbations edit the model and annotations
//! are recomputed when it is rendered.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use landmark_core::{AggKind, Annotation, BoxDocument, Document, Location, TextBox, TreeDocument, TreeNode};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formats::DocAnnotations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    Flight,
    Invoice,
}

impl Template {
    /// Fields with the phrase each was designed around.
    pub fn fields(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Template::Flight => &[
                ("passenger", "Passenger:"),
                ("booking", "Booking reference:"),
                ("depart", "Depart:"),
                ("arrive", "Arrive:"),
                ("total", "Total fare:"),
            ],
            Template::Invoice => &[
                ("invoice_no", "Invoice No:"),
                ("date", "Invoice date:"),
                ("chassis", "Chassis number"),
                ("part_no", "Part no."),
                ("total", "Total due:"),
            ],
        }
    }

    pub fn formats(self) -> usize {
        3
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Template::Flight => "flight",
            Template::Invoice => "invoice",
        })
    }
}

impl FromStr for Template {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flight" => Ok(Template::Flight),
            "invoice" => Ok(Template::Invoice),
            _ => Err(format!("unknown template {s:?} (expected flight or invoice)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Perturbation {
    InsertSectionOutsideRoi,
    PermuteSections,
    DuplicateRoi,
    RemoveRoi,
    MutateInsideRoi,
    TranslateBoxes,
    InsertAdBanner,
}

impl Perturbation {
    pub const ALL: [Perturbation; 7] = [
        Perturbation::InsertSectionOutsideRoi,
        Perturbation::PermuteSections,
        Perturbation::DuplicateRoi,
        Perturbation::RemoveRoi,
        Perturbation::MutateInsideRoi,
        Perturbation::TranslateBoxes,
        Perturbation::InsertAdBanner,
    ];

    /// Perturbations that leave every region of interest intact.
    pub const OUTSIDE_ROI: [Perturbation; 4] = [
        Perturbation::InsertSectionOutsideRoi,
        Perturbation::PermuteSections,
        Perturbation::DuplicateRoi,
        Perturbation::InsertAdBanner,
    ];
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Perturbation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Perturbation::ALL
            .into_iter()
            .find(|p| p.to_string().to_ascii_lowercase() == key)
            .ok_or_else(|| format!("unknown perturbation {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: Perturbation,
    pub seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratedDoc {
    pub name: String,
    pub document: Document,
    pub annotations: DocAnnotations,
    pub format: usize,
    pub perturbations: Vec<Perturbation>,
    /// Field whose region layout was changed; it should not be extracted.
    pub mutated_field: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub format: usize,
    pub perturbations: Vec<Perturbation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutated_field: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub template: Template,
    pub seed: u64,
    pub docs: Vec<ManifestEntry>,
}

const FIRST: [&str; 10] = ["Maria", "James", "Aiko", "Lukas", "Priya", "Omar", "Elena", "Tomas", "Grace", "Mateo"];
const LAST: [&str; 10] = ["Lopez", "Walker", "Tanaka", "Becker", "Sharma", "Haddad", "Rossi", "Novak", "Okafor", "Silva"];
const WEEKDAYS: [&str; 7] = ["Mon,", "Tue,", "Wed,", "Thu,", "Fri,", "Sat,", "Sun,"];
const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];
const AIRLINES: [&str; 6] = ["UA", "LH", "AF", "BA", "NH", "QF"];
const CITIES: [&str; 6] = ["Stuttgart", "Leeds", "Lyon", "Turin", "Graz", "Malmo"];
const PROMOS: [&str; 3] = ["Earn miles on every booking", "Your seat selection is saved", "Check in online 24 hours ahead"];
const FOOTERS: [&str; 2] = ["Safe travels", "Questions? Reply to this email"];
const ADS: [&str; 8] = [
    "Save 20% on hotels this summer",
    "Rent a car at your destination",
    "Join our rewards program today",
    "Travel insurance from $9",
    "Upgrade your cabin for less",
    "Download our mobile app",
    "Lounge access now available",
    "Book airport parking early",
];

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [&'a str]) -> &'a str {
    items.choose(rng).expect("non-empty")
}

fn time(rng: &mut ChaCha8Rng) -> String {
    format!("{}:{:02} {}", rng.random_range(1..=12), rng.random_range(0..60), pick(rng, &["AM", "PM"]))
}

fn long_date(rng: &mut ChaCha8Rng) -> String {
    format!("{} {} {}, {}", pick(rng, &WEEKDAYS), pick(rng, &MONTHS), rng.random_range(1..=28), rng.random_range(2016..=2027))
}

fn numeric_date(rng: &mut ChaCha8Rng) -> String {
    format!("{:02}/{:02}/{}", rng.random_range(1..=28), rng.random_range(1..=12), rng.random_range(2016..=2027))
}

fn amount(rng: &mut ChaCha8Rng) -> String {
    format!("${},{:03}.{:02}", rng.random_range(1..=99), rng.random_range(0..1000), rng.random_range(0..100))
}

fn letters(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| char::from(b'A' + rng.random_range(0..26u8))).collect()
}

fn digits(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut s = rng.random_range(1..=9u8).to_string();
    s.extend((1..n).map(|_| char::from(b'0' + rng.random_range(0..10u8))));
    s
}

// ---------------------------------------------------------------- flight

#[derive(Debug, Clone)]
struct Leg {
    flight: String,
    depart: (String, String),
    arrive: (String, String),
}

#[derive(Debug, Clone)]
enum FSection {
    Header(String),
    Promo(String),
    Info { passenger: String, booking: String },
    Leg(Leg),
    Total(String),
    Footer(String),
    Ad(Vec<String>),
    Banner(String),
}

fn leg(rng: &mut ChaCha8Rng) -> Leg {
    Leg {
        flight: format!("{} {}", pick(rng, &AIRLINES), rng.random_range(10..2000)),
        depart: (long_date(rng), time(rng)),
        arrive: (long_date(rng), time(rng)),
    }
}

fn flight_model(rng: &mut ChaCha8Rng, format: usize) -> Vec<FSection> {
    let header = FSection::Header(long_date(rng));
    let info = FSection::Info {
        passenger: format!("{} {}", pick(rng, &FIRST), pick(rng, &LAST)),
        booking: format!("{}{}{}", letters(rng, 2), digits(rng, 2), letters(rng, 2)),
    };
    let legs: Vec<FSection> = (0..rng.random_range(1..=2)).map(|_| FSection::Leg(leg(rng))).collect();
    let total = FSection::Total(amount(rng));
    let footer = FSection::Footer(pick(rng, &FOOTERS).into());
    let mut s = vec![header];
    match format {
        0 => {
            s.push(info);
            s.extend(legs);
            s.extend([total, footer]);
        }
        1 => {
            s.push(FSection::Promo(pick(rng, &PROMOS).into()));
            s.push(info);
            s.extend(legs);
            s.extend([total, footer]);
        }
        _ => {
            s.extend(legs);
            s.extend([info, total]);
        }
    }
    s
}

fn label(text: &str, mutated: bool) -> TreeNode {
    if mutated {
        TreeNode::new("td").child(TreeNode::leaf("b", text))
    } else {
        TreeNode::leaf("td", text)
    }
}

struct Annotated {
    locations: Vec<Location>,
    values: Vec<String>,
}

fn note(ann: &mut BTreeMap<&'static str, Annotated>, field: &'static str, loc: Location, value: String) {
    let a = ann.entry(field).or_insert(Annotated { locations: Vec::new(), values: Vec::new() });
    a.locations.push(loc);
    a.values.push(value);
}

fn render_flight(sections: &[FSection], mutated: Option<&str>) -> (Document, DocAnnotations) {
    let m = |f: &str| mutated == Some(f);
    let mut body = TreeNode::new("body");
    let mut ann = BTreeMap::new();
    for (i, s) in sections.iter().enumerate() {
        let at = |row: usize| Location::Tree(vec![i, row, 1].into());
        let node = match s {
            FSection::Header(d) => TreeNode::new("div")
                .attr("class", "header")
                .child(TreeNode::leaf("h1", "Your trip itinerary"))
                .child(TreeNode::leaf("p", format!("Prepared on {d}"))),
            FSection::Promo(t) => TreeNode::new("div").attr("class", "promo").child(TreeNode::leaf("p", t)),
            FSection::Info { passenger, booking } => {
                note(&mut ann, "passenger", at(0), passenger.clone());
                note(&mut ann, "booking", at(1), booking.clone());
                TreeNode::new("table")
                    .attr("class", "info")
                    .child(TreeNode::new("tr").child(label("Passenger:", m("passenger"))).child(TreeNode::leaf("td", passenger)))
                    .child(
                        TreeNode::new("tr")
                            .child(label("Booking reference:", m("booking")))
                            .child(TreeNode::leaf("td", booking)),
                    )
            }
            FSection::Leg(l) => {
                note(&mut ann, "depart", at(1), l.depart.1.clone());
                note(&mut ann, "arrive", at(2), l.arrive.1.clone());
                TreeNode::new("table")
                    .attr("class", "leg")
                    .child(TreeNode::new("tr").child(TreeNode::leaf("th", "Flight")).child(TreeNode::leaf("th", &l.flight)))
                    .child(
                        TreeNode::new("tr")
                            .child(label("Depart:", m("depart")))
                            .child(TreeNode::leaf("td", format!("{} {}", l.depart.0, l.depart.1))),
                    )
                    .child(
                        TreeNode::new("tr")
                            .child(label("Arrive:", m("arrive")))
                            .child(TreeNode::leaf("td", format!("{} {}", l.arrive.0, l.arrive.1))),
                    )
            }
            FSection::Total(a) => {
                note(&mut ann, "total", Location::Tree(vec![i, 0, 1].into()), a.clone());
                TreeNode::new("table")
                    .attr("class", "total")
                    .child(TreeNode::new("tr").child(label("Total fare:", m("total"))).child(TreeNode::leaf("td", a)))
            }
            FSection::Footer(t) => TreeNode::new("div").attr("class", "footer").child(TreeNode::leaf("p", t)),
            FSection::Ad(lines) => {
                TreeNode::new("div").attr("class", "ad").children(lines.iter().map(|l| TreeNode::leaf("p", l)))
            }
            FSection::Banner(t) => TreeNode::new("div")
                .attr("class", "banner")
                .child(TreeNode::new("a").child(TreeNode::leaf("span", t))),
        };
        body.children.push(node);
    }
    let aggs: BTreeMap<&str, AggKind> =
        [("depart", AggKind::OrderedList), ("arrive", AggKind::OrderedList)].into_iter().collect();
    let doc = Document::Tree(TreeDocument::new(body));
    (doc, finish(ann, &aggs))
}

fn finish(ann: BTreeMap<&'static str, Annotated>, aggs: &BTreeMap<&str, AggKind>) -> DocAnnotations {
    ann.into_iter()
        .map(|(f, a)| {
            let agg = aggs.get(f).cloned().unwrap_or(AggKind::Single);
            (f.to_string(), Annotation { locations: a.locations, agg, values: a.values })
        })
        .collect()
}

fn perturb_flight(s: &mut Vec<FSection>, kind: Perturbation, rng: &mut ChaCha8Rng, mutated: &mut Option<String>) {
    match kind {
        Perturbation::InsertSectionOutsideRoi => {
            let lines = (0..rng.random_range(1..=3)).map(|_| pick(rng, &ADS).to_string()).collect();
            let at = rng.random_range(0..=s.len());
            s.insert(at, FSection::Ad(lines));
        }
        Perturbation::PermuteSections => s.shuffle(rng),
        Perturbation::DuplicateRoi => {
            let legs: Vec<usize> = (0..s.len()).filter(|&i| matches!(s[i], FSection::Leg(_))).collect();
            if let Some(&at) = legs.choose(rng) {
                let new = leg(rng);
                s.insert(at + 1, FSection::Leg(new));
            }
        }
        Perturbation::RemoveRoi => {
            let legs: Vec<usize> = (0..s.len()).filter(|&i| matches!(s[i], FSection::Leg(_))).collect();
            if legs.len() > 1 {
                s.remove(*legs.choose(rng).expect("non-empty"));
            }
        }
        Perturbation::MutateInsideRoi => {
            *mutated = Some(pick(rng, &["passenger", "booking", "depart", "arrive", "total"]).into());
        }
        Perturbation::TranslateBoxes => {}
        Perturbation::InsertAdBanner => s.insert(0, FSection::Banner(pick(rng, &ADS).into())),
    }
}

// --------------------------------------------------------------- invoice

#[derive(Debug, Clone)]
enum IBlock {
    Header { street: u32, city: String },
    Meta { invoice_no: String, date: String },
    Vehicle { pieces: Vec<String>, engine: Option<String>, registered: String },
    Parts(Vec<String>),
    Totals(String),
    Footer,
    Note(Vec<String>),
    Banner(String),
}

#[derive(Debug, Clone)]
struct Invoice {
    blocks: Vec<IBlock>,
    offset: (f64, f64),
}

fn part(rng: &mut ChaCha8Rng) -> String {
    format!("PN-{}", digits(rng, 4))
}

/// Chassis number pieces: letters with a digit, five digits, and sometimes
/// a letter-digit suffix.
fn chassis(rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut p = vec![format!("{}{}", letters(rng, 3), rng.random_range(0..10)), digits(rng, 5)];
    if rng.random_bool(0.5) {
        p.push(format!("{}{}", letters(rng, 2), rng.random_range(10..100)));
    }
    p
}

fn vehicle(rng: &mut ChaCha8Rng, engine: Option<bool>) -> IBlock {
    let pieces = chassis(rng);
    let with_engine = engine.unwrap_or_else(|| rng.random_bool(0.5));
    IBlock::Vehicle { pieces, engine: with_engine.then(|| digits(rng, 13)), registered: numeric_date(rng) }
}

fn invoice_model(rng: &mut ChaCha8Rng, format: usize, engine: Option<bool>) -> Invoice {
    let header = IBlock::Header { street: rng.random_range(1..200), city: pick(rng, &CITIES).into() };
    let meta = IBlock::Meta { invoice_no: format!("INV-{}", digits(rng, 5)), date: numeric_date(rng) };
    let veh = vehicle(rng, engine);
    let parts = IBlock::Parts((0..rng.random_range(1..=2)).map(|_| part(rng)).collect());
    let totals = IBlock::Totals(amount(rng));
    let blocks = match format {
        0 => vec![header, meta, veh, parts, totals, IBlock::Footer],
        1 => vec![header, meta, parts, veh, totals, IBlock::Footer],
        _ => vec![header, veh, meta, parts, totals],
    };
    Invoice { blocks, offset: (0.0, 0.0) }
}

const H: f64 = 14.0;
const BLOCK_GAP: f64 = 80.0;

fn text_width(t: &str) -> f64 {
    8.0 * t.chars().count() as f64
}

struct Render<'a> {
    offset: (f64, f64),
    boxes: Vec<TextBox>,
    values: BTreeMap<&'static str, Vec<(TextBox, String)>>,
    mutated: Option<&'a str>,
}

impl Render<'_> {
    fn put(&mut self, text: &str, x: f64, y: f64, w: f64, h: f64) -> TextBox {
        let b = TextBox::new(text, x + self.offset.0, y + self.offset.1, w, h);
        self.boxes.push(b.clone());
        b
    }

    /// Label at `(10, y)` with its value to the right; a mutated field has
    /// its value pushed beyond the label's neighborhood.
    fn pair(&mut self, field: &'static str, label: &str, lw: f64, value: &str, y: f64) {
        self.put(label, 10.0, y, lw, H);
        let x = if self.mutated == Some(field) { 10.0 + 5.0 * lw + 20.0 } else { 10.0 + lw + 10.0 };
        let b = self.put(value, x, y, text_width(value), H);
        self.values.entry(field).or_default().push((b, value.to_string()));
    }
}

fn render_invoice(inv: &Invoice, mutated: Option<&str>) -> (Document, DocAnnotations) {
    let mut r = Render { offset: inv.offset, boxes: Vec::new(), values: BTreeMap::new(), mutated };
    let mut y = 20.0;
    for block in &inv.blocks {
        let height = match block {
            IBlock::Header { street, city } => {
                r.put("ACME Motors", 10.0, y, 110.0, H);
                let addr = format!("{street} Industrial Road, {city}");
                r.put(&addr, 10.0, y + 20.0, text_width(&addr), H);
                20.0 + H
            }
            IBlock::Meta { invoice_no, date } => {
                r.pair("invoice_no", "Invoice No:", 90.0, invoice_no, y);
                r.pair("date", "Invoice date:", 90.0, date, y + 24.0);
                24.0 + H
            }
            IBlock::Vehicle { pieces, engine, registered } => {
                r.put("Chassis number", 10.0, y, 90.0, H);
                if mutated == Some("chassis") {
                    r.put("(as registered)", 120.0, y, 120.0, H);
                }
                let row = y + 20.0;
                let mut x = 10.0;
                for (i, p) in pieces.iter().enumerate() {
                    let w = if i == 0 { 56.0 } else { text_width(p) };
                    let b = r.put(p, x, row, w, H);
                    r.values.entry("chassis").or_default().push((b, p.clone()));
                    x += w + 8.0;
                }
                if let Some(e) = engine {
                    r.put(e, 250.0, row, 110.0, H);
                }
                r.put(registered, 400.0, row, 80.0, H);
                20.0 + H
            }
            IBlock::Parts(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    r.pair("part_no", "Part no.", 70.0, p, y + 70.0 * i as f64);
                }
                70.0 * (parts.len().max(1) - 1) as f64 + H
            }
            IBlock::Totals(a) => {
                r.pair("total", "Total due:", 80.0, a, y);
                H
            }
            IBlock::Footer => {
                r.put("Thank you for your business", 10.0, y, 230.0, H);
                H
            }
            IBlock::Note(lines) => {
                for (i, l) in lines.iter().enumerate() {
                    r.put(l, 10.0, y + 20.0 * i as f64, text_width(l), H);
                }
                20.0 * (lines.len().max(1) - 1) as f64 + H
            }
            IBlock::Banner(t) => {
                r.put(t, 10.0, y, 500.0, 30.0);
                30.0
            }
        };
        y += height + BLOCK_GAP;
    }
    let doc = BoxDocument::new(r.boxes).expect("generated boxes are valid");
    let mut ann = BTreeMap::new();
    for (field, vals) in r.values {
        for (b, v) in vals {
            let idx = doc.boxes().iter().position(|o| *o == b).expect("rendered box");
            note(&mut ann, field, Location::Box(idx), v);
        }
    }
    for a in ann.values_mut() {
        let mut pairs: Vec<(Location, String)> = a.locations.drain(..).zip(a.values.drain(..)).collect();
        pairs.sort();
        (a.locations, a.values) = pairs.into_iter().unzip();
    }
    let aggs: BTreeMap<&str, AggKind> =
        [("part_no", AggKind::OrderedList), ("chassis", AggKind::ConcatWithSeparator(" ".into()))].into_iter().collect();
    (Document::Boxes(doc), finish(ann, &aggs))
}

fn perturb_invoice(inv: &mut Invoice, kind: Perturbation, rng: &mut ChaCha8Rng, mutated: &mut Option<String>) {
    let b = &mut inv.blocks;
    match kind {
        Perturbation::InsertSectionOutsideRoi => {
            let lines = (0..rng.random_range(1..=3)).map(|_| format!("Note: {}", pick(rng, &ADS))).collect();
            let at = rng.random_range(0..=b.len());
            b.insert(at, IBlock::Note(lines));
        }
        Perturbation::PermuteSections => b.shuffle(rng),
        Perturbation::DuplicateRoi => {
            if let Some(IBlock::Parts(parts)) = b.iter_mut().find(|x| matches!(x, IBlock::Parts(_))) {
                let at = rng.random_range(0..=parts.len());
                parts.insert(at, part(rng));
            }
        }
        Perturbation::RemoveRoi => {
            if let Some(IBlock::Parts(parts)) = b.iter_mut().find(|x| matches!(x, IBlock::Parts(_))) {
                if parts.len() > 1 {
                    let at = rng.random_range(0..parts.len());
                    parts.remove(at);
                }
            }
        }
        Perturbation::MutateInsideRoi => {
            *mutated = Some(pick(rng, &["invoice_no", "date", "chassis", "part_no", "total"]).into());
        }
        Perturbation::TranslateBoxes => {
            inv.offset.0 += rng.random_range(1..=200) as f64;
            inv.offset.1 += rng.random_range(1..=200) as f64;
        }
        Perturbation::InsertAdBanner => b.insert(0, IBlock::Banner(pick(rng, &ADS).into())),
    }
}

// ---------------------------------------------------------------- corpus

/// Options for one generated document.
#[derive(Debug, Clone, Default)]
pub struct DocOptions {
    /// Fixed format; random when `None`.
    pub format: Option<usize>,
    /// Invoice only: force the engine number in or out.
    pub engine: Option<bool>,
}

fn doc_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Generates document `index` of the corpus seeded with `seed`.
pub fn generate_doc(
    template: Template,
    seed: u64,
    index: usize,
    options: &DocOptions,
    perturbations: &[PerturbationSpec],
) -> GeneratedDoc {
    let mut rng = doc_rng(seed, index);
    let format = options.format.unwrap_or_else(|| rng.random_range(0..template.formats()));
    let mut mutated = None;
    let mut applied = Vec::new();
    let (document, mut annotations) = match template {
        Template::Flight => {
            let mut model = flight_model(&mut rng, format);
            for p in perturbations {
                let mut prng = doc_rng(p.seed, index);
                for _ in 0..p.count {
                    perturb_flight(&mut model, p.kind, &mut prng, &mut mutated);
                    applied.push(p.kind);
                }
            }
            render_flight(&model, mutated.as_deref())
        }
        Template::Invoice => {
            let mut model = invoice_model(&mut rng, format, options.engine);
            for p in perturbations {
                let mut prng = doc_rng(p.seed, index);
                for _ in 0..p.count {
                    perturb_invoice(&mut model, p.kind, &mut prng, &mut mutated);
                    applied.push(p.kind);
                }
            }
            render_invoice(&model, mutated.as_deref())
        }
    };
    annotations.retain(|_, a| !a.locations.is_empty());
    GeneratedDoc { name: format!("doc{index:04}"), document, annotations, format, perturbations: applied, mutated_field: mutated }
}

/// `n` documents of one template.
pub fn generate_corpus(template: Template, n: usize, seed: u64, perturbations: &[PerturbationSpec]) -> Vec<GeneratedDoc> {
    (0..n).map(|i| generate_doc(template, seed, i, &DocOptions::default(), perturbations)).collect()
}

pub fn manifest(template: Template, seed: u64, docs: &[GeneratedDoc]) -> Manifest {
    Manifest {
        template,
        seed,
        docs: docs
            .iter()
            .map(|d| ManifestEntry {
                name: d.name.clone(),
                format: d.format,
                perturbations: d.perturbations.clone(),
                mutated_field: d.mutated_field.clone(),
            })
            .collect(),
    }
}
