use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use landmark::corpus::{self, Perturbation, PerturbationSpec, Template};
use landmark::formats::{self, AnnotationFile};
use landmark::pipeline;
use landmark::report::clustering_report;
use landmark::settings::load_config;
use landmark::{evaluate, Bundle};
use landmark_core::cluster::infer_landmarks_and_cluster;
use landmark_core::SynthesisConfig;

#[derive(Parser)]
#[command(name = "landmark", version, about = "Landmark-anchored field extraction from HTML and OCR boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize extraction programs from annotated documents.
    Train {
        corpus: PathBuf,
        annotations: PathBuf,
        /// Bundle to write.
        #[arg(short, long)]
        out: PathBuf,
        /// Fields to train (default: every annotated field).
        #[arg(long)]
        field: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Blueprint distance accepted at extraction time.
        #[arg(long)]
        threshold: Option<f64>,
        /// Write the synthesis report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a bundle over a corpus; one JSON record per document and field.
    Extract {
        bundle: PathBuf,
        corpus: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        field: Vec<String>,
        /// Override the bundle's blueprint threshold.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Score predictions against gold annotations.
    Eval {
        predictions: PathBuf,
        gold: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        field: Vec<String>,
    },
    /// Show clusters and landmark candidates for one field.
    Cluster {
        corpus: PathBuf,
        annotations: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Generate a synthetic annotated corpus.
    GenCorpus {
        #[arg(long, default_value = "flight")]
        template: Template,
        #[arg(long, default_value_t = 5)]
        docs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Perturbation to apply, as `kind` or `kind:count`; repeatable.
        #[arg(long = "perturb")]
        perturb: Vec<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

/// Exit 1: runtime failure. Exit 2: bad input or usage.
enum Failure {
    Runtime(String),
    Input(String),
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn config(path: Option<&Path>, seed: Option<u64>) -> Result<SynthesisConfig, Failure> {
    let mut c = match path {
        Some(p) => load_config(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => SynthesisConfig::default(),
    };
    if let Some(s) = seed {
        c.seed = s;
    }
    Ok(c)
}

fn corpus_and_annotations(
    corpus: &Path,
    annotations: &Path,
) -> Result<(Vec<(String, landmark_core::Document)>, AnnotationFile), Failure> {
    let docs = formats::read_corpus(corpus).map_err(input)?;
    if docs.is_empty() {
        return Err(Failure::Input(format!("{}: no documents", corpus.display())));
    }
    let anns = formats::read_annotations(annotations).map_err(input)?;
    Ok((docs, anns))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_perturbation(s: &str, seed: u64) -> Result<PerturbationSpec, Failure> {
    let (kind, count) = match s.split_once(':') {
        Some((k, c)) => (k, c.parse().map_err(|_| Failure::Input(format!("bad perturbation count in {s:?}")))?),
        None => (s, 1),
    };
    let kind: Perturbation = kind.parse().map_err(Failure::Input)?;
    Ok(PerturbationSpec { kind, seed: seed ^ (kind as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15), count })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Train { corpus, annotations, out, field, config: cfg, seed, threshold, report } => {
            let mut c = config(cfg.as_deref(), seed)?;
            if let Some(t) = threshold {
                c.blueprint_threshold = t;
            }
            let (docs, anns) = corpus_and_annotations(&corpus, &annotations)?;
            let fields = if field.is_empty() { pipeline::fields_of(&anns) } else { field };
            if fields.is_empty() {
                return Err(Failure::Input("no annotated fields".into()));
            }
            let trained = pipeline::train(&docs, &anns, &fields, &c).map_err(runtime)?;
            trained.bundle.save(&out).map_err(runtime)?;
            write_or_print(report.as_deref(), &trained.reports.concat())
        }
        Command::Extract { bundle, corpus, out, field, threshold } => {
            let mut b = Bundle::load(&bundle).map_err(input)?;
            if !field.is_empty() {
                b.programs.retain(|p| field.contains(&p.field));
            }
            if let Some(t) = threshold {
                b.programs.iter_mut().for_each(|p| p.threshold = t);
            }
            let docs = formats::read_corpus(&corpus).map_err(input)?;
            let preds = pipeline::extract_all(&b, &docs);
            write_or_print(out.as_deref(), &formats::predictions_jsonl(&preds))
        }
        Command::Eval { predictions, gold, out, field } => {
            let mut preds = formats::read_predictions(&predictions).map_err(input)?;
            let mut gold = formats::read_annotations(&gold).map_err(input)?;
            if !field.is_empty() {
                preds.retain(|p| field.contains(&p.field));
                gold.values_mut().for_each(|f| f.retain(|k, _| field.contains(k)));
            }
            let report = evaluate(&preds, &gold);
            let text = serde_json::to_string_pretty(&report).map_err(runtime)? + "\n";
            write_or_print(out.as_deref(), &text)
        }
        Command::Cluster { corpus, annotations, field, config: cfg, threshold } => {
            let mut c = config(cfg.as_deref(), None)?;
            if let Some(t) = threshold {
                c.merge_threshold = t;
            }
            let (docs, anns) = corpus_and_annotations(&corpus, &annotations)?;
            let (names, docs, anns) = pipeline::training_set(&docs, &anns, &field);
            let clustering = infer_landmarks_and_cluster(&docs, &anns, &c).map_err(runtime)?;
            write_or_print(None, &clustering_report(&clustering, &names))
        }
        Command::GenCorpus { template, docs, seed, perturb, out } => {
            let specs = perturb.iter().map(|p| parse_perturbation(p, seed)).collect::<Result<Vec<_>, _>>()?;
            std::fs::create_dir_all(&out).map_err(input)?;
            let generated = corpus::generate_corpus(template, docs, seed, &specs);
            let mut anns = AnnotationFile::new();
            for d in &generated {
                formats::write_document(&out, &d.name, &d.document).map_err(runtime)?;
                anns.insert(d.name.clone(), d.annotations.clone());
            }
            formats::write_json(&out.join("annotations.json"), &anns).map_err(runtime)?;
            formats::write_json(&out.join("manifest.json"), &corpus::manifest(template, seed, &generated))
                .map_err(runtime)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(m)) => {
            eprintln!("{}", serde_json::json!({ "error": "runtime", "message": m }));
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("{}", serde_json::json!({ "error": "input", "message": m }));
            ExitCode::from(2)
        }
    }
}
