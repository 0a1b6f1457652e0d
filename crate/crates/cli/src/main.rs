//! `featrec` command line: generate labeled fixtures, ingest STEP files,
//! inspect face descriptors, recognize machining features, and score
//! predictions against ground truth.
//!
//! Exit codes: 0 on success, 1 on a domain error (bad geometry, missing
//! face, unreadable file), 2 on a usage error (unknown flags or arguments).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use featrec::brep::{load_model, save_model, FaceId, Model};
use featrec::config::EngineConfig;
use featrec::descriptor::extract_descriptor;
use featrec::eval::{evaluate_model, report, report_to_json};
use featrec::features::FeatureKind;
use featrec::geom::GeomContext;
use featrec::recognize::{recognize, result_from_json, result_to_json};
use featrec::step::{load_step, save_step};
use featrec::synth::fixtures::generate_for_feature;
use featrec::synth::{save_truth, standard_suite};
use featrec::template::TemplateLibrary;

#[derive(Parser)]
#[command(
    name = "featrec",
    version,
    about = "Machining-feature recognition for analytic B-rep models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic fixture model with ground-truth labels.
    Generate(GenerateArgs),
    /// Convert a STEP (ISO 10303-21) file to the JSON model schema.
    IngestStep {
        /// Input STEP file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output model JSON file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Print one face's descriptor as JSON.
    Describe {
        /// Model JSON file.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Numeric face id.
        #[arg(long)]
        face: u32,
        /// Use raw base-vector angles instead of direction-folded ones.
        #[arg(long)]
        unfolded: bool,
        /// Engine configuration JSON (conditions, tolerances, threshold).
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
    /// Label faces against the template library and group feature instances.
    Recognize {
        /// Model JSON file.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Engine configuration JSON (conditions, tolerances, threshold).
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Template library JSON; the builtin library when omitted.
        #[arg(long, value_name = "FILE")]
        templates: Option<PathBuf>,
    },
    /// Score a recognition result against a ground-truth file.
    Evaluate {
        /// Recognition result JSON (as produced by `recognize`).
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        /// Ground-truth JSON file.
        #[arg(long, value_name = "FILE")]
        truth: PathBuf,
        /// Report output file; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also write the confusion matrix as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Template-library maintenance.
    #[command(subcommand)]
    Templates(TemplatesCommand),
}

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("mode").required(true).args(["feature", "suite"])
))]
struct GenerateArgs {
    /// Feature subtype to generate (for example `simple_hole`).
    #[arg(long, requires = "out")]
    feature: Option<String>,
    /// Generation parameter override, repeatable: `--param radius=4`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output model JSON file.
    #[arg(long, value_name = "FILE", requires = "feature")]
    out: Option<PathBuf>,
    /// Output ground-truth JSON file.
    #[arg(long, value_name = "FILE", requires = "feature")]
    truth: Option<PathBuf>,
    /// Also write the model as a STEP file.
    #[arg(long, value_name = "FILE", requires = "feature")]
    step: Option<PathBuf>,
    /// Generate a whole fixture suite; the only suite is `standard`.
    #[arg(long, value_name = "NAME", requires = "out_dir")]
    suite: Option<String>,
    /// Directory for suite output (one model + truth pair per fixture).
    #[arg(long, value_name = "DIR", requires = "suite")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TemplatesCommand {
    /// Parse and validate a template library (the builtin one when omitted).
    Validate {
        /// Template library JSON file.
        #[arg(long, value_name = "FILE")]
        file: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        // Join the cause chain, skipping causes already quoted verbatim by
        // their parent message (thiserror's `{0}` + `#[from]` pattern).
        let mut parts: Vec<String> = Vec::new();
        for cause in e.chain() {
            let msg = cause.to_string();
            if parts.last().is_none_or(|prev| !prev.ends_with(&msg)) {
                parts.push(msg);
            }
        }
        eprintln!("error: {}", parts.join(": "));
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate(args) => generate(args),
        Command::IngestStep { input, out } => ingest_step(&input, &out),
        Command::Describe { model, face, unfolded, config } => {
            describe(&model, face, unfolded, config.as_deref())
        }
        Command::Recognize { model, out, config, templates } => {
            run_recognize(&model, out.as_deref(), config.as_deref(), templates.as_deref())
        }
        Command::Evaluate { pred, truth, out, csv } => {
            evaluate(&pred, &truth, out.as_deref(), csv.as_deref())
        }
        Command::Templates(TemplatesCommand::Validate { file }) => {
            templates_validate(file.as_deref())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<EngineConfig> {
    let cfg = match path {
        Some(p) => EngineConfig::load(p)
            .with_context(|| format!("config file {}", p.display()))?,
        None => EngineConfig::default(),
    };
    cfg.validate().context("config rejected")?;
    Ok(cfg)
}

fn load_library(path: Option<&Path>) -> Result<TemplateLibrary> {
    match path {
        Some(p) => TemplateLibrary::load(p)
            .with_context(|| format!("template library {}", p.display())),
        None => Ok(TemplateLibrary::builtin().clone()),
    }
}

fn read_model(path: &Path) -> Result<Model> {
    load_model(path).with_context(|| format!("model file {}", path.display()))
}

fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("--param {pair}: expected KEY=VALUE"))?;
        let value: f64 = value
            .parse()
            .with_context(|| format!("--param {pair}: value is not a number"))?;
        out.insert(key.to_string(), value);
    }
    Ok(out)
}

fn generate(args: GenerateArgs) -> Result<()> {
    match (args.feature, args.suite) {
        (Some(feature), None) => {
            let kind = FeatureKind::parse(&feature).ok_or_else(|| {
                anyhow!(
                    "unknown feature {feature}; known: {}",
                    FeatureKind::ALL.map(FeatureKind::name).join(", ")
                )
            })?;
            let params = parse_params(&args.params)?;
            let fx = generate_for_feature(kind, &params)
                .with_context(|| format!("generating {feature}"))?;
            let out = args
                .out
                .ok_or_else(|| anyhow!("--out is required with --feature"))?;
            save_model(&fx.model, &out)
                .with_context(|| format!("writing {}", out.display()))?;
            if let Some(truth_path) = args.truth {
                save_truth(&truth_path, &fx.truth_file())
                    .with_context(|| format!("writing {}", truth_path.display()))?;
            }
            if let Some(step_path) = args.step {
                save_step(&fx.model, &fx.name, &step_path)
                    .with_context(|| format!("writing {}", step_path.display()))?;
            }
            println!(
                "generated {} ({} faces, {} truth entries)",
                fx.name,
                fx.model.faces.len(),
                fx.truth.len()
            );
            Ok(())
        }
        (None, Some(suite)) => {
            if suite != "standard" {
                bail!("unknown suite {suite}; the only suite is `standard`");
            }
            let dir = args
                .out_dir
                .ok_or_else(|| anyhow!("--out-dir is required with --suite"))?;
            std::fs::create_dir_all(&dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            for fx in standard_suite() {
                save_model(&fx.model, &dir.join(format!("{}.model.json", fx.name)))?;
                save_truth(
                    &dir.join(format!("{}.truth.json", fx.name)),
                    &fx.truth_file(),
                )?;
                println!(
                    "{} ({} faces{})",
                    fx.name,
                    fx.model.faces.len(),
                    if fx.pinned_misrecognition { ", pinned misrecognition" } else { "" }
                );
            }
            Ok(())
        }
        _ => bail!("pass either --feature <subtype> or --suite standard"),
    }
}

fn ingest_step(input: &Path, out: &Path) -> Result<()> {
    let (model, warnings) =
        load_step(input).with_context(|| format!("STEP file {}", input.display()))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    save_model(&model, out).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "ingested {} faces, {} edges, {} vertices",
        model.faces.len(),
        model.edges.len(),
        model.vertices.len()
    );
    Ok(())
}

fn describe(model_path: &Path, face: u32, unfolded: bool, config: Option<&Path>) -> Result<()> {
    let cfg = load_config(config)?;
    let model = read_model(model_path)?;
    let face_ref = model
        .face(FaceId(face))
        .map_err(|e| anyhow!("{e}"))?;
    let ctx = GeomContext::new(&model, &cfg.tolerances);
    let d = extract_descriptor(&ctx, face_ref, &cfg.conditions, !unfolded);
    println!(
        "{}",
        serde_json::to_string_pretty(&d).expect("descriptor serializes")
    );
    Ok(())
}

fn run_recognize(
    model_path: &Path,
    out: Option<&Path>,
    config: Option<&Path>,
    templates: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let library = load_library(templates)?;
    let model = read_model(model_path)?;
    let result = recognize(&model, &library, &cfg).context("recognition failed")?;
    let text = result_to_json(&result);
    match out {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn evaluate(
    pred_path: &Path,
    truth_path: &Path,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<()> {
    let pred_text = std::fs::read_to_string(pred_path)
        .with_context(|| format!("reading {}", pred_path.display()))?;
    let result = result_from_json(&pred_text)
        .with_context(|| format!("prediction file {}", pred_path.display()))?;
    let truth = featrec::synth::load_truth(truth_path)
        .with_context(|| format!("truth file {}", truth_path.display()))?;
    let ids: Vec<FaceId> = result.faces.iter().map(|f| f.id).collect();
    let cm = evaluate_model(&ids, &truth.truth, &result).context("evaluation failed")?;
    let rep = report(&cm).context("metrics failed")?;
    let text = report_to_json(&rep);
    match out {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    if let Some(p) = csv {
        std::fs::write(p, cm.to_csv())
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn templates_validate(file: Option<&Path>) -> Result<()> {
    let library = load_library(file)?;
    let features: Vec<&str> = library
        .features()
        .into_iter()
        .map(FeatureKind::name)
        .collect();
    println!(
        "templates OK: version {}, {} variants, {} features ({})",
        library.version,
        library.templates.len(),
        features.len(),
        features.join(", ")
    );
    Ok(())
}
