//! The `templex` command line.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::baseline::{self, BaselineConfig, Fallback, Scope};
use crate::corpus::{self, write_json, ExperimentPlan, Quadrant};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, Partition};
use crate::metrics::{self, EvalReport};
use crate::registry::{self, Registry};

pub use config::FileConfig;

/// k values accepted without `--allow-any-k`.
pub const K_GRID: [usize; 5] = [1, 2, 4, 8, 16];

#[derive(Debug, Parser)]
#[command(name = "templex", version, about = "Templated NLI corpora with explanations, and their evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write train, dev and the four test quadrants for one k and fold.
    Generate(GenerateArgs),
    /// Run the rule-based baseline over an examples file.
    Baseline(BaselineArgs),
    /// Score a predictions file against gold examples.
    Evaluate(EvaluateArgs),
    /// generate + baseline + evaluate over several k and folds, merged into one CSV.
    Grid(GridArgs),
    /// Template counts and mean rendered lengths.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat TOML file with defaults for any flag; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lexicon file (default: built-in starter lexicon).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Template file (default: built-in starter registry).
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Master seed (required, here or in the config file).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub fold: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accept k outside 1, 2, 4, 8, 16.
    #[arg(long)]
    pub allow_any_k: bool,
    /// Examples per template in each test quadrant.
    #[arg(long)]
    pub test_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub common: Common,
    /// Held-out fold; the other folds are the known templates.
    #[arg(long)]
    pub fold: Option<usize>,
    /// Examples file to explain.
    #[arg(long)]
    pub input: PathBuf,
    /// Predictions file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub scope: Option<Scope>,
    #[arg(long)]
    pub fallback: Option<Fallback>,
    /// Fallback log path (default: predictions path with `.fallbacks.jsonl`).
    #[arg(long)]
    pub fallback_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Gold examples; repeat for several files.
    #[arg(long, required = true)]
    pub gold: Vec<PathBuf>,
    /// Report JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fail when a prediction id has no gold example.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated k values (default 1,2,4,8,16).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Comma-separated held-out folds (default 0).
    #[arg(long, value_delimiter = ',')]
    pub fold: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub allow_any_k: bool,
    #[arg(long)]
    pub scope: Option<Scope>,
    #[arg(long)]
    pub fallback: Option<Fallback>,
    #[arg(long)]
    pub test_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Rendered samples per template.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value = "ind")]
    pub partition: Partition,
    /// Also write the stats JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

struct Inputs {
    file: FileConfig,
    lexicon: Lexicon,
    registry: Registry,
    seed: u64,
}

fn load_inputs(common: &Common) -> Result<Inputs> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = common
        .seed
        .or(file.seed)
        .ok_or_else(|| Error::InvalidArgument("--seed is required".into()))?;
    let lexicon = match common.lexicon.as_ref().or(file.lexicon.as_ref()) {
        Some(p) => Lexicon::load(p)?,
        None => Lexicon::starter(),
    };
    let registry = match common.registry.as_ref().or(file.registry.as_ref()) {
        Some(p) => Registry::load(p, &lexicon)?,
        None => Registry::starter(&lexicon)?,
    };
    Ok(Inputs {
        file,
        lexicon,
        registry,
        seed,
    })
}

fn check_k(k: usize, allow_any: bool) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if !allow_any && !K_GRID.contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} is not one of {K_GRID:?}; pass --allow-any-k to use it"
        )));
    }
    Ok(())
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required")))
}

fn plan(inputs: &Inputs, k: usize, fold: usize, test_size: Option<usize>) -> Result<ExperimentPlan> {
    let split = registry::split_folds(&inputs.registry, inputs.seed);
    let mut plan = ExperimentPlan::new(split, fold, k, inputs.seed)?;
    if let Some(n) = test_size {
        if n == 0 {
            return Err(Error::InvalidArgument("test size must be positive".into()));
        }
        plan.test_size = n;
    }
    Ok(plan)
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let inputs = load_inputs(&a.common)?;
    let f = &inputs.file;
    let k = required(a.k.or(f.k), "k")?;
    check_k(k, a.allow_any_k || f.allow_any_k.unwrap_or(false))?;
    let fold = required(a.fold.or(f.fold), "fold")?;
    let out = required(a.out.clone().or(f.out.clone()), "out")?;
    let plan = plan(&inputs, k, fold, a.test_size.or(f.test_size))?;
    let corpus = corpus::generate(&plan, &inputs.registry, &inputs.lexicon)?;
    corpus.write_dir(&out)?;
    for (name, n) in &corpus.report.counts {
        println!("{name}: {n}");
    }
    if !corpus.report.warnings.is_empty() {
        eprintln!("{} generation warning(s), see report.json", corpus.report.warnings.len());
    }
    Ok(())
}

fn baseline_config(inputs: &Inputs, fold: usize, scope: Scope, fallback: Fallback) -> Result<BaselineConfig> {
    let split = registry::split_folds(&inputs.registry, inputs.seed);
    if fold >= split.folds.len() {
        return Err(Error::InvalidArgument(format!(
            "fold must be in 0..{}, got {fold}",
            split.folds.len()
        )));
    }
    Ok(BaselineConfig {
        scope,
        training_template_ids: split.training_ids(fold),
        fallback,
        log_fallbacks: true,
    })
}

fn fallback_log_path(predictions: &Path) -> PathBuf {
    let stem = predictions
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "predictions".into());
    predictions.with_file_name(format!("{stem}.fallbacks.jsonl"))
}

fn cmd_baseline(a: BaselineArgs) -> Result<()> {
    let inputs = load_inputs(&a.common)?;
    let f = &inputs.file;
    let fold = required(a.fold.or(f.fold), "fold")?;
    let out = required(a.out.clone().or(f.out.clone()), "out")?;
    let config = baseline_config(
        &inputs,
        fold,
        a.scope.or(f.scope).unwrap_or_default(),
        a.fallback.or(f.fallback).unwrap_or_default(),
    )?;
    let log = a.fallback_log.clone().unwrap_or_else(|| fallback_log_path(&out));
    let summary = baseline::run(&a.input, &config, &inputs.registry, &inputs.lexicon, &out, &log)?;
    println!("examples: {}\nfallbacks: {}", summary.examples, summary.fallbacks);
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let inputs = load_inputs(&a.common)?;
    let strict = a.strict || inputs.file.strict.unwrap_or(false);
    let report = metrics::evaluate_files(&a.predictions, &a.gold, &inputs.lexicon)?;
    if let Some(out) = a.out.as_ref().or(inputs.file.out.as_ref()) {
        write_json(&report, out)?;
    }
    print!("{}", report.to_table());
    if strict && !report.unmatched_ids.is_empty() {
        return Err(Error::Join {
            ids: report.unmatched_ids,
        });
    }
    Ok(())
}

pub const GRID_HEADER: &str = "k,fold,system,quadrant,metric,value";

/// CSV rows for one evaluated (k, fold) cell; quadrants only, undefined rates skipped.
pub fn grid_rows(k: usize, fold: usize, system: &str, report: &EvalReport) -> Vec<String> {
    let mut rows = Vec::new();
    for q in Quadrant::ALL {
        let Some(m) = report.groups.get(&q.name()) else {
            continue;
        };
        let metrics = [
            ("accuracy", m.accuracy),
            ("majority_accuracy", m.majority_accuracy),
            ("bleu", m.bleu),
            ("hallucination_rate", m.hallucination_rate),
            ("indicator_precision", m.indicator_precision),
            ("indicator_recall", m.indicator_recall),
        ];
        for (name, value) in metrics {
            if let Some(v) = value {
                rows.push(format!("{k},{fold},{system},{},{name},{v}", q.name()));
            }
        }
    }
    rows
}

fn cmd_grid(a: GridArgs) -> Result<()> {
    let inputs = load_inputs(&a.common)?;
    let f = &inputs.file;
    let ks = if !a.k.is_empty() {
        a.k.clone()
    } else if let Some(k) = f.k {
        vec![k]
    } else {
        K_GRID.to_vec()
    };
    let allow_any = a.allow_any_k || f.allow_any_k.unwrap_or(false);
    for &k in &ks {
        check_k(k, allow_any)?;
    }
    let folds = if !a.fold.is_empty() {
        a.fold.clone()
    } else {
        vec![f.fold.unwrap_or(0)]
    };
    let out = required(a.out.clone().or(f.out.clone()), "out")?;
    let scope = a.scope.or(f.scope).unwrap_or_default();
    let fallback = a.fallback.or(f.fallback).unwrap_or_default();
    let system = format!("rule_{scope}_{fallback}");
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let csv_path = out.join("grid.csv");
    let mut csv = format!("{GRID_HEADER}\n");

    for &fold in &folds {
        let config = baseline_config(&inputs, fold, scope, fallback)?;
        for &k in &ks {
            let dir = out.join(format!("k{k}")).join(format!("fold{fold}"));
            let plan = plan(&inputs, k, fold, a.test_size.or(f.test_size))?;
            let corpus = corpus::generate(&plan, &inputs.registry, &inputs.lexicon)?;
            corpus.write_dir(&dir)?;
            let mut preds = Vec::new();
            let mut gold = Vec::new();
            for (q, examples) in &corpus.test {
                let (p, fallbacks) = baseline::run_examples(examples, &config, &inputs.registry, &inputs.lexicon);
                let stem = format!("predictions_{}", q.name());
                metrics::write_predictions(&p, dir.join(format!("{stem}.jsonl")))?;
                let log: Vec<baseline::FallbackRecord> = fallbacks
                    .into_iter()
                    .map(|example_id| baseline::FallbackRecord { example_id })
                    .collect();
                corpus::write_jsonl(&log, dir.join(format!("{stem}.fallbacks.jsonl")))?;
                preds.extend(p);
                gold.extend_from_slice(examples);
            }
            let report = metrics::evaluate(&preds, &gold, &inputs.lexicon)?;
            write_json(&report, dir.join("eval.json"))?;
            for row in grid_rows(k, fold, &system, &report) {
                let _ = writeln!(csv, "{row}");
            }
            // Rewritten after every cell so finished cells survive a later failure.
            std::fs::write(&csv_path, &csv).map_err(|e| Error::io(&csv_path, e))?;
            println!("k={k} fold={fold}: done");
        }
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let inputs = load_inputs(&a.common)?;
    let stats = registry::registry_stats(&inputs.registry, &inputs.lexicon, a.samples, a.partition, inputs.seed)?;
    let text = serde_json::to_string_pretty(&stats).map_err(|e| Error::Invariant(e.to_string()))?;
    println!("{text}");
    if let Some(out) = &a.out {
        write_json(&stats, out)?;
    }
    Ok(())
}
