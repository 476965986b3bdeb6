//! Command-line interface: the full pipeline as subcommands of one thin
//! binary. Exit codes: 0 success, 1 runtime failure, 2 usage/validation.

mod config;
mod synth;

pub use config::{config_hash, FileConfig};
pub use synth::{synth_batch, SynthOutcome, SynthSummary};

use crate::dataset::{
    dataset_stats, make_bias_splits, read_dataset, write_dataset, CreatedWith, DatasetManifest,
};
use crate::eval::{
    default_shots, evaluate, load_shots, parse_adapter, score_item, EvalConfig, EvalMode,
    ModelAdapterConfig, ModelRequest, ModelResponse,
};
use crate::facts::SceneDocument;
use crate::geom::{QualityConfig, SolverConfig};
use crate::qa::{generate_qa, QAConfig, QuestionCatalog};
use crate::render::{render_svg, RenderConfig};
use crate::scene::{parse_program, relabel, validate_program, IdentifierScheme};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

const EXIT_OK: i32 = 0;
const EXIT_RUNTIME: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "georef",
    version,
    about = "Synthesize geometric referring-expression datasets and evaluate models on them"
)]
struct Cli {
    /// Optional TOML config file supplying defaults for flags.
    #[arg(long, global = true, env = "GEOREF_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and render every template: one common-identifier scene plus
    /// N random-identifier scenes per template.
    Synth(SynthArgs),
    /// Generate the question/answer dataset from solved scenes.
    Qagen(QagenArgs),
    /// Evaluate an answer-producing model on a dataset.
    Eval(EvalArgs),
    /// Build the Cmn/Rand/Hybrid bias-study splits.
    Splits(SplitsArgs),
    /// Print dataset statistics.
    Stats(StatsArgs),
    /// Solve and render a single scene file.
    Render(RenderArgs),
    /// Score a predictions file against a dataset (the training-side
    /// reward).
    Reward(RewardArgs),
    /// Serve a bundled mock adapter over stdio (line-delimited JSON);
    /// used to exercise the subprocess transport.
    #[command(hide = true)]
    AdapterMock(AdapterMockArgs),
}

#[derive(Args, Serialize)]
struct SynthArgs {
    /// Directory of .scene templates.
    #[arg(long, env = "GEOREF_TEMPLATES")]
    templates: PathBuf,
    /// Output directory (scenes/, images/, synth_manifest.json).
    #[arg(long, env = "GEOREF_OUT")]
    out: PathBuf,
    /// Random-identifier scenes per template, besides the common one.
    #[arg(long, env = "GEOREF_PER_TYPE_RANDOM")]
    per_type_random: Option<u32>,
    #[arg(long, env = "GEOREF_SEED")]
    seed: Option<u64>,
    /// Parallel solver jobs.
    #[arg(long, env = "GEOREF_JOBS")]
    jobs: Option<usize>,
    #[arg(long, env = "GEOREF_ACCEPT_TOL")]
    accept_tol: Option<f64>,
    #[arg(long, env = "GEOREF_MAX_RESTARTS")]
    max_restarts: Option<u32>,
}

#[derive(Args, Serialize)]
struct QagenArgs {
    /// Directory produced by synth (reads its scenes/ subdirectory).
    #[arg(long, env = "GEOREF_SCENES")]
    scenes: PathBuf,
    /// Output dataset path (JSONL).
    #[arg(long, env = "GEOREF_OUT")]
    out: PathBuf,
    #[arg(long, env = "GEOREF_TWO_STEP_RATIO")]
    two_step_ratio: Option<f64>,
    #[arg(long, env = "GEOREF_SEED")]
    seed: Option<u64>,
    /// Question catalog override.
    #[arg(long, env = "GEOREF_QUESTIONS")]
    questions: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct EvalArgs {
    #[arg(long, env = "GEOREF_DATASET")]
    dataset: PathBuf,
    /// Adapter spec: mock:oracle | mock:null | mock:shuffle:SEED |
    /// mock:oracle-verifier | cmd:<command> | http(s)://...
    #[arg(long, env = "GEOREF_ADAPTER")]
    adapter: String,
    /// Verifier adapter spec for the verify modes; defaults to the
    /// generator adapter.
    #[arg(long, env = "GEOREF_VERIFIER")]
    verifier: Option<String>,
    /// Exemplar file (JSONL); bundled 3-shot exemplars by default.
    #[arg(long, env = "GEOREF_SHOTS")]
    shots: Option<PathBuf>,
    #[arg(long, env = "GEOREF_SHOTS_COUNT")]
    shots_count: Option<usize>,
    /// Output directory (report.json, records.jsonl).
    #[arg(long, env = "GEOREF_OUT")]
    out: PathBuf,
    /// plain | regenerate | from-verifier
    #[arg(long, env = "GEOREF_MODE", default_value = "plain")]
    mode: String,
    #[arg(long, env = "GEOREF_CONCURRENCY")]
    concurrency: Option<usize>,
    /// In regenerate mode, keep the initial answer when the verifier
    /// already judged it correct.
    #[arg(long, env = "GEOREF_SKIP_WHEN_VERIFIED_CORRECT")]
    skip_when_verified_correct: bool,
    /// Adapter timeout, seconds.
    #[arg(long, env = "GEOREF_TIMEOUT")]
    timeout: Option<u64>,
    #[arg(long, env = "GEOREF_MAX_RETRIES")]
    max_retries: Option<u32>,
}

#[derive(Args, Serialize)]
struct SplitsArgs {
    #[arg(long, env = "GEOREF_DATASET")]
    dataset: PathBuf,
    /// Items per split.
    #[arg(long)]
    n: usize,
    #[arg(long, env = "GEOREF_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "GEOREF_OUT")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    #[arg(long, env = "GEOREF_DATASET")]
    dataset: PathBuf,
}

#[derive(Args, Serialize)]
struct RenderArgs {
    /// A single .scene file.
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, env = "GEOREF_SEED")]
    seed: Option<u64>,
    /// common | random
    #[arg(long, default_value = "common")]
    scheme: String,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct RewardArgs {
    /// JSONL of {"id": ..., "prediction": ...}.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, env = "GEOREF_DATASET")]
    dataset: PathBuf,
    /// Per-item rewards output (JSONL); defaults next to predictions.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct AdapterMockArgs {
    /// Mock kind: oracle | null | shuffle:SEED | oracle-verifier.
    kind: String,
    #[arg(long)]
    dataset: PathBuf,
}

/// Entry point for the `georef` binary.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let file_cfg = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: config file: {e}");
                return EXIT_USAGE;
            }
        },
        None => FileConfig::default(),
    };
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args, &file_cfg),
        Command::Qagen(args) => cmd_qagen(args, &file_cfg),
        Command::Eval(args) => cmd_eval(args, &file_cfg),
        Command::Splits(args) => cmd_splits(args, &file_cfg),
        Command::Stats(args) => cmd_stats(args),
        Command::Render(args) => cmd_render(args, &file_cfg),
        Command::Reward(args) => cmd_reward(args),
        Command::AdapterMock(args) => cmd_adapter_mock(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn cmd_synth(args: SynthArgs, file_cfg: &FileConfig) -> anyhow::Result<i32> {
    let per_type_random = args.per_type_random.or(file_cfg.per_type_random).unwrap_or(5);
    let seed = args.seed.or(file_cfg.seed).unwrap_or(0);
    let jobs = args.jobs.or(file_cfg.jobs).unwrap_or_else(num_cpus);
    let solver = SolverConfig {
        accept_tol: args.accept_tol.or(file_cfg.accept_tol).unwrap_or(1e-8),
        max_restarts: args.max_restarts.or(file_cfg.max_restarts).unwrap_or(50),
        ..SolverConfig::default()
    };
    #[derive(Serialize)]
    struct Effective<'a> {
        command: &'a str,
        per_type_random: u32,
        seed: u64,
        accept_tol: f64,
        max_restarts: u32,
    }
    let hash = config_hash(&Effective {
        command: "synth",
        per_type_random,
        seed,
        accept_tol: solver.accept_tol,
        max_restarts: solver.max_restarts,
    });

    let summary = synth_batch(
        &args.templates,
        &args.out,
        per_type_random,
        seed,
        &solver,
        &QualityConfig::default(),
        jobs,
        &hash,
    )?;
    println!(
        "synth: {} templates, {} scenes solved, {} failed",
        summary.templates, summary.solved, summary.failed
    );
    for line in &summary.failures {
        println!("  failed: {line}");
    }
    if summary.templates == 0 {
        eprintln!("error: no templates found in {}", args.templates.display());
        return Ok(EXIT_USAGE);
    }
    Ok(if summary.failed == 0 { EXIT_OK } else { EXIT_RUNTIME })
}

fn cmd_qagen(args: QagenArgs, file_cfg: &FileConfig) -> anyhow::Result<i32> {
    let two_step_ratio = args.two_step_ratio.or(file_cfg.two_step_ratio).unwrap_or(0.1);
    let seed = args.seed.or(file_cfg.seed).unwrap_or(0);
    let catalog = match &args.questions {
        Some(path) => QuestionCatalog::from_path(path)?,
        None => QuestionCatalog::default_catalog(),
    };
    let qa_cfg = QAConfig { two_step_ratio, catalog };

    let scenes_dir = args.scenes.join("scenes");
    let scenes_dir = if scenes_dir.is_dir() { scenes_dir } else { args.scenes.clone() };
    let mut files: Vec<PathBuf> = std::fs::read_dir(&scenes_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        eprintln!("error: no scene documents in {}", scenes_dir.display());
        return Ok(EXIT_USAGE);
    }

    #[derive(Serialize)]
    struct Effective<'a> {
        command: &'a str,
        two_step_ratio: f64,
        seed: u64,
        scenes: usize,
    }
    let hash = config_hash(&Effective {
        command: "qagen",
        two_step_ratio,
        seed,
        scenes: files.len(),
    });

    let mut items = Vec::new();
    for file in &files {
        let doc: SceneDocument = serde_json::from_str(&std::fs::read_to_string(file)?)?;
        let stem = file.file_stem().unwrap().to_string_lossy().to_string();
        let image = format!("images/{stem}.svg");
        let item_seed = crate::util::derive_seed(seed, &stem);
        items.extend(generate_qa(&doc.scene, &doc.facts, &qa_cfg, item_seed, &stem, &image));
    }

    let manifest = DatasetManifest::new(
        items,
        "images",
        CreatedWith { tool_version: env!("CARGO_PKG_VERSION").into(), config_hash: hash },
    );
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_dataset(&manifest, &args.out)?;
    print!("{}", dataset_stats(&manifest));
    Ok(EXIT_OK)
}

fn cmd_eval(args: EvalArgs, file_cfg: &FileConfig) -> anyhow::Result<i32> {
    let mode: EvalMode = match args.mode.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let manifest = read_dataset(&args.dataset)?;
    let adapter_cfg = ModelAdapterConfig {
        endpoint: args.adapter.clone(),
        timeout: std::time::Duration::from_secs(args.timeout.unwrap_or(120)),
        max_retries: args.max_retries.unwrap_or(2),
    };
    let generator = match parse_adapter(&args.adapter, &manifest, &adapter_cfg) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: adapter: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let verifier = match &args.verifier {
        Some(spec) => match parse_adapter(spec, &manifest, &adapter_cfg) {
            Ok(a) => Some(a),
            Err(e) => {
                eprintln!("error: verifier adapter: {e}");
                return Ok(EXIT_USAGE);
            }
        },
        None => None,
    };
    let shots = match &args.shots {
        Some(path) => load_shots(path)?,
        None => default_shots(),
    };
    let shots_count = args.shots_count.or(file_cfg.shots).unwrap_or(3);
    let concurrency = args.concurrency.or(file_cfg.concurrency).unwrap_or(8);

    #[derive(Serialize)]
    struct Effective<'a> {
        command: &'a str,
        adapter: &'a str,
        verifier: Option<&'a String>,
        mode: EvalMode,
        shots_count: usize,
        skip_when_verified_correct: bool,
    }
    let hash = config_hash(&Effective {
        command: "eval",
        adapter: &args.adapter,
        verifier: args.verifier.as_ref(),
        mode,
        shots_count,
        skip_when_verified_correct: args.skip_when_verified_correct,
    });

    std::fs::create_dir_all(&args.out)?;
    let cfg = EvalConfig {
        mode,
        shots_count,
        concurrency,
        skip_when_verified_correct: args.skip_when_verified_correct,
        config_hash: hash,
        dataset_dir: args.dataset.parent().map(Path::to_path_buf),
        records_path: Some(args.out.join("records.jsonl")),
    };
    let report = evaluate(&manifest, generator.as_ref(), verifier.as_deref(), &shots, &cfg)?;
    std::fs::write(
        args.out.join("report.json"),
        crate::util::canonical_json_pretty(&report),
    )?;
    print!("{}", report.summary());
    Ok(EXIT_OK)
}

fn cmd_splits(args: SplitsArgs, file_cfg: &FileConfig) -> anyhow::Result<i32> {
    let seed = args.seed.or(file_cfg.seed).unwrap_or(0);
    let manifest = read_dataset(&args.dataset)?;
    let (cmn, rand, hybrid) = match make_bias_splits(&manifest, args.n, seed) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    std::fs::create_dir_all(&args.out)?;
    for (name, split) in [("cmn", &cmn), ("rand", &rand), ("hybrid", &hybrid)] {
        write_dataset(split, &args.out.join(format!("{name}.jsonl")))?;
    }
    println!(
        "splits: cmn {} items, rand {} items, hybrid {} items -> {}",
        cmn.items.len(),
        rand.items.len(),
        hybrid.items.len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<i32> {
    let manifest = read_dataset(&args.dataset)?;
    print!("{}", dataset_stats(&manifest));
    Ok(EXIT_OK)
}

fn cmd_render(args: RenderArgs, file_cfg: &FileConfig) -> anyhow::Result<i32> {
    let seed = args.seed.or(file_cfg.seed).unwrap_or(0);
    let scheme = match args.scheme.as_str() {
        "common" => IdentifierScheme::Common,
        "random" => IdentifierScheme::Random,
        other => {
            eprintln!("error: unknown scheme {other:?}");
            return Ok(EXIT_USAGE);
        }
    };
    let stem = args.scene.file_stem().unwrap_or_default().to_string_lossy().to_string();
    let text = std::fs::read_to_string(&args.scene)?;
    let program = parse_program(&stem, &text)?;
    let report = validate_program(&program);
    if !report.ok() {
        eprintln!("error: template invalid:\n{report}");
        return Ok(EXIT_USAGE);
    }
    let program = relabel(&program, scheme, seed)?;
    let scene = crate::geom::instantiate(
        &program,
        seed,
        &SolverConfig::default(),
        &QualityConfig::default(),
        scheme,
    )?;
    let svg = render_svg(&scene, &RenderConfig::default());
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&args.out, svg)?;
    println!("rendered {} -> {}", args.scene.display(), args.out.display());
    Ok(EXIT_OK)
}

#[derive(Debug, Deserialize)]
struct PredictionLine {
    id: String,
    prediction: String,
}

#[derive(Debug, Serialize)]
struct RewardLine<'a> {
    id: &'a str,
    reward: u8,
}

fn cmd_reward(args: RewardArgs) -> anyhow::Result<i32> {
    let manifest = read_dataset(&args.dataset)?;
    let by_id: std::collections::BTreeMap<&str, &crate::qa::QAItem> =
        manifest.items.iter().map(|i| (i.id.as_str(), i)).collect();
    let text = std::fs::read_to_string(&args.predictions)?;
    let mut rewards: Vec<(String, u8)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pred: PredictionLine = serde_json::from_str(line)
            .map_err(|e| anyhow::anyhow!("{}:{}: {e}", args.predictions.display(), i + 1))?;
        let Some(item) = by_id.get(pred.id.as_str()) else {
            eprintln!("error: prediction for unknown item {}", pred.id);
            return Ok(EXIT_USAGE);
        };
        rewards.push((pred.id.clone(), score_item(&pred.prediction, item)));
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.predictions.with_extension("rewards.jsonl"));
    let mut file = std::fs::File::create(&out)?;
    for (id, reward) in &rewards {
        writeln!(file, "{}", serde_json::to_string(&RewardLine { id, reward: *reward })?)?;
    }
    let mean = if rewards.is_empty() {
        0.0
    } else {
        rewards.iter().map(|(_, r)| *r as f64).sum::<f64>() / rewards.len() as f64
    };
    println!("mean reward {mean:.4} over {} predictions -> {}", rewards.len(), out.display());
    Ok(EXIT_OK)
}

/// Serve a bundled mock over stdio so the subprocess transport can be
/// tested end to end: one JSON request per line in, one response out.
fn cmd_adapter_mock(args: AdapterMockArgs) -> anyhow::Result<i32> {
    let manifest = read_dataset(&args.dataset)?;
    let mock = crate::eval::MockAdapter::parse(&args.kind, &manifest)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let req: ModelRequest = serde_json::from_str(&line)?;
        let text = crate::eval::AnswerModel::answer(&mock, &req)
            .unwrap_or_else(|e| format!("mock error: {e}"));
        let resp = ModelResponse { id: req.id, text };
        let mut out = stdout.lock();
        writeln!(out, "{}", serde_json::to_string(&resp)?)?;
        out.flush()?;
    }
    Ok(EXIT_OK)
}

fn num_cpus() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4)
}
