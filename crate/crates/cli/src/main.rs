use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use polarbench::dataset::{
    baseline_table, format_baseline_table, read_dataset, verify_dataset, write_dataset, IMAGES_DIR,
};
use polarbench::eval::{
    aggregate, read_records, run_eval, EndpointConfig, ModelClient, PromptMode, RunOptions, TopologyFilter,
};
use polarbench::server::{serve, ServerConfig};
use polarbench::taskgen::{catalog, generate_dataset, GenConfig, GenError, GeneratedSet};
use serde_json::json;
use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

const RECORDS_FILE: &str = "records.jsonl";

/// Generate, validate and evaluate paired Cartesian/Polar grid-reasoning
/// puzzles.
#[derive(Debug, Parser)]
#[command(name = "polarbench", version)]
struct Cli {
    /// Log filter, e.g. `info` or `polarbench=debug` (overrides RUST_LOG)
    #[arg(long, global = true)]
    log: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dataset of puzzle pairs with images and a manifest
    Gen(GenArgs),
    /// Re-check every instance of a dataset against its oracle and image
    Validate(ValidateArgs),
    /// Query a model endpoint over a dataset and record its answers
    Eval(EvalArgs),
    /// Aggregate evaluation records into accuracy tables
    Report(ReportArgs),
    /// Print the per-task random-guess baseline of a dataset
    Baseline(BaselineArgs),
    /// Run the human-rater HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// JSON generation config; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for manifest.jsonl, images/ and puzzles/
    #[arg(long)]
    out: PathBuf,
    /// Override the config's pairs per task
    #[arg(long)]
    n_per_task: Option<usize>,
    /// Override the config's base seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Dataset directory
    #[arg(long)]
    dataset: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Dataset directory
    #[arg(long)]
    dataset: PathBuf,
    /// JSON endpoint config (url, model, auth_env, ...)
    #[arg(long)]
    endpoint: PathBuf,
    /// Prompt mode: standard, conversion_hint, few_shot, two_stage_caption or two_stage_answer
    #[arg(long, default_value = "standard")]
    mode: PromptMode,
    /// Which layouts to evaluate: c, p, both or all
    #[arg(long, default_value = "both")]
    topology: TopologyFilter,
    /// Queries per instance
    #[arg(long, default_value_t = 1)]
    repeats: u32,
    /// Comma-separated task ids to evaluate (default: all)
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<String>>,
    /// Directory receiving records.jsonl (appended to and resumed)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Records file, or a directory containing records.jsonl
    #[arg(long)]
    records: PathBuf,
    /// Dataset the records were produced from
    #[arg(long)]
    dataset: PathBuf,
    /// Directory for report.json and report.txt (default: next to the records)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// Dataset directory
    #[arg(long)]
    dataset: PathBuf,
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Dataset directory
    #[arg(long)]
    dataset: PathBuf,
    /// Directory holding the append-only rater log
    #[arg(long)]
    log_dir: PathBuf,
    /// Built rater UI bundle served under /ui/
    #[arg(long, default_value = "rater-ui/dist")]
    ui_dir: PathBuf,
    /// Port to listen on
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Address to bind
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
}

/// Failure that maps to exit code 1 after its output has been printed.
#[derive(Debug)]
struct Failed;

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("failed")
    }
}

impl std::error::Error for Failed {}

/// Bad input from the user: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load_config(args: &GenArgs) -> Result<GenConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            GenConfig::from_json(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?
        }
        None => GenConfig::default(),
    };
    if let Some(n) = args.n_per_task {
        cfg.n_per_task = n;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    Ok(cfg)
}

fn print_gen_stats(set: &GeneratedSet) {
    // (pairs, instances, rejected attempts)
    let mut stats: BTreeMap<usize, (&str, usize, usize, u64)> = BTreeMap::new();
    let rank = |id: &str| catalog().iter().position(|t| t.id == id).unwrap_or(usize::MAX);
    for p in &set.pairs {
        let e = stats.entry(rank(&p.cartesian.task_id)).or_insert((catalog()[rank(&p.cartesian.task_id)].id, 0, 0, 0));
        e.1 += 1;
        e.2 += 2;
        e.3 += u64::from(p.cartesian.attempt);
    }
    for v in &set.variants {
        let e = stats.entry(rank(&v.task_id)).or_insert((catalog()[rank(&v.task_id)].id, 0, 0, 0));
        e.2 += 1;
        e.3 += u64::from(v.attempt);
    }
    println!("{:<20} {:>6} {:>9} {:>9} {:>9}", "task", "pairs", "instances", "rejected", "rej.rate");
    for (task, pairs, instances, rejected) in stats.values() {
        let units = *instances as u64 - *pairs as u64;
        let rate = 100.0 * *rejected as f64 / (*rejected + units) as f64;
        println!("{task:<20} {pairs:>6} {instances:>9} {rejected:>9} {rate:>8.1}%");
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let cfg = load_config(&args)?;
    let start = Instant::now();
    let set = match generate_dataset(&cfg) {
        Ok(s) => s,
        Err(e @ GenError::Exhausted { .. }) => bail!("generation failed: {e}"),
        Err(e) => return Err(Usage(e.to_string()).into()),
    };
    let manifest = write_dataset(&set, &args.out)?;
    print_gen_stats(&set);
    eprintln!(
        "wrote {} instances to {} in {:.1}s",
        set.instances().len(),
        manifest.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let reports = verify_dataset(&args.dataset)?;
    let mut failed = 0usize;
    for r in &reports {
        let bad: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
        if bad.is_empty() {
            continue;
        }
        failed += 1;
        for c in bad {
            println!("{}", json!({"id": r.id, "check": c.name, "detail": c.detail}));
        }
    }
    eprintln!("{} of {} instances passed", reports.len() - failed, reports.len());
    if failed > 0 {
        return Err(Failed.into());
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.endpoint).with_context(|| format!("reading {}", args.endpoint.display()))?;
    let cfg = EndpointConfig::from_json(&text).map_err(|e| Usage(format!("{}: {e}", args.endpoint.display())))?;
    let dataset = read_dataset(&args.dataset)?;
    let client = ModelClient::new(cfg, dataset.root.join(IMAGES_DIR))?;
    let opts = RunOptions {
        mode: args.mode,
        topology: args.topology,
        repeats: args.repeats,
        records_path: args.out.join(RECORDS_FILE),
        tasks: args.tasks,
    };
    let rt = tokio::runtime::Runtime::new()?;
    let summary = rt.block_on(run_eval(Arc::new(dataset.instances), Arc::new(client), &opts, None))?;
    eprintln!(
        "{} new records, {} already present, {} truncated, {} failed -> {}",
        summary.records.len(),
        summary.skipped,
        summary.truncated,
        summary.failures.len(),
        opts.records_path.display()
    );
    for (id, err) in &summary.failures {
        println!("{}", json!({"id": id, "error": err}));
    }
    if !summary.failures.is_empty() {
        return Err(Failed.into());
    }
    Ok(())
}

fn records_file(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(RECORDS_FILE)
    } else {
        p.to_path_buf()
    }
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let path = records_file(&args.records);
    if !path.exists() {
        bail!("no records at {}", path.display());
    }
    let records = read_records(&path)?;
    let dataset = read_dataset(&args.dataset)?;
    let out = args
        .out
        .unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default());
    std::fs::create_dir_all(&out)?;
    let mut by_mode: BTreeMap<PromptMode, Vec<_>> = BTreeMap::new();
    for r in records {
        // captions belong to the two-stage answer report
        let mode = if r.mode == PromptMode::TwoStageCaption {
            PromptMode::TwoStageAnswer
        } else {
            r.mode
        };
        by_mode.entry(mode).or_default().push(r);
    }
    let mut json_out = serde_json::Map::new();
    let mut text = String::new();
    for (mode, recs) in &by_mode {
        let report = aggregate(recs, &dataset.instances)?;
        text.push_str(&format!("== {mode} ==\n{}\n", report.to_text()));
        json_out.insert(mode.to_string(), serde_json::to_value(&report)?);
    }
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&json_out)?)?;
    std::fs::write(out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let dataset = read_dataset(&args.dataset)?;
    let rows = baseline_table(&dataset.instances);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        print!("{}", format_baseline_table(&rows));
    }
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Result<()> {
    let cfg = ServerConfig {
        dataset: args.dataset,
        log_dir: args.log_dir,
        ui_dir: args.ui_dir,
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(serve(&cfg, SocketAddr::new(args.host, args.port)))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = cli
        .log
        .clone()
        .map(tracing_subscriber::EnvFilter::new)
        .unwrap_or_else(|| {
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn,polarbench=info"))
        });
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Report(a) => cmd_report(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Failed>() => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
