mod serve;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use sqlsmell_core::catalog::{AntiPatternKind, Category};
use sqlsmell_core::config::BuildConfig;
use sqlsmell_core::context::open_dataset;
use sqlsmell_core::pipeline::{analyze_sources, report_for, AnalysisOptions};
use sqlsmell_core::ranker::{InterQueryMode, MetricsTable, RankingConfig};
use sqlsmell_core::report::Report;

#[derive(Parser)]
#[command(name = "sqlsmell", version, about = "Find, rank, and fix SQL anti-patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze SQL files (and optionally a dataset) and emit a report
    Check(CheckArgs),
    /// Serve the single-query HTTP check endpoint
    Serve(serve::ServeArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// SQL files or directories (*.sql); use - for stdin
    #[arg(required = true)]
    paths: Vec<String>,

    /// Dataset to profile: a SQLite file or a CSV directory (auto-detected)
    #[arg(long)]
    data: Option<PathBuf>,

    /// Named weight preset
    #[arg(long, value_enum, default_value_t = Preset::C1)]
    preset: Preset,

    /// Weights file (key = value; w_rp .. w_a, inter_query_mode)
    #[arg(long)]
    weights: Option<PathBuf>,

    /// Impact-metrics file overriding the built-in table
    #[arg(long)]
    metrics: Option<PathBuf>,

    /// Thresholds file (god_table_threshold, mva_fraction, ...)
    #[arg(long)]
    thresholds: Option<PathBuf>,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Sampling seed for data profiling
    #[arg(long)]
    seed: Option<u64>,

    /// Inter-query ordering: by finding count or by score sum
    #[arg(long, value_enum)]
    inter_query: Option<InterQueryArg>,

    /// Skip data rules even when --data is given
    #[arg(long)]
    no_data_rules: bool,

    /// Exit 1 only for findings matching these kinds/categories
    /// (comma-separated)
    #[arg(long, value_delimiter = ',')]
    fail_on: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    C1,
    C2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterQueryArg {
    Count,
    Score,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(args) => match run_check(args) {
            Ok(code) => code,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
        Command::Serve(args) => match serve::run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::from(2)
            }
        },
    }
}

fn run_check(args: CheckArgs) -> Result<ExitCode> {
    let sources = gather_sources(&args.paths)?;
    let opts = build_options(&args)?;

    let dataset = match (&args.data, args.no_data_rules) {
        (Some(path), false) => match open_dataset(path) {
            Ok(adapter) => Some(adapter),
            Err(err) => {
                eprintln!("warning: dataset unavailable, continuing without data rules: {err}");
                None
            }
        },
        _ => None,
    };

    let analysis = analyze_sources(&sources, dataset.as_deref(), &opts)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    for warning in &analysis.context.warnings {
        eprintln!("warning: {warning}");
    }
    let report = report_for(&analysis, &opts);

    match args.format {
        Format::Json => {
            use std::io::Write;
            std::io::stdout().write_all(&report.to_json_bytes())?;
        }
        Format::Text => print!("{}", report.to_text()),
    }

    Ok(if should_fail(&report, &args.fail_on)? {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn build_options(args: &CheckArgs) -> Result<AnalysisOptions> {
    let mut build = BuildConfig::default();
    if let Some(path) = &args.thresholds {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading thresholds file {}", path.display()))?;
        build.apply_kv(&text)?;
    }
    if let Some(seed) = args.seed {
        build.sample_seed = seed;
    }

    let (mut ranking, preset_name) = match args.weights {
        Some(ref path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading weights file {}", path.display()))?;
            let (cfg, warning) = RankingConfig::from_kv(&text).map_err(|e| anyhow::anyhow!("{e}"))?;
            if let Some(w) = warning {
                eprintln!("warning: {w}");
            }
            (cfg, None)
        }
        None => match args.preset {
            Preset::C1 => (RankingConfig::preset_c1(), Some("C1".to_string())),
            Preset::C2 => (RankingConfig::preset_c2(), Some("C2".to_string())),
        },
    };
    if let Some(mode) = args.inter_query {
        ranking.inter_query_mode = match mode {
            InterQueryArg::Count => InterQueryMode::ByFindingCount,
            InterQueryArg::Score => InterQueryMode::ByScore,
        };
    }

    let metrics = match &args.metrics {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading metrics file {}", path.display()))?;
            MetricsTable::with_overrides(&text).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        None => MetricsTable::default(),
    };

    let detect = sqlsmell_core::rules::DetectOptions {
        data: !args.no_data_rules,
        ..Default::default()
    };

    Ok(AnalysisOptions {
        build,
        ranking,
        metrics,
        preset_name,
        detect,
    })
}

fn gather_sources(paths: &[String]) -> Result<Vec<(String, String)>> {
    let mut sources = Vec::new();
    for path in paths {
        if path == "-" {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            sources.push(("stdin".to_string(), text));
            continue;
        }
        let path = Path::new(path);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("sql"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .sql files under {}", path.display());
            }
            for file in files {
                sources.push((
                    file.display().to_string(),
                    std::fs::read_to_string(&file)
                        .with_context(|| format!("reading {}", file.display()))?,
                ));
            }
        } else {
            sources.push((
                path.display().to_string(),
                std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?,
            ));
        }
    }
    Ok(sources)
}

/// Exit-code policy: findings present means exit 1. Suppressed findings are
/// contextual false positives and do not fail the run; --fail-on narrows the
/// failing set to the listed kinds/categories.
fn should_fail(report: &Report, fail_on: &[String]) -> Result<bool> {
    let mut selectors: Vec<String> = Vec::new();
    for sel in fail_on {
        let sel = sel.trim().to_lowercase();
        if sel.is_empty() {
            continue;
        }
        let known_kind = AntiPatternKind::from_id(&sel).is_some();
        let known_category = Category::ALL.iter().any(|c| c.id() == sel);
        if !known_kind && !known_category {
            bail!("--fail-on: unknown kind or category {sel:?}");
        }
        selectors.push(sel);
    }
    Ok(report.findings.iter().any(|f| {
        !f.suppressed
            && (selectors.is_empty()
                || selectors
                    .iter()
                    .any(|s| s == f.kind || s == f.category))
    }))
}
