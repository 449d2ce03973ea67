use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cellscope::ingest::{read_document, IngestError};
use cellscope::metrics::builtins::LANGUAGE_VERSION;
use cellscope::metrics::{analyze_document, BuiltinRegistry};
use cellscope::pipeline::{self, PipelineError, RunConfig};
use cellscope::store::Store;

/// Structural metrics, style checks and corpus statistics for Jupyter
/// notebooks and Python scripts.
///
/// Every option can also be set through an environment variable with the
/// CELLSCOPE_ prefix, e.g. CELLSCOPE_STORE or CELLSCOPE_WORKERS.
#[derive(Debug, Parser)]
#[command(name = "cellscope", version = LANGUAGE_VERSION)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze notebooks and scripts into the store.
    Analyze(AnalyzeArgs),
    /// Compare stored notebooks against stored scripts.
    Compare(CompareArgs),
    /// Print lint findings for files or directories.
    Lint(LintArgs),
    /// Export the store tables as CSV.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct StoreArg {
    /// Store directory.
    #[arg(long, env = "CELLSCOPE_STORE", default_value = "cellscope-store")]
    store: PathBuf,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Directories searched for .ipynb files.
    #[arg(long = "notebooks", env = "CELLSCOPE_NOTEBOOKS", value_delimiter = ',')]
    notebooks: Vec<PathBuf>,
    /// Directories searched for .py files.
    #[arg(long = "scripts", env = "CELLSCOPE_SCRIPTS", value_delimiter = ',')]
    scripts: Vec<PathBuf>,
    /// Only analyze paths (relative to their root) matching these globs.
    #[arg(long, env = "CELLSCOPE_INCLUDE", value_delimiter = ',')]
    include: Vec<String>,
    /// Skip paths matching these globs.
    #[arg(long, env = "CELLSCOPE_EXCLUDE", value_delimiter = ',')]
    exclude: Vec<String>,
    /// Worker threads [default: number of CPUs].
    #[arg(long, env = "CELLSCOPE_WORKERS")]
    workers: Option<usize>,
    /// Suppress notebook-specific false positives.
    #[arg(long, env = "CELLSCOPE_NOTEBOOK_AWARE", default_value_t = true, action = clap::ArgAction::Set)]
    notebook_aware: bool,
    /// Keep cell source text in the store.
    #[arg(long, env = "CELLSCOPE_STORE_SOURCE")]
    store_source: bool,
    #[command(flatten)]
    store: StoreArg,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    store: StoreArg,
    /// Random documents drawn from each corpus.
    #[arg(long, env = "CELLSCOPE_SAMPLE_SIZE")]
    sample_size: Option<usize>,
    /// Keep only documents with SLOC below the corpus mean + standard deviation.
    #[arg(long, env = "CELLSCOPE_SUBSET_FILTER")]
    subset_filter: bool,
    /// Seed for sampling.
    #[arg(long, env = "CELLSCOPE_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write report.txt, metrics.csv, issues.csv and histograms.csv here.
    #[arg(long, env = "CELLSCOPE_REPORT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LintArgs {
    /// Files or directories to lint.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Suppress notebook-specific false positives.
    #[arg(long, env = "CELLSCOPE_NOTEBOOK_AWARE", default_value_t = true, action = clap::ArgAction::Set)]
    notebook_aware: bool,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    store: StoreArg,
    /// Output directory for documents.csv, cells.csv and findings.csv.
    #[arg(long, env = "CELLSCOPE_EXPORT_DIR", default_value = "cellscope-export")]
    out: PathBuf,
}

/// Exit code for usage errors; environment errors use 2.
const USAGE: u8 = 1;
const ENVIRONMENT: u8 = 2;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PipelineError>() {
        Some(PipelineError::InvalidConfig(_) | PipelineError::Glob { .. }) => USAGE,
        _ => ENVIRONMENT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CELLSCOPE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Compare(args) => compare(args),
        Command::Lint(args) => lint(args),
        Command::Export(args) => export(args),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    if args.notebooks.is_empty() && args.scripts.is_empty() {
        return Err(PipelineError::InvalidConfig(
            "give at least one of --notebooks or --scripts".into(),
        )
        .into());
    }
    let defaults = RunConfig::default();
    let config = RunConfig {
        notebook_roots: args.notebooks,
        script_roots: args.scripts,
        include: args.include,
        exclude: args.exclude,
        workers: args.workers.unwrap_or(defaults.workers),
        notebook_aware: args.notebook_aware,
        store: args.store.store,
        store_source: args.store_source,
        ..defaults
    };
    let summary = pipeline::analyze(&config)?;
    for (path, reason) in &summary.failures {
        eprintln!("failed: {}: {reason}", path.display());
    }
    println!(
        "{} documents stored, {} skipped, {} failed, {} cells did not parse ({:.2}s)",
        summary.documents,
        summary.skipped,
        summary.failures.len(),
        summary.failed_cells,
        summary.elapsed.as_secs_f64()
    );
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let config = RunConfig {
        store: args.store.store,
        sample_size: args.sample_size,
        subset_filter: args.subset_filter,
        seed: args.seed,
        ..RunConfig::default()
    };
    let report = pipeline::compare(&config)?;
    print!("{}", report.to_text());
    if let Some(dir) = args.out {
        pipeline::write_report(&report, &dir)
            .with_context(|| format!("writing report to {}", dir.display()))?;
    }
    Ok(())
}

fn lint_targets(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let config = RunConfig {
                notebook_roots: vec![path.clone()],
                script_roots: vec![path.clone()],
                ..RunConfig::default()
            };
            files.extend(pipeline::discover(&config)?.into_iter().map(|(p, _)| p));
        } else if path.exists() {
            files.push(path.clone());
        } else {
            return Err(PipelineError::NoInputs(path.clone()).into());
        }
    }
    Ok(files)
}

fn lint_file(path: &Path, notebook_aware: bool) -> Result<Vec<String>, IngestError> {
    let registry = BuiltinRegistry::python310();
    let doc = read_document(path)?;
    let analysis = analyze_document(&doc, registry);
    let findings = pipeline::lint_document(&doc, &analysis, notebook_aware, registry);
    let shown = path.display().to_string();
    Ok(findings.iter().map(|f| f.report_line(&shown)).collect())
}

fn lint(args: LintArgs) -> Result<()> {
    for path in lint_targets(&args.paths)? {
        match lint_file(&path, args.notebook_aware) {
            Ok(lines) => lines.iter().for_each(|l| println!("{l}")),
            Err(e) => eprintln!("failed: {e}"),
        }
    }
    Ok(())
}

fn export(args: ExportArgs) -> Result<()> {
    let store = Store::open(&args.store.store).map_err(PipelineError::Store)?;
    for path in store.export_csv(&args.out).map_err(PipelineError::Store)? {
        println!("{}", path.display());
    }
    Ok(())
}
