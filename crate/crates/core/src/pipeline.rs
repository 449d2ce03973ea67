//! End-to-end runs: discover files, analyze them in parallel into the store,
//! and compare the two corpora.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;
use walkdir::WalkDir;

use crate::ingest::{is_analyzable, kind_for_path, read_document, CellDocument, DocumentKind};
use crate::lint::{
    self, apply_notebook_context, error_rates, flatten, LintError, LintFinding, RuleSet,
};
use crate::metrics::{analyze_document, BuiltinRegistry, DocumentAnalysis};
use crate::stats::{
    self, describe, histogram, issue_frequency, length_subset, top_k, ComparisonReport,
    MetricComparison, MetricHistograms, StatsError, SubsetParams,
};
use crate::store::{CellRecord, DocumentRecord, ErrorCount, FindingRecord, Store, StoreError};

/// Files that are packaging boilerplate rather than analysis code.
const SKIPPED_FILE_NAMES: [&str; 2] = ["__init__.py", "setup.py"];
/// Rules per category in the issue tables.
pub const TOP_ISSUES: usize = 5;
pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("input root {} does not exist", .0.display())]
    NoInputs(PathBuf),
    #[error("invalid glob `{pattern}`: {source}")]
    Glob {
        pattern: String,
        #[source]
        source: globset::Error,
    },
    #[error("store is not writable: {0}")]
    StoreUnwritable(#[source] StoreError),
    #[error("store error: {0}")]
    Store(#[from] StoreError),
    #[error("need at least 2 notebooks and 2 scripts to compare, found {notebooks} and {scripts}")]
    InsufficientCorpus { notebooks: usize, scripts: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Directories (or files) searched for `.ipynb` files.
    pub notebook_roots: Vec<PathBuf>,
    /// Directories (or files) searched for `.py` files.
    pub script_roots: Vec<PathBuf>,
    /// Glob patterns matched against paths relative to their root. Empty
    /// means everything.
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    pub workers: usize,
    pub notebook_aware: bool,
    pub store: PathBuf,
    pub sample_size: Option<usize>,
    pub subset_filter: bool,
    pub store_source: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            notebook_roots: Vec::new(),
            script_roots: Vec::new(),
            include: Vec::new(),
            exclude: Vec::new(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            notebook_aware: true,
            store: PathBuf::from("cellscope-store"),
            sample_size: None,
            subset_filter: false,
            store_source: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.workers == 0 {
            return Err(PipelineError::InvalidConfig(
                "workers must be at least 1".into(),
            ));
        }
        if self.sample_size == Some(0) {
            return Err(PipelineError::InvalidConfig(
                "sample size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn glob_set(patterns: &[String]) -> Result<Option<GlobSet>, PipelineError> {
    if patterns.is_empty() {
        return Ok(None);
    }
    let mut builder = GlobSetBuilder::new();
    for p in patterns {
        let glob = Glob::new(p).map_err(|source| PipelineError::Glob {
            pattern: p.clone(),
            source,
        })?;
        builder.add(glob);
    }
    builder
        .build()
        .map(Some)
        .map_err(|source| PipelineError::Glob {
            pattern: patterns.join(","),
            source,
        })
}

fn is_hidden(entry: &walkdir::DirEntry) -> bool {
    entry.depth() > 0
        && entry
            .file_name()
            .to_str()
            .is_some_and(|n| n.starts_with('.'))
}

/// Every input file with its kind, sorted by path and without duplicates.
pub fn discover(config: &RunConfig) -> Result<Vec<(PathBuf, DocumentKind)>, PipelineError> {
    let include = glob_set(&config.include)?;
    let exclude = glob_set(&config.exclude)?;
    let roots = config
        .notebook_roots
        .iter()
        .map(|r| (r, DocumentKind::Notebook))
        .chain(
            config
                .script_roots
                .iter()
                .map(|r| (r, DocumentKind::Script)),
        );

    let mut found = Vec::new();
    for (root, wanted) in roots {
        if !root.exists() {
            return Err(PipelineError::NoInputs(root.clone()));
        }
        let walker = WalkDir::new(root)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| !is_hidden(e));
        for entry in walker {
            let entry = match entry {
                Ok(e) => e,
                Err(e) => {
                    log::warn!("skipping unreadable entry: {e}");
                    continue;
                }
            };
            if !entry.file_type().is_file() || kind_for_path(entry.path()) != Some(wanted) {
                continue;
            }
            let name = entry.file_name().to_string_lossy();
            if SKIPPED_FILE_NAMES.contains(&name.as_ref()) {
                continue;
            }
            let relative = entry.path().strip_prefix(root).unwrap_or(entry.path());
            if include.as_ref().is_some_and(|g| !g.is_match(relative)) {
                continue;
            }
            if exclude.as_ref().is_some_and(|g| g.is_match(relative)) {
                continue;
            }
            found.push((entry.into_path(), wanted));
        }
    }
    found.sort();
    found.dedup();
    Ok(found)
}

/// Lints one document, applying the notebook-aware pass when asked.
pub fn lint_document(
    doc: &CellDocument,
    analysis: &DocumentAnalysis,
    notebook_aware: bool,
    registry: &BuiltinRegistry,
) -> Vec<LintFinding> {
    let flat = flatten(doc);
    let mut findings = lint::run_checks(&flat, &RuleSet::all(), registry).findings;
    if notebook_aware {
        apply_notebook_context(&mut findings, doc, &analysis.names_bound_by_cell());
    }
    findings
}

/// Rows produced for one document.
#[derive(Debug, Clone)]
pub struct DocumentRows {
    pub document: DocumentRecord,
    pub cells: Vec<CellRecord>,
    pub findings: Vec<FindingRecord>,
}

/// Metrics and lint results for one parsed document, as store rows.
pub fn document_rows(
    doc: &CellDocument,
    config: &RunConfig,
    registry: &BuiltinRegistry,
) -> DocumentRows {
    let analysis = analyze_document(doc, registry);
    let findings = lint_document(doc, &analysis, config.notebook_aware, registry);
    let errors = match error_rates(&findings, &analysis.metrics) {
        Ok(rates) => ErrorCount::from(rates),
        Err(LintError::DegenerateDocument { total }) => ErrorCount {
            total,
            per_line: None,
        },
    };
    DocumentRows {
        document: DocumentRecord::new(doc, analysis.metrics.clone(), errors),
        cells: analysis
            .cells
            .iter()
            .map(|c| CellRecord::new(doc, c, config.store_source))
            .collect(),
        findings: findings
            .iter()
            .map(|f| FindingRecord::new(&doc.doc_id, f))
            .collect(),
    }
}

enum Outcome {
    Done(Box<DocumentRows>),
    Skipped,
    Failed(String),
}

fn process(path: &Path, config: &RunConfig, registry: &BuiltinRegistry) -> Outcome {
    let doc = match read_document(path) {
        Ok(doc) => doc,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    if !is_analyzable(&doc) {
        return Outcome::Skipped;
    }
    Outcome::Done(Box::new(document_rows(&doc, config, registry)))
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "analysis panicked".to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub discovered: usize,
    pub documents: usize,
    pub skipped: usize,
    /// Files that could not be read or analyzed, with the reason.
    pub failures: Vec<(PathBuf, String)>,
    /// Code cells that did not parse, over all stored documents.
    pub failed_cells: u64,
    pub elapsed: Duration,
}

/// Analyzes every discovered file into the store. Per-file failures are
/// logged and counted; they never abort the run. The store contents do not
/// depend on the number of workers.
pub fn analyze(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    let started = Instant::now();
    let inputs = discover(config)?;
    let mut store = Store::open(&config.store).map_err(PipelineError::StoreUnwritable)?;
    let registry = BuiltinRegistry::python310();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()?;

    let (tx, rx) = mpsc::channel::<(PathBuf, Outcome)>();
    let mut summary = RunSummary {
        discovered: inputs.len(),
        documents: 0,
        skipped: 0,
        failures: Vec::new(),
        failed_cells: 0,
        elapsed: Duration::ZERO,
    };

    let write_result = std::thread::scope(|scope| {
        let writer = scope.spawn(|| -> Result<(), StoreError> {
            // identical files share a doc_id; keep the smallest path
            let mut written: HashMap<String, PathBuf> = HashMap::new();
            for (path, outcome) in rx {
                match outcome {
                    Outcome::Done(rows) => {
                        let id = rows.document.doc_id.clone();
                        if written.get(&id).is_some_and(|p| *p < path) {
                            continue;
                        }
                        if written.insert(id.clone(), path).is_none() {
                            summary.documents += 1;
                        }
                        let DocumentRows {
                            document,
                            cells,
                            findings,
                        } = *rows;
                        store.put_document(document);
                        store.put_cells(&id, cells)?;
                        store.put_findings(&id, findings)?;
                    }
                    Outcome::Skipped => summary.skipped += 1,
                    Outcome::Failed(reason) => {
                        log::warn!("{}: {reason}", path.display());
                        summary.failures.push((path, reason));
                    }
                }
            }
            Ok(())
        });

        pool.install(|| {
            inputs.par_iter().for_each_with(tx, |tx, (path, _)| {
                let outcome =
                    panic::catch_unwind(AssertUnwindSafe(|| process(path, config, registry)))
                        .unwrap_or_else(|payload| Outcome::Failed(panic_message(payload.as_ref())));
                let _ = tx.send((path.clone(), outcome));
            });
        });
        writer.join().expect("store writer panicked")
    });
    write_result?;
    store.commit().map_err(PipelineError::StoreUnwritable)?;

    summary.failures.sort();
    summary.failed_cells = store
        .documents(None)
        .map(|d| u64::from(d.metrics.failed_cells))
        .sum();
    summary.elapsed = started.elapsed();
    Ok(summary)
}

fn sample_docs<'a>(
    docs: Vec<&'a DocumentRecord>,
    size: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Vec<&'a DocumentRecord> {
    match size {
        Some(n) if n < docs.len() => {
            let mut picked = sample(rng, docs.len(), n).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| docs[i]).collect()
        }
        Some(n) => {
            log::warn!(
                "sample size {n} is not smaller than the corpus ({}); using every document",
                docs.len()
            );
            docs
        }
        None => docs,
    }
}

/// Compares the stored notebooks against the stored scripts. The length
/// filter is applied to each whole corpus first, then the seeded sample is
/// drawn (ChaCha8, without replacement) from what remains.
pub fn compare(config: &RunConfig) -> Result<ComparisonReport, PipelineError> {
    config.validate()?;
    let store = Store::open(&config.store)?;
    compare_store(&store, config)
}

pub fn compare_store(store: &Store, config: &RunConfig) -> Result<ComparisonReport, PipelineError> {
    let notebooks: Vec<&DocumentRecord> = store.documents(Some(DocumentKind::Notebook)).collect();
    let scripts: Vec<&DocumentRecord> = store.documents(Some(DocumentKind::Script)).collect();
    let (corpus_notebooks, corpus_scripts) = (notebooks.len(), scripts.len());
    if corpus_notebooks < 2 || corpus_scripts < 2 {
        return Err(PipelineError::InsufficientCorpus {
            notebooks: corpus_notebooks,
            scripts: corpus_scripts,
        });
    }

    let (notebooks, scripts, subset) = if config.subset_filter {
        let nb = length_subset(notebooks, |d| d.metrics.sloc)?;
        let sc = length_subset(scripts, |d| d.metrics.sloc)?;
        let params = SubsetParams {
            notebook_threshold: nb.threshold,
            script_threshold: sc.threshold,
        };
        (nb.kept, sc.kept, Some(params))
    } else {
        (notebooks, scripts, None)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let notebooks = sample_docs(notebooks, config.sample_size, &mut rng);
    let scripts = sample_docs(scripts, config.sample_size, &mut rng);

    let mut metrics = Vec::new();
    let mut histograms = Vec::new();
    for name in DocumentRecord::metric_names() {
        let values = |docs: &[&DocumentRecord]| -> Vec<f64> {
            docs.iter()
                .filter_map(|d| d.value(name).expect("known metric"))
                .collect()
        };
        let (a, b) = (values(&notebooks), values(&scripts));
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let test = match stats::welch_t(&a, &b) {
            Ok(t) => Some(t),
            Err(StatsError::InsufficientSample { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        metrics.push(MetricComparison {
            metric: name.to_string(),
            notebooks: describe(&a)?,
            scripts: describe(&b)?,
            test,
        });
        histograms.push(MetricHistograms {
            metric: name.to_string(),
            notebooks: histogram(&a, HISTOGRAM_BINS),
            scripts: histogram(&b, HISTOGRAM_BINS),
        });
    }

    let findings = |docs: &[&DocumentRecord]| -> Vec<Vec<FindingRecord>> {
        docs.iter()
            .map(|d| store.findings(&d.doc_id).to_vec())
            .collect()
    };
    let top_issues = if notebooks.is_empty() || scripts.is_empty() {
        Default::default()
    } else {
        let rows = issue_frequency(&findings(&notebooks), &findings(&scripts), false)?;
        top_k(&rows, TOP_ISSUES)
    };

    Ok(ComparisonReport {
        corpus_notebooks,
        corpus_scripts,
        notebooks: notebooks.len(),
        scripts: scripts.len(),
        subset,
        sample_size: config.sample_size,
        seed: config.seed,
        metrics,
        top_issues,
        histograms,
    })
}

/// Writes `report.txt`, `metrics.csv`, `issues.csv` and `histograms.csv`.
pub fn write_report(report: &ComparisonReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("report.txt", report.to_text()),
        ("metrics.csv", report.metrics_csv()),
        ("issues.csv", report.issues_csv()),
        ("histograms.csv", report.histograms_csv()),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
