use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use cellscope::pipeline::{self, RunConfig};
use cellscope::store::Store;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use crate::support::write_corpus;
use crate::{verdict, Verdict};

const NOTEBOOKS: usize = 500;
const SCRIPTS: usize = 500;

fn corpus() -> &'static Path {
    static CORPUS: OnceLock<TempDir> = OnceLock::new();
    CORPUS
        .get_or_init(|| {
            let dir = TempDir::new().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000);
            write_corpus(dir.path(), NOTEBOOKS, SCRIPTS, &mut rng);
            dir
        })
        .path()
}

fn config(store: PathBuf, workers: usize) -> RunConfig {
    RunConfig {
        notebook_roots: vec![corpus().join("nb")],
        script_roots: vec![corpus().join("py")],
        workers,
        store,
        sample_size: Some(300),
        subset_filter: true,
        seed: 11,
        ..RunConfig::default()
    }
}

type Csvs = Vec<(String, Vec<u8>)>;

/// Runs analyze, compare and export; returns the stored document count and
/// every CSV by file name.
fn run(workers: usize, scratch: &Path) -> Result<(usize, Csvs), String> {
    let store_dir = scratch.join(format!("store-{workers}"));
    let out = scratch.join(format!("out-{workers}"));
    let cfg = config(store_dir.clone(), workers);
    let documents = pipeline::analyze(&cfg)
        .map_err(|e| e.to_string())?
        .documents;
    let report = pipeline::compare(&cfg).map_err(|e| e.to_string())?;
    pipeline::write_report(&report, &out).map_err(|e| e.to_string())?;
    let store = Store::open(&store_dir).map_err(|e| e.to_string())?;
    store.export_csv(&out).map_err(|e| e.to_string())?;
    let mut files: Csvs = fs::read_dir(&out)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    Ok((documents, files))
}

pub fn determinism() -> Verdict {
    let scratch = TempDir::new().unwrap();
    let (documents, one) = match run(1, scratch.path()) {
        Ok(f) => f,
        Err(e) => return Verdict::Fail(format!("workers=1: {e}")),
    };
    let (_, eight) = match run(8, scratch.path()) {
        Ok(f) => f,
        Err(e) => return Verdict::Fail(format!("workers=8: {e}")),
    };
    let mut failures = Vec::new();
    let names: Vec<&str> = one.iter().map(|(n, _)| n.as_str()).collect();
    if names != eight.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>() {
        failures.push("different sets of CSV files".to_string());
    }
    for ((name, a), (_, b)) in one.iter().zip(&eight) {
        if a != b {
            failures.push(format!("{name} differs"));
        }
    }
    if documents != NOTEBOOKS + SCRIPTS {
        failures.push(format!("{documents} documents stored"));
    }
    if names.len() < 6 {
        failures.push(format!("only {} CSV files written", names.len()));
    }
    let bytes: usize = one.iter().map(|(_, b)| b.len()).sum();
    verdict(
        failures,
        format!(
            "{} files, {documents} documents stored, {} CSVs ({bytes} bytes) identical",
            NOTEBOOKS + SCRIPTS,
            names.len()
        ),
    )
}

pub fn throughput() -> Verdict {
    let scratch = TempDir::new().unwrap();
    let cfg = config(scratch.path().join("store"), RunConfig::default().workers);
    let started = Instant::now();
    match pipeline::analyze(&cfg) {
        Ok(summary) => {
            let secs = started.elapsed().as_secs_f64();
            let rate = summary.documents as f64 / secs;
            Verdict::Soft(format!(
                "{} documents in {secs:.2}s on {} workers: {rate:.0} documents/second (target 200 on 4 cores)",
                summary.documents, cfg.workers
            ))
        }
        Err(e) => Verdict::Soft(format!("analyze failed: {e}")),
    }
}

pub fn replication() -> Verdict {
    Verdict::Skipped(
        "needs a public sample of at least 500 notebooks and 500 scripts; run `cellscope analyze` and `cellscope compare` on one and check error_per_line and user_unique_per_line by hand".to_string(),
    )
}
