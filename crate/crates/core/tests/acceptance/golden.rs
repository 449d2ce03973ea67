use std::path::PathBuf;
use std::time::Instant;

use cellscope::ingest::read_document;
use cellscope::metrics::{analyze_document, BuiltinRegistry};

use crate::{verdict, Verdict};

const METRICS: [&str; 15] = [
    "sloc",
    "comment_loc",
    "extended_comment_loc",
    "blank_loc",
    "builtin_unique",
    "builtin_count",
    "user_unique",
    "user_count",
    "api_unique",
    "api_count",
    "other_count",
    "cyclomatic",
    "function_coupling",
    "cell_coupling",
    "npavg",
];
const REAL_METRICS: [&str; 3] = ["function_coupling", "cell_coupling", "npavg"];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

pub fn golden_corpus() -> Verdict {
    let started = Instant::now();
    let dir = golden_dir();
    let mut reader = match csv::Reader::from_path(dir.join("expected.csv")) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(format!("cannot read expectations: {e}")),
    };
    let header = reader.headers().unwrap().clone();
    let registry = BuiltinRegistry::python310();
    let mut failures = Vec::new();
    let (mut files, mut notebooks, mut scripts) = (0, 0, 0);
    for row in reader.records() {
        let row = row.unwrap();
        let file = &row[0];
        files += 1;
        if file.ends_with(".ipynb") {
            notebooks += 1;
        } else {
            scripts += 1;
        }
        let doc = match read_document(&dir.join(file)) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("{file}: {e}"));
                continue;
            }
        };
        let metrics = analyze_document(&doc, registry).metrics;
        for name in METRICS {
            let column = header
                .iter()
                .position(|h| h == name)
                .expect("column present");
            let want = &row[column];
            let got = metrics.value(name).unwrap();
            let ok = match (want.is_empty(), got) {
                (true, None) => true,
                (false, Some(v)) => {
                    let expected: f64 = want.parse().unwrap();
                    if REAL_METRICS.contains(&name) {
                        (v - expected).abs() <= 1e-9
                    } else {
                        v == expected
                    }
                }
                _ => false,
            };
            if !ok {
                failures.push(format!("{file} {name}: expected {want:?}, got {got:?}"));
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if files != 30 || notebooks != 15 || scripts != 15 {
        failures.push(format!(
            "expected 15 notebooks and 15 scripts, found {notebooks} and {scripts}"
        ));
    }
    if elapsed >= 5.0 {
        failures.push(format!("took {elapsed:.2}s"));
    }
    verdict(
        failures,
        format!("{files} files x {} metrics in {elapsed:.3}s", METRICS.len()),
    )
}
