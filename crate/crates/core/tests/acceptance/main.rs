//! Acceptance run: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p cellscope --test acceptance`.

mod corpus;
mod fixtures;
mod golden;
mod lint_rules;
mod numeric;

#[path = "../support/mod.rs"]
mod support;

use std::process::ExitCode;
use std::time::Instant;

pub enum Verdict {
    Pass(String),
    Fail(String),
    /// Informational only, never fails the run.
    Soft(String),
    Skipped(String),
}

pub type Check = fn() -> Verdict;

pub fn verdict(failures: Vec<String>, summary: String) -> Verdict {
    if failures.is_empty() {
        Verdict::Pass(summary)
    } else {
        let shown: Vec<_> = failures.iter().take(5).cloned().collect();
        let more = failures.len().saturating_sub(shown.len());
        let tail = if more > 0 {
            format!(" (+{more} more)")
        } else {
            String::new()
        };
        Verdict::Fail(format!("{summary}; {}{tail}", shown.join("; ")))
    }
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 11] = [
        ("golden mini-corpus", golden::golden_corpus),
        ("coupling oracle", numeric::coupling_oracle),
        ("cyclomatic fixtures", fixtures::cyclomatic),
        ("function classification", fixtures::classification),
        ("lint rule fixtures", lint_rules::rule_fixtures),
        ("notebook-aware suppression", lint_rules::suppression),
        ("welch t-test", numeric::welch),
        ("script-as-cell equivalence", numeric::script_as_cell),
        ("determinism across worker counts", corpus::determinism),
        ("throughput", corpus::throughput),
        ("directional replication", corpus::replication),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let secs = started.elapsed().as_secs_f64();
        let (label, detail) = match outcome {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Soft(d) => ("INFO", d),
            Verdict::Skipped(d) => ("SKIP", d),
        };
        println!("{label} {:>2} {name} ({secs:.2}s): {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all criteria passed");
        ExitCode::SUCCESS
    }
}
