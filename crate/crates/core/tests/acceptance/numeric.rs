use std::collections::BTreeSet;

use cellscope::ingest::{parse_script, CellDocument, CellType};
use cellscope::metrics::{analyze_document, cell_coupling, function_coupling, BuiltinRegistry};
use cellscope::pyast::FunctionDef;
use cellscope::stats::welch_t;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::support::{coupling_document, random_script, sample_pair};
use crate::{verdict, Verdict};

/// Sum of |A ∩ B| over unordered pairs, counted element by element, and the
/// number of pairs.
fn brute_force(sets: &[BTreeSet<String>]) -> (u64, u64) {
    let (mut shared, mut pairs) = (0u64, 0u64);
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i < j {
                pairs += 1;
                shared += sets[i].iter().filter(|x| sets[j].contains(*x)).count() as u64;
            }
        }
    }
    (shared, pairs)
}

fn exact(sets: &[BTreeSet<String>]) -> Ratio<u64> {
    match brute_force(sets) {
        (_, 0) => Ratio::from_integer(0),
        (shared, pairs) => Ratio::new(shared, pairs),
    }
}

fn approx(sets: &[BTreeSet<String>]) -> f64 {
    match brute_force(sets) {
        (_, 0) => 0.0,
        (shared, pairs) => shared as f64 / pairs as f64,
    }
}

pub fn coupling_oracle() -> Verdict {
    let registry = BuiltinRegistry::python310();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let mut nontrivial = 0;
    for n in 0..1000 {
        let (doc, cell_vars, def_calls) = coupling_document(&mut rng);
        let analysis = analyze_document(&doc, registry);
        if analysis.metrics.failed_cells > 0 {
            failures.push(format!("document {n}: generated code did not parse"));
            continue;
        }
        let defs: Vec<FunctionDef> = analysis
            .parsed
            .iter()
            .filter_map(|p| p.facts.as_ref())
            .flat_map(|f| f.defs.iter().cloned())
            .collect();
        if approx(&cell_vars) > 0.0 && approx(&def_calls) > 0.0 {
            nontrivial += 1;
        }
        let m = &analysis.metrics;
        if m.cell_coupling != Some(approx(&cell_vars)) {
            failures.push(format!(
                "document {n}: cell_coupling {:?} vs {}",
                m.cell_coupling,
                approx(&cell_vars)
            ));
        }
        if m.function_coupling != approx(&def_calls) {
            failures.push(format!(
                "document {n}: function_coupling {} vs {}",
                m.function_coupling,
                approx(&def_calls)
            ));
        }
        if cell_coupling::<Ratio<u64>>(&analysis.cells) != exact(&cell_vars) {
            failures.push(format!("document {n}: exact cell coupling differs"));
        }
        if function_coupling::<Ratio<u64>>(&defs) != exact(&def_calls) {
            failures.push(format!("document {n}: exact function coupling differs"));
        }
    }
    verdict(
        failures,
        format!(
            "1000 documents, {nontrivial} with both couplings nonzero, f64 and exact rationals"
        ),
    )
}

/// Samples a and b with the expected t, df and p.
type Oracle = (&'static [f64], &'static [f64], f64, f64, f64);

/// Reference values computed with scipy.stats.ttest_ind(equal_var=False).
const WELCH_ORACLES: [Oracle; 4] = [
    (
        &[1.0, 2.0, 3.0],
        &[4.0, 5.0, 6.0],
        -3.6742346141747673,
        4.0,
        0.021311641128756727,
    ),
    (
        &[2.1, 3.4, 1.9, 5.6, 4.4, 3.3],
        &[6.2, 7.1, 5.9, 8.8, 6.4],
        -4.44580590236697,
        8.99757885243503,
        0.0016109896006904151,
    ),
    (
        &[10.0, 12.0, 11.0, 13.0, 12.0, 11.0, 10.0, 14.0],
        &[11.0, 13.0, 12.0, 12.0, 14.0, 13.0, 15.0, 12.0, 13.0, 14.0],
        -2.0387577071238883,
        13.83933989155075,
        0.06105143908010415,
    ),
    (&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0.0, 4.0, 1.0),
];

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn welch() -> Verdict {
    let mut failures = Vec::new();
    for (i, (a, b, t, df, p)) in WELCH_ORACLES.iter().enumerate() {
        let r = welch_t(a, b).unwrap();
        if (r.t - t).abs() > 1e-9 || rel(r.p, *p) > 1e-6 || (r.df - df).abs() > 1e-9 {
            failures.push(format!("oracle {}: t={} df={} p={}", i + 1, r.t, r.df, r.p));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut anti, mut scale, mut reference) = (0, 0, 0);
    for _ in 0..10_000 {
        let (a, b) = sample_pair(&mut rng);
        let ab = welch_t(&a, &b).unwrap();
        let ba = welch_t(&b, &a).unwrap();
        if ab.t != -ba.t || ab.p != ba.p || ab.df != ba.df {
            anti += 1;
        }

        let c = rand::Rng::gen_range(&mut rng, 0.01..100.0);
        let d = rand::Rng::gen_range(&mut rng, -1000.0..1000.0);
        let sa: Vec<f64> = a.iter().map(|v| c * v + d).collect();
        let sb: Vec<f64> = b.iter().map(|v| c * v + d).collect();
        let scaled = welch_t(&sa, &sb).unwrap();
        if rel(scaled.t, ab.t) > 1e-9 || rel(scaled.p, ab.p) > 1e-6 {
            scale += 1;
        }

        let dist = StudentsT::new(0.0, 1.0, ab.df).unwrap();
        let expected = 2.0 * dist.sf(ab.t.abs());
        if expected > 1e-300 && rel(ab.p, expected) > 1e-6 {
            reference += 1;
        }
    }
    for (what, count) in [
        ("antisymmetry", anti),
        ("scale invariance", scale),
        ("reference p", reference),
    ] {
        if count > 0 {
            failures.push(format!("{what}: {count} of 10000 pairs violated"));
        }
    }
    verdict(
        failures,
        format!(
            "{} oracle pairs; antisymmetry, scale invariance and reference p over 10000 pairs",
            WELCH_ORACLES.len()
        ),
    )
}

pub fn script_as_cell() -> Verdict {
    let registry = BuiltinRegistry::python310();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = Vec::new();
    for n in 0..100 {
        let text = random_script(&mut rng);
        let script = parse_script(text.as_bytes(), "s.py").unwrap();
        let notebook =
            CellDocument::notebook_from_cells("s.ipynb", [(CellType::Code, text.as_str())]);
        let as_script = analyze_document(&script, registry).metrics;
        let mut as_notebook = analyze_document(&notebook, registry).metrics;
        if as_script.cell_coupling.is_some() || as_notebook.cell_coupling.is_none() {
            failures.push(format!("script {n}: cell_coupling presence"));
        }
        as_notebook.cell_coupling = None;
        if as_script != as_notebook {
            failures.push(format!("script {n}: metrics differ"));
        }
    }
    verdict(failures, "100 scripts".to_string())
}
