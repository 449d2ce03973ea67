//! Seeded generators shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use cellscope::ingest::{CellDocument, CellType};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;

const NAMES: [&str; 8] = ["a", "b", "data", "total", "df", "x", "y", "item"];
const IMPORTS: [&str; 5] = [
    "import numpy as np",
    "import os",
    "from math import sqrt",
    "from collections import *",
    "import os.path",
];

fn name(rng: &mut impl Rng) -> &'static str {
    NAMES.choose(rng).unwrap()
}

fn expr(rng: &mut impl Rng, helpers: usize, depth: u32) -> String {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        return match rng.gen_range(0..3) {
            0 => name(rng).to_string(),
            1 => rng.gen_range(0..100).to_string(),
            _ => format!("'{}'", name(rng)),
        };
    }
    let sub = |rng: &mut _| expr(rng, helpers, depth - 1);
    match rng.gen_range(0..12) {
        0 => format!("{} + {}", sub(rng), sub(rng)),
        1 => format!("{}*{}", sub(rng), sub(rng)),
        2 => format!("len({})", sub(rng)),
        3 => format!("np.mean({})", sub(rng)),
        4 if helpers > 0 => format!("helper{}({})", rng.gen_range(0..helpers), sub(rng)),
        5 => format!("{}.strip()", name(rng)),
        6 => format!("[n for n in {} if n]", name(rng)),
        7 => format!("{} if {} else {}", sub(rng), name(rng), sub(rng)),
        8 => format!("{} and {} or {}", name(rng), name(rng), name(rng)),
        9 => format!("sqrt({})", sub(rng)),
        10 => format!("os.path.join({}, 'f')", name(rng)),
        _ => format!("[{},{}]", sub(rng), sub(rng)),
    }
}

fn block(
    rng: &mut impl Rng,
    indent: usize,
    helpers: usize,
    depth: u32,
    in_def: bool,
) -> Vec<String> {
    let pad = "    ".repeat(indent);
    let count = rng.gen_range(1..=3);
    let mut lines = Vec::new();
    for _ in 0..count {
        let nested = depth > 0 && rng.gen_bool(0.3);
        if nested {
            let header = match rng.gen_range(0..4) {
                0 => format!("if {}:", expr(rng, helpers, 1)),
                1 => format!("for {} in range({}):", name(rng), rng.gen_range(1..9)),
                2 => format!("while {}:", name(rng)),
                _ => "try:".to_string(),
            };
            lines.push(format!("{pad}{header}"));
            lines.extend(block(rng, indent + 1, helpers, depth - 1, in_def));
            if header == "try:" {
                lines.push(format!("{pad}except ValueError:"));
                lines.push(format!("{pad}    pass"));
            } else if header.starts_with("while") {
                lines.push(format!("{pad}    break"));
            }
            continue;
        }
        let line = match rng.gen_range(0..6) {
            0 | 1 => format!("{} = {}", name(rng), expr(rng, helpers, 2)),
            2 => format!("print({})", expr(rng, helpers, 2)),
            3 => format!("# note {}", rng.gen_range(0..1000)),
            4 => name(rng).to_string(),
            _ => format!("{} += {}", name(rng), rng.gen_range(1..5)),
        };
        lines.push(format!("{pad}{line}"));
    }
    if in_def && indent == 1 && rng.gen_bool(0.7) {
        lines.push(format!("{pad}return {}", expr(rng, helpers, 1)));
    }
    lines
}

/// A syntactically valid script that exercises most metric and lint paths.
pub fn random_script(rng: &mut impl Rng) -> String {
    let mut lines: Vec<String> = IMPORTS
        .iter()
        .filter(|_| rng.gen_bool(0.4))
        .map(|s| s.to_string())
        .collect();
    if !lines.is_empty() && rng.gen_bool(0.5) {
        lines.push(String::new());
    }
    let helpers = rng.gen_range(0..4);
    for k in 0..helpers {
        let params: Vec<&str> = (0..rng.gen_range(0..4))
            .map(|_| name(rng))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        lines.push(format!("def helper{k}({}):", params.join(", ")));
        lines.extend(block(rng, 1, k, 2, true));
        lines.push(String::new());
    }
    lines.extend(block(rng, 0, helpers, 2, false));
    if rng.gen_bool(0.3) {
        lines.push(String::new());
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// A notebook in nbformat 4 JSON, mixing code and markdown cells. Roughly one
/// code cell in twenty does not parse.
pub fn random_notebook_json(rng: &mut impl Rng, tag: usize) -> String {
    let mut cells = vec![json!({
        "cell_type": "markdown",
        "metadata": {},
        "source": format!("# Notebook {tag}\nGenerated."),
    })];
    for _ in 0..rng.gen_range(1..7) {
        if rng.gen_bool(0.25) {
            cells.push(json!({
                "cell_type": "markdown",
                "metadata": {},
                "source": ["Some text\n", "more text"],
            }));
        }
        let source = if rng.gen_bool(0.05) {
            "def broken(:\n    pass".to_string()
        } else {
            random_script(rng)
        };
        cells.push(json!({
            "cell_type": "code",
            "execution_count": null,
            "metadata": {},
            "outputs": [],
            "source": source,
        }));
    }
    let nb = json!({
        "cells": cells,
        "metadata": {"kernelspec": {"language": "python", "name": "python3"}},
        "nbformat": 4,
        "nbformat_minor": 5,
    });
    serde_json::to_string_pretty(&nb).unwrap()
}

/// Writes `notebooks` .ipynb files under `root/nb` and `scripts` .py files
/// under `root/py`, all with distinct contents.
pub fn write_corpus(root: &Path, notebooks: usize, scripts: usize, rng: &mut impl Rng) {
    let (nb_dir, py_dir) = (root.join("nb"), root.join("py"));
    fs::create_dir_all(nb_dir.join("sub")).unwrap();
    fs::create_dir_all(&py_dir).unwrap();
    for i in 0..notebooks {
        let dir = if i % 3 == 0 {
            nb_dir.join("sub")
        } else {
            nb_dir.clone()
        };
        fs::write(
            dir.join(format!("n{i:04}.ipynb")),
            random_notebook_json(rng, i),
        )
        .unwrap();
    }
    for i in 0..scripts {
        let text = format!("# script {i}\n{}", random_script(rng));
        fs::write(py_dir.join(format!("s{i:04}.py")), text).unwrap();
    }
}

const ALPHABET: [&str; 5] = ["a", "b", "c", "d", "e"];

/// A notebook whose variable and call sets are known by construction:
/// up to six cells and six function definitions, every name from a
/// five-symbol alphabet. Returns the document, the variables used by each
/// code cell, and the callees of each definition in document order.
pub fn coupling_document(
    rng: &mut impl Rng,
) -> (CellDocument, Vec<BTreeSet<String>>, Vec<BTreeSet<String>>) {
    let pick = |rng: &mut _| *ALPHABET.choose(rng).unwrap();
    let mut sources = Vec::new();
    let mut cell_vars = Vec::new();
    let mut def_calls = Vec::new();
    let mut defs_left = rng.gen_range(0..=6);
    for _ in 0..rng.gen_range(1..=6) {
        let mut lines = Vec::new();
        let mut vars = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=3) {
            match rng.gen_range(0..3) {
                0 => {
                    let (t, u, v) = (pick(rng), pick(rng), pick(rng));
                    lines.push(format!("{t} = {u} + {v}"));
                    vars.extend([t, u, v].map(String::from));
                }
                1 => {
                    let (f, arg) = (pick(rng), pick(rng));
                    lines.push(format!("{f}({arg})"));
                    vars.insert(arg.to_string());
                }
                _ if defs_left > 0 => {
                    defs_left -= 1;
                    let params: BTreeSet<&str> =
                        (0..rng.gen_range(0..3)).map(|_| pick(rng)).collect();
                    let params: Vec<&str> = params.into_iter().collect();
                    lines.push(format!("def fn{}({}):", def_calls.len(), params.join(", ")));
                    vars.extend(params.iter().map(|p| p.to_string()));
                    let mut calls = BTreeSet::new();
                    for _ in 0..rng.gen_range(1..=3) {
                        let arg = pick(rng);
                        let callee = if rng.gen_bool(0.3) {
                            format!("{}.{}", pick(rng), pick(rng))
                        } else {
                            pick(rng).to_string()
                        };
                        lines.push(format!("    {callee}({arg})"));
                        vars.insert(arg.to_string());
                        calls.insert(callee);
                    }
                    def_calls.push(calls);
                }
                _ => lines.push("pass".to_string()),
            }
        }
        sources.push(lines.join("\n"));
        cell_vars.push(vars);
    }
    let doc = CellDocument::notebook_from_cells(
        "coupling.ipynb",
        sources.iter().map(|s| (CellType::Code, s.as_str())),
    );
    (doc, cell_vars, def_calls)
}

/// Two samples of 2..=40 normal draws with independent means and spreads.
pub fn sample_pair(rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    fn draw(rng: &mut impl Rng) -> Vec<f64> {
        let n = rng.gen_range(2..=40);
        let mean = rng.gen_range(-50.0..50.0);
        let sd = rng.gen_range(0.1..20.0);
        let dist = Normal::new(mean, sd).unwrap();
        (0..n).map(|_| dist.sample(rng)).collect()
    }
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}
