use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{HistogramBin, IssueFrequencyRow, SampleDescriptor, TTestResult, ALPHA};
use crate::fmt::{sig6, significant};
use crate::lint::Category;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    pub notebooks: SampleDescriptor<f64>,
    pub scripts: SampleDescriptor<f64>,
    /// Absent when either side has fewer than two values.
    pub test: Option<TTestResult<f64>>,
}

/// Value distributions of one metric, bin counts normalized to the maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricHistograms {
    pub metric: String,
    pub notebooks: Vec<HistogramBin<f64>>,
    pub scripts: Vec<HistogramBin<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetParams {
    pub notebook_threshold: f64,
    pub script_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Documents in the store before filtering and sampling.
    pub corpus_notebooks: usize,
    pub corpus_scripts: usize,
    /// Documents that entered the statistics.
    pub notebooks: usize,
    pub scripts: usize,
    pub subset: Option<SubsetParams>,
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub metrics: Vec<MetricComparison>,
    pub top_issues: BTreeMap<Category, Vec<IssueFrequencyRow>>,
    pub histograms: Vec<MetricHistograms>,
}

/// `p < .001`, otherwise `p = .021` with three decimals.
pub fn format_p(p: f64) -> String {
    if p < 0.001 {
        return "p < .001".to_string();
    }
    let digits = format!("{p:.3}");
    format!("p = {}", digits.strip_prefix('0').unwrap_or(&digits))
}

fn describe_inline(d: &SampleDescriptor<f64>) -> String {
    format!("M={}, SD={}", significant(d.mean, 3), significant(d.sd, 3))
}

/// `M=…, SD=…; t(df)=…, p …` for each side of a comparison.
pub fn apa_summary(
    notebooks: &SampleDescriptor<f64>,
    scripts: &SampleDescriptor<f64>,
    test: Option<&TTestResult<f64>>,
) -> String {
    let mut out = format!(
        "notebooks {}; scripts {}",
        describe_inline(notebooks),
        describe_inline(scripts)
    );
    match test {
        Some(t) if t.degenerate => {
            let _ = write!(out, "; t={}, {} (zero variance)", t.t, format_p(t.p));
        }
        Some(t) => {
            let _ = write!(
                out,
                "; t({})={:.2}, {}",
                significant(t.df, 4),
                t.t,
                format_p(t.p)
            );
        }
        None => out.push_str("; t-test not applicable"),
    }
    out
}

fn bold_max(a: f64, b: f64) -> (String, String) {
    let (sa, sb) = (format!("{a:.2}"), format!("{b:.2}"));
    if a > b {
        (format!("**{sa}**"), sb)
    } else if b > a {
        (sa, format!("**{sb}**"))
    } else {
        (sa, sb)
    }
}

fn csv_real(v: f64) -> String {
    sig6(v)
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Corpus: {} notebooks, {} scripts (of {} and {} stored)",
            self.notebooks, self.scripts, self.corpus_notebooks, self.corpus_scripts
        );
        if let Some(s) = &self.subset {
            let _ = writeln!(
                out,
                "Length filter: SLOC < {} for notebooks, < {} for scripts",
                sig6(s.notebook_threshold),
                sig6(s.script_threshold)
            );
        }
        if let Some(n) = self.sample_size {
            let _ = writeln!(out, "Sample: up to {n} per corpus, seed {}", self.seed);
        }
        let _ = writeln!(out, "Significance: p <= .001 (alpha {ALPHA})");
        let _ = writeln!(out);
        let _ = writeln!(out, "Metrics");
        let width = self
            .metrics
            .iter()
            .map(|m| m.metric.len())
            .max()
            .unwrap_or(0);
        for m in &self.metrics {
            let marker = match &m.test {
                Some(t) if t.significant => " *",
                _ => "",
            };
            let _ = writeln!(
                out,
                "  {:width$}  {}{marker}",
                m.metric,
                apa_summary(&m.notebooks, &m.scripts, m.test.as_ref())
            );
        }
        for (category, rows) in &self.top_issues {
            let _ = writeln!(out);
            let _ = writeln!(out, "{}", category.title());
            let _ = writeln!(
                out,
                "  {:<9} {:<58} {:>10} {:>10}",
                "Rule", "Description", "Notebooks", "Scripts"
            );
            for row in rows {
                let (nb, sc) = bold_max(row.pct_notebooks, row.pct_scripts);
                let _ = writeln!(
                    out,
                    "  {:<9} {:<58} {:>10} {:>10}",
                    row.rule_id, row.description, nb, sc
                );
            }
        }
        out
    }

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from(
            "metric,notebooks_n,notebooks_mean,notebooks_sd,notebooks_median,scripts_n,scripts_mean,scripts_sd,scripts_median,t,df,p,significant,degenerate\n",
        );
        for m in &self.metrics {
            let (nb, sc) = (&m.notebooks, &m.scripts);
            let test = match &m.test {
                Some(t) => format!(
                    "{},{},{},{},{}",
                    csv_real(t.t),
                    csv_real(t.df),
                    csv_real(t.p),
                    t.significant,
                    t.degenerate
                ),
                None => ",,,,".to_string(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                m.metric,
                nb.n,
                csv_real(nb.mean),
                csv_real(nb.sd),
                csv_real(nb.median),
                sc.n,
                csv_real(sc.mean),
                csv_real(sc.sd),
                csv_real(sc.median),
                test
            );
        }
        out
    }

    pub fn histograms_csv(&self) -> String {
        let mut out = String::from("metric,corpus,bin,lower,upper,count,normalized\n");
        for h in &self.histograms {
            for (corpus, bins) in [("notebook", &h.notebooks), ("script", &h.scripts)] {
                for (i, b) in bins.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{corpus},{i},{},{},{},{}",
                        h.metric,
                        csv_real(b.lower),
                        csv_real(b.upper),
                        b.count,
                        csv_real(b.normalized)
                    );
                }
            }
        }
        out
    }

    pub fn issues_csv(&self) -> String {
        let mut out = String::from("category,rank,rule_id,pct_notebooks,pct_scripts,mean_pct\n");
        for (category, rows) in &self.top_issues {
            for (rank, row) in rows.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    category,
                    rank + 1,
                    row.rule_id,
                    csv_real(row.pct_notebooks),
                    csv_real(row.pct_scripts),
                    csv_real(row.mean_pct)
                );
            }
        }
        out
    }
}
