//! Descriptive statistics, Welch's t-test and issue-frequency tables.
//!
//! The numeric routines are generic over the float type; the crate root
//! exports `f64` aliases.

mod issues;
mod report;
pub mod special;

use std::cmp::Ordering;

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use issues::{issue_frequency, top_k, IssueFrequencyRow, RuleOccurrence};
pub use report::{
    apa_summary, format_p, ComparisonReport, MetricComparison, MetricHistograms, SubsetParams,
};

/// A result is significant only when `p <= SIGNIFICANCE_LEVEL`.
pub const SIGNIFICANCE_LEVEL: f64 = 0.001;
/// The nominal alpha, echoed in reports only.
pub const ALPHA: f64 = 0.005;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("cannot describe an empty sample")]
    EmptySample,
    #[error("t-test needs at least two values per sample (got {a} and {b})")]
    InsufficientSample { a: usize, b: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
}

fn from_usize<T: FromPrimitive>(n: usize) -> T {
    T::from_usize(n).expect("count fits the scalar type")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDescriptor<T> {
    pub n: usize,
    pub mean: T,
    /// Sample standard deviation (n - 1 denominator); zero for one value.
    pub sd: T,
    pub median: T,
}

pub fn mean<T: Float + FromPrimitive>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
    Some(sum / from_usize(values.len()))
}

/// Sample variance with the n - 1 denominator, zero for fewer than two values.
pub fn sample_variance<T: Float + FromPrimitive>(values: &[T]) -> Option<T> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Some(T::zero());
    }
    let ss = values
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - m) * (v - m));
    Some(ss / from_usize(values.len() - 1))
}

pub fn describe<T: Float + FromPrimitive>(values: &[T]) -> Result<SampleDescriptor<T>, StatsError> {
    let mean = mean(values).ok_or(StatsError::EmptySample)?;
    let sd = sample_variance(values)
        .ok_or(StatsError::EmptySample)?
        .sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / from_usize(2)
    };
    Ok(SampleDescriptor {
        n,
        mean,
        sd,
        median,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult<T> {
    pub t: T,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: T,
    /// Two-sided p-value.
    pub p: T,
    pub significant: bool,
    /// Both samples have zero variance. `t` is then 0 (equal means, p = 1)
    /// or infinite (different means, p = 0), and `df` is undefined (NaN).
    pub degenerate: bool,
}

/// Welch's unequal-variance two-sample t-test.
pub fn welch_t<T: Float + FromPrimitive>(a: &[T], b: &[T]) -> Result<TTestResult<T>, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::InsufficientSample {
            a: a.len(),
            b: b.len(),
        });
    }
    let (ma, mb) = (mean(a).unwrap(), mean(b).unwrap());
    let va = sample_variance(a).unwrap() / from_usize(a.len());
    let vb = sample_variance(b).unwrap() / from_usize(b.len());
    let se2 = va + vb;
    let threshold = T::from_f64(SIGNIFICANCE_LEVEL).expect("constant fits");

    if se2 == T::zero() {
        let (t, p) = match ma.partial_cmp(&mb) {
            Some(Ordering::Equal) => (T::zero(), T::one()),
            Some(Ordering::Less) => (T::neg_infinity(), T::zero()),
            _ => (T::infinity(), T::zero()),
        };
        return Ok(TTestResult {
            t,
            df: T::nan(),
            p,
            significant: p <= threshold,
            degenerate: true,
        });
    }

    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / from_usize(a.len() - 1) + vb * vb / from_usize(b.len() - 1));
    let p = special::student_t_two_sided(t, df);
    Ok(TTestResult {
        t,
        df,
        p,
        significant: p <= threshold,
        degenerate: false,
    })
}

/// Documents kept by the length filter, and the threshold that was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Subset<D> {
    pub kept: Vec<D>,
    pub threshold: f64,
}

/// Keeps documents whose SLOC is strictly below the corpus MEAN + STD.
pub fn length_subset<D>(docs: Vec<D>, sloc: impl Fn(&D) -> u64) -> Result<Subset<D>, StatsError> {
    let values: Vec<f64> = docs.iter().map(|d| sloc(d) as f64).collect();
    let desc = describe(&values).map_err(|_| StatsError::EmptyCorpus)?;
    let threshold = desc.mean + desc.sd;
    let kept = docs
        .into_iter()
        .filter(|d| (sloc(d) as f64) < threshold)
        .collect();
    Ok(Subset { kept, threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin<T> {
    pub lower: T,
    pub upper: T,
    pub count: usize,
    /// `count` divided by the largest bin count.
    pub normalized: T,
}

/// Equal-width histogram over `[min, max]`; the last bin is closed.
pub fn histogram<T: Float + FromPrimitive>(values: &[T], bins: usize) -> Vec<HistogramBin<T>> {
    let finite: Vec<T> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = finite.iter().copied().fold(T::infinity(), T::min);
    let hi = finite.iter().copied().fold(T::neg_infinity(), T::max);
    if lo == hi {
        return vec![HistogramBin {
            lower: lo,
            upper: hi,
            count: finite.len(),
            normalized: T::one(),
        }];
    }
    let width = (hi - lo) / from_usize(bins);
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let slot = ((*v - lo) / width)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(bins - 1);
        counts[slot] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0).max(1);
    counts
        .iter()
        .enumerate()
        .map(|(i, &count)| HistogramBin {
            lower: lo + width * from_usize(i),
            upper: if i + 1 == bins {
                hi
            } else {
                lo + width * from_usize(i + 1)
            },
            count,
            normalized: from_usize::<T>(count) / from_usize(max),
        })
        .collect()
}
