//! Confusion counts, accuracy, MCC, and aggregation over repetitions.

use serde::{Deserialize, Serialize};

use crate::classify::Prediction;
use crate::error::{Error, Result};
use crate::graph::{Sign, SignedDigraph};

/// Binary confusion counts; the positive class is `+1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Confusion { tp, tn, fp, fn_ }
    }

    /// Counts from aligned predicted and true labels.
    pub fn from_labels(predicted: &[Sign], truth: &[Sign]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::SizeMismatch {
                expected: truth.len(),
                actual: predicted.len(),
            });
        }
        let mut c = Confusion::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (Sign::Pos, Sign::Pos) => c.tp += 1,
                (Sign::Neg, Sign::Neg) => c.tn += 1,
                (Sign::Pos, Sign::Neg) => c.fp += 1,
                (Sign::Neg, Sign::Pos) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    /// Counts for a prediction against the graph's labels.
    pub fn of_prediction(g: &SignedDigraph, pred: &Prediction) -> Result<Self> {
        if pred.labels.len() != pred.edges.len() {
            return Err(Error::SizeMismatch {
                expected: pred.edges.len(),
                actual: pred.labels.len(),
            });
        }
        let truth: Vec<Sign> = pred.edges.iter().map(|&e| g.label(e)).collect();
        Self::from_labels(&pred.labels, &truth)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn mistakes(&self) -> u64 {
        self.fp + self.fn_
    }

    /// Fraction correct; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => (self.tp + self.tn) as f64 / n as f64,
        }
    }

    /// Matthews correlation coefficient, 0 when any marginal is empty.
    pub fn mcc(&self) -> f64 {
        let (tp, tn, fp, fn_) = (self.tp as f64, self.tn as f64, self.fp as f64, self.fn_ as f64);
        let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if den == 0.0 {
            0.0
        } else {
            (tp * tn - fp * fn_) / den.sqrt()
        }
    }
}

/// Metrics of one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    /// Training (batch) or queried (active) fraction of edges.
    pub fraction: f64,
    pub accuracy: f64,
    pub mcc: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub mcc: f64,
    pub fraction: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub n: usize,
    pub mean: MetricSummary,
    /// Sample standard deviation (n - 1 denominator); zeros when n = 1.
    pub std: MetricSummary,
    pub single_run: bool,
}

/// Mean and sample standard deviation of `xs`.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn aggregate(runs: &[RunMetrics]) -> Result<AggregateMetrics> {
    if runs.is_empty() {
        return Err(Error::NoRuns);
    }
    let col = |f: fn(&RunMetrics) -> f64| mean_std(&runs.iter().map(f).collect::<Vec<_>>());
    let (acc, acc_sd) = col(|r| r.accuracy);
    let (mcc, mcc_sd) = col(|r| r.mcc);
    let (frac, frac_sd) = col(|r| r.fraction);
    let (ms, ms_sd) = col(|r| r.wall_ms);
    Ok(AggregateMetrics {
        n: runs.len(),
        mean: MetricSummary {
            accuracy: acc,
            mcc,
            fraction: frac,
            wall_ms: ms,
        },
        std: MetricSummary {
            accuracy: acc_sd,
            mcc: mcc_sd,
            fraction: frac_sd,
            wall_ms: ms_sd,
        },
        single_run: runs.len() == 1,
    })
}

/// Scales a fraction to percent with two decimals, as printed in reports.
pub fn percent(x: f64) -> f64 {
    (x * 10_000.0).round() / 100.0
}
