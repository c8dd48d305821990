//! Edge sign prediction rules.
//!
//! * one-feature threshold at 1/2 on trollness or unpleasantness,
//! * the two-feature rule with a learned intercept `k*`,
//! * an averaged perceptron on the same two features,
//! * the reciprocal-edge override applied on top of any of them.

mod kstar;
pub mod oracle;
mod perceptron;
mod reciprocal;

pub use kstar::{fit_kstar, predict_two_feature, Separator};
pub use perceptron::{fit_perceptron, perceptron_points, LinearModel, PerceptronConfig};
pub use reciprocal::reciprocal_override;

use crate::features::{Feature, FeatureEstimates};
use crate::graph::{EdgeId, Sign, SignedDigraph};
use crate::par;

/// Predicted signs for a set of edges, aligned with `edges`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub edges: Vec<EdgeId>,
    pub labels: Vec<Sign>,
    /// Set where the reciprocal override replaced the model's output.
    pub overridden: Vec<bool>,
}

impl Prediction {
    pub fn new(edges: Vec<EdgeId>, labels: Vec<Sign>) -> Self {
        let overridden = vec![false; edges.len()];
        Prediction {
            edges,
            labels,
            overridden,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Number of predictions that disagree with the graph's labels.
    pub fn mistakes(&self, g: &SignedDigraph) -> usize {
        self.edges
            .iter()
            .zip(&self.labels)
            .filter(|(&e, &y)| g.label(e) != y)
            .count()
    }

    pub fn overridden_count(&self) -> usize {
        self.overridden.iter().filter(|&&b| b).count()
    }
}

/// `-1` above the threshold, `+1` below, `tie` on it.
#[inline]
pub fn threshold_rule(value: f64, threshold: f64, tie: Sign) -> Sign {
    if value > threshold {
        Sign::Neg
    } else if value < threshold {
        Sign::Pos
    } else {
        tie
    }
}

/// One-feature rule: predict `+1` when the estimate is below 1/2.
pub fn predict_one_feature(
    g: &SignedDigraph,
    feat: &FeatureEstimates,
    edges: &[EdgeId],
    which: Feature,
    tie: Sign,
) -> Prediction {
    let labels = par::map_slice(edges, |&e| threshold_rule(feat.edge_feature(g, e, which), 0.5, tie));
    Prediction::new(edges.to_vec(), labels)
}
