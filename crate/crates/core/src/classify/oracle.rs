//! Exhaustive reference computations used to check the fast paths.

use crate::features::{Feature, FeatureEstimates};
use crate::graph::{EdgeId, Sign, SignedDigraph};

/// Training mistakes of "predict -1 iff value > threshold".
fn mistakes_at(values: &[(f64, Sign)], threshold: f64) -> usize {
    values
        .iter()
        .filter(|&&(v, y)| (v > threshold) != y.is_neg())
        .count()
}

fn candidates(values: &[(f64, Sign)]) -> Vec<f64> {
    let mut distinct: Vec<f64> = values.iter().map(|v| v.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut out = vec![distinct[0] - 1.0];
    out.extend(distinct.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    out.push(distinct[distinct.len() - 1] + 1.0);
    out
}

/// Best one-feature threshold by evaluating every candidate directly.
/// Returns `(threshold, mistakes)`; on ties the first (smallest) wins.
pub fn optimal_threshold_bruteforce(
    g: &SignedDigraph,
    feat: &FeatureEstimates,
    train: &[EdgeId],
    which: Feature,
) -> (f64, usize) {
    assert!(!train.is_empty(), "oracle needs at least one training edge");
    let values: Vec<(f64, Sign)> = train
        .iter()
        .map(|&e| (feat.edge_feature(g, e, which), g.label(e)))
        .collect();
    min_over(&values)
}

/// Minimum training mistakes of a two-feature separator over every
/// candidate intercept, each evaluated in O(m).
pub fn kstar_bruteforce(g: &SignedDigraph, feat: &FeatureEstimates, train: &[EdgeId]) -> (f64, usize) {
    assert!(!train.is_empty(), "oracle needs at least one training edge");
    let values: Vec<(f64, Sign)> = train.iter().map(|&e| (feat.score(g, e), g.label(e))).collect();
    min_over(&values)
}

fn min_over(values: &[(f64, Sign)]) -> (f64, usize) {
    candidates(values)
        .into_iter()
        .map(|k| (k, mistakes_at(values, k)))
        .min_by_key(|&(_, m)| m)
        .expect("non-empty candidates")
}
