use super::Prediction;
use crate::features::TrainMask;
use crate::graph::SignedDigraph;

/// For each predicted edge `i -> j` whose reverse `j -> i` is observed, copy
/// the observed sign of the reverse edge. Other predictions are unchanged.
pub fn reciprocal_override(g: &SignedDigraph, mask: &TrainMask, mut pred: Prediction) -> Prediction {
    for (k, &e) in pred.edges.iter().enumerate() {
        if let Some(r) = g.reciprocal(e) {
            if r != e && mask.is_train(r) {
                pred.labels[k] = g.label(r);
                pred.overridden[k] = true;
            }
        }
    }
    pred
}
