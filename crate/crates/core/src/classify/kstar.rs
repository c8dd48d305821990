use serde::Serialize;

use super::{threshold_rule, Prediction};
use crate::error::{Error, Result};
use crate::features::FeatureEstimates;
use crate::graph::{EdgeId, Sign, SignedDigraph};
use crate::par;

/// Distance of the outer candidate thresholds from the extreme scores.
pub const SENTINEL_GAP: f64 = 1e-6;

/// Line `t_hat + u_hat = k_star`: predict `-1` above it, `+1` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Separator {
    pub k_star: f64,
    pub tie_label: Sign,
    pub training_mistakes: usize,
}

impl Separator {
    /// The untrained rule `k = 1`.
    pub fn unit(tie_label: Sign) -> Self {
        Separator {
            k_star: 1.0,
            tie_label,
            training_mistakes: 0,
        }
    }

    #[inline]
    pub fn classify(&self, score: f64) -> Sign {
        threshold_rule(score, self.k_star, self.tie_label)
    }
}

/// Finds the intercept minimizing training mistakes.
///
/// Candidates are the midpoints between consecutive distinct scores plus one
/// threshold just below the smallest and one just above the largest score.
/// One pass over the sorted scores counts the mistakes of every candidate.
/// Ties go to the candidate closest to 1, then to the smaller one.
pub fn fit_kstar(g: &SignedDigraph, feat: &FeatureEstimates, train: &[EdgeId], tie_label: Sign) -> Result<Separator> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let points = par::map_slice(train, |&e| (feat.score(g, e), g.label(e)));
    let (k_star, _) = best_threshold(points);
    let training_mistakes = train
        .iter()
        .filter(|&&e| threshold_rule(feat.score(g, e), k_star, tie_label) != g.label(e))
        .count();
    Ok(Separator {
        k_star,
        tie_label,
        training_mistakes,
    })
}

/// Scan over sorted `(score, label)` pairs. Returns the chosen threshold and
/// its mistake count under the open-interval convention.
pub(crate) fn best_threshold(mut points: Vec<(f64, Sign)>) -> (f64, usize) {
    debug_assert!(!points.is_empty());
    sort_points(&mut points);

    // Below every score all edges are predicted -1: each positive is a mistake.
    let mut mistakes = points.iter().filter(|(_, y)| !y.is_neg()).count() as i64;
    let lowest = points[0].0 - SENTINEL_GAP;
    let mut best = (lowest, mistakes);

    let mut i = 0;
    while i < points.len() {
        let s = points[i].0;
        let mut j = i;
        while j < points.len() && points[j].0 == s {
            // Crossing this score flips its edges to +1.
            mistakes += if points[j].1.is_neg() { 1 } else { -1 };
            j += 1;
        }
        let k = if j < points.len() {
            0.5 * (s + points[j].0)
        } else {
            s + SENTINEL_GAP
        };
        if better(k, mistakes, best) {
            best = (k, mistakes);
        }
        i = j;
    }
    (best.0.clamp(0.0, 2.0), best.1 as usize)
}

fn better(k: f64, mistakes: i64, (best_k, best_m): (f64, i64)) -> bool {
    if mistakes != best_m {
        return mistakes < best_m;
    }
    let (d, best_d) = ((k - 1.0).abs(), (best_k - 1.0).abs());
    d < best_d || (d == best_d && k < best_k)
}

#[cfg(feature = "parallel")]
fn sort_points(points: &mut [(f64, Sign)]) {
    use rayon::slice::ParallelSliceMut;
    points.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
}

#[cfg(not(feature = "parallel"))]
fn sort_points(points: &mut [(f64, Sign)]) {
    points.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
}

/// Applies a fitted separator to `edges`.
pub fn predict_two_feature(g: &SignedDigraph, feat: &FeatureEstimates, sep: &Separator, edges: &[EdgeId]) -> Prediction {
    let labels = par::map_slice(edges, |&e| sep.classify(feat.score(g, e)));
    Prediction::new(edges.to_vec(), labels)
}
