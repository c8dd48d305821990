use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Prediction;
use crate::error::{Error, Result};
use crate::features::FeatureEstimates;
use crate::graph::{EdgeId, Sign, SignedDigraph};
use crate::{par, seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceptronConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for PerceptronConfig {
    fn default() -> Self {
        PerceptronConfig {
            epochs: 5,
            learning_rate: 1.0,
            seed: 0,
        }
    }
}

/// `sign(w_t * t_hat + w_u * u_hat + bias)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearModel {
    pub w_t: f64,
    pub w_u: f64,
    pub bias: f64,
}

impl LinearModel {
    #[inline]
    pub fn margin(&self, t: f64, u: f64) -> f64 {
        self.w_t * t + self.w_u * u + self.bias
    }

    #[inline]
    pub fn classify(&self, t: f64, u: f64, tie: Sign) -> Sign {
        let m = self.margin(t, u);
        if m > 0.0 {
            Sign::Pos
        } else if m < 0.0 {
            Sign::Neg
        } else {
            tie
        }
    }

    pub fn predict(&self, g: &SignedDigraph, feat: &FeatureEstimates, edges: &[EdgeId], tie: Sign) -> Prediction {
        let labels = par::map_slice(edges, |&e| self.classify(feat.t_hat[g.src(e)], feat.u_hat[g.dst(e)], tie));
        Prediction::new(edges.to_vec(), labels)
    }
}

/// Averaged perceptron on `(t_hat, u_hat, label)` points. The returned
/// weights are the mean of the weight vector over every visited example.
pub fn fit_perceptron(points: &[(f64, f64, Sign)], cfg: &PerceptronConfig) -> Result<LinearModel> {
    if points.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if cfg.epochs == 0 {
        return Err(Error::param("epochs", "must be at least 1"));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    let (mut w, mut sum) = ([0.0f64; 3], [0.0f64; 3]);
    let mut steps = 0u64;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut seed::rng(cfg.seed, &[epoch as u64]));
        for &idx in &order {
            let (t, u, y) = points[idx];
            let y = y.as_i8() as f64;
            let x = [t, u, 1.0];
            let m: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
            if y * m <= 0.0 {
                for k in 0..3 {
                    w[k] += cfg.learning_rate * y * x[k];
                }
            }
            for k in 0..3 {
                sum[k] += w[k];
            }
            steps += 1;
        }
    }
    let n = steps as f64;
    Ok(LinearModel {
        w_t: sum[0] / n,
        w_u: sum[1] / n,
        bias: sum[2] / n,
    })
}

/// Training points for the perceptron from observed edges.
pub fn perceptron_points(g: &SignedDigraph, feat: &FeatureEstimates, train: &[EdgeId]) -> Vec<(f64, f64, Sign)> {
    train
        .iter()
        .map(|&e| (feat.t_hat[g.src(e)], feat.u_hat[g.dst(e)], g.label(e)))
        .collect()
}
