//! Trollness / unpleasantness estimates and the label-irregularity measures.
//!
//! Trollness of a node is the fraction of its outgoing edges labeled -1,
//! unpleasantness the fraction of its ingoing edges labeled -1. Both default
//! to 1/2 when the node has no (observed) edge in that direction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, Sign, SignedDigraph};
use crate::par;

/// Which node feature a one-feature rule reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    /// Trollness of the edge's source.
    Trollness,
    /// Unpleasantness of the edge's destination.
    Unpleasantness,
}

/// Edge-indexed split of labels into observed (train) and hidden (test).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainMask(Vec<bool>);

impl TrainMask {
    pub fn new(bits: Vec<bool>) -> Self {
        TrainMask(bits)
    }

    pub fn full(len: usize) -> Self {
        TrainMask(vec![true; len])
    }

    pub fn from_train_edges(len: usize, train: &[EdgeId]) -> Self {
        let mut bits = vec![false; len];
        for &e in train {
            bits[e] = true;
        }
        TrainMask(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn is_train(&self, e: EdgeId) -> bool {
        self.0[e]
    }

    pub fn train_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn train_edges(&self) -> Vec<EdgeId> {
        (0..self.0.len()).filter(|&e| self.0[e]).collect()
    }

    pub fn test_edges(&self) -> Vec<EdgeId> {
        (0..self.0.len()).filter(|&e| !self.0[e]).collect()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

/// Per-node counts over observed edges and the resulting estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureEstimates {
    pub obs_out_neg: Vec<u32>,
    pub obs_out: Vec<u32>,
    pub obs_in_neg: Vec<u32>,
    pub obs_in: Vec<u32>,
    pub t_hat: Vec<f64>,
    pub u_hat: Vec<f64>,
}

fn ratio(neg: u32, total: u32) -> f64 {
    if total == 0 {
        0.5
    } else {
        neg as f64 / total as f64
    }
}

impl FeatureEstimates {
    #[inline]
    pub fn trollness(&self, i: NodeId) -> f64 {
        self.t_hat[i]
    }

    #[inline]
    pub fn unpleasantness(&self, i: NodeId) -> f64 {
        self.u_hat[i]
    }

    /// The feature value an edge is classified by under a one-feature rule.
    #[inline]
    pub fn edge_feature(&self, g: &SignedDigraph, e: EdgeId, which: Feature) -> f64 {
        match which {
            Feature::Trollness => self.t_hat[g.src(e)],
            Feature::Unpleasantness => self.u_hat[g.dst(e)],
        }
    }

    /// Two-feature score `t_hat(src) + u_hat(dst)` in `[0, 2]`.
    #[inline]
    pub fn score(&self, g: &SignedDigraph, e: EdgeId) -> f64 {
        self.t_hat[g.src(e)] + self.u_hat[g.dst(e)]
    }

    pub fn node_count(&self) -> usize {
        self.t_hat.len()
    }
}

/// Estimates features from the edges marked observed in `mask`.
pub fn estimate_features(g: &SignedDigraph, mask: &TrainMask) -> Result<FeatureEstimates> {
    if mask.len() != g.edge_count() {
        return Err(Error::SizeMismatch {
            expected: g.edge_count(),
            actual: mask.len(),
        });
    }
    let count = |edges: &[EdgeId]| {
        edges.iter().fold((0u32, 0u32), |(neg, tot), &e| {
            if mask.is_train(e) {
                (neg + g.label(e).is_neg() as u32, tot + 1)
            } else {
                (neg, tot)
            }
        })
    };
    let per_node = par::map_range(g.node_count(), |i| (count(g.out_edges(i)), count(g.in_edges(i))));

    let n = g.node_count();
    let mut est = FeatureEstimates {
        obs_out_neg: Vec::with_capacity(n),
        obs_out: Vec::with_capacity(n),
        obs_in_neg: Vec::with_capacity(n),
        obs_in: Vec::with_capacity(n),
        t_hat: Vec::with_capacity(n),
        u_hat: Vec::with_capacity(n),
    };
    for ((on, ot), (inn, it)) in per_node {
        est.obs_out_neg.push(on);
        est.obs_out.push(ot);
        est.obs_in_neg.push(inn);
        est.obs_in.push(it);
        est.t_hat.push(ratio(on, ot));
        est.u_hat.push(ratio(inn, it));
    }
    Ok(est)
}

/// Features computed from every label.
pub fn true_features(g: &SignedDigraph) -> FeatureEstimates {
    estimate_features(g, &TrainMask::full(g.edge_count())).expect("full mask matches graph")
}

/// Per-node minority-label counts and their totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityStats {
    pub psi_out: Vec<u32>,
    pub psi_in: Vec<u32>,
    /// Least-used outgoing label; `+1` on ties or when there are no edges.
    pub y_min_out: Vec<Sign>,
    pub y_min_in: Vec<Sign>,
    pub psi_out_total: u64,
    pub psi_in_total: u64,
    pub edge_count: usize,
    pub node_count: usize,
    /// Average degree `|E| / |V|`.
    pub d_bar: f64,
    /// Mean of `psi_out(i)` over nodes with `psi_out(i) > 0`; absent when the
    /// labeling is fully regular.
    pub psi_bar_0: Option<f64>,
}

impl ComplexityStats {
    pub fn psi_out_fraction(&self) -> f64 {
        frac(self.psi_out_total, self.edge_count)
    }

    pub fn psi_in_fraction(&self) -> f64 {
        frac(self.psi_in_total, self.edge_count)
    }
}

fn frac(num: u64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn minority(pos: u32, neg: u32) -> (u32, Sign) {
    if neg < pos {
        (neg, Sign::Neg)
    } else {
        (pos, Sign::Pos)
    }
}

/// Label-irregularity measures from the true labels.
pub fn complexity(g: &SignedDigraph) -> ComplexityStats {
    let per_node = par::map_range(g.node_count(), |i| {
        let d = g.degrees(i).expect("node in range");
        (
            minority(d.out_pos as u32, d.out_neg as u32),
            minority(d.in_pos as u32, d.in_neg as u32),
        )
    });
    let n = g.node_count();
    let mut stats = ComplexityStats {
        psi_out: Vec::with_capacity(n),
        psi_in: Vec::with_capacity(n),
        y_min_out: Vec::with_capacity(n),
        y_min_in: Vec::with_capacity(n),
        psi_out_total: 0,
        psi_in_total: 0,
        edge_count: g.edge_count(),
        node_count: n,
        d_bar: if n == 0 { 0.0 } else { g.edge_count() as f64 / n as f64 },
        psi_bar_0: None,
    };
    let mut irregular_nodes = 0usize;
    for ((po, yo), (pi, yi)) in per_node {
        stats.psi_out.push(po);
        stats.y_min_out.push(yo);
        stats.psi_in.push(pi);
        stats.y_min_in.push(yi);
        stats.psi_out_total += po as u64;
        stats.psi_in_total += pi as u64;
        irregular_nodes += (po > 0) as usize;
    }
    if irregular_nodes > 0 {
        stats.psi_bar_0 = Some(stats.psi_out_total as f64 / irregular_nodes as f64);
    }
    stats
}

/// Distribution of `|1/2 - t(i)|` over nodes with at least one outgoing edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfcSummary {
    #[serde(skip)]
    pub values: Vec<f64>,
    /// First, second and third quartiles (linear interpolation).
    pub quartiles: [f64; 3],
}

pub fn pfc_surrogate(g: &SignedDigraph) -> PfcSummary {
    let values: Vec<f64> = par::map_range(g.node_count(), |i| {
        let d = g.out_degree(i);
        if d == 0 {
            return None;
        }
        let neg = g.out_edges(i).iter().filter(|&&e| g.label(e).is_neg()).count();
        Some((0.5 - neg as f64 / d as f64).abs())
    })
    .into_iter()
    .flatten()
    .collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let quartiles = [0.25, 0.5, 0.75].map(|q| quantile(&sorted, q));
    PfcSummary { values, quartiles }
}

/// Quantile of sorted data with linear interpolation between order
/// statistics. NaN on empty input.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}
