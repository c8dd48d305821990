//! Non-adaptive query selection: every node asks for the labels of one
//! (ALCone) or `4 * ceil(log(d + 1))` (ALClog) of its incident edges, drawn
//! uniformly with replacement. Selection reads only the topology and the
//! seed; labels are revealed afterwards.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{fit_kstar, predict_one_feature, predict_two_feature, Prediction};
use crate::error::{Error, Result};
use crate::eval::Confusion;
use crate::features::{estimate_features, Feature, TrainMask};
use crate::graph::{EdgeId, Sign, SignedDigraph};
use crate::{par, seed};

const OUT_STREAM: u64 = 0;
const IN_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    /// One query per node and direction.
    One,
    /// `4 * ceil(log(d + 1))` queries per node and direction.
    Log,
}

/// Which incident edge lists a plan samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    T,
    U,
    Tu,
}

impl FeatureSet {
    fn samples_out(self) -> bool {
        matches!(self, FeatureSet::T | FeatureSet::Tu)
    }

    fn samples_in(self) -> bool {
        matches!(self, FeatureSet::U | FeatureSet::Tu)
    }

    /// The prediction rule paired with this feature set.
    pub fn default_rule(self) -> Rule {
        match self {
            FeatureSet::T => Rule::OneFeature(Feature::Trollness),
            FeatureSet::U => Rule::OneFeature(Feature::Unpleasantness),
            FeatureSet::Tu => Rule::TwoFeature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    /// Queries drawn for a node of degree `d` under the logarithmic budget.
    pub fn sample_count(self, d: usize) -> usize {
        if d == 0 {
            return 0;
        }
        let x = (d + 1) as f64;
        let l = match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        };
        4 * l.ceil() as usize
    }
}

/// Strategy name as used on the command line, e.g. `alclog-tu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub budget: Budget,
    pub features: FeatureSet,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.budget {
            Budget::One => "alcone",
            Budget::Log => "alclog",
        };
        let w = match self.features {
            FeatureSet::T => "t",
            FeatureSet::U => "u",
            FeatureSet::Tu => "tu",
        };
        write!(f, "{b}-{w}")
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (b, w) = s
            .split_once('-')
            .ok_or_else(|| Error::param("strategy", format!("expected alcone-*/alclog-*, got {s:?}")))?;
        let budget = match b {
            "alcone" => Budget::One,
            "alclog" => Budget::Log,
            _ => return Err(Error::param("strategy", format!("unknown budget {b:?}"))),
        };
        let features = match w {
            "t" => FeatureSet::T,
            "u" => FeatureSet::U,
            "tu" => FeatureSet::Tu,
            _ => return Err(Error::param("strategy", format!("unknown feature set {w:?}"))),
        };
        Ok(Strategy { budget, features })
    }
}

/// Edges selected for querying.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryPlan {
    pub strategy: Strategy,
    /// Sorted, de-duplicated edge ids.
    pub distinct_queried: Vec<EdgeId>,
    /// Draws (with replacement) per node among its outgoing edges.
    pub out_samples: Vec<u32>,
    /// Draws per node among its ingoing edges.
    pub in_samples: Vec<u32>,
    pub edge_count: usize,
}

impl QueryPlan {
    pub fn queried_fraction(&self) -> f64 {
        if self.edge_count == 0 {
            0.0
        } else {
            self.distinct_queried.len() as f64 / self.edge_count as f64
        }
    }

    pub fn mask(&self) -> TrainMask {
        TrainMask::from_train_edges(self.edge_count, &self.distinct_queried)
    }

    /// Total draws over all nodes, before de-duplication.
    pub fn total_samples(&self) -> u64 {
        self.out_samples.iter().chain(&self.in_samples).map(|&s| s as u64).sum()
    }
}

fn draws(budget: Budget, base: LogBase, d: usize) -> usize {
    match budget {
        Budget::One => (d > 0) as usize,
        Budget::Log => base.sample_count(d),
    }
}

/// Samples for every node along one direction; returns per-node draw counts
/// and the distinct sampled edges of each node.
fn sample_direction<'g, F>(g: &'g SignedDigraph, budget: Budget, base: LogBase, seed: u64, stream: u64, bucket: F) -> (Vec<u32>, Vec<Vec<EdgeId>>)
where
    F: Fn(usize) -> &'g [EdgeId] + Sync + Send,
{
    let per_node = par::map_range(g.node_count(), |i| {
        let edges = bucket(i);
        let k = draws(budget, base, edges.len());
        if k == 0 {
            return (0u32, Vec::new());
        }
        let mut rng = seed::rng(seed, &[stream, i as u64]);
        let mut picked: Vec<EdgeId> = (0..k).map(|_| edges[rng.random_range(0..edges.len())]).collect();
        picked.sort_unstable();
        picked.dedup();
        (k as u32, picked)
    });
    per_node.into_iter().unzip()
}

/// Builds a plan. Out- and in-direction draws use independent streams, so the
/// `tu` plan is exactly the union of the `t` and `u` plans for the same seed.
pub fn select(g: &SignedDigraph, strategy: Strategy, base: LogBase, seed: u64) -> QueryPlan {
    let n = g.node_count();
    let mut queried = Vec::new();
    let mut out_samples = vec![0; n];
    let mut in_samples = vec![0; n];
    if strategy.features.samples_out() {
        let (counts, picked) = sample_direction(g, strategy.budget, base, seed, OUT_STREAM, |i| g.out_edges(i));
        out_samples = counts;
        queried.extend(picked.into_iter().flatten());
    }
    if strategy.features.samples_in() {
        let (counts, picked) = sample_direction(g, strategy.budget, base, seed, IN_STREAM, |i| g.in_edges(i));
        in_samples = counts;
        queried.extend(picked.into_iter().flatten());
    }
    queried.sort_unstable();
    queried.dedup();
    QueryPlan {
        strategy,
        distinct_queried: queried,
        out_samples,
        in_samples,
        edge_count: g.edge_count(),
    }
}

pub fn select_alcone(g: &SignedDigraph, features: FeatureSet, seed: u64) -> QueryPlan {
    select(
        g,
        Strategy {
            budget: Budget::One,
            features,
        },
        LogBase::Natural,
        seed,
    )
}

pub fn select_alclog(g: &SignedDigraph, features: FeatureSet, seed: u64) -> QueryPlan {
    select(
        g,
        Strategy {
            budget: Budget::Log,
            features,
        },
        LogBase::Natural,
        seed,
    )
}

/// Prediction rule applied after querying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    OneFeature(Feature),
    TwoFeature,
}

#[derive(Debug, Clone)]
pub struct ActiveOutcome {
    pub prediction: Prediction,
    pub confusion: Confusion,
    pub queried: usize,
    pub queried_fraction: f64,
}

impl ActiveOutcome {
    pub fn mistakes(&self) -> u64 {
        self.confusion.mistakes()
    }

    pub fn accuracy(&self) -> f64 {
        self.confusion.accuracy()
    }

    pub fn mcc(&self) -> f64 {
        self.confusion.mcc()
    }
}

/// Reveals the planned labels, estimates features from them and predicts
/// every other edge.
pub fn run_active(g: &SignedDigraph, plan: &QueryPlan, rule: Rule, tie: Sign) -> Result<ActiveOutcome> {
    if plan.edge_count != g.edge_count() || plan.out_samples.len() != g.node_count() {
        return Err(Error::param("plan", "plan was built on a different graph"));
    }
    let mask = plan.mask();
    let feat = estimate_features(g, &mask)?;
    let test = mask.test_edges();
    let prediction = match rule {
        Rule::OneFeature(which) => predict_one_feature(g, &feat, &test, which, tie),
        Rule::TwoFeature => {
            let sep = fit_kstar(g, &feat, &plan.distinct_queried, tie)?;
            predict_two_feature(g, &feat, &sep, &test)
        }
    };
    let confusion = Confusion::of_prediction(g, &prediction)?;
    Ok(ActiveOutcome {
        prediction,
        confusion,
        queried: plan.distinct_queried.len(),
        queried_fraction: plan.queried_fraction(),
    })
}
