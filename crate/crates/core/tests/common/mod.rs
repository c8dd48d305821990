#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signlink::features::TrainMask;
use signlink::{Sign, SignedDigraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random labeled graph with at most `max_nodes` nodes and `max_edges`
/// (pre-dedup) edges, self-loops allowed.
pub fn random_graph(r: &mut impl Rng, max_nodes: u64, max_edges: usize) -> SignedDigraph {
    let n = r.random_range(2..=max_nodes);
    let m = r.random_range(1..=max_edges);
    let p_neg: f64 = r.random();
    let edges: Vec<(u64, u64, i64)> = (0..m)
        .map(|_| {
            let y = if r.random_bool(p_neg) { -1 } else { 1 };
            (r.random_range(0..n), r.random_range(0..n), y)
        })
        .collect();
    SignedDigraph::build(edges).unwrap()
}

/// Random mask with at least one training edge.
pub fn random_mask(r: &mut impl Rng, m: usize) -> TrainMask {
    let p: f64 = r.random_range(0.05..1.0);
    let mut bits: Vec<bool> = (0..m).map(|_| r.random_bool(p)).collect();
    if !bits.iter().any(|&b| b) {
        bits[r.random_range(0..m)] = true;
    }
    TrainMask::new(bits)
}

pub fn signs(v: &[i8]) -> Vec<Sign> {
    v.iter().map(|&x| if x < 0 { Sign::Neg } else { Sign::Pos }).collect()
}
