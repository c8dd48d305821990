//! Directed signed graph with compressed per-node adjacency.
//!
//! Nodes and edges carry dense indices. Each node owns a contiguous slice of
//! outgoing edge ids (sorted by destination) and one of ingoing edge ids
//! (sorted by source), so degree queries are O(1) and `find_edge` is a
//! binary search.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Edge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn is_neg(self) -> bool {
        self == Sign::Neg
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "+1" | "+" => Ok(Sign::Pos),
            "-1" | "-" => Ok(Sign::Neg),
            other => Err(format!("sign must be -1 or 1, got {other:?}")),
        }
    }
}

/// Signed per-direction degree counts of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Degrees {
    pub out_pos: usize,
    pub out_neg: usize,
    pub in_pos: usize,
    pub in_neg: usize,
}

impl Degrees {
    pub fn out_total(&self) -> usize {
        self.out_pos + self.out_neg
    }

    pub fn in_total(&self) -> usize {
        self.in_pos + self.in_neg
    }
}

/// Compressed adjacency: `edges[offsets[i]..offsets[i + 1]]` belong to node `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    edges: Vec<EdgeId>,
}

impl Adjacency {
    /// Buckets edge ids by `key`, ordered inside each bucket by `tie` and
    /// then edge id. Two stable counting sorts, so linear in nodes + edges.
    fn build(node_count: usize, key: &[u32], tie: &[u32]) -> Self {
        let by_tie = counting_sort(node_count, 0..key.len(), tie).1;
        let (offsets, edges) = counting_sort(node_count, by_tie.into_iter(), key);
        Adjacency { offsets, edges }
    }

    fn bucket(&self, i: NodeId) -> &[EdgeId] {
        &self.edges[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Stable counting sort of `order` by `key[e]`; returns bucket offsets and
/// the sorted ids.
fn counting_sort(node_count: usize, order: impl ExactSizeIterator<Item = EdgeId> + Clone, key: &[u32]) -> (Vec<usize>, Vec<EdgeId>) {
    let mut offsets = vec![0usize; node_count + 1];
    for &k in key {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut sorted = vec![0; order.len()];
    for e in order {
        let k = key[e] as usize;
        sorted[cursor[k]] = e;
        cursor[k] += 1;
    }
    (offsets, sorted)
}

/// Immutable directed signed graph without duplicate `(src, dst)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedDigraph {
    src: Vec<u32>,
    dst: Vec<u32>,
    labels: Vec<Sign>,
    out_adj: Adjacency,
    in_adj: Adjacency,
    raw_ids: Vec<u64>,
}

impl SignedDigraph {
    /// Builds from raw `(src, dst, sign)` triples.
    ///
    /// Dense ids follow first appearance. A repeated `(src, dst)` pair keeps
    /// the first sign seen; self-loops are kept.
    pub fn build<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64, i64)>,
    {
        let mut builder = Builder::default();
        for (index, (s, d, sign)) in edges.into_iter().enumerate() {
            let sign = Sign::from_i64(sign).ok_or(Error::InvalidSign { index, value: sign })?;
            builder.push(s, d, sign);
        }
        Ok(builder.finish())
    }

    /// Builds from already-dense endpoints. Nodes `0..node_count` all exist,
    /// including isolated ones, and raw ids equal dense ids.
    pub fn from_dense(node_count: usize, edges: &[(NodeId, NodeId)], labels: Vec<Sign>) -> Result<Self> {
        if edges.len() != labels.len() {
            return Err(Error::SizeMismatch {
                expected: edges.len(),
                actual: labels.len(),
            });
        }
        let mut src = Vec::with_capacity(edges.len());
        let mut dst = Vec::with_capacity(edges.len());
        for &(s, d) in edges {
            for node in [s, d] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            src.push(s as u32);
            dst.push(d as u32);
        }
        Ok(Self::assemble(node_count, src, dst, labels, (0..node_count as u64).collect()))
    }

    /// Drops repeated `(src, dst)` pairs, keeping the first, and builds the
    /// adjacency buckets.
    fn assemble(node_count: usize, mut src: Vec<u32>, mut dst: Vec<u32>, mut labels: Vec<Sign>, raw_ids: Vec<u64>) -> Self {
        let mut out_adj = Adjacency::build(node_count, &src, &dst);
        let mut keep = vec![true; src.len()];
        let mut any_dup = false;
        for i in 0..node_count {
            // within a bucket equal targets are adjacent, lowest edge id first
            for w in out_adj.bucket(i).windows(2) {
                if dst[w[0]] == dst[w[1]] {
                    keep[w[1]] = false;
                    any_dup = true;
                }
            }
        }
        if any_dup {
            let mut k = keep.iter();
            src.retain(|_| *k.next().unwrap());
            let mut k = keep.iter();
            dst.retain(|_| *k.next().unwrap());
            let mut k = keep.iter();
            labels.retain(|_| *k.next().unwrap());
            out_adj = Adjacency::build(node_count, &src, &dst);
        }
        let in_adj = Adjacency::build(node_count, &dst, &src);
        SignedDigraph {
            src,
            dst,
            labels,
            out_adj,
            in_adj,
            raw_ids,
        }
    }

    /// Parses the canonical edge-list text format: `#` comments, and
    /// whitespace-separated `src dst sign` lines.
    pub fn read_edge_list<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut builder = Builder::default();
        let mut line = String::new();
        let mut lineno = 0;
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            lineno += 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let (s, d, y) = parse_triple(text).map_err(|msg| Error::Parse { line: lineno, msg })?;
            builder.push(s, d, y);
        }
        Ok(builder.finish())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_edge_list(std::io::BufReader::with_capacity(1 << 20, file))
    }

    /// Writes the canonical edge list, one edge per line in edge-id order,
    /// using raw identifiers.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for e in 0..self.edge_count() {
            let (s, d) = self.endpoints(e);
            writeln!(w, "{} {} {}", self.raw_ids[s], self.raw_ids[d], self.labels[e])?;
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.raw_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }

    #[inline]
    pub fn src(&self, e: EdgeId) -> NodeId {
        self.src[e] as usize
    }

    #[inline]
    pub fn dst(&self, e: EdgeId) -> NodeId {
        self.dst[e] as usize
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        (self.src(e), self.dst(e))
    }

    #[inline]
    pub fn label(&self, e: EdgeId) -> Sign {
        self.labels[e]
    }

    pub fn labels(&self) -> &[Sign] {
        &self.labels
    }

    #[inline]
    pub fn out_edges(&self, i: NodeId) -> &[EdgeId] {
        self.out_adj.bucket(i)
    }

    #[inline]
    pub fn in_edges(&self, i: NodeId) -> &[EdgeId] {
        self.in_adj.bucket(i)
    }

    pub fn out_degree(&self, i: NodeId) -> usize {
        self.out_adj.offsets[i + 1] - self.out_adj.offsets[i]
    }

    pub fn in_degree(&self, i: NodeId) -> usize {
        self.in_adj.offsets[i + 1] - self.in_adj.offsets[i]
    }

    pub fn raw_id(&self, i: NodeId) -> u64 {
        self.raw_ids[i]
    }

    pub fn raw_ids(&self) -> &[u64] {
        &self.raw_ids
    }

    /// Dense id of a raw identifier. Linear scan; meant for tooling, not loops.
    pub fn dense_id(&self, raw: u64) -> Option<NodeId> {
        self.raw_ids.iter().position(|&r| r == raw)
    }

    pub fn degrees(&self, i: NodeId) -> Result<Degrees> {
        if i >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                node: i,
                node_count: self.node_count(),
            });
        }
        let out_neg = self.out_edges(i).iter().filter(|&&e| self.labels[e].is_neg()).count();
        let in_neg = self.in_edges(i).iter().filter(|&&e| self.labels[e].is_neg()).count();
        Ok(Degrees {
            out_pos: self.out_degree(i) - out_neg,
            out_neg,
            in_pos: self.in_degree(i) - in_neg,
            in_neg,
        })
    }

    /// Edge id of `src -> dst`, if present.
    pub fn find_edge(&self, src: NodeId, dst: NodeId) -> Option<EdgeId> {
        let bucket = self.out_edges(src);
        bucket
            .binary_search_by_key(&(dst as u32), |&e| self.dst[e])
            .ok()
            .map(|pos| bucket[pos])
    }

    /// Edge id of the opposite-direction edge, if present. Self-loops are
    /// their own reciprocal.
    pub fn reciprocal(&self, e: EdgeId) -> Option<EdgeId> {
        let (s, d) = self.endpoints(e);
        self.find_edge(d, s)
    }

    /// Same topology with a new labeling.
    pub fn relabeled(&self, labels: Vec<Sign>) -> Result<Self> {
        if labels.len() != self.edge_count() {
            return Err(Error::SizeMismatch {
                expected: self.edge_count(),
                actual: labels.len(),
            });
        }
        Ok(SignedDigraph {
            labels,
            ..self.clone()
        })
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let pos = self.labels.iter().filter(|y| !y.is_neg()).count();
        pos as f64 / self.edge_count() as f64
    }

    /// Subgraph induced by `edges` (in the given order). Nodes are renumbered
    /// by first appearance; raw ids are inherited. Returns the subgraph and the
    /// subgraph-to-parent node map.
    pub(crate) fn edge_subgraph(&self, edges: &[EdgeId]) -> (SignedDigraph, Vec<NodeId>) {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut node_map = Vec::new();
        let mut src = Vec::with_capacity(edges.len());
        let mut dst = Vec::with_capacity(edges.len());
        let mut labels = Vec::with_capacity(edges.len());
        let mut dense = |v: u32, node_map: &mut Vec<NodeId>| -> u32 {
            *remap.entry(v).or_insert_with(|| {
                node_map.push(v as usize);
                (node_map.len() - 1) as u32
            })
        };
        for &e in edges {
            src.push(dense(self.src[e], &mut node_map));
            dst.push(dense(self.dst[e], &mut node_map));
            labels.push(self.labels[e]);
        }
        let raw_ids = node_map.iter().map(|&v| self.raw_ids[v]).collect();
        let sub = Self::assemble(node_map.len(), src, dst, labels, raw_ids);
        (sub, node_map)
    }
}

fn parse_triple(text: &str) -> std::result::Result<(u64, u64, Sign), String> {
    let mut it = text.split_ascii_whitespace();
    let mut field = |name: &str| it.next().ok_or_else(|| format!("missing {name} field"));
    let s = field("source")?;
    let d = field("destination")?;
    let y = field("sign")?;
    let s: u64 = s.parse().map_err(|_| format!("bad node id {s:?}"))?;
    let d: u64 = d.parse().map_err(|_| format!("bad node id {d:?}"))?;
    let y = match y.parse::<i64>() {
        Ok(v) => Sign::from_i64(v).ok_or_else(|| format!("sign must be -1 or 1, got {v}"))?,
        Err(_) => return Err(format!("bad sign {y:?}")),
    };
    Ok((s, d, y))
}

#[derive(Default)]
struct Builder {
    ids: HashMap<u64, u32>,
    raw_ids: Vec<u64>,
    src: Vec<u32>,
    dst: Vec<u32>,
    labels: Vec<Sign>,
}

impl Builder {
    fn intern(&mut self, raw: u64) -> u32 {
        match self.ids.entry(raw) {
            Entry::Occupied(o) => *o.get(),
            Entry::Vacant(v) => {
                let id = self.raw_ids.len() as u32;
                self.raw_ids.push(raw);
                *v.insert(id)
            }
        }
    }

    fn push(&mut self, s: u64, d: u64, y: Sign) {
        let s = self.intern(s);
        let d = self.intern(d);
        self.src.push(s);
        self.dst.push(d);
        self.labels.push(y);
    }

    fn finish(self) -> SignedDigraph {
        SignedDigraph::assemble(self.raw_ids.len(), self.src, self.dst, self.labels, self.raw_ids)
    }
}
