//! Weakly connected components.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, SignedDigraph};

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }
}

/// The largest weakly connected component, as a standalone graph.
#[derive(Debug, Clone)]
pub struct WccView {
    pub graph: SignedDigraph,
    /// View node id -> parent node id.
    pub node_map: Vec<NodeId>,
    /// View edge id -> parent edge id.
    pub edge_map: Vec<EdgeId>,
    /// Fraction of the parent's edges kept.
    pub coverage: f64,
}

/// Picks the component with the most edges; ties go to more nodes, then to
/// the component containing the lowest node id.
pub fn largest_wcc(g: &SignedDigraph) -> Result<WccView> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut uf = UnionFind::new(n);
    for e in 0..g.edge_count() {
        let (s, d) = g.endpoints(e);
        uf.union(s, d);
    }
    // (edges, nodes, min node) per root
    let mut stats = vec![(0usize, 0usize, usize::MAX); n];
    for v in 0..n {
        let r = uf.find(v);
        stats[r].1 += 1;
        stats[r].2 = stats[r].2.min(v);
    }
    for e in 0..g.edge_count() {
        let r = uf.find(g.src(e));
        stats[r].0 += 1;
    }
    let best = (0..n)
        .filter(|&r| stats[r].1 > 0)
        .max_by(|&a, &b| {
            let (ea, na, ma) = stats[a];
            let (eb, nb, mb) = stats[b];
            ea.cmp(&eb).then(na.cmp(&nb)).then(mb.cmp(&ma))
        })
        .expect("at least one component");

    let edge_map: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| uf.find(g.src(e)) == best).collect();
    let (mut graph, mut node_map) = g.edge_subgraph(&edge_map);
    if edge_map.is_empty() {
        // Edgeless graph: the component is a single isolated node.
        let lone = stats[best].2;
        graph = SignedDigraph::from_dense(1, &[], Vec::new())?;
        node_map = vec![lone];
    }
    let coverage = if g.edge_count() == 0 {
        1.0
    } else {
        edge_map.len() as f64 / g.edge_count() as f64
    };
    Ok(WccView {
        graph,
        node_map,
        edge_map,
        coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(edges: &[(u64, u64)]) -> SignedDigraph {
        SignedDigraph::build(edges.iter().map(|&(s, d)| (s, d, 1))).unwrap()
    }

    #[test]
    fn triangle_is_whole_graph() {
        let g = build(&[(0, 1), (1, 2), (2, 0)]);
        let v = largest_wcc(&g).unwrap();
        assert_eq!(v.graph.node_count(), 3);
        assert_eq!(v.graph.edge_count(), 3);
        assert_eq!(v.coverage, 1.0);
    }

    #[test]
    fn picks_component_with_most_edges() {
        // a->b, c->d, d->e: components {a,b} (1 edge) and {c,d,e} (2 edges)
        let g = build(&[(10, 11), (12, 13), (13, 14)]);
        let v = largest_wcc(&g).unwrap();
        let mut raw: Vec<u64> = v.graph.raw_ids().to_vec();
        raw.sort();
        assert_eq!(raw, vec![12, 13, 14]);
        assert_eq!(v.graph.edge_count(), 2);
        assert!((v.coverage - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(v.edge_map, vec![1, 2]);
    }

    #[test]
    fn edge_tie_breaks_on_lowest_node() {
        let g = build(&[(0, 1), (2, 3)]);
        let v = largest_wcc(&g).unwrap();
        assert_eq!(v.node_map, vec![0, 1]);
    }

    #[test]
    fn empty_graph_errors() {
        let g = build(&[]);
        assert!(matches!(largest_wcc(&g), Err(Error::EmptyGraph)));
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.find(0), uf.find(1));
        assert_ne!(uf.find(0), uf.find(3));
    }
}
