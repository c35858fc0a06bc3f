//! Finite connected multigraphs standing in for the base variety.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("base graph needs at least one vertex")]
    NoVertices,
    #[error("edge {edge} references vertex {vertex} outside 0..{vertices}")]
    BadEndpoint { edge: usize, vertex: usize, vertices: usize },
}

/// Oriented multigraph; loops and parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

/// Edge scan order used when growing a breadth-first spanning tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeOrder {
    #[default]
    Forward,
    Reverse,
}

/// How a vertex was reached from its tree parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStep {
    pub parent: usize,
    pub edge: usize,
    /// `true` when the edge is oriented parent -> child.
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    /// Parent step for every vertex; `None` for the root and unreached vertices.
    pub steps: Vec<Option<TreeStep>>,
    /// Vertices in discovery order, root first.
    pub order: Vec<usize>,
    pub tree_edges: Vec<usize>,
    pub non_tree_edges: Vec<usize>,
}

impl BaseGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if vertices == 0 {
            return Err(GraphError::NoVertices);
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= vertices {
                    return Err(GraphError::BadEndpoint { edge: i, vertex: w, vertices });
                }
            }
        }
        Ok(BaseGraph { vertices, edges })
    }

    /// One vertex carrying `loops` loops.
    pub fn bouquet(loops: usize) -> Self {
        BaseGraph { vertices: 1, edges: vec![(0, 0); loops] }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.components() == 1
    }

    pub fn spanning_tree(&self, order: TreeOrder) -> SpanningTree {
        let n = self.vertices;
        let mut steps = vec![None; n];
        let mut seen = vec![false; n];
        let mut bfs = vec![0];
        seen[0] = true;
        let mut tree_edges = Vec::new();
        let edge_ids: Vec<usize> = match order {
            TreeOrder::Forward => (0..self.edges.len()).collect(),
            TreeOrder::Reverse => (0..self.edges.len()).rev().collect(),
        };
        let mut head = 0;
        while head < bfs.len() {
            let x = bfs[head];
            head += 1;
            for &e in &edge_ids {
                let (u, v) = self.edges[e];
                let (next, forward) = if u == x && !seen[v] {
                    (v, true)
                } else if v == x && !seen[u] {
                    (u, false)
                } else {
                    continue;
                };
                seen[next] = true;
                steps[next] = Some(TreeStep { parent: x, edge: e, forward });
                tree_edges.push(e);
                bfs.push(next);
            }
        }
        tree_edges.sort_unstable();
        let non_tree_edges = (0..self.edges.len()).filter(|e| tree_edges.binary_search(e).is_err()).collect();
        SpanningTree { root: 0, steps, order: bfs, tree_edges, non_tree_edges }
    }
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }

    /// Class representative of every element (the smallest member).
    pub fn labels(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|x| self.find(x)).collect()
    }
}
