//! Simple undirected graphs.

use std::collections::VecDeque;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Undirected simple graph on nodes `0..n`.
///
/// Edges are stored once with `source < target`, sorted lexicographically.
/// Unweighted graphs carry weight 1 on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    weighted: bool,
}

impl Graph {
    /// Unweighted graph from node pairs. Rejects self-loops, duplicate
    /// edges (in either orientation) and out-of-range endpoints.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges = pairs.into_iter().map(|(a, b)| (a, b, 1.0)).collect();
        Self::build(default_labels(n), edges, false)
    }

    pub fn from_weighted_edges(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        Self::build(default_labels(n), edges, true)
    }

    fn build(labels: Vec<String>, raw: Vec<(usize, usize, f64)>, weighted: bool) -> Result<Self> {
        let n = labels.len();
        let mut edges = Vec::with_capacity(raw.len());
        for (a, b, w) in raw {
            if a >= n || b >= n {
                return domain(format!("edge ({a}, {b}) out of range for {n} nodes"));
            }
            if a == b {
                return domain(format!("self-loop on node {a}"));
            }
            let (source, target) = if a < b { (a, b) } else { (b, a) };
            edges.push(Edge {
                source,
                target,
                weight: if weighted { w } else { 1.0 },
            });
        }
        edges.sort_by_key(|e| (e.source, e.target));
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].source, w[0].target) == (w[1].source, w[1].target))
        {
            return domain(format!("duplicate edge ({}, {})", w[0].source, w[0].target));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.source].push(e.target);
            adjacency[e.target].push(e.source);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Ok(Self {
            labels,
            edges,
            adjacency,
            weighted,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return domain(format!(
                "{} labels given for {} nodes",
                labels.len(),
                self.labels.len()
            ));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count() && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / self.labels.len() as f64
    }

    /// The same graph with unit weights.
    pub fn unweighted(&self) -> Self {
        let mut g = self.clone();
        g.weighted = false;
        for e in &mut g.edges {
            e.weight = 1.0;
        }
        g
    }

    /// Shortest-path distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().len() == 1
    }

    /// Subgraph induced by `nodes` (which must be sorted and distinct).
    /// Node `k` of the result is `nodes[k]` of `self`.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.node_count()];
        for (k, &v) in nodes.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.source] != usize::MAX && index[e.target] != usize::MAX)
            .map(|e| (index[e.source], index[e.target], e.weight))
            .collect();
        let labels = nodes.iter().map(|&v| self.labels[v].clone()).collect();
        Self::build(labels, edges, self.weighted).expect("induced subgraph of a valid graph")
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// A subgraph together with the original id of each of its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub graph: Graph,
    pub original_ids: Vec<usize>,
}

/// The node-induced subgraph on the largest connected component. Among
/// equally large components the one holding the smallest node id wins.
pub fn largest_component(g: &Graph) -> Result<Component> {
    if g.node_count() == 0 {
        return domain("graph has no nodes");
    }
    // `components()` orders by smallest member, and max_by_key keeps the
    // last maximum, so iterate in reverse to keep the first.
    let best = g
        .components()
        .into_iter()
        .rev()
        .max_by_key(|c| c.len())
        .expect("non-empty graph has a component");
    Ok(Component {
        graph: g.induced(&best),
        original_ids: best,
    })
}
