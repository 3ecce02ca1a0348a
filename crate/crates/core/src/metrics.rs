//! Topological measurements of unweighted, undirected, connected graphs.
//!
//! Seventeen per-node (or per-edge) measurements are reduced to their mean
//! and population standard deviation, giving a 34-entry [`FeatureVector`]
//! whose order is fixed by [`MEASUREMENT_NAMES`].
//!
//! Random-walk measures use the transition matrix `P = D^-1 A`:
//!
//! * accessibility at level `h` is `exp(H)` of row `i` of `P^h`, where `H`
//!   is the Shannon entropy over the nonzero entries;
//! * generalized accessibility does the same for `e^-1 * exp(P)`;
//! * concentric symmetry follows walks that only move outward, from ring
//!   `d` to ring `d + 1` of the distance decomposition around a node, and
//!   divides `exp(H)` of the arrival distribution on ring `h` by the size of
//!   that ring. The backbone variant ignores edges inside a ring; the merged
//!   variant first contracts each connected group inside a ring into one
//!   vertex. A node with an empty ring `h` has symmetry 1.

use std::collections::VecDeque;

use crate::error::{domain, Error, Result};
use crate::graph::Graph;

pub const MEASUREMENT_COUNT: usize = 17;
pub const FEATURE_COUNT: usize = 2 * MEASUREMENT_COUNT;

pub const MEASUREMENT_NAMES: [&str; MEASUREMENT_COUNT] = [
    "degree",
    "clustering",
    "hierarchical_degree_2",
    "hierarchical_degree_3",
    "accessibility_2",
    "accessibility_3",
    "generalized_accessibility",
    "backbone_symmetry_2",
    "backbone_symmetry_3",
    "backbone_symmetry_4",
    "merged_symmetry_2",
    "merged_symmetry_3",
    "merged_symmetry_4",
    "eigenvector_centrality",
    "betweenness",
    "edge_betweenness",
    "eccentricity",
];

/// `<measurement>_mean`, `<measurement>_std`, in feature order.
pub fn feature_names() -> Vec<String> {
    MEASUREMENT_NAMES
        .iter()
        .flat_map(|m| [format!("{m}_mean"), format!("{m}_std")])
        .collect()
}

const EIGEN_TOLERANCE: f64 = 1e-10;
const EIGEN_MAX_ITERATIONS: usize = 100_000;
const SERIES_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryVariant {
    Backbone,
    Merged,
}

pub fn degree(g: &Graph) -> Vec<f64> {
    (0..g.node_count()).map(|v| g.degree(v) as f64).collect()
}

/// Local clustering `2 T_i / (k_i (k_i - 1))`, zero when `k_i < 2`.
pub fn clustering(g: &Graph) -> Vec<f64> {
    (0..g.node_count())
        .map(|v| {
            let nb = g.neighbors(v);
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let links: usize = nb
                .iter()
                .map(|&u| sorted_intersection_len(g.neighbors(u), nb))
                .sum::<usize>()
                / 2;
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Hop distances between all pairs; `usize::MAX` marks unreachable pairs.
pub fn distance_matrix(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.node_count())
        .map(|s| {
            g.bfs_distances(s)
                .into_iter()
                .map(|d| d.unwrap_or(usize::MAX))
                .collect()
        })
        .collect()
}

/// Number of nodes at distance exactly `h`.
pub fn hierarchical_degree(g: &Graph, h: usize) -> Vec<f64> {
    distance_matrix(g)
        .iter()
        .map(|row| row.iter().filter(|&&d| d == h).count() as f64)
        .collect()
}

pub fn eccentricity(g: &Graph) -> Vec<f64> {
    distance_matrix(g)
        .iter()
        .map(|row| row.iter().copied().max().map_or(0.0, |d| if d == usize::MAX { f64::INFINITY } else { d as f64 }))
        .collect()
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Self { n, a }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    fn mul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, &x) in self.row(i).iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                for (d, &y) in dst.iter_mut().zip(other.row(k)) {
                    *d += x * y;
                }
            }
        }
        Dense { n, a: out }
    }
}

/// `P = D^-1 A`. Isolated nodes stay put.
fn transition_matrix(g: &Graph) -> Dense {
    let n = g.node_count();
    let mut a = vec![0.0; n * n];
    for v in 0..n {
        let nb = g.neighbors(v);
        if nb.is_empty() {
            a[v * n + v] = 1.0;
            continue;
        }
        let p = 1.0 / nb.len() as f64;
        for &u in nb {
            a[v * n + u] = p;
        }
    }
    Dense { n, a }
}

/// `exp` of the Shannon entropy (natural log) of the positive entries.
pub fn exp_entropy(probabilities: &[f64]) -> f64 {
    let h: f64 = probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    h.exp()
}

pub fn accessibility(g: &Graph, h: usize) -> Vec<f64> {
    let p = transition_matrix(g);
    let mut ph = Dense::identity(g.node_count());
    for _ in 0..h {
        ph = ph.mul(&p);
    }
    (0..g.node_count()).map(|i| exp_entropy(ph.row(i))).collect()
}

/// Accessibility under `e^-1 * exp(P)`: walks of every length `k`, weighted
/// by the Poisson(1) probability of `k`.
pub fn generalized_accessibility(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let p = transition_matrix(g);
    let mut term = Dense::identity(n);
    let mut sum = term.a.clone();
    for k in 1.. {
        term = term.mul(&p);
        let scale = 1.0 / k as f64;
        term.a.iter_mut().for_each(|x| *x *= scale);
        for (s, t) in sum.iter_mut().zip(&term.a) {
            *s += t;
        }
        if term.a.iter().fold(0.0f64, |m, &x| m.max(x)) < SERIES_TOLERANCE {
            break;
        }
    }
    let e_inv = (-1.0f64).exp();
    sum.iter_mut().for_each(|x| *x *= e_inv);
    sum.chunks(n.max(1)).take(n).map(exp_entropy).collect()
}

/// Concentric symmetry of every node at level `h`.
pub fn concentric_symmetry(g: &Graph, h: usize, variant: SymmetryVariant) -> Vec<f64> {
    let dist = distance_matrix(g);
    (0..g.node_count())
        .map(|i| node_symmetry(g, &dist[i], h, variant))
        .collect()
}

fn node_symmetry(g: &Graph, dist: &[usize], h: usize, variant: SymmetryVariant) -> f64 {
    let n = g.node_count();
    // `group[v]` is the vertex `v` belongs to after the ring transformation.
    let group: Vec<usize> = match variant {
        SymmetryVariant::Backbone => (0..n).collect(),
        SymmetryVariant::Merged => ring_groups(g, dist, h),
    };
    let ring_h: Vec<usize> = {
        let mut r: Vec<usize> = (0..n).filter(|&v| dist[v] == h).map(|v| group[v]).collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    if ring_h.is_empty() {
        return 1.0;
    }
    // Outward neighbour groups of each group, restricted to rings < h.
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| dist[v] < h) {
        for &u in g.neighbors(v) {
            if dist[u] == dist[v] + 1 {
                out[group[v]].push(group[u]);
            }
        }
    }
    for o in &mut out {
        o.sort_unstable();
        o.dedup();
    }
    let source = group[(0..n).find(|&v| dist[v] == 0).expect("source node")];
    let mut mass = vec![0.0; n];
    mass[source] = 1.0;
    let mut frontier = vec![source];
    for _ in 0..h {
        let mut next = Vec::new();
        for &v in &frontier {
            let m = std::mem::take(&mut mass[v]);
            let targets = &out[v];
            if targets.is_empty() {
                continue;
            }
            let share = m / targets.len() as f64;
            for &u in targets {
                if mass[u] == 0.0 {
                    next.push(u);
                }
                mass[u] += share;
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }
    let arrived: f64 = ring_h.iter().map(|&v| mass[v]).sum();
    if arrived <= 0.0 {
        return 1.0;
    }
    let p: Vec<f64> = ring_h.iter().map(|&v| mass[v] / arrived).collect();
    exp_entropy(&p) / ring_h.len() as f64
}

/// Representative vertex of each node after contracting, ring by ring, the
/// connected groups formed by edges inside a ring (rings `0..=h`).
fn ring_groups(g: &Graph, dist: &[usize], h: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut group: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] || dist[start] > h {
            continue;
        }
        let ring = dist[start];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            group[v] = start;
            for &u in g.neighbors(v) {
                if !seen[u] && dist[u] == ring {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    group
}

/// Principal eigenvector of the adjacency matrix, L2-normalised and positive.
///
/// Iterates on `A + I`, which shares the eigenvectors of `A` but has a
/// unique dominant eigenvalue on connected bipartite graphs too.
pub fn eigenvector_centrality(g: &Graph) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return domain("eigenvector centrality of an empty graph");
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITERATIONS {
        for v in 0..n {
            y[v] = x[v] + g.neighbors(v).iter().map(|&u| x[u]).sum::<f64>();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let change = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        std::mem::swap(&mut x, &mut y);
        if change < EIGEN_TOLERANCE {
            return Ok(x);
        }
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge in {EIGEN_MAX_ITERATIONS} steps"
    )))
}

/// Node and edge shortest-path betweenness (Brandes).
///
/// Node values are normalised by `(n - 1)(n - 2) / 2` and edge values by
/// `n (n - 1) / 2`, the number of pairs each could lie between. Edge values
/// follow `g.edges()` order.
pub fn betweenness_both(g: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let edge_index = |a: usize, b: usize| {
        let (s, t) = if a < b { (a, b) } else { (b, a) };
        g.edges()
            .binary_search_by_key(&(s, t), |e| (e.source, e.target))
            .expect("edge present")
    };
    let mut node = vec![0.0; n];
    let mut edge = vec![0.0; g.edge_count()];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        sigma.iter_mut().for_each(|x| *x = 0.0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        delta.iter_mut().for_each(|x| *x = 0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in g.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                    edge[edge_index(v, w)] += c;
                    delta[v] += c;
                }
            }
            if w != s {
                node[w] += delta[w];
            }
        }
    }
    // Every unordered pair was counted from both ends.
    let node_scale = if n > 2 { 1.0 / ((n - 1) * (n - 2)) as f64 } else { 0.0 };
    let edge_scale = if n > 1 { 1.0 / (n * (n - 1)) as f64 } else { 0.0 };
    node.iter_mut().for_each(|x| *x *= node_scale);
    edge.iter_mut().for_each(|x| *x *= edge_scale);
    (node, edge)
}

pub fn betweenness(g: &Graph) -> Vec<f64> {
    betweenness_both(g).0
}

pub fn edge_betweenness(g: &Graph) -> Vec<f64> {
    betweenness_both(g).1
}

/// All seventeen measurements of one graph, in [`MEASUREMENT_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub values: Vec<Vec<f64>>,
}

impl MeasurementSet {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        MEASUREMENT_NAMES
            .iter()
            .position(|m| *m == name)
            .map(|i| self.values[i].as_slice())
    }
}

fn check_measurable(g: &Graph, min_nodes: usize) -> Result<()> {
    if g.node_count() < min_nodes {
        return domain(format!("need at least {min_nodes} nodes, got {}", g.node_count()));
    }
    if !g.is_connected() {
        return domain("measurements need a connected graph");
    }
    Ok(())
}

pub fn measure(g: &Graph) -> Result<MeasurementSet> {
    check_measurable(g, 1)?;
    let (btw, ebtw) = betweenness_both(g);
    let values = vec![
        degree(g),
        clustering(g),
        hierarchical_degree(g, 2),
        hierarchical_degree(g, 3),
        accessibility(g, 2),
        accessibility(g, 3),
        generalized_accessibility(g),
        concentric_symmetry(g, 2, SymmetryVariant::Backbone),
        concentric_symmetry(g, 3, SymmetryVariant::Backbone),
        concentric_symmetry(g, 4, SymmetryVariant::Backbone),
        concentric_symmetry(g, 2, SymmetryVariant::Merged),
        concentric_symmetry(g, 3, SymmetryVariant::Merged),
        concentric_symmetry(g, 4, SymmetryVariant::Merged),
        eigenvector_centrality(g)?,
        btw,
        ebtw,
        eccentricity(g),
    ];
    Ok(MeasurementSet { values })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean and standard deviation of each measurement, interleaved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn mean(&self, measurement: usize) -> f64 {
        self.0[2 * measurement]
    }

    pub fn std(&self, measurement: usize) -> f64 {
        self.0[2 * measurement + 1]
    }
}

impl From<&MeasurementSet> for FeatureVector {
    fn from(m: &MeasurementSet) -> Self {
        let mut f = [0.0; FEATURE_COUNT];
        for (k, values) in m.values.iter().enumerate() {
            let (mean, std) = mean_std(values);
            f[2 * k] = mean;
            f[2 * k + 1] = std;
        }
        FeatureVector(f)
    }
}

/// Topological signature of a connected graph with at least five nodes.
pub fn feature_vector(g: &Graph) -> Result<FeatureVector> {
    check_measurable(g, 5)?;
    let fv = FeatureVector::from(&measure(g)?);
    if fv.0.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite feature".into()));
    }
    Ok(fv)
}
