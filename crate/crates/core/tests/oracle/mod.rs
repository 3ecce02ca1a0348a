//! Slow, obviously-correct reference implementations used as test oracles.
//! Nothing here shares code with the library beyond the `Graph` container.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use syntonet::graph::Graph;

/// Brute-force consonance and dissonance of two spectra given as
/// `(frequency, amplitude)` lists, plus the qualifying index pairs.
pub struct BruteSyntony {
    pub consonance: f64,
    pub dissonance: f64,
    pub consonant: BTreeSet<(usize, usize)>,
    pub dissonant: BTreeSet<(usize, usize)>,
}

/// Sorts ascending, then adds left to right.
pub fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.into_iter().fold(0.0, |a, b| a + b)
}

pub fn brute_syntony(x: &[(f64, f64)], y: &[(f64, f64)], delta_min: f64, delta_max: f64) -> BruteSyntony {
    let mut cons = Vec::new();
    let mut diss = Vec::new();
    let mut consonant = BTreeSet::new();
    let mut dissonant = BTreeSet::new();
    for (i, &(fx, ax)) in x.iter().enumerate() {
        for (j, &(fy, ay)) in y.iter().enumerate() {
            let d = (fx - fy).abs();
            if d < delta_min / 2.0 {
                cons.push(ax * ay);
                consonant.insert((i, j));
            } else if d < delta_max / 2.0 {
                diss.push(ax * ay);
                dissonant.insert((i, j));
            }
        }
    }
    BruteSyntony {
        consonance: sorted_sum(cons),
        dissonance: sorted_sum(diss),
        consonant,
        dissonant,
    }
}

/// A spectrum of 1..=max_partials partials: increasing frequencies with
/// gaps comparable to the windows so that every classification occurs,
/// and non-increasing positive amplitudes.
pub fn random_spectrum(rng: &mut impl Rng, max_partials: usize, typical_gap: f64) -> Vec<(f64, f64)> {
    let count = rng.random_range(1..=max_partials);
    let mut f = rng.random_range(20.0..200.0);
    let mut a = rng.random_range(0.2..1.0);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push((f, a));
        f += rng.random_range(0.05..3.0) * typical_gap;
        a *= rng.random_range(0.5..1.0);
    }
    out
}

/// All-pairs hop distances, `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
    }
    for e in g.edges() {
        d[e.source][e.target] = 1;
        d[e.target][e.source] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect())
        .collect()
}

pub fn eccentricity(g: &Graph) -> Vec<f64> {
    floyd_warshall(g)
        .iter()
        .map(|row| row.iter().map(|d| d.expect("connected")).max().unwrap_or(0) as f64)
        .collect()
}

pub fn hierarchical_degree(g: &Graph, h: usize) -> Vec<f64> {
    floyd_warshall(g)
        .iter()
        .map(|row| row.iter().filter(|d| **d == Some(h)).count() as f64)
        .collect()
}

/// Every simple path from `s` to `t`, as node sequences.
fn simple_paths(g: &Graph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, path: &mut Vec<usize>, t: usize, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        for &u in g.neighbors(v) {
            if !path.contains(&u) {
                path.push(u);
                walk(g, path, t, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, &mut vec![s], t, &mut out);
    out
}

/// Betweenness by listing every shortest path of every unordered pair.
/// Node values over `C(n-1, 2)` pairs, edge values over `C(n, 2)`; edge
/// values in `g.edges()` order.
pub fn betweenness(g: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let mut node = vec![0.0; n];
    let mut edge = vec![0.0; g.edge_count()];
    for s in 0..n {
        for t in s + 1..n {
            let paths = simple_paths(g, s, t);
            let best = paths.iter().map(Vec::len).min().expect("connected");
            let shortest: Vec<_> = paths.into_iter().filter(|p| p.len() == best).collect();
            let share = 1.0 / shortest.len() as f64;
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    node[v] += share;
                }
                for w in p.windows(2) {
                    let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                    let k = g.edges().iter().position(|e| (e.source, e.target) == (a, b)).unwrap();
                    edge[k] += share;
                }
            }
        }
    }
    let pairs_without = if n > 2 { ((n - 1) * (n - 2)) as f64 / 2.0 } else { 1.0 };
    let pairs = if n > 1 { (n * (n - 1)) as f64 / 2.0 } else { 1.0 };
    (
        node.into_iter().map(|x| if n > 2 { x / pairs_without } else { 0.0 }).collect(),
        edge.into_iter().map(|x| x / pairs).collect(),
    )
}

/// Arrival distribution of an `h`-step random walk from `i`, by expanding
/// every walk explicitly.
pub fn walk_distribution(g: &Graph, i: usize, h: usize) -> Vec<f64> {
    fn expand(g: &Graph, v: usize, left: usize, p: f64, out: &mut [f64]) {
        if left == 0 {
            out[v] += p;
            return;
        }
        let nb = g.neighbors(v);
        if nb.is_empty() {
            out[v] += p;
            return;
        }
        for &u in nb {
            expand(g, u, left - 1, p / nb.len() as f64, out);
        }
    }
    let mut out = vec![0.0; g.node_count()];
    expand(g, i, h, 1.0, &mut out);
    out
}

pub fn accessibility(g: &Graph, h: usize) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| {
            let p = walk_distribution(g, i, h);
            let ent: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
            ent.exp()
        })
        .collect()
}

/// `count` graphs on 1..=max_n nodes with a random edge density each.
pub fn random_corpus(rng: &mut impl Rng, count: usize, max_n: usize) -> Vec<Graph> {
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            let p: f64 = rng.random_range(0.15..0.9);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
        .collect()
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
}

pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (0, i))).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

/// Largest absolute difference, with lengths required to match.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
