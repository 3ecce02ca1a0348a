//! Summaries over projected points and graphs.

use std::collections::BTreeMap;

use syntonet::graph::Graph;

use crate::tables::{ProjectionRow, Source};

/// Mean position of each model ensemble.
pub fn model_centroids(rows: &[ProjectionRow]) -> BTreeMap<String, (f64, f64)> {
    let mut acc: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.meta.source == Source::Model) {
        let e = acc.entry(r.meta.kind.clone()).or_insert((0.0, 0.0, 0));
        e.0 += r.pc1;
        e.1 += r.pc2;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(k, (x, y, n))| (k, (x / n as f64, y / n as f64)))
        .collect()
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// 1-based ranks, ties sharing their average rank.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation. NaN when either side is constant or the
/// lengths differ or are below 2.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    if x.len() != y.len() || x.len() < 2 {
        return f64::NAN;
    }
    pearson(&ranks(x), &ranks(y))
}

/// Share of the edges of `a` that are missing from `b`.
pub fn edge_difference(a: &Graph, b: &Graph) -> f64 {
    if a.edge_count() == 0 {
        return 0.0;
    }
    let missing = a.edges().iter().filter(|e| !b.has_edge(e.source, e.target)).count();
    missing as f64 / a.edge_count() as f64
}
