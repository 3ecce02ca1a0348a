//! Reference random-graph ensembles, fitted to a target mean degree.
//!
//! * ER: `G(n, p)`.
//! * WS: a 2D toroidal lattice whose neighbourhood holds the `m` nearest
//!   forward offsets (degree `2m`), followed by Watts–Strogatz rewiring.
//! * BA: preferential attachment of `m` edges per new node onto a seed clique.
//! * GEO: one node per cell of a 2D grid, jittered uniformly inside the cell,
//!   joined when closer than a radius.
//! * SBM: two equal blocks with `p_in = 4 p_out`.
//!
//! Every generator is deterministic given its seed and returns a simple graph.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::graph::Graph;

/// Rewiring probabilities of the two small-world ensembles.
pub const WS_REWIRING: [f64; 2] = [0.01, 0.1];
pub const SBM_IN_OUT_RATIO: f64 = 4.0;
/// Draws averaged when fitting the geometric radius.
pub const GEO_FIT_TRIALS: usize = 20;
/// Relative tolerance of the fitted geometric mean degree.
pub const GEO_FIT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Er,
    Ws,
    Ba,
    Geo,
    Sbm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [ModelKind::Er, ModelKind::Ws, ModelKind::Ba, ModelKind::Geo, ModelKind::Sbm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Er => "ER",
            ModelKind::Ws => "WS",
            ModelKind::Ba => "BA",
            ModelKind::Geo => "GEO",
            ModelKind::Sbm => "SBM",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Domain(format!("unknown model `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Er {
        p: f64,
    },
    Ws {
        rows: usize,
        cols: usize,
        /// Forward lattice offsets per node; every node gets degree `2 * half_neighbors`.
        half_neighbors: usize,
        rewiring: f64,
    },
    Ba {
        m: usize,
        /// Size of the initial clique.
        seed_size: usize,
    },
    Geo {
        rows: usize,
        cols: usize,
        radius: f64,
    },
    Sbm {
        blocks: Vec<usize>,
        p_in: f64,
        p_out: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub n: usize,
    pub target_mean_degree: f64,
    pub params: ModelParams,
    pub seed: u64,
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Er { .. } => ModelKind::Er,
            ModelParams::Ws { .. } => ModelKind::Ws,
            ModelParams::Ba { .. } => ModelKind::Ba,
            ModelParams::Geo { .. } => ModelKind::Geo,
            ModelParams::Sbm { .. } => ModelKind::Sbm,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Replaces the rewiring probability of a WS spec.
    pub fn with_rewiring(mut self, p: f64) -> Result<Self> {
        match &mut self.params {
            ModelParams::Ws { rewiring, .. } => {
                check_probability("rewiring", p)?;
                *rewiring = p;
                Ok(self)
            }
            _ => domain(format!("{} has no rewiring probability", self.kind())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 4 {
            return domain(format!("models need at least 4 nodes, got {n}"));
        }
        let k = self.target_mean_degree;
        if !(k.is_finite() && k > 0.0 && k < (n - 1) as f64) {
            return domain(format!("target mean degree {k} outside (0, {})", n - 1));
        }
        match &self.params {
            ModelParams::Er { p } => check_probability("p", *p),
            ModelParams::Ws {
                rows,
                cols,
                half_neighbors,
                rewiring,
            } => {
                check_probability("rewiring", *rewiring)?;
                if rows * cols != n {
                    return domain(format!("lattice {rows}x{cols} does not hold {n} nodes"));
                }
                lattice_offsets(*rows, *cols, *half_neighbors).map(|_| ())
            }
            ModelParams::Ba { m, seed_size } => {
                if *m == 0 || *m >= n {
                    return domain(format!("BA needs 1 <= m < n, got m = {m}"));
                }
                if *seed_size <= *m || *seed_size > n {
                    return domain(format!("BA seed clique of {seed_size} nodes cannot host m = {m}"));
                }
                Ok(())
            }
            ModelParams::Geo { rows, cols, radius } => {
                if rows * cols != n {
                    return domain(format!("grid {rows}x{cols} does not hold {n} nodes"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return domain(format!("radius must be positive, got {radius}"));
                }
                Ok(())
            }
            ModelParams::Sbm { blocks, p_in, p_out } => {
                check_probability("p_in", *p_in)?;
                check_probability("p_out", *p_out)?;
                if blocks.iter().sum::<usize>() != n || blocks.contains(&0) {
                    return domain(format!("blocks {blocks:?} do not partition {n} nodes"));
                }
                Ok(())
            }
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("{name} = {p} is not a probability"));
    }
    Ok(())
}

/// Near-square factorisation `rows * cols == n` with `rows <= cols`.
pub fn grid_dims(n: usize) -> (usize, usize) {
    let rows = (1..=n).take_while(|r| r * r <= n).filter(|r| n % r == 0).last().unwrap_or(1);
    (rows, n / rows)
}

/// The `m` shortest forward offsets `(dr, dc)` of a `rows x cols` torus.
///
/// Offsets are ordered by length, then by `|dr|`, then by `dc`. Offsets that
/// would wrap onto themselves or onto another offset are skipped.
pub fn lattice_offsets(rows: usize, cols: usize, m: usize) -> Result<Vec<(isize, isize)>> {
    let (r, c) = (rows as isize, cols as isize);
    let mut candidates: Vec<(isize, isize)> = (0..=(r - 1) / 2)
        .flat_map(|dr| (-(c - 1) / 2..=(c - 1) / 2).map(move |dc| (dr, dc)))
        .filter(|&(dr, dc)| (2 * dr < r && 2 * dc.abs() < c) && (dr > 0 || (dr == 0 && dc > 0)))
        .collect();
    candidates.sort_by_key(|&(dr, dc)| (dr * dr + dc * dc, dr.abs(), dc));
    if candidates.len() < m {
        return domain(format!(
            "a {rows}x{cols} torus supports at most {} forward offsets, {m} requested",
            candidates.len()
        ));
    }
    candidates.truncate(m);
    Ok(candidates)
}

/// Parameters for `kind` on `n` nodes with expected mean degree close to
/// `target_mean_degree`.
pub fn fit_to_degree(kind: ModelKind, n: usize, target_mean_degree: f64, seed: u64) -> Result<ModelSpec> {
    let k = target_mean_degree;
    let probe = ModelSpec {
        n,
        target_mean_degree: k,
        params: ModelParams::Er { p: 0.0 },
        seed,
    };
    probe.validate()?;
    let params = match kind {
        ModelKind::Er => ModelParams::Er { p: k / (n - 1) as f64 },
        ModelKind::Ws => {
            let (rows, cols) = grid_dims(n);
            ModelParams::Ws {
                rows,
                cols,
                half_neighbors: ((k / 2.0).round() as usize).max(1),
                rewiring: WS_REWIRING[0],
            }
        }
        ModelKind::Ba => {
            let m = ((k / 2.0).round() as usize).max(1);
            let target = k * n as f64 / 2.0;
            let edges = |s: usize| (s * (s - 1) / 2 + m * (n - s)) as f64;
            let seed_size = (m + 1..=n)
                .min_by(|&a, &b| (edges(a) - target).abs().total_cmp(&(edges(b) - target).abs()))
                .ok_or_else(|| Error::Domain(format!("BA with m = {m} needs more than {n} nodes")))?;
            ModelParams::Ba { m, seed_size }
        }
        ModelKind::Geo => {
            let (rows, cols) = grid_dims(n);
            ModelParams::Geo {
                rows,
                cols,
                radius: fit_geo_radius(rows, cols, k, seed)?,
            }
        }
        ModelKind::Sbm => {
            let blocks = vec![n / 2, n - n / 2];
            let within: f64 = blocks.iter().map(|&b| (b * (b - 1)) as f64).sum();
            let across = (2 * blocks[0] * blocks[1]) as f64;
            let p_out = k * n as f64 / (SBM_IN_OUT_RATIO * within + across);
            let p_in = SBM_IN_OUT_RATIO * p_out;
            if p_in > 1.0 {
                return domain(format!("SBM cannot reach mean degree {k} with p_in = 4 p_out"));
            }
            ModelParams::Sbm { blocks, p_in, p_out }
        }
    };
    let spec = ModelSpec {
        n,
        target_mean_degree: k,
        params,
        seed,
    };
    spec.validate()?;
    Ok(spec)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws one graph from the ensemble described by `spec`.
pub fn generate(spec: &ModelSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed);
    let n = spec.n;
    let edges = match &spec.params {
        ModelParams::Er { p } => erdos_renyi(n, *p, &mut rng),
        ModelParams::Ws {
            rows,
            cols,
            half_neighbors,
            rewiring,
        } => watts_strogatz(*rows, *cols, *half_neighbors, *rewiring, &mut rng)?,
        ModelParams::Ba { m, seed_size } => barabasi_albert(n, *m, *seed_size, &mut rng),
        ModelParams::Geo { rows, cols, radius } => {
            let pos = jittered_grid(*rows, *cols, &mut rng);
            geometric_edges(&pos, *radius)
        }
        ModelParams::Sbm { blocks, p_in, p_out } => stochastic_block(blocks, *p_in, *p_out, &mut rng),
    };
    Graph::from_edges(n, edges)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn watts_strogatz(
    rows: usize,
    cols: usize,
    half_neighbors: usize,
    rewiring: f64,
    rng: &mut impl Rng,
) -> Result<Vec<(usize, usize)>> {
    let n = rows * cols;
    let offsets = lattice_offsets(rows, cols, half_neighbors)?;
    let mut lattice = Vec::with_capacity(n * offsets.len());
    for r in 0..rows {
        for c in 0..cols {
            for &(dr, dc) in &offsets {
                let r2 = (r as isize + dr).rem_euclid(rows as isize) as usize;
                let c2 = (c as isize + dc).rem_euclid(cols as isize) as usize;
                lattice.push((r * cols + c, r2 * cols + c2));
            }
        }
    }
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for &(u, v) in &lattice {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for &(u, v) in &lattice {
        if rng.random::<f64>() >= rewiring || adj[u].len() >= n - 1 {
            continue;
        }
        let w = loop {
            let w = rng.random_range(0..n);
            if w != u && !adj[u].contains(&w) {
                break w;
            }
        };
        adj[u].remove(&v);
        adj[v].remove(&u);
        adj[u].insert(w);
        adj[w].insert(u);
    }
    Ok((0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&w| u < w).map(move |&w| (u, w)))
        .collect())
}

fn barabasi_albert(n: usize, m: usize, seed_size: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    // Each node appears once per incident edge, so uniform draws from this
    // list are degree-proportional.
    let mut ends = Vec::new();
    for i in 0..seed_size {
        for j in i + 1..seed_size {
            edges.push((i, j));
            ends.extend([i, j]);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for t in seed_size..n {
        chosen.clear();
        while chosen.len() < m {
            let v = *ends.choose(rng).expect("seed clique has edges");
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }
        for &v in &chosen {
            edges.push((v, t));
            ends.extend([v, t]);
        }
    }
    edges
}

/// One point per grid cell, uniform inside the cell; `x` runs along columns.
pub fn jittered_grid(rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    (0..rows * cols)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            (c as f64 + rng.random::<f64>(), r as f64 + rng.random::<f64>())
        })
        .collect()
}

fn geometric_edges(pos: &[(f64, f64)], radius: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if (pos[i].0 - pos[j].0).hypot(pos[i].1 - pos[j].1) <= radius {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Seed of the `trial`-th draw used to fit a geometric radius.
fn geo_trial_seed(seed: u64, trial: usize) -> u64 {
    // SplitMix64 step.
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Bisects the radius so that the mean degree over [`GEO_FIT_TRIALS`] draws
/// matches `target` within [`GEO_FIT_TOLERANCE`].
pub fn fit_geo_radius(rows: usize, cols: usize, target: f64, seed: u64) -> Result<f64> {
    let n = rows * cols;
    let mut distances: Vec<f64> = Vec::with_capacity(GEO_FIT_TRIALS * n * (n - 1) / 2);
    for t in 0..GEO_FIT_TRIALS {
        let pos = jittered_grid(rows, cols, &mut rng_for(geo_trial_seed(seed, t)));
        for i in 0..n {
            for j in i + 1..n {
                distances.push((pos[i].0 - pos[j].0).hypot(pos[i].1 - pos[j].1));
            }
        }
    }
    distances.sort_unstable_by(f64::total_cmp);
    let mean_degree = |r: f64| {
        let within = distances.partition_point(|&d| d <= r);
        2.0 * within as f64 / (GEO_FIT_TRIALS * n) as f64
    };
    let (mut lo, mut hi) = (0.0, (rows as f64).hypot(cols as f64));
    let mut best = (f64::INFINITY, hi);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let k = mean_degree(mid);
        if (k - target).abs() < best.0 {
            best = ((k - target).abs(), mid);
        }
        if k < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.0 > GEO_FIT_TOLERANCE * target {
        return domain(format!("no radius brings the geometric mean degree within 2% of {target}"));
    }
    Ok(best.1)
}

fn stochastic_block(blocks: &[usize], p_in: f64, p_out: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let block_of: Vec<usize> = blocks.iter().enumerate().flat_map(|(b, &size)| std::iter::repeat_n(b, size)).collect();
    let n = block_of.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block_of[i] == block_of[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Block index of every node of an SBM spec.
pub fn sbm_membership(blocks: &[usize]) -> Vec<usize> {
    blocks.iter().enumerate().flat_map(|(b, &size)| std::iter::repeat_n(b, size)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_er() {
        let spec = ModelSpec {
            n: 108,
            target_mean_degree: 10.37,
            params: ModelParams::Er { p: 1.0 },
            seed: 1,
        };
        assert_eq!(generate(&spec).unwrap().edge_count(), 5778);
    }

    #[test]
    fn fitted_parameters() {
        let er = fit_to_degree(ModelKind::Er, 108, 10.37, 0).unwrap();
        let ModelParams::Er { p } = er.params else { panic!() };
        assert!((p - 10.37 / 107.0).abs() < 1e-15);
        assert!((p - 0.09692).abs() < 1e-5);

        let ba = fit_to_degree(ModelKind::Ba, 108, 10.37, 0).unwrap();
        assert_eq!(ba.params, ModelParams::Ba { m: 5, seed_size: 14 });

        let sbm = fit_to_degree(ModelKind::Sbm, 108, 10.37, 0).unwrap();
        let ModelParams::Sbm { blocks, p_in, p_out } = sbm.params else { panic!() };
        assert_eq!(blocks, vec![54, 54]);
        assert!((p_out - 10.37 / (4.0 * 53.0 + 54.0)).abs() < 1e-15);
        assert!((p_out - 0.03899).abs() < 1e-5);
        assert_eq!(p_in, 4.0 * p_out);

        let ws = fit_to_degree(ModelKind::Ws, 108, 10.37, 0).unwrap();
        assert_eq!(
            ws.params,
            ModelParams::Ws { rows: 9, cols: 12, half_neighbors: 5, rewiring: 0.01 }
        );
    }

    #[test]
    fn grid_factorisation() {
        assert_eq!(grid_dims(108), (9, 12));
        assert_eq!(grid_dims(100), (10, 10));
        assert_eq!(grid_dims(7), (1, 7));
    }

    #[test]
    fn unrewired_lattice_is_regular() {
        let spec = fit_to_degree(ModelKind::Ws, 108, 10.37, 3).unwrap().with_rewiring(0.0).unwrap();
        let g = generate(&spec).unwrap();
        assert!((0..108).all(|v| g.degree(v) == 10));
        // Moore neighbourhood plus the two second neighbours along a row.
        assert!(g.has_edge(0, 1) && g.has_edge(0, 12) && g.has_edge(0, 13) && g.has_edge(0, 2));
        assert!(g.has_edge(0, 11) && g.has_edge(0, 10) && g.has_edge(0, 96));
        assert!(!g.has_edge(0, 24));

        let spec = ModelSpec {
            n: 100,
            target_mean_degree: 4.0,
            params: ModelParams::Ws { rows: 10, cols: 10, half_neighbors: 2, rewiring: 0.0 },
            seed: 0,
        };
        let g = generate(&spec).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 4));
        let spec = ModelSpec {
            params: ModelParams::Ws { rows: 10, cols: 10, half_neighbors: 4, rewiring: 0.0 },
            target_mean_degree: 8.0,
            ..spec
        };
        assert!((0..100).all(|v| generate(&spec).unwrap().degree(v) == 8));
    }

    #[test]
    fn rewiring_keeps_edge_count() {
        let spec = fit_to_degree(ModelKind::Ws, 108, 10.37, 9).unwrap().with_rewiring(0.3).unwrap();
        let g = generate(&spec).unwrap();
        assert_eq!(g.edge_count(), 540);
    }

    #[test]
    fn small_torus_rejects_large_neighbourhood() {
        assert!(lattice_offsets(3, 3, 5).is_err());
        assert_eq!(lattice_offsets(3, 3, 4).unwrap().len(), 4);
    }

    #[test]
    fn ba_edge_count_and_hubs() {
        let spec = fit_to_degree(ModelKind::Ba, 108, 10.37, 5).unwrap();
        let g = generate(&spec).unwrap();
        assert_eq!(g.edge_count(), 91 + 5 * 94);
        assert!((14..108).all(|v| g.degree(v) >= 5));
    }

    #[test]
    fn geo_radius_hits_target() {
        let spec = fit_to_degree(ModelKind::Geo, 108, 10.37, 11).unwrap();
        let ModelParams::Geo { radius, .. } = spec.params else { panic!() };
        assert!(radius > 1.0 && radius < 3.0, "{radius}");
    }

    #[test]
    fn deterministic_given_seed() {
        for kind in ModelKind::ALL {
            let spec = fit_to_degree(kind, 64, 6.0, 42).unwrap();
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap(), "{kind}");
            let other = generate(&spec.clone().with_seed(43)).unwrap();
            if kind != ModelKind::Ws {
                assert_ne!(generate(&spec).unwrap(), other, "{kind}");
            }
        }
    }

    #[test]
    fn infeasible_specs() {
        assert!(fit_to_degree(ModelKind::Er, 3, 1.0, 0).is_err());
        assert!(fit_to_degree(ModelKind::Er, 10, 9.0, 0).is_err());
        let bad = ModelSpec {
            n: 10,
            target_mean_degree: 4.0,
            params: ModelParams::Ba { m: 10, seed_size: 10 },
            seed: 0,
        };
        assert!(generate(&bad).is_err());
        let bad = ModelSpec { params: ModelParams::Er { p: 1.5 }, ..bad };
        assert!(generate(&bad).is_err());
        assert!(fit_to_degree(ModelKind::Er, 10, 4.0, 0).unwrap().with_rewiring(0.1).is_err());
    }

    #[test]
    fn model_names() {
        for k in ModelKind::ALL {
            assert_eq!(k.to_string().parse::<ModelKind>().unwrap(), k);
        }
        assert_eq!("geo".parse::<ModelKind>().unwrap(), ModelKind::Geo);
    }
}
