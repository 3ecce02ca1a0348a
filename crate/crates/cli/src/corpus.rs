//! Reference ensembles: sample generation, features and the fitted PCA.

use anyhow::{Context, Result};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use syntonet::graph::largest_component;
use syntonet::graphmodels::{fit_to_degree, generate, ModelKind, ModelSpec, WS_REWIRING};
use syntonet::metrics::{feature_vector, FeatureVector};
use syntonet::projection::{self, PcaModel};

/// A named ensemble. The two WS entries differ only in rewiring probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ensemble {
    Er,
    Ws1,
    Ws2,
    Ba,
    Geo,
    Sbm,
}

impl Ensemble {
    pub const ALL: [Ensemble; 6] = [
        Ensemble::Er,
        Ensemble::Ws1,
        Ensemble::Ws2,
        Ensemble::Ba,
        Ensemble::Geo,
        Ensemble::Sbm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Ensemble::Er => "ER",
            Ensemble::Ws1 => "WS1",
            Ensemble::Ws2 => "WS2",
            Ensemble::Ba => "BA",
            Ensemble::Geo => "GEO",
            Ensemble::Sbm => "SBM",
        }
    }

    pub fn model_kind(self) -> ModelKind {
        match self {
            Ensemble::Er => ModelKind::Er,
            Ensemble::Ws1 | Ensemble::Ws2 => ModelKind::Ws,
            Ensemble::Ba => ModelKind::Ba,
            Ensemble::Geo => ModelKind::Geo,
            Ensemble::Sbm => ModelKind::Sbm,
        }
    }

    /// Fitted parameters for `n` nodes. `fit_seed` only matters for GEO,
    /// whose radius is calibrated on trial draws.
    pub fn spec(self, n: usize, mean_degree: f64, fit_seed: u64) -> Result<ModelSpec> {
        let spec = fit_to_degree(self.model_kind(), n, mean_degree, fit_seed)?;
        Ok(match self {
            Ensemble::Ws1 => spec.with_rewiring(WS_REWIRING[0])?,
            Ensemble::Ws2 => spec.with_rewiring(WS_REWIRING[1])?,
            _ => spec,
        })
    }
}

impl std::fmt::Display for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Ensemble {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("WS") {
            return Ok(Ensemble::Ws1);
        }
        Ensemble::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown model '{s}' (ER, WS1, WS2, BA, GEO, SBM)"))
    }
}

/// Seed for one artifact: the first eight bytes of SHA-256 over the master
/// seed, a name and an index. Each (name, index) gets its own stream, so
/// adding an ensemble leaves the others untouched.
pub fn derive_seed(master: u64, name: &str, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((name.len() as u64).to_le_bytes());
    h.update(name.as_bytes());
    h.update((index as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSample {
    pub ensemble: Ensemble,
    pub index: usize,
    pub seed: u64,
    /// Edges of the full draw.
    pub edges: usize,
    /// Nodes and edges of the measured component.
    pub component_nodes: usize,
    pub component_edges: usize,
    pub features: FeatureVector,
}

#[derive(Debug, Clone)]
pub struct ReferenceCorpus {
    pub node_count: usize,
    pub mean_degree: f64,
    pub specs: Vec<(Ensemble, ModelSpec)>,
    pub samples: Vec<ModelSample>,
    pub pca: PcaModel,
}

impl ReferenceCorpus {
    pub fn samples_of(&self, e: Ensemble) -> impl Iterator<Item = &ModelSample> {
        self.samples.iter().filter(move |s| s.ensemble == e)
    }
}

/// Draws and measures one sample.
pub fn draw_sample(spec: &ModelSpec, ensemble: Ensemble, index: usize, master_seed: u64) -> Result<ModelSample> {
    let seed = derive_seed(master_seed, ensemble.as_str(), index);
    let g = generate(&spec.clone().with_seed(seed)).with_context(|| format!("{ensemble} sample {index}"))?;
    let c = largest_component(&g)?;
    let features = feature_vector(&c.graph).with_context(|| format!("measuring {ensemble} sample {index}"))?;
    Ok(ModelSample {
        ensemble,
        index,
        seed,
        edges: g.edge_count(),
        component_nodes: c.graph.node_count(),
        component_edges: c.graph.edge_count(),
        features,
    })
}

/// `samples` draws from every ensemble on `n` nodes, their features, and the
/// PCA fitted on all of them.
pub fn build_corpus(n: usize, mean_degree: f64, samples: usize, master_seed: u64) -> Result<ReferenceCorpus> {
    let fit_seed = derive_seed(master_seed, "GEO-radius", 0);
    let specs = Ensemble::ALL
        .into_iter()
        .map(|e| Ok((e, e.spec(n, mean_degree, fit_seed).with_context(|| format!("fitting {e}"))?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..specs.len()).flat_map(|e| (0..samples).map(move |i| (e, i))).collect();
    let drawn = jobs
        .par_iter()
        .map(|&(e, i)| draw_sample(&specs[e].1, specs[e].0, i, master_seed))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<&[f64]> = drawn.iter().map(|s| s.features.as_slice()).collect();
    let pca = projection::fit(&rows).context("fitting PCA on reference samples")?;
    Ok(ReferenceCorpus {
        node_count: n,
        mean_degree,
        specs,
        samples: drawn,
        pca,
    })
}
