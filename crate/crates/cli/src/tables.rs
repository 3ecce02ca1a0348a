//! Feature and projection tables.
//!
//! Both share the metadata columns `source,temperament,kind,beta,sample,seed`.
//! Reference samples use `source = model`, the ensemble name as `kind`, and
//! leave `temperament` and `beta` empty; syntonets use `source = syntonet`
//! and leave `sample` and `seed` empty. Other graphs use `source = graph`
//! with their name as `kind`.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use syntonet::metrics::{feature_names, FEATURE_COUNT};

use crate::corpus::ModelSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Model,
    Syntonet,
    /// Any other graph, named by `kind`.
    Graph,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Model => "model",
            Source::Syntonet => "syntonet",
            Source::Graph => "graph",
        }
    }
}

fn opt(s: &str) -> Option<&str> {
    (!s.is_empty()).then_some(s)
}

/// Identifies one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMeta {
    pub source: Source,
    pub temperament: String,
    pub kind: String,
    pub beta: Option<f64>,
    pub sample: Option<usize>,
    pub seed: Option<u64>,
}

impl RowMeta {
    pub fn model(sample: &ModelSample) -> Self {
        RowMeta {
            source: Source::Model,
            temperament: String::new(),
            kind: sample.ensemble.as_str().into(),
            beta: None,
            sample: Some(sample.index),
            seed: Some(sample.seed),
        }
    }

    pub fn syntonet(temperament: &str, kind: &str, beta: f64) -> Self {
        RowMeta {
            source: Source::Syntonet,
            temperament: temperament.into(),
            kind: kind.into(),
            beta: Some(beta),
            sample: None,
            seed: None,
        }
    }

    /// Legend group: the ensemble for models, the temperament for syntonets.
    pub fn group(&self) -> &str {
        match self.source {
            Source::Model | Source::Graph => &self.kind,
            Source::Syntonet => &self.temperament,
        }
    }

    fn fields(&self) -> [String; 6] {
        [
            self.source.as_str().into(),
            self.temperament.clone(),
            self.kind.clone(),
            self.beta.map(|b| b.to_string()).unwrap_or_default(),
            self.sample.map(|s| s.to_string()).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    fn parse(rec: &csv::StringRecord) -> Result<Self> {
        let source = match &rec[0] {
            "model" => Source::Model,
            "syntonet" => Source::Syntonet,
            "graph" => Source::Graph,
            other => bail!("unknown source '{other}'"),
        };
        Ok(RowMeta {
            source,
            temperament: rec[1].to_string(),
            kind: rec[2].to_string(),
            beta: opt(&rec[3]).map(str::parse).transpose().context("beta")?,
            sample: opt(&rec[4]).map(str::parse).transpose().context("sample")?,
            seed: opt(&rec[5]).map(str::parse).transpose().context("seed")?,
        })
    }
}

const META_COLUMNS: [&str; 6] = ["source", "temperament", "kind", "beta", "sample", "seed"];

/// Features of one measured graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub meta: RowMeta,
    /// Nodes and edges of the measured component.
    pub nodes: usize,
    pub edges: usize,
    pub features: Vec<f64>,
}

impl FeatureRow {
    pub fn from_model(s: &ModelSample) -> Self {
        FeatureRow {
            meta: RowMeta::model(s),
            nodes: s.component_nodes,
            edges: s.component_edges,
            features: s.features.as_slice().to_vec(),
        }
    }
}

pub fn write_features<W: Write>(w: W, rows: &[FeatureRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = META_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(["nodes".into(), "edges".into()]);
    header.extend(feature_names());
    out.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.meta.fields().into();
        rec.push(r.nodes.to_string());
        rec.push(r.edges.to_string());
        rec.extend(r.features.iter().map(|x| x.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_features<R: Read>(r: R) -> Result<Vec<FeatureRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let width = META_COLUMNS.len() + 2 + FEATURE_COUNT;
    let header = rdr.headers()?.clone();
    if header.len() != width || header.iter().take(6).ne(META_COLUMNS) {
        bail!("not a feature table: expected {width} columns starting with {}", META_COLUMNS.join(","));
    }
    rdr.records()
        .enumerate()
        .map(|(k, rec)| {
            let rec = rec?;
            let row = || -> Result<FeatureRow> {
                Ok(FeatureRow {
                    meta: RowMeta::parse(&rec)?,
                    nodes: rec[6].parse()?,
                    edges: rec[7].parse()?,
                    features: rec.iter().skip(8).map(|s| s.parse::<f64>()).collect::<Result<_, _>>()?,
                })
            };
            row().with_context(|| format!("feature row {}", k + 1))
        })
        .collect()
}

/// First two principal coordinates of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionRow {
    pub meta: RowMeta,
    pub pc1: f64,
    pub pc2: f64,
}

pub fn write_projection<W: Write>(w: W, rows: &[ProjectionRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = META_COLUMNS.to_vec();
    header.extend(["pc1", "pc2"]);
    out.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.meta.fields().into();
        rec.push(r.pc1.to_string());
        rec.push(r.pc2.to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_projection<R: Read>(r: R) -> Result<Vec<ProjectionRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.len() != 8 || header.iter().take(6).ne(META_COLUMNS) {
        bail!("not a projection table");
    }
    rdr.records()
        .enumerate()
        .map(|(k, rec)| {
            let rec = rec?;
            let row = || -> Result<ProjectionRow> {
                Ok(ProjectionRow {
                    meta: RowMeta::parse(&rec)?,
                    pc1: rec[6].parse()?,
                    pc2: rec[7].parse()?,
                })
            };
            row().with_context(|| format!("projection row {}", k + 1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<FeatureRow> {
        vec![
            FeatureRow {
                meta: RowMeta {
                    source: Source::Model,
                    temperament: String::new(),
                    kind: "BA".into(),
                    beta: None,
                    sample: Some(3),
                    seed: Some(u64::MAX),
                },
                nodes: 108,
                edges: 561,
                features: (0..34).map(|i| i as f64 / 3.0).collect(),
            },
            FeatureRow {
                meta: RowMeta::syntonet("equal", "consonance", 1.0056),
                nodes: 100,
                edges: 540,
                features: vec![0.1 + 0.2; 34],
            },
        ]
    }

    #[test]
    fn features_round_trip() {
        let mut buf = Vec::new();
        write_features(&mut buf, &rows()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("source,temperament,kind,beta,sample,seed,nodes,edges,degree_mean,degree_std,"));
        assert_eq!(read_features(buf.as_slice()).unwrap(), rows());
    }

    #[test]
    fn projection_round_trip() {
        let rows = vec![ProjectionRow {
            meta: RowMeta::syntonet("just", "dissonance", 0.8),
            pc1: -1.25,
            pc2: 3.0e-7,
        }];
        let mut buf = Vec::new();
        write_projection(&mut buf, &rows).unwrap();
        assert_eq!(read_projection(buf.as_slice()).unwrap(), rows);
        assert!(read_projection(&b"a,b\n1,2\n"[..]).is_err());
    }
}
