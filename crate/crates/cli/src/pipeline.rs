//! The two experiments: syntonets at β = 1, and sweeps over β.
//!
//! Both share the reference corpus and its PCA. Work is split into
//! independent (temperament, β) jobs that write only below their own
//! directory; tables, plots and the manifest are assembled afterwards by a
//! single writer.

use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use syntonet::export::{write_edge_list, write_graphml, write_matrix_csv};
use syntonet::graph::{largest_component, Graph};
use syntonet::metrics::{feature_names, feature_vector};
use syntonet::projection::PcaModel;
use syntonet::scale::{build_scale, Scale, Temperament, TemperamentName};
use syntonet::spectrum::AnharmonicityLaw;
use syntonet::syntony::{build_syntony_matrices, target_edges_for, threshold_graph, SyntonyKind, SyntonyMatrix};
use syntonet::Error as CoreError;

use crate::config::ExperimentConfig;
use crate::corpus::{build_corpus, ReferenceCorpus};
use crate::output::{OutputDir, RunManifest, SkippedJob};
use crate::plot::{render_network, render_scatter, ColorBy, Marker, PlotPoint, PlotStyle};
use crate::tables::{read_features, write_features, write_projection, FeatureRow, ProjectionRow, RowMeta, Source};

/// Nodes below which a largest component is not measured.
pub const MIN_COMPONENT: usize = 5;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub resume: bool,
    pub timing: bool,
}

pub fn scale_for(cfg: &ExperimentConfig, t: TemperamentName) -> Result<Scale> {
    Ok(build_scale(&Temperament::new(t), cfg.base_frequency, cfg.octaves)?)
}

/// Consonance and dissonance matrices of temperament `t` at `beta`.
pub fn matrices_for(cfg: &ExperimentConfig, t: TemperamentName, beta: f64) -> Result<(SyntonyMatrix, SyntonyMatrix)> {
    let scale = scale_for(cfg, t)?;
    let law = AnharmonicityLaw::new(beta, cfg.alpha)?;
    build_syntony_matrices(&scale, law, &cfg.windows(), cfg.cutoff)
        .with_context(|| format!("{t} matrices at beta {beta}"))
}

pub fn pick(pair: &(SyntonyMatrix, SyntonyMatrix), kind: SyntonyKind) -> &SyntonyMatrix {
    match kind {
        SyntonyKind::Consonance => &pair.0,
        SyntonyKind::Dissonance => &pair.1,
    }
}

/// The thresholded syntonet, before component extraction.
pub fn threshold_for(cfg: &ExperimentConfig, m: &SyntonyMatrix) -> std::result::Result<Graph, CoreError> {
    threshold_graph(m, target_edges_for(cfg.target_mean_degree, m.len()))
}

pub fn syntonet_graph(cfg: &ExperimentConfig, t: TemperamentName, kind: SyntonyKind, beta: f64) -> Result<Graph> {
    let pair = matrices_for(cfg, t, beta)?;
    Ok(threshold_for(cfg, pick(&pair, kind))?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measured {
    Done(FeatureRow),
    Skipped { meta: RowMeta, reason: String },
}

/// Features of the largest component of `g`, or the reason it has none.
pub fn measure_graph(g: &Graph, meta: RowMeta) -> Result<Measured> {
    let c = largest_component(g)?;
    let n = c.graph.node_count();
    if n < MIN_COMPONENT {
        return Ok(Measured::Skipped {
            meta,
            reason: format!("largest component has {n} nodes"),
        });
    }
    let f = feature_vector(&c.graph)?;
    Ok(Measured::Done(FeatureRow {
        meta,
        nodes: n,
        edges: c.graph.edge_count(),
        features: f.as_slice().to_vec(),
    }))
}

fn beta_dir(beta: f64) -> String {
    format!("b{beta}")
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// One (temperament, β) job. Each selected kind writes below
/// `<job_dir>/<kind>/`, finishing with `features.csv` or `skipped.txt`.
/// With `resume`, kinds whose finishing file exists are read back instead.
fn run_job(
    dir: &OutputDir,
    cfg: &ExperimentConfig,
    t: TemperamentName,
    beta: f64,
    job_dir: &str,
    with_matrices: bool,
    resume: bool,
) -> Result<Vec<Measured>> {
    let kinds = cfg.kind.kinds();
    let done = |kind: SyntonyKind| -> Result<Option<Measured>> {
        let base = format!("{job_dir}/{kind}");
        let meta = RowMeta::syntonet(t.as_str(), kind.as_str(), beta);
        if dir.exists(&format!("{base}/features.csv")) {
            let rows = read_features(dir.read_to_string(&format!("{base}/features.csv"))?.as_bytes())?;
            let row = rows.into_iter().next().context("empty job feature file")?;
            return Ok(Some(Measured::Done(row)));
        }
        if dir.exists(&format!("{base}/skipped.txt")) {
            let reason = dir.read_to_string(&format!("{base}/skipped.txt"))?.trim_end().to_string();
            return Ok(Some(Measured::Skipped { meta, reason }));
        }
        Ok(None)
    };
    if resume {
        let previous: Vec<Option<Measured>> = kinds.iter().map(|&k| done(k)).collect::<Result<_>>()?;
        if previous.iter().all(Option::is_some) {
            return Ok(previous.into_iter().flatten().collect());
        }
    }
    let pair = matrices_for(cfg, t, beta)?;
    let mut out = Vec::new();
    for kind in kinds {
        let base = format!("{job_dir}/{kind}");
        let meta = RowMeta::syntonet(t.as_str(), kind.as_str(), beta);
        let m = pick(&pair, kind);
        if with_matrices {
            dir.write(&format!("{base}/matrix.csv"), &to_bytes(|b| write_matrix_csv(b, m))?)?;
        }
        let g = match threshold_for(cfg, m) {
            Ok(g) => g,
            Err(e @ CoreError::NotEnoughEdges { .. }) => {
                let reason = e.to_string();
                dir.write(&format!("{base}/skipped.txt"), format!("{reason}\n").as_bytes())?;
                out.push(Measured::Skipped { meta, reason });
                continue;
            }
            Err(e) => return Err(e).with_context(|| format!("thresholding {t} {kind} at beta {beta}")),
        };
        dir.write(&format!("{base}/edges.tsv"), &to_bytes(|b| write_edge_list(b, &g))?)?;
        if with_matrices {
            let id = format!("{t}-{kind}-beta{beta}");
            dir.write(&format!("{base}/graph.graphml"), &to_bytes(|b| write_graphml(b, &g, &id))?)?;
        }
        let measured = measure_graph(&g, meta).with_context(|| format!("measuring {t} {kind} at beta {beta}"))?;
        match &measured {
            Measured::Done(row) => {
                let mut buf = Vec::new();
                write_features(&mut buf, std::slice::from_ref(row))?;
                dir.write(&format!("{base}/features.csv"), &buf)?;
            }
            Measured::Skipped { reason, .. } => {
                dir.write(&format!("{base}/skipped.txt"), format!("{reason}\n").as_bytes())?;
            }
        }
        out.push(measured);
    }
    Ok(out)
}

/// `row,eigenvalue,explained_variance_ratio,<kept features>` with `mean`
/// and `std` rows followed by one row per component.
pub fn write_pca_model<W: std::io::Write>(w: W, pca: &PcaModel) -> Result<()> {
    let names = feature_names();
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["row".to_string(), "eigenvalue".into(), "explained_variance_ratio".into()];
    header.extend(pca.kept.iter().map(|&k| names[k].clone()));
    out.write_record(&header)?;
    let row = |name: String, a: String, b: String, v: &[f64]| {
        let mut r = vec![name, a, b];
        r.extend(v.iter().map(|x| x.to_string()));
        r
    };
    out.write_record(row("mean".into(), String::new(), String::new(), &pca.feature_means))?;
    out.write_record(row("std".into(), String::new(), String::new(), &pca.feature_stds))?;
    for (k, c) in pca.components.iter().enumerate() {
        out.write_record(row(
            format!("pc{}", k + 1),
            pca.eigenvalues[k].to_string(),
            pca.explained_variance_ratio[k].to_string(),
            c,
        ))?;
    }
    out.flush()?;
    Ok(())
}

pub fn project_rows(pca: &PcaModel, rows: &[FeatureRow]) -> Result<Vec<ProjectionRow>> {
    rows.iter()
        .map(|r| {
            let (pc1, pc2) = syntonet::projection::project(pca, &r.features)?;
            Ok(ProjectionRow {
                meta: r.meta.clone(),
                pc1,
                pc2,
            })
        })
        .collect()
}

fn write_reference(dir: &OutputDir, corpus: &ReferenceCorpus) -> Result<Vec<FeatureRow>> {
    let mut params = String::from("model,nodes,target_mean_degree,parameters\n");
    for (e, spec) in &corpus.specs {
        params.push_str(&format!(
            "{e},{},{},\"{:?}\"\n",
            spec.n, spec.target_mean_degree, spec.params
        ));
    }
    dir.write("models/parameters.csv", params.as_bytes())?;
    let rows: Vec<FeatureRow> = corpus.samples.iter().map(FeatureRow::from_model).collect();
    let mut buf = Vec::new();
    write_features(&mut buf, &rows)?;
    dir.write("models/features.csv", &buf)?;
    let mut buf = Vec::new();
    write_pca_model(&mut buf, &corpus.pca)?;
    dir.write("pca/model.csv", &buf)?;
    Ok(rows)
}

fn axis_labels(pca: &PcaModel) -> (String, String) {
    let pct = |k: usize| pca.explained_variance_ratio.get(k).copied().unwrap_or(0.0) * 100.0;
    (format!("PC1 ({:.1}%)", pct(0)), format!("PC2 ({:.1}%)", pct(1)))
}

fn plot_points<'a>(rows: impl Iterator<Item = &'a ProjectionRow>) -> Vec<PlotPoint> {
    rows.map(|r| PlotPoint {
        pc1: r.pc1,
        pc2: r.pc2,
        marker: if r.meta.source == Source::Model {
            Marker::Circle
        } else {
            Marker::Square
        },
        group: r.meta.group().to_string(),
        beta: r.meta.beta,
    })
    .collect()
}

fn pca_notes(pca: &PcaModel) -> Vec<String> {
    let names = feature_names();
    let mut notes = pca.warnings.clone();
    if !pca.dropped.is_empty() {
        let dropped: Vec<&str> = pca.dropped.iter().map(|&k| names[k].as_str()).collect();
        notes.push(format!("constant features left out of the PCA: {}", dropped.join(", ")));
    }
    notes
}

struct Stopwatch {
    enabled: bool,
    start: Instant,
    laps: std::collections::BTreeMap<String, f64>,
}

impl Stopwatch {
    fn new(enabled: bool) -> Self {
        Stopwatch {
            enabled,
            start: Instant::now(),
            laps: Default::default(),
        }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.laps.insert(name.into(), (now - self.start).as_secs_f64());
        self.start = now;
    }

    fn finish(self) -> Option<std::collections::BTreeMap<String, f64>> {
        self.enabled.then_some(self.laps)
    }
}

fn identity(command: &str, cfg: &ExperimentConfig) -> String {
    format!("# syntonet {command}\n{}", cfg.to_config_text())
}

fn split(measured: Vec<Measured>) -> (Vec<FeatureRow>, Vec<SkippedJob>) {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for m in measured {
        match m {
            Measured::Done(r) => rows.push(r),
            Measured::Skipped { meta, reason } => skipped.push(SkippedJob {
                temperament: meta.temperament,
                kind: meta.kind,
                beta: meta.beta.unwrap_or(f64::NAN),
                reason,
            }),
        }
    }
    (rows, skipped)
}

fn write_skipped(dir: &OutputDir, skipped: &[SkippedJob]) -> Result<()> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["temperament", "kind", "beta", "reason"])?;
    for s in skipped {
        out.write_record([s.temperament.clone(), s.kind.clone(), s.beta.to_string(), s.reason.clone()])?;
    }
    dir.write("skipped.csv", &out.into_inner()?)
}

/// Shared tail of both runs: tables, projection and the list of skips.
fn write_tables(
    dir: &OutputDir,
    pca: &PcaModel,
    model_rows: &[FeatureRow],
    syntonet_rows: &[FeatureRow],
    skipped: &[SkippedJob],
) -> Result<Vec<ProjectionRow>> {
    let mut buf = Vec::new();
    write_features(&mut buf, syntonet_rows)?;
    dir.write("syntonets/features.csv", &buf)?;
    let mut all = model_rows.to_vec();
    all.extend_from_slice(syntonet_rows);
    let projection = project_rows(pca, &all)?;
    let mut buf = Vec::new();
    write_projection(&mut buf, &projection)?;
    dir.write("projection.csv", &buf)?;
    write_skipped(dir, skipped)?;
    Ok(projection)
}

/// Syntonets of every selected temperament and kind at β = 1, projected on
/// the reference PCA, with one scatterplot per kind.
pub fn run_nonshifted(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    let dir = OutputDir::prepare(&cfg.output_dir, &identity("run-nonshifted", cfg), opts.resume)?;
    let mut clock = Stopwatch::new(opts.timing);
    let corpus = build_corpus(cfg.node_count(), cfg.target_mean_degree, cfg.model_samples, cfg.master_seed)?;
    let model_rows = write_reference(&dir, &corpus)?;
    clock.lap("reference");
    let measured: Vec<Vec<Measured>> = cfg
        .temperaments
        .par_iter()
        .map(|&t| run_job(&dir, cfg, t, 1.0, &format!("syntonets/{t}"), true, opts.resume))
        .collect::<Result<_>>()?;
    clock.lap("syntonets");
    let (rows, skipped) = split(measured.into_iter().flatten().collect());
    let projection = write_tables(&dir, &corpus.pca, &model_rows, &rows, &skipped)?;
    let (x_label, y_label) = axis_labels(&corpus.pca);
    for kind in cfg.kind.kinds() {
        let pts = plot_points(
            projection
                .iter()
                .filter(|r| r.meta.source == Source::Model || r.meta.kind == kind.as_str()),
        );
        let style = PlotStyle {
            title: format!("{kind} syntonets, harmonic partials"),
            x_label: x_label.clone(),
            y_label: y_label.clone(),
            color_by: ColorBy::Group,
            ..PlotStyle::default()
        };
        dir.write(&format!("plots/pca_{kind}.svg"), render_scatter(&pts, &style)?.as_bytes())?;
    }
    clock.lap("plots");
    let mut manifest = RunManifest::new("run-nonshifted", cfg.snapshot());
    manifest.skipped = skipped;
    manifest.notes = pca_notes(&corpus.pca);
    manifest.timing = clock.finish();
    manifest.finalize(&dir)
}

/// Syntonets over the β grid, projected on the reference PCA, with one
/// β-coloured scatterplot per temperament and kind, plus circular layouts
/// at the configured layout βs.
pub fn run_shifted(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    let dir = OutputDir::prepare(&cfg.output_dir, &identity("run-shifted", cfg), opts.resume)?;
    let mut clock = Stopwatch::new(opts.timing);
    let corpus = build_corpus(cfg.node_count(), cfg.target_mean_degree, cfg.model_samples, cfg.master_seed)?;
    let model_rows = write_reference(&dir, &corpus)?;
    clock.lap("reference");
    let betas = cfg.betas();
    let jobs: Vec<(TemperamentName, f64)> = cfg
        .temperaments
        .iter()
        .flat_map(|&t| betas.iter().map(move |&b| (t, b)))
        .collect();
    let measured: Vec<Vec<Measured>> = jobs
        .par_iter()
        .map(|&(t, b)| {
            run_job(&dir, cfg, t, b, &format!("syntonets/{t}/{}", beta_dir(b)), false, opts.resume)
        })
        .collect::<Result<_>>()?;
    clock.lap("syntonets");
    // Job order is temperament then β; regroup as temperament, kind, β.
    let mut flat: Vec<Measured> = measured.into_iter().flatten().collect();
    let kind_rank = |m: &Measured| {
        let meta = match m {
            Measured::Done(r) => &r.meta,
            Measured::Skipped { meta, .. } => meta,
        };
        SyntonyKind::ALL.iter().position(|k| k.as_str() == meta.kind)
    };
    let temperament_rank = |m: &Measured| {
        let meta = match m {
            Measured::Done(r) => &r.meta,
            Measured::Skipped { meta, .. } => meta,
        };
        cfg.temperaments.iter().position(|t| t.as_str() == meta.temperament)
    };
    flat.sort_by_key(|m| (temperament_rank(m), kind_rank(m)));
    let (rows, skipped) = split(flat);
    let projection = write_tables(&dir, &corpus.pca, &model_rows, &rows, &skipped)?;
    let (x_label, y_label) = axis_labels(&corpus.pca);
    for &t in &cfg.temperaments {
        for kind in cfg.kind.kinds() {
            let pts = plot_points(projection.iter().filter(|r| {
                r.meta.source == Source::Model || (r.meta.kind == kind.as_str() && r.meta.temperament == t.as_str())
            }));
            let style = PlotStyle {
                title: format!("{t} {kind} syntonets over β"),
                x_label: x_label.clone(),
                y_label: y_label.clone(),
                color_by: ColorBy::Beta,
                ..PlotStyle::default()
            };
            dir.write(&format!("plots/pca_{kind}_{t}.svg"), render_scatter(&pts, &style)?.as_bytes())?;
        }
    }
    clock.lap("plots");
    let mut notes = pca_notes(&corpus.pca);
    notes.extend(write_layouts(&dir, cfg)?);
    clock.lap("layouts");
    let mut manifest = RunManifest::new("run-shifted", cfg.snapshot());
    manifest.skipped = skipped;
    manifest.notes = notes;
    manifest.timing = clock.finish();
    manifest.finalize(&dir)
}

/// Circular layouts of the thresholded syntonets at each layout β, with the
/// measured component filled in. Returns notes for layouts that could not
/// be drawn.
fn write_layouts(dir: &OutputDir, cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let jobs: Vec<(TemperamentName, f64)> = cfg
        .temperaments
        .iter()
        .flat_map(|&t| cfg.layout_betas.iter().map(move |&b| (t, b)))
        .collect();
    let notes: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(t, beta)| {
            let pair = matrices_for(cfg, t, beta)?;
            let mut notes = Vec::new();
            for kind in cfg.kind.kinds() {
                let g = match threshold_for(cfg, pick(&pair, kind)) {
                    Ok(g) => g,
                    Err(e) => {
                        notes.push(format!("no layout for {t} {kind} at beta {beta}: {e}"));
                        continue;
                    }
                };
                let c = largest_component(&g)?;
                let mut mask = vec![false; g.node_count()];
                for &v in &c.original_ids {
                    mask[v] = true;
                }
                let title = format!("{t} {kind}, β = {beta}");
                let svg = render_network(&g, &mask, &title)?;
                dir.write(&format!("layouts/{t}_{kind}_{}.svg", beta_dir(beta)), svg.as_bytes())?;
            }
            Ok(notes)
        })
        .collect::<Result<_>>()?;
    Ok(notes.into_iter().flatten().collect())
}
