//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`cargo test -p syntonet-cli --test acceptance`).
//! A criterion listed in `KNOWN_DEVIATIONS` may fail without failing the
//! target; any other failure exits non-zero.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syntonet::metrics;
use syntonet::projection::fit;
use syntonet::scale::{temperament_table, TemperamentName};
use syntonet::spectrum::PartialSpectrum;
use syntonet::syntony::{close_pairs, pair_consonance, pair_dissonance, SyntonyKind, SyntonyWindows};
use syntonet_cli::analysis::{distance, edge_difference, model_centroids, spearman};
use syntonet_cli::config::{ExperimentConfig, KindSelection};
use syntonet_cli::corpus::{build_corpus, ReferenceCorpus};
use syntonet_cli::output::verify_manifest;
use syntonet_cli::pipeline::{run_nonshifted, run_shifted, syntonet_graph, RunOptions};
use syntonet_cli::tables::{read_projection, ProjectionRow, Source};

type Outcome = Result<String, String>;

const KNOWN_DEVIATIONS: [&str; 1] = ["6b"];

const TABLE: [(TemperamentName, [f64; 12]); 5] = [
    (
        TemperamentName::Equal,
        [1.0000, 1.0595, 1.1225, 1.1892, 1.2599, 1.3348, 1.4142, 1.4983, 1.5874, 1.6818, 1.7818, 1.8877],
    ),
    (
        TemperamentName::Just,
        [1.0000, 1.0417, 1.1250, 1.2000, 1.2500, 1.3333, 1.4062, 1.5000, 1.6000, 1.6667, 1.8000, 1.8750],
    ),
    (
        TemperamentName::Meantone,
        [1.0000, 1.0449, 1.1180, 1.1963, 1.2500, 1.3375, 1.3975, 1.4953, 1.5625, 1.6719, 1.7889, 1.8692],
    ),
    (
        TemperamentName::Pythagorean,
        [1.0000, 1.0535, 1.1250, 1.1852, 1.2656, 1.3333, 1.4238, 1.5000, 1.5802, 1.6875, 1.7778, 1.8984],
    ),
    (
        TemperamentName::Werckmeister,
        [1.0000, 1.0535, 1.1174, 1.1852, 1.2528, 1.3333, 1.4047, 1.4949, 1.5802, 1.6704, 1.7778, 1.8792],
    ),
];

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn temperament_fidelity(_: &mut Context) -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, want) in TABLE {
        let t = temperament_table(name);
        for (p, (got, w)) in t.ratios.iter().zip(want).enumerate() {
            let err = (got - w).abs();
            worst = worst.max(err);
            // Printed values are rounded to 4 decimals.
            ensure(err <= 5e-5 + 1e-12, format!("{name} degree {p}: {got} vs {w}"))?;
        }
    }
    Ok(format!("60 ratios, worst |error| {worst:.2e}"))
}

fn consonance_oracle(_: &mut Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    let mut pairs = (0, 0);
    for case in 0..1000 {
        let delta_min = rng.random_range(1.0..30.0);
        let delta_max = delta_min * rng.random_range(1.2..6.0);
        let w = SyntonyWindows::new(delta_min, delta_max).map_err(|e| e.to_string())?;
        let x = oracle::random_spectrum(&mut rng, 20, delta_max / 2.0);
        let y = oracle::random_spectrum(&mut rng, 20, delta_max / 2.0);
        let xs = PartialSpectrum::from_pairs(&x).map_err(|e| e.to_string())?;
        let ys = PartialSpectrum::from_pairs(&y).map_err(|e| e.to_string())?;
        let want = oracle::brute_syntony(&x, &y, delta_min, delta_max);
        let c = pair_consonance(&xs, &ys, &w).unwrap();
        let d = pair_dissonance(&xs, &ys, &w).unwrap();
        ensure(c.to_bits() == want.consonance.to_bits(), format!("case {case}: consonance {c} vs {}", want.consonance))?;
        ensure(d.to_bits() == want.dissonance.to_bits(), format!("case {case}: dissonance {d} vs {}", want.dissonance))?;
        ensure(
            c.to_bits() == pair_consonance(&ys, &xs, &w).unwrap().to_bits()
                && d.to_bits() == pair_dissonance(&ys, &xs, &w).unwrap().to_bits(),
            format!("case {case}: not symmetric"),
        )?;
        let close = close_pairs(&xs, &ys, &w).unwrap();
        let got_c: Vec<_> = close.iter().filter(|p| p.kind == SyntonyKind::Consonance).map(|p| (p.i, p.j)).collect();
        let got_d: Vec<_> = close.iter().filter(|p| p.kind == SyntonyKind::Dissonance).map(|p| (p.i, p.j)).collect();
        ensure(got_c.iter().copied().eq(want.consonant.iter().copied()), format!("case {case}: consonant pairs"))?;
        ensure(got_d.iter().copied().eq(want.dissonant.iter().copied()), format!("case {case}: dissonant pairs"))?;
        ensure(want.consonant.is_disjoint(&want.dissonant), format!("case {case}: overlap"))?;
        pairs.0 += got_c.len();
        pairs.1 += got_d.len();
    }
    Ok(format!("1000 spectrum pairs bit-exact; {} consonant and {} dissonant partial pairs", pairs.0, pairs.1))
}

fn degree_targeting(ctx: &mut Context) -> Outcome {
    let cfg = ExperimentConfig::default();
    let n = cfg.node_count();
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &cfg.temperaments {
        for kind in SyntonyKind::ALL {
            let g = syntonet_graph(&cfg, t, kind, 1.0).map_err(|e| format!("{e:#}"))?;
            let k = g.mean_degree();
            ensure((k - 10.37).abs() <= 0.02, format!("{t} {kind}: mean degree {k}"))?;
            range = (range.0.min(k), range.1.max(k));
        }
    }
    let corpus = ctx.corpus()?;
    let mut summary = Vec::new();
    for (e, _) in &corpus.specs {
        let draws: Vec<f64> = corpus.samples_of(*e).map(|s| 2.0 * s.edges as f64 / n as f64).collect();
        ensure(draws.len() == 100, format!("{e}: {} samples", draws.len()))?;
        let k = draws.iter().sum::<f64>() / draws.len() as f64;
        ensure((k - 10.37).abs() / 10.37 <= 0.05, format!("{e}: grand mean degree {k:.3}"))?;
        summary.push(format!("{e} {k:.2}"));
    }
    Ok(format!("syntonets {:.4}..{:.4}; {}", range.0, range.1, summary.join(", ")))
}

fn measurement_oracles(_: &mut Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x500);
    let graphs = oracle::random_corpus(&mut rng, 500, 8);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (k, g) in graphs.iter().enumerate().filter(|(_, g)| g.is_connected()) {
        checked += 1;
        let (nb, eb) = metrics::betweenness_both(g);
        let (ob, oe) = oracle::betweenness(g);
        let mut diffs = vec![oracle::max_abs_diff(&nb, &ob), oracle::max_abs_diff(&eb, &oe)];
        ensure(metrics::eccentricity(g) == oracle::eccentricity(g), format!("graph {k}: eccentricity"))?;
        for h in 1..=4 {
            ensure(
                metrics::hierarchical_degree(g, h) == oracle::hierarchical_degree(g, h),
                format!("graph {k}: hierarchical degree h={h}"),
            )?;
            diffs.push(oracle::max_abs_diff(&metrics::accessibility(g, h), &oracle::accessibility(g, h)));
        }
        let d = diffs.into_iter().fold(0.0, f64::max);
        ensure(d <= 1e-9, format!("graph {k}: deviation {d:e}"))?;
        worst = worst.max(d);
    }

    for n in 3..=9 {
        let nf = n as f64;
        let (k, s, p, c) = (oracle::complete(n), oracle::star(n), oracle::path(n), oracle::cycle(n));
        ensure(metrics::clustering(&k).iter().all(|&x| x == 1.0), "complete clustering")?;
        ensure(metrics::clustering(&s).iter().all(|&x| x == 0.0), "star clustering")?;
        ensure(metrics::eccentricity(&k).iter().all(|&x| x == 1.0), "complete eccentricity")?;
        let es = metrics::eccentricity(&s);
        ensure(es[0] == 1.0 && es[1..].iter().all(|&x| x == 2.0), "star eccentricity")?;
        let ep: Vec<f64> = (0..n).map(|i| i.max(n - 1 - i) as f64).collect();
        ensure(metrics::eccentricity(&p) == ep, "path eccentricity")?;
        ensure(metrics::eccentricity(&c).iter().all(|&x| x == (n / 2) as f64), "cycle eccentricity")?;
        let bs = metrics::betweenness(&s);
        ensure(bs[0] == 1.0 && bs[1..].iter().all(|&x| x == 0.0), "star betweenness")?;
        ensure(metrics::betweenness(&k).iter().all(|&x| x == 0.0), "complete betweenness")?;
        for (i, x) in metrics::betweenness(&p).iter().enumerate() {
            let want = 2.0 * (i * (n - 1 - i)) as f64 / ((n - 1) * (n - 2)) as f64;
            ensure((x - want).abs() <= 1e-12, format!("path {n} betweenness at {i}"))?;
        }
        ensure(metrics::betweenness(&c).iter().all(|&x| (x - metrics::betweenness(&c)[0]).abs() <= 1e-12), "cycle betweenness")?;
        ensure(
            metrics::accessibility(&k, 1).iter().all(|&x| (x - (nf - 1.0)).abs() <= 1e-12),
            "complete accessibility h=1",
        )?;
        ensure(
            metrics::hierarchical_degree(&k, 1).iter().all(|&x| x == nf - 1.0),
            "complete hierarchical degree",
        )?;
        if n >= 5 {
            ensure(metrics::hierarchical_degree(&c, 2).iter().all(|&x| x == 2.0), "cycle hierarchical degree")?;
        }
    }
    Ok(format!("{checked} connected graphs, worst deviation {worst:.1e}; closed forms for n = 3..9"))
}

fn pca_numerics(ctx: &mut Context) -> Outcome {
    let corpus = ctx.corpus()?;
    let pca = &corpus.pca;
    let k = pca.components.len();
    let mut ortho: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let dot: f64 = pca.components[i].iter().zip(&pca.components[j]).map(|(a, b)| a * b).sum();
            ortho = ortho.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    ensure(ortho <= 1e-9, format!("orthonormality error {ortho:e}"))?;

    let proj: Vec<Vec<f64>> = corpus
        .samples
        .iter()
        .map(|s| pca.project_all(s.features.as_slice()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let m = proj.len() as f64;
    let mean: Vec<f64> = (0..k).map(|c| proj.iter().map(|p| p[c]).sum::<f64>() / m).collect();
    let mut off: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for a in 0..k {
        for b in 0..k {
            let cov = proj.iter().map(|p| (p[a] - mean[a]) * (p[b] - mean[b])).sum::<f64>() / (m - 1.0);
            if a == b {
                diag = diag.max((cov - pca.eigenvalues[a]).abs());
            } else {
                off = off.max(cov.abs());
            }
        }
    }
    ensure(off <= 1e-8, format!("projected covariance off-diagonal {off:e}"))?;
    ensure(diag <= 1e-8, format!("projected variance vs eigenvalue {diag:e}"))?;
    ensure(pca.explained_variance_ratio.windows(2).all(|w| w[0] >= w[1]), "explained variance increases")?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x9CA);
    let dir: Vec<f64> = (0..34).map(|i| 0.5 + i as f64).collect();
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|_| {
            let t: f64 = rng.random_range(-3.0..3.0);
            dir.iter().map(|d| d * t + 1.0 + 1e-6 * rng.random::<f64>()).collect()
        })
        .collect();
    let r1 = fit(&rows).map_err(|e| e.to_string())?.explained_variance_ratio[0];
    ensure(r1 >= 0.999, format!("rank-1 PC1 share {r1}"))?;
    Ok(format!(
        "{k} components, orthonormality {ortho:.1e}, off-diagonal {off:.1e}, rank-1 PC1 {:.5}%",
        100.0 * r1
    ))
}

fn projection(root: &Path) -> Result<Vec<ProjectionRow>, String> {
    let f = fs::File::open(root.join("projection.csv")).map_err(|e| e.to_string())?;
    read_projection(f).map_err(|e| format!("{e:#}"))
}

fn nearer_geo_ws(ctx: &mut Context) -> Outcome {
    let root = ctx.nonshifted()?;
    let rows = projection(&root)?;
    let centroids = model_centroids(&rows);
    let c = |g: &str| centroids.get(g).copied().ok_or(format!("no {g} centroid"));
    let ba = c("BA")?;
    let near = [c("GEO")?, c("WS1")?, c("WS2")?];
    let mut count = 0;
    for r in rows.iter().filter(|r| r.meta.source == Source::Syntonet && r.meta.kind == "consonance") {
        let p = (r.pc1, r.pc2);
        let best = near.iter().map(|&g| distance(p, g)).fold(f64::INFINITY, f64::min);
        let to_ba = distance(p, ba);
        ensure(best < to_ba, format!("{}: GEO/WS {best:.3} vs BA {to_ba:.3}", r.meta.temperament))?;
        count += 1;
    }
    ensure(count == 5, format!("{count} consonance syntonets"))?;
    Ok("all 5 consonance syntonets nearer GEO/WS1/WS2 than BA".into())
}

fn trend_toward_ba(ctx: &mut Context) -> Outcome {
    let root = ctx.shifted()?;
    let rows = projection(&root)?;
    let ba = *model_centroids(&rows).get("BA").ok_or("no BA centroid")?;
    let mut sweep: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.meta.source == Source::Syntonet && r.meta.temperament == "equal" && r.meta.kind == "consonance")
        .map(|r| (r.meta.beta.unwrap_or(f64::NAN), -distance((r.pc1, r.pc2), ba)))
        .collect();
    sweep.sort_by(|a, b| a.0.total_cmp(&b.0));
    ensure(sweep.len() == 41, format!("{} sweep points", sweep.len()))?;
    let (b, d): (Vec<f64>, Vec<f64>) = sweep.into_iter().unzip();
    let rho = spearman(&b, &d);
    ensure(rho >= 0.6, format!("Spearman rho(beta, closeness to BA) = {rho:.3} < 0.6 over 41 points"))?;
    Ok(format!("Spearman rho = {rho:.3} over 41 points"))
}

fn beta_sensitivity(_: &mut Context) -> Outcome {
    let cfg = ExperimentConfig::default();
    let a = syntonet_graph(&cfg, TemperamentName::Equal, SyntonyKind::Consonance, 1.0056).map_err(|e| format!("{e:#}"))?;
    let b = syntonet_graph(&cfg, TemperamentName::Equal, SyntonyKind::Consonance, 1.0058).map_err(|e| format!("{e:#}"))?;
    let d = edge_difference(&a, &b);
    ensure(d >= 0.01, format!("only {:.2}% of edges differ", 100.0 * d))?;
    Ok(format!("{:.2}% of {} edges differ", 100.0 * d, a.edge_count()))
}

fn files(root: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).map_err(|e| e.to_string())? {
            let p = e.map_err(|e| e.to_string())?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.push((rel, fs::read(&p).map_err(|e| e.to_string())?));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn determinism(ctx: &mut Context) -> Outcome {
    let mut total = 0;
    for (first, second) in [
        (ctx.nonshifted()?, ctx.run("nonshifted-again", false)?),
        (ctx.shifted()?, ctx.run("shifted-again", true)?),
    ] {
        for root in [&first, &second] {
            verify_manifest(root).map_err(|e| format!("{e:#}"))?;
        }
        let (a, b) = (files(&first)?, files(&second)?);
        ensure(
            a.iter().map(|f| &f.0).eq(b.iter().map(|f| &f.0)),
            format!("{} and {} hold different files", first.display(), second.display()),
        )?;
        for ((path, x), (_, y)) in a.iter().zip(&b) {
            ensure(x == y, format!("{path} differs between runs"))?;
        }
        total += a.len();
    }
    Ok(format!("{total} files byte-identical across two full runs, manifests verified"))
}

/// Expensive artifacts shared between criteria.
struct Context {
    dir: tempfile::TempDir,
    corpus: Option<ReferenceCorpus>,
    nonshifted: Option<PathBuf>,
    shifted: Option<PathBuf>,
}

impl Context {
    fn corpus(&mut self) -> Result<&ReferenceCorpus, String> {
        if self.corpus.is_none() {
            let cfg = ExperimentConfig::default();
            let c = build_corpus(cfg.node_count(), cfg.target_mean_degree, cfg.model_samples, cfg.master_seed)
                .map_err(|e| format!("{e:#}"))?;
            self.corpus = Some(c);
        }
        Ok(self.corpus.as_ref().unwrap())
    }

    /// A default run, or the desk-scale sweep with β step 0.01.
    fn run(&self, name: &str, shifted: bool) -> Result<PathBuf, String> {
        let mut cfg = ExperimentConfig::default();
        cfg.output_dir = self.dir.path().join(name);
        let result = if shifted {
            cfg.beta_sweep.step = 0.01;
            cfg.kind = KindSelection::Both;
            run_shifted(&cfg, RunOptions::default())
        } else {
            run_nonshifted(&cfg, RunOptions::default())
        };
        result.map_err(|e| format!("{e:#}"))?;
        Ok(cfg.output_dir)
    }

    fn nonshifted(&mut self) -> Result<PathBuf, String> {
        if self.nonshifted.is_none() {
            self.nonshifted = Some(self.run("nonshifted", false)?);
        }
        Ok(self.nonshifted.clone().unwrap())
    }

    fn shifted(&mut self) -> Result<PathBuf, String> {
        if self.shifted.is_none() {
            self.shifted = Some(self.run("shifted", true)?);
        }
        Ok(self.shifted.clone().unwrap())
    }
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Duration,
    check: fn(&mut Context) -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: "1", name: "temperament fidelity", limit: Duration::from_secs(1), check: temperament_fidelity },
        Criterion { id: "2", name: "consonance oracle", limit: Duration::from_secs(10), check: consonance_oracle },
        Criterion { id: "3", name: "degree targeting", limit: Duration::from_secs(120), check: degree_targeting },
        Criterion { id: "4", name: "measurement oracles", limit: Duration::from_secs(60), check: measurement_oracles },
        Criterion { id: "5", name: "PCA numerics", limit: Duration::from_secs(10), check: pca_numerics },
        Criterion { id: "6a", name: "consonance near GEO/WS", limit: Duration::from_secs(1800), check: nearer_geo_ws },
        Criterion { id: "6b", name: "sweep trends toward BA", limit: Duration::from_secs(1800), check: trend_toward_ba },
        Criterion { id: "6c", name: "beta sensitivity", limit: Duration::from_secs(1800), check: beta_sensitivity },
        Criterion { id: "7", name: "determinism", limit: Duration::from_secs(3600), check: determinism },
    ];
    let mut ctx = Context {
        dir: tempfile::tempdir().expect("temporary directory"),
        corpus: None,
        nonshifted: None,
        shifted: None,
    };
    // Quiet the default panic printer; panics are reported as failures.
    panic::set_hook(Box::new(|_| {}));
    let mut unexpected = Vec::new();
    let mut known = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(|| (c.check)(&mut ctx))) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .map_or("panicked".into(), |s| format!("panicked: {s}"))),
        };
        let took = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if took <= c.limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.1?}, limit {:?}", c.limit))
            }
        });
        let secs = took.as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS  {:<3} {:<26} {secs:>7.2}s  {msg}", c.id, c.name),
            Err(msg) => {
                let tag = if KNOWN_DEVIATIONS.contains(&c.id) {
                    known.push(c.id);
                    " [known deviation]"
                } else {
                    unexpected.push(c.id);
                    ""
                };
                println!("FAIL  {:<3} {:<26} {secs:>7.2}s  {msg}{tag}", c.id, c.name);
            }
        }
    }
    let passed = criteria.len() - known.len() - unexpected.len();
    println!(
        "acceptance: {passed}/{} passed; known deviations: {}; unexpected failures: {}",
        criteria.len(),
        if known.is_empty() { "none".into() } else { known.join(", ") },
        if unexpected.is_empty() { "none".into() } else { unexpected.join(", ") },
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
