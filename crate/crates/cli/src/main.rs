use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use syntonet::export::{parse_edge_list, write_edge_list, write_graphml, write_matrix_csv, write_spectra_csv, write_temperaments_csv};
use syntonet::graph::{largest_component, Graph};
use syntonet::graphmodels::generate;
use syntonet::scale::{build_scale, Temperament, TemperamentName, C1_HZ, DEFAULT_OCTAVES};
use syntonet::spectrum::{build_spectrum, AnharmonicityLaw, AUDIBLE_CUTOFF_HZ, DEFAULT_ALPHA};
use syntonet::syntony::{
    build_syntony_matrices, target_edges_for, threshold_graph, SyntonyKind, SyntonyWindows, DEFAULT_DELTA_MAX_HZ,
    DEFAULT_DELTA_MIN_HZ, DEFAULT_MEAN_DEGREE,
};
use syntonet_cli::config::ExperimentConfig;
use syntonet_cli::corpus::{derive_seed, Ensemble};
use syntonet_cli::output::RunManifest;
use syntonet_cli::pipeline::{measure_graph, project_rows, run_nonshifted, run_shifted, write_pca_model, Measured, RunOptions};
use syntonet_cli::plot::{render_scatter, ColorBy, Marker, PlotPoint, PlotStyle};
use syntonet_cli::tables::{read_features, read_projection, write_features, write_projection, RowMeta, Source};

#[derive(Parser)]
#[command(name = "syntonet", version, about = "Consonance and dissonance networks of musical scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Within-octave ratios of each temperament.
    Temperaments {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Partials of every note of a scale.
    Spectrum {
        #[command(flatten)]
        scale: ScaleArgs,
        /// Restrict to these note labels, e.g. C1 or A#4.
        #[arg(long = "note")]
        notes: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weighted consonance or dissonance matrix of a scale.
    Matrix {
        #[command(flatten)]
        scale: ScaleArgs,
        #[arg(long, default_value = "consonance")]
        kind: SyntonyKind,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Thresholded syntonet as an edge list or GraphML.
    Graph {
        #[command(flatten)]
        scale: ScaleArgs,
        #[arg(long, default_value = "consonance")]
        kind: SyntonyKind,
        /// Mean degree used to pick the edge count.
        #[arg(long, default_value_t = DEFAULT_MEAN_DEGREE)]
        mean_degree: f64,
        /// Exact edge count; overrides --mean-degree.
        #[arg(long)]
        edges: Option<usize>,
        /// Keep only the largest connected component.
        #[arg(long)]
        largest_component: bool,
        #[arg(long, value_enum, default_value = "edge-list")]
        format: GraphFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Samples from a reference ensemble, one edge list each.
    Models {
        /// ER, WS1, WS2, BA, GEO or SBM.
        #[arg(long)]
        model: Ensemble,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 108)]
        nodes: usize,
        #[arg(long, default_value_t = DEFAULT_MEAN_DEGREE)]
        mean_degree: f64,
        #[arg(long, default_value_t = 1)]
        master_seed: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Feature vectors of edge-list files (largest component of each).
    Features {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fits PCA on a reference feature table and projects it with any
    /// further tables.
    Pca {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Syntonets with harmonic partials on the reference PCA plane.
    RunNonshifted(RunArgs),
    /// Syntonets over a sweep of the anharmonicity index.
    RunShifted(RunArgs),
    /// Scatterplot of a projection table.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Keep syntonets of this kind only.
        #[arg(long)]
        kind: Option<SyntonyKind>,
        /// Keep syntonets of this temperament only.
        #[arg(long)]
        temperament: Option<TemperamentName>,
        #[arg(long, value_enum, default_value = "group")]
        color_by: ColorArg,
        #[arg(long, default_value = "")]
        title: String,
    },
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long, default_value = "equal")]
    temperament: TemperamentName,
    #[arg(long, default_value_t = C1_HZ)]
    base_frequency: f64,
    #[arg(long, default_value_t = DEFAULT_OCTAVES)]
    octaves: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA_MIN_HZ)]
    delta_min: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA_MAX_HZ)]
    delta_max: f64,
    #[arg(long, default_value_t = AUDIBLE_CUTOFF_HZ)]
    cutoff: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Add the fine grid [0.99, 1.01] in steps of 2e-4.
    #[arg(long)]
    beta_refine: bool,
    /// Continue a run in a non-empty output directory.
    #[arg(long)]
    resume: bool,
    /// Record stage timings in the manifest.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    EdgeList,
    Graphml,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorArg {
    Group,
    Beta,
}

/// Writes to a file, or to stdout when no path is given.
fn emit(output: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match output {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?);
            f(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
        }
    }
    Ok(())
}

fn scale_of(a: &ScaleArgs) -> Result<syntonet::scale::Scale> {
    Ok(build_scale(&Temperament::new(a.temperament), a.base_frequency, a.octaves)?)
}

fn matrices(a: &ScaleArgs) -> Result<(syntonet::syntony::SyntonyMatrix, syntonet::syntony::SyntonyMatrix)> {
    let law = AnharmonicityLaw::new(a.beta, a.alpha)?;
    let w = SyntonyWindows::new(a.delta_min, a.delta_max)?;
    Ok(build_syntony_matrices(&scale_of(a)?, law, &w, a.cutoff)?)
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for o in &args.overrides {
        cfg.set_pair(o)?;
    }
    if let Some(d) = &args.output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(s) = args.master_seed {
        cfg.master_seed = s;
    }
    if args.beta_refine {
        cfg.beta_refine = true;
    }
    Ok(cfg)
}

fn report(m: &RunManifest, dir: &Path) {
    eprintln!("wrote {} files to {}", m.files.len() + 1, dir.display());
    if !m.skipped.is_empty() {
        eprintln!("{} syntonets skipped; see skipped.csv", m.skipped.len());
    }
    for n in &m.notes {
        eprintln!("note: {n}");
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let edges = parse_edge_list(&text).map_err(anyhow::Error::msg).with_context(|| path.display().to_string())?;
    let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
    Ok(Graph::from_weighted_edges(n, edges)?)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Temperaments { output } => {
            let all: Vec<Temperament> = TemperamentName::ALL.into_iter().map(Temperament::new).collect();
            emit(output.as_deref(), |w| write_temperaments_csv(w, &all))?;
        }
        Command::Spectrum { scale, notes, output } => {
            let s = scale_of(&scale)?;
            let law = AnharmonicityLaw::new(scale.beta, scale.alpha)?;
            for n in &notes {
                if !s.notes.iter().any(|x| &x.label == n) {
                    bail!("no note labelled {n} in this scale");
                }
            }
            let spectra = s
                .notes
                .iter()
                .filter(|x| notes.is_empty() || notes.contains(&x.label))
                .map(|x| Ok((x.label.clone(), build_spectrum(x.frequency, law, scale.cutoff)?)))
                .collect::<Result<Vec<_>>>()?;
            emit(output.as_deref(), |w| write_spectra_csv(w, &spectra))?;
        }
        Command::Matrix { scale, kind, output } => {
            let (c, d) = matrices(&scale)?;
            let m = if kind == SyntonyKind::Consonance { c } else { d };
            emit(output.as_deref(), |w| write_matrix_csv(w, &m))?;
        }
        Command::Graph {
            scale,
            kind,
            mean_degree,
            edges,
            largest_component: lcc,
            format,
            output,
        } => {
            let (c, d) = matrices(&scale)?;
            let m = if kind == SyntonyKind::Consonance { c } else { d };
            let target = edges.unwrap_or_else(|| target_edges_for(mean_degree, m.len()));
            let mut g = threshold_graph(&m, target)?;
            if lcc {
                let comp = largest_component(&g)?;
                let labels = comp.original_ids.iter().map(|&v| g.labels()[v].clone()).collect();
                g = comp.graph.with_labels(labels)?;
            }
            let id = format!("{}-{kind}-beta{}", scale.temperament, scale.beta);
            match format {
                GraphFormat::EdgeList => emit(output.as_deref(), |w| write_edge_list(w, &g))?,
                GraphFormat::Graphml => emit(output.as_deref(), |w| write_graphml(w, &g, &id))?,
            }
        }
        Command::Models {
            model,
            samples,
            nodes,
            mean_degree,
            master_seed,
            output_dir,
        } => {
            let spec = model.spec(nodes, mean_degree, derive_seed(master_seed, "GEO-radius", 0))?;
            fs::create_dir_all(&output_dir)?;
            let mut batch = String::from("model,sample,seed,nodes,edges,mean_degree,file\n");
            for i in 0..samples {
                let seed = derive_seed(master_seed, model.as_str(), i);
                let g = generate(&spec.clone().with_seed(seed))?;
                let file = format!("{model}_{i:04}.tsv");
                let mut buf = Vec::new();
                write_edge_list(&mut buf, &g)?;
                fs::write(output_dir.join(&file), buf)?;
                batch.push_str(&format!(
                    "{model},{i},{seed},{},{},{},{file}\n",
                    g.node_count(),
                    g.edge_count(),
                    g.mean_degree()
                ));
            }
            fs::write(output_dir.join("batch.csv"), batch)?;
            eprintln!("{samples} {model} samples, parameters {:?}", spec.params);
        }
        Command::Features { inputs, output } => {
            let mut rows = Vec::new();
            for p in &inputs {
                let g = read_graph(p)?;
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let meta = RowMeta {
                    source: Source::Graph,
                    temperament: String::new(),
                    kind: name,
                    beta: None,
                    sample: None,
                    seed: None,
                };
                match measure_graph(&g, meta).with_context(|| p.display().to_string())? {
                    Measured::Done(r) => rows.push(r),
                    Measured::Skipped { reason, .. } => eprintln!("skipping {}: {reason}", p.display()),
                }
            }
            let mut buf = Vec::new();
            write_features(&mut buf, &rows)?;
            emit(output.as_deref(), |w| w.write_all(&buf))?;
        }
        Command::Pca {
            reference,
            inputs,
            output_dir,
        } => {
            let open = |p: &PathBuf| -> Result<_> {
                read_features(fs::File::open(p).with_context(|| format!("opening {}", p.display()))?)
                    .with_context(|| p.display().to_string())
            };
            let reference_rows = open(&reference)?;
            let samples: Vec<&[f64]> = reference_rows.iter().map(|r| r.features.as_slice()).collect();
            let pca = syntonet::projection::fit(&samples)?;
            for w in &pca.warnings {
                eprintln!("warning: {w}");
            }
            let mut all = reference_rows.clone();
            for p in &inputs {
                all.extend(open(p)?);
            }
            fs::create_dir_all(&output_dir)?;
            let mut buf = Vec::new();
            write_pca_model(&mut buf, &pca)?;
            fs::write(output_dir.join("model.csv"), buf)?;
            let mut buf = Vec::new();
            write_projection(&mut buf, &project_rows(&pca, &all)?)?;
            fs::write(output_dir.join("projection.csv"), buf)?;
        }
        Command::RunNonshifted(args) => {
            let cfg = run_config(&args)?;
            let m = run_nonshifted(
                &cfg,
                RunOptions {
                    resume: args.resume,
                    timing: args.timing,
                },
            )?;
            report(&m, &cfg.output_dir);
        }
        Command::RunShifted(args) => {
            let cfg = run_config(&args)?;
            let m = run_shifted(
                &cfg,
                RunOptions {
                    resume: args.resume,
                    timing: args.timing,
                },
            )?;
            report(&m, &cfg.output_dir);
        }
        Command::Plot {
            input,
            output,
            kind,
            temperament,
            color_by,
            title,
        } => {
            let rows = read_projection(fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?)?;
            let keep = |r: &&syntonet_cli::tables::ProjectionRow| {
                r.meta.source == Source::Model
                    || (kind.is_none_or(|k| r.meta.kind == k.as_str())
                        && temperament.is_none_or(|t| r.meta.temperament == t.as_str()))
            };
            let points: Vec<PlotPoint> = rows
                .iter()
                .filter(keep)
                .map(|r| PlotPoint {
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
                .collect();
            let style = PlotStyle {
                title,
                color_by: match color_by {
                    ColorArg::Group => ColorBy::Group,
                    ColorArg::Beta => ColorBy::Beta,
                },
                ..PlotStyle::default()
            };
            fs::write(&output, render_scatter(&points, &style)?)
                .with_context(|| format!("writing {}", output.display()))?;
        }
    }
    Ok(())
}
