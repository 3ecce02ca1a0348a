//! Experiment configuration: a flat `key = value` file plus overrides.
//!
//! ```text
//! # comments start with '#'
//! temperaments = equal, just
//! kind = consonance
//! beta_step = 0.01
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use syntonet::scale::{TemperamentName, C1_HZ, DEFAULT_OCTAVES};
use syntonet::spectrum::{AnharmonicityLaw, AUDIBLE_CUTOFF_HZ, DEFAULT_ALPHA};
use syntonet::syntony::{SyntonyKind, SyntonyWindows, DEFAULT_DELTA_MAX_HZ, DEFAULT_DELTA_MIN_HZ, DEFAULT_MEAN_DEGREE};

pub const DEFAULT_BETA_START: f64 = 0.80;
pub const DEFAULT_BETA_STOP: f64 = 1.20;
pub const DEFAULT_BETA_STEP: f64 = 0.002;
pub const REFINE_START: f64 = 0.99;
pub const REFINE_STOP: f64 = 1.01;
pub const REFINE_STEP: f64 = 2e-4;
pub const DEFAULT_MODEL_SAMPLES: usize = 100;
pub const DEFAULT_MASTER_SEED: u64 = 1;
pub const DEFAULT_LAYOUT_BETAS: [f64; 7] = [0.8, 0.9, 1.0, 1.0056, 1.0058, 1.1, 1.2];

/// Grid values are rounded to this many decimals so that, for example,
/// 1.0 is hit exactly.
const GRID_DECIMALS: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindSelection {
    Consonance,
    Dissonance,
    Both,
}

impl KindSelection {
    pub fn kinds(self) -> Vec<SyntonyKind> {
        match self {
            KindSelection::Consonance => vec![SyntonyKind::Consonance],
            KindSelection::Dissonance => vec![SyntonyKind::Dissonance],
            KindSelection::Both => SyntonyKind::ALL.to_vec(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KindSelection::Consonance => "consonance",
            KindSelection::Dissonance => "dissonance",
            KindSelection::Both => "both",
        }
    }
}

impl std::str::FromStr for KindSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "consonance" => Ok(KindSelection::Consonance),
            "dissonance" => Ok(KindSelection::Dissonance),
            "both" => Ok(KindSelection::Both),
            other => Err(format!("unknown kind '{other}' (consonance, dissonance or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl BetaSweep {
    /// Points `start + i * step` up to `stop` inclusive (with a small slack
    /// for rounding), each rounded to 10 decimals.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| round_grid(self.start + i as f64 * self.step)).collect()
    }
}

pub fn round_grid(x: f64) -> f64 {
    let scale = 10f64.powi(GRID_DECIMALS);
    (x * scale).round() / scale
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub temperaments: Vec<TemperamentName>,
    pub kind: KindSelection,
    pub base_frequency: f64,
    pub octaves: usize,
    pub alpha: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub cutoff: f64,
    pub beta_sweep: BetaSweep,
    pub beta_refine: bool,
    pub target_mean_degree: f64,
    pub model_samples: usize,
    pub master_seed: u64,
    pub layout_betas: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            temperaments: TemperamentName::ALL.to_vec(),
            kind: KindSelection::Both,
            base_frequency: C1_HZ,
            octaves: DEFAULT_OCTAVES,
            alpha: DEFAULT_ALPHA,
            delta_min: DEFAULT_DELTA_MIN_HZ,
            delta_max: DEFAULT_DELTA_MAX_HZ,
            cutoff: AUDIBLE_CUTOFF_HZ,
            beta_sweep: BetaSweep {
                start: DEFAULT_BETA_START,
                stop: DEFAULT_BETA_STOP,
                step: DEFAULT_BETA_STEP,
            },
            beta_refine: false,
            target_mean_degree: DEFAULT_MEAN_DEGREE,
            model_samples: DEFAULT_MODEL_SAMPLES,
            master_seed: DEFAULT_MASTER_SEED,
            layout_betas: DEFAULT_LAYOUT_BETAS.to_vec(),
            output_dir: PathBuf::from("syntonet-output"),
        }
    }
}

fn parse_list<T>(value: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(f)
        .collect()
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.parse().with_context(|| format!("{key}: '{value}' is not a number"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("{key}: '{value}' is not a boolean"),
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "temperaments" => {
                self.temperaments = parse_list(value, |s| s.parse::<TemperamentName>().map_err(anyhow::Error::msg))?
            }
            "kind" => self.kind = value.parse().map_err(anyhow::Error::msg)?,
            "base_frequency" => self.base_frequency = parse_f64(key, value)?,
            "octaves" => self.octaves = value.parse().with_context(|| format!("octaves: '{value}'"))?,
            "alpha" => self.alpha = parse_f64(key, value)?,
            "delta_min" => self.delta_min = parse_f64(key, value)?,
            "delta_max" => self.delta_max = parse_f64(key, value)?,
            "cutoff" => self.cutoff = parse_f64(key, value)?,
            "beta_start" => self.beta_sweep.start = parse_f64(key, value)?,
            "beta_stop" => self.beta_sweep.stop = parse_f64(key, value)?,
            "beta_step" => self.beta_sweep.step = parse_f64(key, value)?,
            "beta_refine" => self.beta_refine = parse_bool(key, value)?,
            "target_mean_degree" => self.target_mean_degree = parse_f64(key, value)?,
            "model_samples" => {
                self.model_samples = value.parse().with_context(|| format!("model_samples: '{value}'"))?
            }
            "master_seed" => self.master_seed = value.parse().with_context(|| format!("master_seed: '{value}'"))?,
            "layout_betas" => self.layout_betas = parse_list(value, |s| parse_f64(key, s))?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => bail!("unknown configuration key '{key}'"),
        }
        Ok(())
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .with_context(|| format!("override '{pair}' is not key=value"))?;
        self.set(k, v)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", n + 1))?;
            self.set(k, v).with_context(|| format!("line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.temperaments.is_empty() {
            bail!("no temperaments selected");
        }
        let s = self.beta_sweep;
        if !(s.start.is_finite() && s.stop.is_finite() && s.start < s.stop) {
            bail!("beta sweep needs start < stop, got {} .. {}", s.start, s.stop);
        }
        if !(s.step.is_finite() && s.step > 0.0) {
            bail!("beta step must be positive, got {}", s.step);
        }
        if s.start <= 0.0 {
            bail!("beta must be positive, got start {}", s.start);
        }
        if self.octaves == 0 {
            bail!("octaves must be at least 1");
        }
        if !(self.base_frequency.is_finite() && self.base_frequency > 0.0) {
            bail!("base frequency must be positive, got {}", self.base_frequency);
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            bail!("cutoff must be positive, got {}", self.cutoff);
        }
        AnharmonicityLaw::new(1.0, self.alpha)?;
        SyntonyWindows::new(self.delta_min, self.delta_max)?;
        if !(self.target_mean_degree.is_finite() && self.target_mean_degree > 0.0) {
            bail!("target mean degree must be positive, got {}", self.target_mean_degree);
        }
        let n = self.node_count();
        if self.target_mean_degree >= (n - 1) as f64 {
            bail!("target mean degree {} needs more than {n} notes", self.target_mean_degree);
        }
        if self.model_samples == 0 {
            bail!("model_samples must be at least 1");
        }
        if self.layout_betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            bail!("layout betas must be positive");
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        12 * self.octaves
    }

    pub fn windows(&self) -> SyntonyWindows {
        SyntonyWindows {
            delta_min: self.delta_min,
            delta_max: self.delta_max,
        }
    }

    /// The sweep grid, merged with the refinement grid when enabled, sorted
    /// and deduplicated.
    pub fn betas(&self) -> Vec<f64> {
        let mut b = self.beta_sweep.points();
        if self.beta_refine {
            b.extend(
                BetaSweep {
                    start: REFINE_START,
                    stop: REFINE_STOP,
                    step: REFINE_STEP,
                }
                .points(),
            );
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Every setting as ordered key/value strings. Output directory is left
    /// out so that the same experiment written elsewhere compares equal.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put(
            "temperaments",
            self.temperaments.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(","),
        );
        put("kind", self.kind.as_str().into());
        put("base_frequency", self.base_frequency.to_string());
        put("octaves", self.octaves.to_string());
        put("alpha", self.alpha.to_string());
        put("delta_min", self.delta_min.to_string());
        put("delta_max", self.delta_max.to_string());
        put("cutoff", self.cutoff.to_string());
        put("beta_start", self.beta_sweep.start.to_string());
        put("beta_stop", self.beta_sweep.stop.to_string());
        put("beta_step", self.beta_sweep.step.to_string());
        put("beta_refine", self.beta_refine.to_string());
        put("target_mean_degree", self.target_mean_degree.to_string());
        put("model_samples", self.model_samples.to_string());
        put("master_seed", self.master_seed.to_string());
        put("layout_betas", list(&self.layout_betas));
        m
    }

    /// The snapshot in the same `key = value` format the loader reads.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.snapshot() {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }
}
