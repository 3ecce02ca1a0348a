//! Helmholtz-style consonance and dissonance between note spectra, and the
//! weighted and thresholded networks built from them.
//!
//! For two spectra `X` and `Y`, every pair of partials `(X_i, Y_j)` whose
//! distance is below `delta_min / 2` is consonant, and every pair whose
//! distance lies in `[delta_min / 2, delta_max / 2)` is dissonant. A pair
//! contributes the product of its two amplitudes. A partial close to two
//! partials of the other note contributes twice.
//!
//! Sums are taken over the sorted list of contributions, which makes the
//! result independent of argument order: `C(X, Y) == C(Y, X)` bit for bit.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::scale::Scale;
use crate::spectrum::{build_spectrum, AnharmonicityLaw, PartialSpectrum, AUDIBLE_CUTOFF_HZ};

pub const DEFAULT_DELTA_MIN_HZ: f64 = 10.0;
pub const DEFAULT_DELTA_MAX_HZ: f64 = 80.0;
/// Mean degree the networks are thresholded to.
pub const DEFAULT_MEAN_DEGREE: f64 = 10.37;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntonyWindows {
    /// Full width of the consonance window, Hz.
    pub delta_min: f64,
    /// Full width of the dissonance window, Hz.
    pub delta_max: f64,
}

impl SyntonyWindows {
    pub fn new(delta_min: f64, delta_max: f64) -> Result<Self> {
        if !(delta_min.is_finite() && delta_max.is_finite() && 0.0 < delta_min && delta_min < delta_max) {
            return domain(format!(
                "windows need 0 < delta_min < delta_max, got {delta_min} and {delta_max}"
            ));
        }
        Ok(Self { delta_min, delta_max })
    }
}

impl Default for SyntonyWindows {
    fn default() -> Self {
        Self {
            delta_min: DEFAULT_DELTA_MIN_HZ,
            delta_max: DEFAULT_DELTA_MAX_HZ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyntonyKind {
    Consonance,
    Dissonance,
}

impl SyntonyKind {
    pub const ALL: [SyntonyKind; 2] = [SyntonyKind::Consonance, SyntonyKind::Dissonance];

    pub fn as_str(self) -> &'static str {
        match self {
            SyntonyKind::Consonance => "consonance",
            SyntonyKind::Dissonance => "dissonance",
        }
    }
}

impl fmt::Display for SyntonyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SyntonyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "consonance" => Ok(SyntonyKind::Consonance),
            "dissonance" => Ok(SyntonyKind::Dissonance),
            _ => domain(format!("unknown syntony kind `{s}`")),
        }
    }
}

/// A pair of partials that falls inside the dissonance window or closer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosePair {
    /// Partial index in the first spectrum.
    pub i: usize,
    /// Partial index in the second spectrum.
    pub j: usize,
    pub distance: f64,
    pub kind: SyntonyKind,
    pub product: f64,
}

/// Every partial pair with `|X_i - Y_j| < delta_max / 2`, in `(i, j)` order.
///
/// Both spectra are sorted, so a sliding window over `Y` visits only the
/// candidates near each `X_i`.
pub fn close_pairs(x: &PartialSpectrum, y: &PartialSpectrum, w: &SyntonyWindows) -> Result<Vec<ClosePair>> {
    check_non_empty(x, y)?;
    let half_min = w.delta_min / 2.0;
    let half_max = w.delta_max / 2.0;
    let ys = &y.partials;
    let mut out = Vec::new();
    let mut lo = 0;
    for (i, xp) in x.partials.iter().enumerate() {
        while lo < ys.len() && xp.frequency - ys[lo].frequency >= half_max {
            lo += 1;
        }
        for (j, yp) in ys.iter().enumerate().skip(lo) {
            if yp.frequency - xp.frequency >= half_max {
                break;
            }
            let distance = (xp.frequency - yp.frequency).abs();
            if distance >= half_max {
                continue;
            }
            let kind = if distance < half_min {
                SyntonyKind::Consonance
            } else {
                SyntonyKind::Dissonance
            };
            out.push(ClosePair {
                i,
                j,
                distance,
                kind,
                product: xp.amplitude * yp.amplitude,
            });
        }
    }
    Ok(out)
}

fn check_non_empty(x: &PartialSpectrum, y: &PartialSpectrum) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return domain("consonance needs two non-empty spectra");
    }
    Ok(())
}

/// Sum of `values` after sorting them ascending; the result depends only on
/// the multiset of values. An empty slice sums to `+0.0`.
pub fn canonical_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().fold(0.0, |acc, v| acc + v)
}

fn syntony_from_pairs(pairs: &[ClosePair], kind: SyntonyKind) -> f64 {
    let mut products: Vec<f64> = pairs.iter().filter(|p| p.kind == kind).map(|p| p.product).collect();
    canonical_sum(&mut products)
}

pub fn pair_syntony(x: &PartialSpectrum, y: &PartialSpectrum, w: &SyntonyWindows, kind: SyntonyKind) -> Result<f64> {
    Ok(syntony_from_pairs(&close_pairs(x, y, w)?, kind))
}

/// Consonance `C`: amplitude products of partial pairs closer than
/// `delta_min / 2`.
pub fn pair_consonance(x: &PartialSpectrum, y: &PartialSpectrum, w: &SyntonyWindows) -> Result<f64> {
    pair_syntony(x, y, w, SyntonyKind::Consonance)
}

/// Dissonance `D`: amplitude products of partial pairs at distance in
/// `[delta_min / 2, delta_max / 2)`.
pub fn pair_dissonance(x: &PartialSpectrum, y: &PartialSpectrum, w: &SyntonyWindows) -> Result<f64> {
    pair_syntony(x, y, w, SyntonyKind::Dissonance)
}

/// Symmetric note-by-note weights with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntonyMatrix {
    pub kind: SyntonyKind,
    pub labels: Vec<String>,
    n: usize,
    weights: Vec<f64>,
}

impl SyntonyMatrix {
    /// Builds a matrix from the strict upper triangle, row by row.
    pub fn from_upper(kind: SyntonyKind, labels: Vec<String>, upper: &[f64]) -> Result<Self> {
        let n = labels.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * n.saturating_sub(1) / 2,
                got: upper.len(),
            });
        }
        if upper.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return domain("weights must be finite and non-negative");
        }
        let mut weights = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                weights[i * n + j] = upper[k];
                weights[j * n + i] = upper[k];
                k += 1;
            }
        }
        Ok(Self { kind, labels, n, weights })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    /// `(i, j, weight)` for every `i < j`.
    pub fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn nonzero_pairs(&self) -> usize {
        self.upper_pairs().filter(|&(_, _, w)| w > 0.0).count()
    }

    /// The complete weighted graph on nonzero pairs.
    pub fn to_weighted_graph(&self) -> Graph {
        let edges = self.upper_pairs().filter(|&(_, _, w)| w > 0.0).collect();
        Graph::from_weighted_edges(self.n, edges)
            .and_then(|g| g.with_labels(self.labels.clone()))
            .expect("matrix pairs form a simple graph")
    }
}

/// Spectra of every note in the scale.
pub fn scale_spectra(scale: &Scale, law: AnharmonicityLaw, cutoff: f64) -> Result<Vec<PartialSpectrum>> {
    scale.frequencies().map(|f| build_spectrum(f, law, cutoff)).collect()
}

/// Consonance and dissonance matrices of a scale, computed together.
pub fn build_syntony_matrices(
    scale: &Scale,
    law: AnharmonicityLaw,
    windows: &SyntonyWindows,
    cutoff: f64,
) -> Result<(SyntonyMatrix, SyntonyMatrix)> {
    let n = scale.len();
    if n < 2 {
        return domain("a syntony matrix needs at least two notes");
    }
    let spectra = scale_spectra(scale, law, cutoff)?;
    let rows: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let pairs = close_pairs(&spectra[i], &spectra[j], windows)?;
                    Ok((
                        syntony_from_pairs(&pairs, SyntonyKind::Consonance),
                        syntony_from_pairs(&pairs, SyntonyKind::Dissonance),
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let (cons, diss): (Vec<f64>, Vec<f64>) = rows.into_iter().flatten().unzip();
    let labels = scale.labels();
    Ok((
        SyntonyMatrix::from_upper(SyntonyKind::Consonance, labels.clone(), &cons)?,
        SyntonyMatrix::from_upper(SyntonyKind::Dissonance, labels, &diss)?,
    ))
}

pub fn build_syntony_matrix(
    scale: &Scale,
    law: AnharmonicityLaw,
    windows: &SyntonyWindows,
    kind: SyntonyKind,
) -> Result<SyntonyMatrix> {
    build_syntony_matrix_with_cutoff(scale, law, windows, kind, AUDIBLE_CUTOFF_HZ)
}

pub fn build_syntony_matrix_with_cutoff(
    scale: &Scale,
    law: AnharmonicityLaw,
    windows: &SyntonyWindows,
    kind: SyntonyKind,
    cutoff: f64,
) -> Result<SyntonyMatrix> {
    let (c, d) = build_syntony_matrices(scale, law, windows, cutoff)?;
    Ok(match kind {
        SyntonyKind::Consonance => c,
        SyntonyKind::Dissonance => d,
    })
}

/// `round(mean_degree * n / 2)`.
pub fn target_edges_for(mean_degree: f64, n: usize) -> usize {
    (mean_degree * n as f64 / 2.0).round() as usize
}

/// Keeps the `target_edges` heaviest pairs as an unweighted graph.
///
/// Equal weights are broken by lexicographic `(i, j)` order, smallest first.
pub fn threshold_graph(m: &SyntonyMatrix, target_edges: usize) -> Result<Graph> {
    if target_edges == 0 {
        return domain("target edge count must be positive");
    }
    let mut pairs: Vec<(usize, usize, f64)> = m.upper_pairs().filter(|&(_, _, w)| w > 0.0).collect();
    if target_edges > pairs.len() {
        return Err(Error::NotEnoughEdges {
            requested: target_edges,
            available: pairs.len(),
        });
    }
    pairs.sort_by(|a, b| match b.2.total_cmp(&a.2) {
        Ordering::Equal => (a.0, a.1).cmp(&(b.0, b.1)),
        o => o,
    });
    pairs.truncate(target_edges);
    Graph::from_edges(m.len(), pairs.into_iter().map(|(i, j, _)| (i, j)))?.with_labels(m.labels.clone())
}
