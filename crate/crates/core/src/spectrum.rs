//! Partial spectra of a single note.
//!
//! Partial `n` (1-based) sits at `f_1 * n^beta` with amplitude
//! `exp(-alpha * n^beta)`. `beta = 1` gives the harmonic series; other
//! values stretch (`beta > 1`) or compress (`beta < 1`) it. Partials above
//! the audible cutoff are dropped.

use crate::error::{domain, Error, Result};

/// Upper limit of human hearing, Hz.
pub const AUDIBLE_CUTOFF_HZ: f64 = 20_000.0;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnharmonicityLaw {
    /// Anharmonicity index; `1.0` is harmonic.
    pub beta: f64,
    /// Amplitude decay constant.
    pub alpha: f64,
}

impl AnharmonicityLaw {
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return domain(format!("beta must be positive, got {beta}"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return domain(format!("alpha must be non-negative, got {alpha}"));
        }
        Ok(Self { beta, alpha })
    }

    pub fn harmonic(alpha: f64) -> Result<Self> {
        Self::new(1.0, alpha)
    }

    /// Amplitude of a partial whose multiplier is `h`.
    pub fn amplitude(&self, h: f64) -> f64 {
        (-self.alpha * h).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial {
    pub frequency: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSpectrum {
    pub fundamental: f64,
    /// Sorted by strictly increasing frequency; `partials[n - 1]` is
    /// partial `n`.
    pub partials: Vec<Partial>,
}

impl PartialSpectrum {
    pub fn len(&self) -> usize {
        self.partials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partials.is_empty()
    }

    /// Builds a spectrum from explicit `(frequency, amplitude)` pairs, which
    /// must be sorted by frequency. Mostly useful for tests and fixtures.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return domain("spectrum has no partials");
        }
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return domain("partials must be sorted by strictly increasing frequency");
        }
        if pairs.iter().any(|&(f, a)| !(f.is_finite() && a.is_finite() && f > 0.0 && a >= 0.0)) {
            return domain("partials need positive finite frequencies and non-negative amplitudes");
        }
        Ok(Self {
            fundamental: pairs[0].0,
            partials: pairs
                .iter()
                .map(|&(frequency, amplitude)| Partial { frequency, amplitude })
                .collect(),
        })
    }
}

/// The multiplier `h_n = n^beta`.
pub fn partial_multiplier(n: u32, beta: f64) -> Result<f64> {
    if n == 0 {
        return domain("partials are numbered from 1");
    }
    Ok(if beta == 1.0 { n as f64 } else { (n as f64).powf(beta) })
}

/// All partials `n >= 1` with `fundamental * n^beta <= cutoff`.
pub fn build_spectrum(fundamental: f64, law: AnharmonicityLaw, cutoff: f64) -> Result<PartialSpectrum> {
    if !(fundamental.is_finite() && fundamental > 0.0) {
        return domain(format!("fundamental must be positive, got {fundamental}"));
    }
    if !(cutoff > fundamental) {
        return Err(Error::EmptySpectrum { fundamental, cutoff });
    }
    let mut partials = Vec::new();
    for n in 1u32.. {
        let h = partial_multiplier(n, law.beta)?;
        let frequency = fundamental * h;
        if frequency > cutoff {
            break;
        }
        partials.push(Partial {
            frequency,
            amplitude: law.amplitude(h),
        });
    }
    Ok(PartialSpectrum {
        fundamental,
        partials,
    })
}
