//! Temperaments and multi-octave chromatic scales.
//!
//! A [`Temperament`] assigns a frequency ratio to each of the twelve
//! chromatic pitch classes of an octave. [`build_scale`] repeats that table
//! over several octaves starting at a base frequency, by default C1.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Frequency of C1 in Hz.
pub const C1_HZ: f64 = 32.7032;

/// Default number of octaves (108 notes).
pub const DEFAULT_OCTAVES: usize = 9;

pub const PITCH_CLASS_NAMES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemperamentName {
    Equal,
    Just,
    Meantone,
    Pythagorean,
    Werckmeister,
}

impl TemperamentName {
    pub const ALL: [TemperamentName; 5] = [
        TemperamentName::Equal,
        TemperamentName::Just,
        TemperamentName::Meantone,
        TemperamentName::Pythagorean,
        TemperamentName::Werckmeister,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemperamentName::Equal => "equal",
            TemperamentName::Just => "just",
            TemperamentName::Meantone => "meantone",
            TemperamentName::Pythagorean => "pythagorean",
            TemperamentName::Werckmeister => "werckmeister",
        }
    }
}

impl fmt::Display for TemperamentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemperamentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TemperamentName::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Domain(format!("unknown temperament `{s}`")))
    }
}

/// Twelve within-octave frequency ratios, `ratios[0] == 1`, strictly
/// increasing and below 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Temperament {
    pub name: TemperamentName,
    pub ratios: [f64; 12],
}

/// Equal-temperament ratio of the `i`-th chromatic degree (1-based):
/// `2^((i - 1) / 12)`.
pub fn equal_ratio(i: usize) -> Result<f64> {
    if !(1..=12).contains(&i) {
        return domain(format!("equal_ratio index {i} outside 1..=12"));
    }
    Ok(2f64.powf((i - 1) as f64 / 12.0))
}

fn just_ratios() -> [f64; 12] {
    [
        1.0,
        25.0 / 24.0,
        9.0 / 8.0,
        6.0 / 5.0,
        5.0 / 4.0,
        4.0 / 3.0,
        45.0 / 32.0,
        3.0 / 2.0,
        8.0 / 5.0,
        5.0 / 3.0,
        9.0 / 5.0,
        15.0 / 8.0,
    ]
}

fn pythagorean_ratios() -> [f64; 12] {
    [
        1.0,
        256.0 / 243.0,
        9.0 / 8.0,
        32.0 / 27.0,
        81.0 / 64.0,
        4.0 / 3.0,
        729.0 / 512.0,
        3.0 / 2.0,
        128.0 / 81.0,
        27.0 / 16.0,
        16.0 / 9.0,
        243.0 / 128.0,
    ]
}

/// Quarter-comma meantone: fifths of `5^(1/4)`, so that four fifths give a
/// pure major third 5/4.
fn meantone_ratios() -> [f64; 12] {
    let q = 5f64.powf(0.25);
    let s5 = 5f64.sqrt();
    [
        1.0,
        5f64.powf(1.75) / 16.0,
        s5 / 2.0,
        4.0 / q.powi(3),
        5.0 / 4.0,
        2.0 / q,
        s5 * s5 * s5 / 8.0,
        q,
        25.0 / 16.0,
        q.powi(3) / 2.0,
        4.0 / s5,
        q.powi(5) / 4.0,
    ]
}

/// Werckmeister III ("correct temperament no. 1").
fn werckmeister_ratios() -> [f64; 12] {
    let r4 = 2f64.powf(0.25);
    [
        1.0,
        256.0 / 243.0,
        64.0 / 81.0 * 2f64.sqrt(),
        32.0 / 27.0,
        256.0 / 243.0 * r4,
        4.0 / 3.0,
        1024.0 / 729.0,
        8.0 / 9.0 * r4.powi(3),
        128.0 / 81.0,
        1024.0 / 729.0 * r4,
        16.0 / 9.0,
        128.0 / 81.0 * r4,
    ]
}

/// Ratio table of a temperament at full double precision.
pub fn temperament_table(name: TemperamentName) -> Temperament {
    let ratios = match name {
        TemperamentName::Equal => {
            std::array::from_fn(|p| equal_ratio(p + 1).expect("index within 1..=12"))
        }
        TemperamentName::Just => just_ratios(),
        TemperamentName::Meantone => meantone_ratios(),
        TemperamentName::Pythagorean => pythagorean_ratios(),
        TemperamentName::Werckmeister => werckmeister_ratios(),
    };
    Temperament { name, ratios }
}

impl Temperament {
    pub fn new(name: TemperamentName) -> Self {
        temperament_table(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleNote {
    /// Position in the scale, `12 * octave + pitch_class`.
    pub index: usize,
    /// Zero-based octave offset from the base note.
    pub octave: usize,
    pub pitch_class: usize,
    /// Hz.
    pub frequency: f64,
    /// Scientific pitch name, e.g. `C1` or `G#3`. The base octave is 1.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    pub temperament: Temperament,
    pub base_frequency: f64,
    pub octaves: usize,
    pub notes: Vec<ScaleNote>,
}

impl Scale {
    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.notes.iter().map(|n| n.frequency)
    }

    pub fn labels(&self) -> Vec<String> {
        self.notes.iter().map(|n| n.label.clone()).collect()
    }
}

/// Builds `12 * octaves` notes; note `(o, p)` sits at
/// `base_frequency * 2^o * ratios[p]`.
pub fn build_scale(temperament: &Temperament, base_frequency: f64, octaves: usize) -> Result<Scale> {
    if !(base_frequency.is_finite() && base_frequency > 0.0) {
        return domain(format!("base frequency must be positive, got {base_frequency}"));
    }
    if octaves == 0 {
        return domain("a scale needs at least one octave");
    }
    let notes = (0..octaves)
        .flat_map(|octave| {
            let tonic = base_frequency * 2f64.powi(octave as i32);
            temperament.ratios.iter().enumerate().map(move |(pc, r)| ScaleNote {
                index: 12 * octave + pc,
                octave,
                pitch_class: pc,
                frequency: tonic * r,
                label: format!("{}{}", PITCH_CLASS_NAMES[pc], octave + 1),
            })
        })
        .collect();
    Ok(Scale {
        temperament: temperament.clone(),
        base_frequency,
        octaves,
        notes,
    })
}
