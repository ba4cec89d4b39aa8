//! Target-state generation: the structured linear and sine amplitude
//! profiles, seeded random datasets, and text-file ingestion.
//!
//! All targets are real nonnegative unit-norm amplitude vectors (amplitude
//! moduli). Normal samples take absolute values before normalization; a
//! signed target would need the phase layer to encode sign flips, which the
//! amplitude-only loss does not distinguish.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::statevec::check_qubits;
use crate::{Error, Result, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Uniform,
    Normal,
}

impl std::fmt::Display for RandomKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RandomKind::Uniform => write!(f, "uniform"),
            RandomKind::Normal => write!(f, "normal"),
        }
    }
}

/// Named target dataset, addressable from the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TargetSpec {
    UniformRandom { seed: u64 },
    NormalRandom { seed: u64 },
    Linear,
    Sine,
    FromFile { path: String },
}

impl TargetSpec {
    pub fn build(&self, n_qubits: u32) -> Result<StateVector> {
        match self {
            TargetSpec::UniformRandom { seed } => {
                random_state(RandomKind::Uniform, n_qubits, *seed)
            }
            TargetSpec::NormalRandom { seed } => random_state(RandomKind::Normal, n_qubits, *seed),
            TargetSpec::Linear => linear_state(n_qubits),
            TargetSpec::Sine => sine_state(n_qubits),
            TargetSpec::FromFile { path } => {
                let state = load_amplitudes(Path::new(path))?;
                if state.n_qubits() != n_qubits {
                    return Err(Error::Validation(format!(
                        "file encodes {} qubits, run asks for {n_qubits}",
                        state.n_qubits()
                    )));
                }
                Ok(state)
            }
        }
    }
}

/// Linear amplitude profile x_j = j·√(6/(N(N−1)(2N−1))); unit norm by the
/// closed form Σj² = N(N−1)(2N−1)/6.
pub fn linear_state(n_qubits: u32) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let len = 1usize << n_qubits;
    let n = len as f64;
    let scale = (6.0 / (n * (n - 1.0) * (2.0 * n - 1.0))).sqrt();
    StateVector::from_real(&(0..len).map(|j| j as f64 * scale).collect::<Vec<_>>())
}

/// Sine amplitude profile x_j = √(2/N)·sin(π(j+1/2)/N).
pub fn sine_state(n_qubits: u32) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let len = 1usize << n_qubits;
    let n = len as f64;
    let scale = (2.0 / n).sqrt();
    // fill by mirroring so the sin(π − x) = sin x symmetry holds exactly
    let mut values = vec![0.0; len];
    for j in 0..len / 2 {
        let v = scale * (PI * (j as f64 + 0.5) / n).sin();
        values[j] = v;
        values[len - 1 - j] = v;
    }
    StateVector::from_real(&values)
}

/// Seeded random target: uniform draws U[0,1); normal draws N(0,1) with
/// absolute value taken. Both L2-normalized. Deterministic per seed.
pub fn random_state(kind: RandomKind, n_qubits: u32, seed: u64) -> Result<StateVector> {
    check_qubits(n_qubits)?;
    let len = 1usize << n_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<f64> = match kind {
        RandomKind::Uniform => (0..len).map(|_| rng.gen::<f64>()).collect(),
        RandomKind::Normal => (0..len)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x.abs()
            })
            .collect(),
    };
    let norm: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Validation("all-zero sample".into()));
    }
    for v in &mut values {
        *v /= norm;
    }
    StateVector::from_real(&values)
}

/// Parses the amplitude text format: one decimal value per line, blank
/// lines and '#'-prefixed comments allowed. Values must be nonnegative
/// (targets are moduli), not all zero, with a power-of-two count. The
/// result is L2-normalized.
pub fn parse_amplitudes(text: &str) -> Result<StateVector> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|e| Error::Parse {
            line: idx + 1,
            message: format!("{e}: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("non-finite value {line:?}"),
            });
        }
        if v < 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!(
                    "negative amplitude {v}; targets are amplitude moduli — encode signs \
                     as phases instead"
                ),
            });
        }
        values.push(v);
    }
    if values.len() < 2 || !values.len().is_power_of_two() {
        return Err(Error::BadLength(values.len()));
    }
    let norm: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Validation("all amplitudes are zero".into()));
    }
    for v in &mut values {
        *v /= norm;
    }
    StateVector::from_real(&values)
}

pub fn load_amplitudes(path: &Path) -> Result<StateVector> {
    parse_amplitudes(&std::fs::read_to_string(path)?)
}

/// Writes real amplitudes in the text format at 17 significant digits.
pub fn save_amplitudes<W: Write>(state: &StateVector, w: &mut W) -> Result<()> {
    for a in state.amplitudes() {
        writeln!(w, "{:.16e}", a.re)?;
    }
    Ok(())
}
