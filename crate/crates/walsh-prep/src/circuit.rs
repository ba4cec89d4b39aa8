//! Gate-level synthesis of truncated Walsh evolutions (CNOT chain plus a
//! single Z rotation per term), gate counting, OpenQASM 2.0 export, and a
//! dense simulator used as the correctness oracle for the synthesized
//! lists.
//!
//! Rotation convention: rz(θ) = diag(e^{-iθ/2}, e^{+iθ/2}), so e^{-ic·W_r}
//! needs an rz angle of 2c on the parity qubit. This is the classic
//! off-by-sign trap; the dense-simulation self-test below pins it down.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::walsh::WalshSpectrum;
use crate::{DiagonalHamiltonian, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "gate")]
pub enum Gate {
    Hadamard { qubit: u32 },
    Rz { qubit: u32, angle: f64 },
    Cnot { control: u32, target: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateList {
    pub n_qubits: u32,
    gates: Vec<Gate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

impl GateList {
    pub fn new(n_qubits: u32) -> Result<Self> {
        crate::statevec::check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let ok = match gate {
            Gate::Hadamard { qubit } => qubit < self.n_qubits,
            Gate::Rz { qubit, angle } => qubit < self.n_qubits && angle.is_finite(),
            Gate::Cnot { control, target } => {
                control < self.n_qubits && target < self.n_qubits && control != target
            }
        };
        if !ok {
            return Err(Error::Validation(format!("invalid gate {gate:?}")));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &GateList) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::ShapeMismatch {
                left: self.n_qubits as usize,
                right: other.n_qubits as usize,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// One Hadamard on every qubit.
    pub fn push_hadamard_layer(&mut self) {
        for q in 0..self.n_qubits {
            self.gates.push(Gate::Hadamard { qubit: q });
        }
    }

    /// Applies the list to a state vector (bit q of the basis index is
    /// qubit q). Dense brute-force oracle for small n; independent of the
    /// Walsh transform machinery.
    pub fn apply_to(&self, amps: &mut [Complex64]) -> Result<()> {
        let len = 1usize << self.n_qubits;
        if amps.len() != len {
            return Err(Error::ShapeMismatch {
                left: amps.len(),
                right: len,
            });
        }
        for gate in &self.gates {
            match *gate {
                Gate::Hadamard { qubit } => {
                    let mask = 1usize << qubit;
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    for j in 0..len {
                        if j & mask == 0 {
                            let a = amps[j];
                            let b = amps[j | mask];
                            amps[j] = (a + b) * s;
                            amps[j | mask] = (a - b) * s;
                        }
                    }
                }
                Gate::Rz { qubit, angle } => {
                    let mask = 1usize << qubit;
                    let lo = Complex64::from_polar(1.0, -angle / 2.0);
                    let hi = Complex64::from_polar(1.0, angle / 2.0);
                    for (j, a) in amps.iter_mut().enumerate() {
                        *a *= if j & mask == 0 { lo } else { hi };
                    }
                }
                Gate::Cnot { control, target } => {
                    let cmask = 1usize << control;
                    let tmask = 1usize << target;
                    for j in 0..len {
                        if j & cmask != 0 && j & tmask == 0 {
                            amps.swap(j, j | tmask);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The full dense unitary, column by column. Intended for n <= 10.
    pub fn to_unitary(&self) -> Result<Vec<Vec<Complex64>>> {
        let len = 1usize << self.n_qubits;
        let mut columns = Vec::with_capacity(len);
        for j in 0..len {
            let mut col = vec![Complex64::new(0.0, 0.0); len];
            col[j] = Complex64::new(1.0, 0.0);
            self.apply_to(&mut col)?;
            columns.push(col);
        }
        Ok(columns)
    }
}

/// Counts rz and hadamard as one-qubit gates, cnot as two-qubit. Pass
/// evolution-only lists (no Hadamard layers) when reproducing the
/// per-evolution counts.
pub fn count_gates(gates: &GateList) -> GateCounts {
    let mut counts = GateCounts {
        one_qubit: 0,
        two_qubit: 0,
    };
    for gate in gates.gates() {
        match gate {
            Gate::Hadamard { .. } | Gate::Rz { .. } => counts.one_qubit += 1,
            Gate::Cnot { .. } => counts.two_qubit += 1,
        }
    }
    counts
}

/// e^{-ic·W_r} for a single Walsh term: a CNOT chain folding the parity of
/// r's set bits onto the highest set bit, one rz(2c) there, and the
/// mirrored chain. 2(p−1) CNOTs and one rotation for popcount p.
pub fn synthesize_walsh_term(r: usize, c: f64, n_qubits: u32) -> Result<GateList> {
    if r == 0 {
        return Err(Error::IdentityTerm);
    }
    if r >= (1usize << n_qubits) {
        return Err(Error::WalshIndex { index: r, n_qubits });
    }
    let bits: Vec<u32> = (0..n_qubits).filter(|q| r & (1 << q) != 0).collect();
    let parity_qubit = *bits.last().expect("r != 0");
    let mut list = GateList::new(n_qubits)?;
    for pair in bits.windows(2) {
        list.push(Gate::Cnot {
            control: pair[0],
            target: pair[1],
        })?;
    }
    list.push(Gate::Rz {
        qubit: parity_qubit,
        angle: 2.0 * c,
    })?;
    for pair in bits.windows(2).rev() {
        list.push(Gate::Cnot {
            control: pair[0],
            target: pair[1],
        })?;
    }
    Ok(list)
}

/// Concatenation of all terms in ascending r. All Walsh operators commute,
/// so the product equals diag(e^{-ih_j}) for h = expand_diagonal(spec) with
/// no Trotter error.
pub fn synthesize_evolution(spec: &WalshSpectrum) -> Result<GateList> {
    let mut list = GateList::new(spec.n_qubits)?;
    for (r, c) in spec.iter() {
        if r == 0 {
            return Err(Error::IdentityTerm);
        }
        list.extend(&synthesize_walsh_term(r, c, spec.n_qubits)?)?;
    }
    Ok(list)
}

/// OpenQASM 2.0 text over a single quantum register, using h, rz, cx.
/// Angles at 17 significant digits; deterministic output.
pub fn write_qasm<W: Write>(gates: &GateList, w: &mut W) -> Result<()> {
    writeln!(w, "OPENQASM 2.0;")?;
    writeln!(w, "include \"qelib1.inc\";")?;
    writeln!(w, "qreg q[{}];", gates.n_qubits)?;
    for gate in gates.gates() {
        match *gate {
            Gate::Hadamard { qubit } => writeln!(w, "h q[{qubit}];")?,
            Gate::Rz { qubit, angle } => writeln!(w, "rz({angle:.16e}) q[{qubit}];")?,
            Gate::Cnot { control, target } => writeln!(w, "cx q[{control}],q[{target}];")?,
        }
    }
    Ok(())
}

pub fn export_qasm(gates: &GateList, path: &std::path::Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_qasm(gates, &mut file)?;
    Ok(())
}

/// Checks that the list's dense unitary equals diag(e^{-ih_j}) up to a
/// global phase; returns the max elementwise deviation. Brute force, n <= 10.
pub fn diagonal_deviation(gates: &GateList, h: &DiagonalHamiltonian) -> Result<f64> {
    let len = 1usize << gates.n_qubits;
    if h.len() != len {
        return Err(Error::ShapeMismatch {
            left: h.len(),
            right: len,
        });
    }
    let unitary = gates.to_unitary()?;
    // global phase from the (0,0) entry
    let expected00 = Complex64::from_polar(1.0, -h.coeffs()[0]);
    let actual00 = unitary[0][0];
    if actual00.norm() < 1e-9 {
        return Err(Error::Validation(
            "unitary is not diagonal at (0,0)".into(),
        ));
    }
    let phase = expected00 / (actual00 / actual00.norm());
    let phase = phase / phase.norm();
    let mut max_dev = 0.0f64;
    for (j, col) in unitary.iter().enumerate() {
        for (i, &u) in col.iter().enumerate() {
            let expected = if i == j {
                Complex64::from_polar(1.0, -h.coeffs()[j])
            } else {
                Complex64::new(0.0, 0.0)
            };
            max_dev = max_dev.max((u * phase - expected).norm());
        }
    }
    Ok(max_dev)
}
