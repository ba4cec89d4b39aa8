//! State-vector core: the normalized fast Walsh–Hadamard transform (an
//! all-qubit Hadamard layer), diagonal phase evolution, and comparison
//! metrics. Everything operates in place on the amplitude buffer; no
//! full-size temporaries are allocated.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{Read, Write};

use num_complex::Complex64;

use crate::{Error, Result, MAX_QUBITS};

/// Default threshold below which a phase is reported as zero.
pub const PHASE_EPS: f64 = 1e-10;

/// An n-qubit register of 2^n complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n_qubits: u32,
}

impl StateVector {
    /// |0...0⟩ on `n_qubits` qubits.
    pub fn zero_basis(n_qubits: u32) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, n_qubits })
    }

    /// The uniform superposition 1/√N Σ|j⟩.
    pub fn uniform(n_qubits: u32) -> Result<Self> {
        check_qubits(n_qubits)?;
        let len = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        Ok(Self {
            amps: vec![a; len],
            n_qubits,
        })
    }

    /// Wraps an amplitude buffer; the length must be a power of two >= 2.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        Ok(Self { amps, n_qubits })
    }

    /// Builds a state from real amplitudes (imaginary parts zero).
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amplitudes(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// In-place normalized FWHT: applies H^{⊗n} with the 1/√2 factor folded
    /// into every butterfly stage, so the result of each stage is itself a
    /// unit-norm state. Involutive and norm-preserving.
    pub fn fwht(&mut self) {
        fwht_butterfly(&mut self.amps, true);
    }

    /// Multiplies amplitude j by e^{-i h_j}. The raw-phase variant used by
    /// the pipeline; no reduction mod 2π is applied (e^{-ix} is periodic).
    pub fn apply_phases(&mut self, phases: &[f64]) -> Result<()> {
        if phases.len() != self.amps.len() {
            return Err(Error::ShapeMismatch {
                left: self.amps.len(),
                right: phases.len(),
            });
        }
        for (a, &h) in self.amps.iter_mut().zip(phases) {
            *a *= Complex64::from_polar(1.0, -h);
        }
        Ok(())
    }

    /// Diagonal evolution e^{-iH} for H = Σ h_j |j⟩⟨j|.
    pub fn evolve_diagonal(&mut self, h: &DiagonalHamiltonian) -> Result<()> {
        self.apply_phases(h.coeffs())
    }

    /// |⟨self|other⟩|², in [0, 1] for normalized inputs.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(ip.norm_sqr())
    }

    /// Phases θ_j with amps_j = |amps_j| e^{-iθ_j}, principal value in
    /// (−π, π]. Entries with modulus below `eps` report 0.
    pub fn phases(&self, eps: f64) -> Vec<f64> {
        self.amps
            .iter()
            .map(|a| {
                if a.norm() < eps {
                    0.0
                } else {
                    let theta = -a.arg();
                    // arg is in (−π, π], so −arg lands in [−π, π); fold the
                    // single boundary point back to the principal branch.
                    if theta <= -PI {
                        theta + 2.0 * PI
                    } else {
                        theta
                    }
                }
            })
            .collect()
    }

    /// Binary serialization: 8-byte little-endian length N, then N (re, im)
    /// pairs of little-endian f64.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.amps.len() as u64).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut len_buf = [0u8; 8];
        r.read_exact(&mut len_buf)?;
        let n = u64::from_le_bytes(len_buf);
        if n < 2 || n > (1u64 << MAX_QUBITS) || !n.is_power_of_two() {
            return Err(Error::BadLength(n as usize));
        }
        let mut amps = Vec::with_capacity(n as usize);
        let mut buf = [0u8; 16];
        for _ in 0..n {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Self::from_amplitudes(amps)
    }

    /// Decodes the binary format from a byte slice.
    pub fn from_binary_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = std::io::Cursor::new(bytes);
        let state = Self::read_binary(&mut cursor)?;
        if (cursor.position() as usize) != bytes.len() {
            return Err(Error::Parse {
                line: 0,
                message: "trailing bytes after state vector".into(),
            });
        }
        Ok(state)
    }

    /// CSV export: index, re, im, modulus, phase.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "index,re,im,modulus,phase")?;
        let phases = self.phases(PHASE_EPS);
        for (j, (a, theta)) in self.amps.iter().zip(&phases).enumerate() {
            writeln!(
                w,
                "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                j,
                a.re,
                a.im,
                a.norm(),
                theta
            )?;
        }
        Ok(())
    }
}

/// A diagonal Hamiltonian H = Σ h_j |j⟩⟨j|, stored as raw real phase
/// coefficients in radians. Evolution is invariant under adding 2π to any
/// entry; `canonicalized` reduces to [0, 2π) when a unique representative
/// is needed (serialization, oracle quantization).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    coeffs: Vec<f64>,
    n_qubits: u32,
}

impl DiagonalHamiltonian {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let n_qubits = qubits_for_len(coeffs.len())?;
        Ok(Self { coeffs, n_qubits })
    }

    pub fn zeros(n_qubits: u32) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self {
            coeffs: vec![0.0; 1usize << n_qubits],
            n_qubits,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Same Hamiltonian with every coefficient reduced into [0, 2π).
    pub fn canonicalized(&self) -> Self {
        let tau = 2.0 * PI;
        Self {
            coeffs: self.coeffs.iter().map(|h| h.rem_euclid(tau)).collect(),
            n_qubits: self.n_qubits,
        }
    }

    /// Elementwise sum; evolving by `self` then `other` equals evolving by
    /// the sum.
    pub fn add(&self, other: &DiagonalHamiltonian) -> Result<DiagonalHamiltonian> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        DiagonalHamiltonian::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

pub(crate) fn check_qubits(n_qubits: u32) -> Result<()> {
    if n_qubits < 1 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    Ok(())
}

pub(crate) fn qubits_for_len(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() || len > (1usize << MAX_QUBITS) {
        return Err(Error::BadLength(len));
    }
    Ok(len.trailing_zeros())
}

/// In-place FWHT butterfly over any element type supporting the operations;
/// `normalized` folds 1/√2 into each stage (the unitary Hadamard layer),
/// otherwise the plain ±1 transform is computed.
pub(crate) fn fwht_butterfly<T>(data: &mut [T], normalized: bool)
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        let mut block = 0;
        while block < n {
            for i in block..block + h {
                let a = data[i];
                let b = data[i + h];
                if normalized {
                    data[i] = (a + b) * FRAC_1_SQRT_2;
                    data[i + h] = (a - b) * FRAC_1_SQRT_2;
                } else {
                    data[i] = a + b;
                    data[i + h] = a - b;
                }
            }
            block += h * 2;
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn uniform_amplitudes() {
        let s = StateVector::uniform(1).unwrap();
        assert_close(s.amplitudes()[0].re, 0.70710678, 1e-8);
        assert_close(s.amplitudes()[1].re, 0.70710678, 1e-8);
        let s = StateVector::uniform(2).unwrap();
        for a in s.amplitudes() {
            assert_close(a.re, 0.5, 1e-15);
            assert_eq!(a.im, 0.0);
        }
        let s = StateVector::uniform(3).unwrap();
        for a in s.amplitudes() {
            assert_close(a.re, 0.35355339, 1e-8);
        }
    }

    #[test]
    fn uniform_rejects_out_of_range() {
        assert!(matches!(StateVector::uniform(0), Err(Error::QubitCount(0))));
        assert!(matches!(
            StateVector::uniform(MAX_QUBITS + 1),
            Err(Error::QubitCount(_))
        ));
    }

    #[test]
    fn fwht_of_zero_basis_is_uniform() {
        let mut s = StateVector::zero_basis(2).unwrap();
        s.fwht();
        for a in s.amplitudes() {
            assert_close(a.re, 0.5, 1e-15);
        }
    }

    #[test]
    fn fwht_involution() {
        let mut s = StateVector::zero_basis(3).unwrap();
        s.fwht();
        s.fwht();
        assert_close(s.amplitudes()[0].re, 1.0, 1e-12);
        for a in &s.amplitudes()[1..] {
            assert!(a.norm() < 1e-12);
        }
    }

    #[test]
    fn fwht_matches_dense_kronecker_hadamard() {
        // brute-force oracle: dense H^{⊗n} entries are (±1)^{popcount(i&j)}/√N
        for n in 1..=6u32 {
            let len = 1usize << n;
            let mut amps = Vec::with_capacity(len);
            for j in 0..len {
                amps.push(Complex64::new(
                    ((j * 37 + 11) % 19) as f64 / 19.0 - 0.5,
                    ((j * 53 + 7) % 23) as f64 / 23.0 - 0.5,
                ));
            }
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let mut s = StateVector::from_amplitudes(amps.clone()).unwrap();
            s.fwht();
            let scale = 1.0 / (len as f64).sqrt();
            for i in 0..len {
                let mut expect = Complex64::new(0.0, 0.0);
                for (j, a) in amps.iter().enumerate() {
                    let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    expect += a * sign;
                }
                expect *= scale;
                assert!((s.amplitudes()[i] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evolve_identity_and_pi() {
        let mut s = StateVector::uniform(1).unwrap();
        let h = DiagonalHamiltonian::new(vec![0.0, 0.0]).unwrap();
        s.evolve_diagonal(&h).unwrap();
        assert_close(s.amplitudes()[1].re, 0.70710678, 1e-8);

        let h = DiagonalHamiltonian::new(vec![0.0, PI]).unwrap();
        s.evolve_diagonal(&h).unwrap();
        assert_close(s.amplitudes()[0].re, 0.70710678, 1e-8);
        assert_close(s.amplitudes()[1].re, -0.70710678, 1e-8);
    }

    #[test]
    fn evolve_periodic_mod_2pi() {
        let h1 = DiagonalHamiltonian::new(vec![0.3, 1.7, 2.9, 5.5]).unwrap();
        let h2 = DiagonalHamiltonian::new(
            h1.coeffs().iter().map(|x| x + 2.0 * PI).collect(),
        )
        .unwrap();
        let mut a = StateVector::uniform(2).unwrap();
        let mut b = StateVector::uniform(2).unwrap();
        a.evolve_diagonal(&h1).unwrap();
        b.evolve_diagonal(&h2).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn evolve_shape_mismatch() {
        let mut s = StateVector::uniform(2).unwrap();
        let h = DiagonalHamiltonian::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            s.evolve_diagonal(&h),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn evolve_composes_additively() {
        let h1 = DiagonalHamiltonian::new(vec![0.2, 1.1, -0.4, 2.2]).unwrap();
        let h2 = DiagonalHamiltonian::new(vec![1.0, -0.6, 0.9, 0.1]).unwrap();
        let mut a = StateVector::uniform(2).unwrap();
        a.evolve_diagonal(&h1).unwrap();
        a.evolve_diagonal(&h2).unwrap();
        let mut b = StateVector::uniform(2).unwrap();
        b.evolve_diagonal(&h1.add(&h2).unwrap()).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_basics() {
        let zero = StateVector::zero_basis(2).unwrap();
        let uniform = StateVector::uniform(2).unwrap();
        assert_close(zero.fidelity(&zero).unwrap(), 1.0, 1e-15);
        let mut one = StateVector::zero_basis(1).unwrap();
        one.amplitudes_mut().swap(0, 1);
        let zero1 = StateVector::zero_basis(1).unwrap();
        assert_close(zero1.fidelity(&one).unwrap(), 0.0, 1e-15);
        assert_close(zero.fidelity(&uniform).unwrap(), 0.25, 1e-15);
    }

    #[test]
    fn fidelity_global_phase_invariant() {
        let a = StateVector::uniform(3).unwrap();
        let mut b = a.clone();
        let phase = Complex64::from_polar(1.0, 1.234);
        for x in b.amplitudes_mut() {
            *x *= phase;
        }
        assert_close(a.fidelity(&b).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn phases_extraction() {
        let s = StateVector::uniform(2).unwrap();
        assert!(s.phases(PHASE_EPS).iter().all(|&t| t == 0.0));

        let amps = vec![
            Complex64::from_polar(0.5, -PI / 3.0),
            Complex64::from_polar(0.5, 0.0),
            Complex64::new(1e-15, 0.0),
            Complex64::from_polar(0.5, 0.7),
        ];
        let s = StateVector::from_amplitudes(amps).unwrap();
        let theta = s.phases(1e-12);
        assert_close(theta[0], 1.04719755, 1e-8);
        assert_eq!(theta[2], 0.0);
        assert_close(theta[3], -0.7, 1e-12);
    }

    #[test]
    fn binary_round_trip() {
        let mut s = StateVector::uniform(3).unwrap();
        s.apply_phases(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
            .unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        let back = StateVector::from_binary_bytes(&buf).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn binary_rejects_bad_input() {
        assert!(StateVector::from_binary_bytes(&[1, 2, 3]).is_err());
        // length 3 is not a power of two
        let mut buf = Vec::new();
        buf.extend_from_slice(&3u64.to_le_bytes());
        buf.extend_from_slice(&[0u8; 48]);
        assert!(StateVector::from_binary_bytes(&buf).is_err());
        // huge claimed length must not allocate
        let mut buf = Vec::new();
        buf.extend_from_slice(&(1u64 << 40).to_le_bytes());
        assert!(StateVector::from_binary_bytes(&buf).is_err());
    }

    #[test]
    fn norm_preserved_under_operation_sequences() {
        let mut s = StateVector::uniform(5).unwrap();
        let h = DiagonalHamiltonian::new(
            (0..32).map(|j| (j as f64) * 0.37).collect(),
        )
        .unwrap();
        for _ in 0..20 {
            s.fwht();
            s.evolve_diagonal(&h).unwrap();
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
