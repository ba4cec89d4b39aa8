//! Differentiable forward map of the interleaved Hadamard/phase-evolution
//! circuit, in both the full-parametrization regime (method 1) and the
//! Walsh-truncated regime (method 2), plus method 1's analytic phase
//! correction.
//!
//! Composition, fixed by convention and asserted against hand-computed
//! 2-qubit cases: with two layers the raw circuit output is
//! F·D₂·F·D₁·F·|0...0⟩ where F is the normalized Hadamard layer and
//! D_k = diag(e^{-i h_{k,j}}). Method 2 applies a third trained diagonal
//! evolution after the final Hadamard layer, with no Hadamard after it.

use serde::{Deserialize, Serialize};

use crate::statevec::PHASE_EPS;
use crate::walsh::expand_diagonal;
use crate::{DiagonalHamiltonian, Error, Result, StateVector, TermSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// All N diagonal entries per layer are trainable; residual phases are
    /// canceled analytically after training.
    FullOracle,
    /// Only Walsh coefficients over a term set are trainable, including the
    /// final phase-erasing layer.
    WalshTruncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub n_qubits: u32,
    pub method: Method,
    /// Number of trained Hadamard+diagonal blocks before readout; 1 or 2.
    pub layers: u32,
    /// Required for `WalshTruncated`.
    pub term_set: Option<TermSet>,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        crate::statevec::check_qubits(self.n_qubits)?;
        if !(1..=2).contains(&self.layers) {
            return Err(Error::Validation(format!(
                "layers must be 1 or 2, got {}",
                self.layers
            )));
        }
        match self.method {
            Method::FullOracle => Ok(()),
            Method::WalshTruncated => match &self.term_set {
                Some(set) if !set.is_empty() => {
                    if set.n_qubits != self.n_qubits {
                        return Err(Error::Validation(format!(
                            "term set is over {} qubits, pipeline over {}",
                            set.n_qubits, self.n_qubits
                        )));
                    }
                    Ok(())
                }
                _ => Err(Error::Validation(
                    "walsh_truncated requires a nonempty term set".into(),
                )),
            },
        }
    }

    /// Number of trainable coefficients per diagonal layer.
    pub fn params_per_layer(&self) -> usize {
        match self.method {
            Method::FullOracle => 1usize << self.n_qubits,
            Method::WalshTruncated => self.term_set.as_ref().map_or(0, |s| s.len()),
        }
    }

    /// Number of diagonal layers carrying trainable parameters. Method 2
    /// trains the final phase-erasing evolution as an extra layer.
    pub fn trained_layers(&self) -> usize {
        match self.method {
            Method::FullOracle => self.layers as usize,
            Method::WalshTruncated => self.layers as usize + 1,
        }
    }

    pub fn param_len(&self) -> usize {
        self.trained_layers() * self.params_per_layer()
    }
}

/// Flat vector of all trainable coefficients, laid out as contiguous
/// per-layer blocks in circuit order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    values: Vec<f64>,
    per_layer: usize,
}

impl ParameterVector {
    pub fn zeros(config: &PipelineConfig) -> ParameterVector {
        ParameterVector {
            values: vec![0.0; config.param_len()],
            per_layer: config.params_per_layer(),
        }
    }

    pub fn from_values(config: &PipelineConfig, values: Vec<f64>) -> Result<ParameterVector> {
        if values.len() != config.param_len() {
            return Err(Error::LayoutMismatch {
                got: values.len(),
                expected: config.param_len(),
            });
        }
        Ok(ParameterVector {
            values,
            per_layer: config.params_per_layer(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_layers(&self) -> usize {
        self.values.len() / self.per_layer
    }

    /// Coefficients of diagonal layer `k` (0-based, circuit order).
    pub fn layer(&self, k: usize) -> &[f64] {
        &self.values[k * self.per_layer..(k + 1) * self.per_layer]
    }

    fn check(&self, config: &PipelineConfig) -> Result<()> {
        if self.values.len() != config.param_len() || self.per_layer != config.params_per_layer()
        {
            return Err(Error::LayoutMismatch {
                got: self.values.len(),
                expected: config.param_len(),
            });
        }
        Ok(())
    }
}

/// The diagonal phases layer `k` applies, expanded to length N.
pub(crate) fn layer_phases(
    params: &ParameterVector,
    config: &PipelineConfig,
    k: usize,
) -> Vec<f64> {
    match config.method {
        Method::FullOracle => params.layer(k).to_vec(),
        Method::WalshTruncated => {
            let set = config.term_set.as_ref().expect("validated");
            let spec = set
                .spectrum(params.layer(k))
                .expect("layer length equals term count");
            expand_diagonal(&spec).coeffs().to_vec()
        }
    }
}

/// Runs the circuit. For method 2, records each diagonal layer's output in
/// `taps` when provided (needed by the reverse pass in `train`).
pub(crate) fn forward_with_taps(
    params: &ParameterVector,
    config: &PipelineConfig,
    mut taps: Option<&mut Vec<StateVector>>,
) -> Result<StateVector> {
    config.validate()?;
    params.check(config)?;
    let mut state = StateVector::zero_basis(config.n_qubits)?;
    state.fwht();
    for k in 0..config.layers as usize {
        state.apply_phases(&layer_phases(params, config, k))?;
        if let Some(taps) = taps.as_deref_mut() {
            taps.push(state.clone());
        }
        state.fwht();
    }
    if config.method == Method::WalshTruncated {
        state.apply_phases(&layer_phases(params, config, config.layers as usize))?;
        if let Some(taps) = taps.as_deref_mut() {
            taps.push(state.clone());
        }
    }
    Ok(state)
}

/// Circuit output before any phase correction.
pub fn forward(params: &ParameterVector, config: &PipelineConfig) -> Result<StateVector> {
    forward_with_taps(params, config, None)
}

/// The analytic phase-erasing Hamiltonian H₃ with h₃_j = -θ_j; evolving the
/// state by it leaves all amplitudes real nonnegative (moduli unchanged).
pub fn phase_correction(state: &StateVector, eps: f64) -> DiagonalHamiltonian {
    let coeffs = state.phases(eps).iter().map(|t| -t).collect();
    DiagonalHamiltonian::new(coeffs).expect("state length is a power of two")
}

/// Method 1's fully prepared state: forward pass, then the correcting
/// evolution derived from the output's residual phases.
pub fn prepared_state_method1(
    params: &ParameterVector,
    config: &PipelineConfig,
) -> Result<StateVector> {
    if config.method != Method::FullOracle {
        return Err(Error::Validation(
            "analytic phase correction applies to the full-oracle method only".into(),
        ));
    }
    let mut state = forward(params, config)?;
    let h3 = phase_correction(&state, PHASE_EPS);
    state.evolve_diagonal(&h3)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::{select_terms, walsh_coefficients, SelectionKind};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn full_config(n_qubits: u32, layers: u32) -> PipelineConfig {
        PipelineConfig {
            n_qubits,
            method: Method::FullOracle,
            layers,
            term_set: None,
        }
    }

    fn random_params(config: &PipelineConfig, seed: u64) -> ParameterVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ParameterVector::from_values(
            config,
            (0..config.param_len()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_params_collapse_to_uniform() {
        let config = full_config(2, 2);
        let out = forward(&ParameterVector::zeros(&config), &config).unwrap();
        for a in out.amplitudes() {
            assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_pi_layer_prepares_one() {
        // F·D₁·F·|0⟩ with h₁=(0,π): by hand this is |1⟩.
        let config = full_config(1, 1);
        let params = ParameterVector::from_values(&config, vec![0.0, PI]).unwrap();
        let out = forward(&params, &config).unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-12);
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_is_unit_norm() {
        for n in [2u32, 5, 10] {
            let config = full_config(n, 2);
            let out = forward(&random_params(&config, n as u64), &config).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn layout_mismatch_is_rejected() {
        let config = full_config(2, 2);
        let other = full_config(2, 1);
        let params = ParameterVector::zeros(&other);
        assert!(matches!(
            forward(&params, &config),
            Err(Error::LayoutMismatch { .. })
        ));
    }

    #[test]
    fn walsh_requires_term_set() {
        let config = PipelineConfig {
            n_qubits: 3,
            method: Method::WalshTruncated,
            layers: 2,
            term_set: None,
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn walsh_full_term_set_matches_full_oracle() {
        // With all r in [1,N) trainable, method 2 must reproduce method 1
        // when the c coefficients are the Walsh transform of the h arrays
        // (and the extra third layer is zero). W_0 is excluded from the term
        // set, so compare h arrays with zero mean (c_0 = 0).
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 2..=6u32 {
            let len = 1usize << n;
            let full = full_config(n, 2);
            let mut h_values = Vec::new();
            for _ in 0..2 {
                let mut layer: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let mean = layer.iter().sum::<f64>() / len as f64;
                for v in &mut layer {
                    *v -= mean;
                }
                h_values.extend(layer);
            }
            let h_params = ParameterVector::from_values(&full, h_values).unwrap();

            let set = select_terms(n, SelectionKind::Full).unwrap();
            let mut c_values = Vec::new();
            for k in 0..2 {
                let h = DiagonalHamiltonian::new(h_params.layer(k).to_vec()).unwrap();
                let spec = walsh_coefficients(&h);
                c_values.extend(set.indices().iter().map(|&r| spec.get(r)));
            }
            c_values.extend(std::iter::repeat(0.0).take(set.len()));
            let walsh_config = PipelineConfig {
                n_qubits: n,
                method: Method::WalshTruncated,
                layers: 2,
                term_set: Some(set),
            };
            let c_params = ParameterVector::from_values(&walsh_config, c_values).unwrap();

            let a = forward(&h_params, &full).unwrap();
            let b = forward(&c_params, &walsh_config).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn phase_correction_zeroes_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=10u32 {
            let len = 1usize << n;
            let mut moduli: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
            let norm: f64 = moduli.iter().map(|y| y * y).sum::<f64>().sqrt();
            for y in &mut moduli {
                *y /= norm;
            }
            let amps = moduli
                .iter()
                .map(|&y| Complex64::from_polar(y, -rng.gen_range(-PI..PI)))
                .collect();
            let mut state = StateVector::from_amplitudes(amps).unwrap();
            let h3 = phase_correction(&state, PHASE_EPS);
            state.evolve_diagonal(&h3).unwrap();
            for a in state.amplitudes() {
                assert!(a.im.abs() < 1e-10);
                assert!(a.re >= -1e-10);
            }
        }
    }

    #[test]
    fn phase_correction_real_state_is_identity() {
        let state = StateVector::uniform(3).unwrap();
        let h3 = phase_correction(&state, PHASE_EPS);
        assert!(h3.coeffs().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn phase_correction_thresholds_zero_amplitudes() {
        let amps = vec![
            Complex64::from_polar(1.0, 0.5),
            Complex64::new(1e-14, 1e-14),
        ];
        let state = StateVector::from_amplitudes(amps).unwrap();
        let h3 = phase_correction(&state, PHASE_EPS);
        assert_eq!(h3.coeffs()[1], 0.0);
    }

    #[test]
    fn prepared_state_is_real_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..100 {
            let n = rng.gen_range(2..=8u32);
            let config = full_config(n, 2);
            let params = random_params(&config, trial);
            let raw = forward(&params, &config).unwrap();
            let prepared = prepared_state_method1(&params, &config).unwrap();
            for (p, r) in prepared.amplitudes().iter().zip(raw.amplitudes()) {
                assert!(p.im.abs() <= 1e-10);
                assert!(p.re >= -1e-10);
                assert!((p.norm() - r.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn prepared_state_rejects_walsh_method() {
        let set = select_terms(2, SelectionKind::Full).unwrap();
        let config = PipelineConfig {
            n_qubits: 2,
            method: Method::WalshTruncated,
            layers: 1,
            term_set: Some(set),
        };
        let params = ParameterVector::zeros(&config);
        assert!(prepared_state_method1(&params, &config).is_err());
    }
}
