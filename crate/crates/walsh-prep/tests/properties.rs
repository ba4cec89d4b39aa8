//! Randomized property tests for the numerical core.

use std::collections::BTreeMap;

use proptest::collection::vec;
use proptest::prelude::*;

use walsh_prep::pipeline::{forward, Method, ParameterVector, PipelineConfig};
use walsh_prep::walsh::{expand_diagonal, quantize_hamiltonian, select_terms, walsh_coefficients};
use walsh_prep::{DiagonalHamiltonian, SelectionKind, StateVector, WalshSpectrum};

fn full_config(n_qubits: u32, layers: u32) -> PipelineConfig {
    PipelineConfig {
        n_qubits,
        method: Method::FullOracle,
        layers,
        term_set: None,
    }
}

proptest! {
    #[test]
    fn forward_preserves_norm(
        n in 1u32..=6,
        layers in 1u32..=2,
        raw in vec(-10.0f64..10.0, 0..128),
    ) {
        let config = full_config(n, layers);
        let mut values = raw;
        values.resize(config.param_len(), 0.0);
        let params = ParameterVector::from_values(&config, values).unwrap();
        let state = forward(&params, &config).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn walsh_transform_round_trips(
        n in 1u32..=6,
        raw in vec(-20.0f64..20.0, 0..64),
    ) {
        let len = 1usize << n;
        let mut coeffs = raw;
        coeffs.resize(len, 0.0);
        let h = DiagonalHamiltonian::new(coeffs.clone()).unwrap();
        let back = expand_diagonal(&walsh_coefficients(&h));
        for (a, b) in coeffs.iter().zip(back.coeffs()) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn quantization_is_idempotent_and_bounded(
        n in 1u32..=6,
        m in 4u32..=16,
        raw in vec(-50.0f64..50.0, 0..64),
    ) {
        let len = 1usize << n;
        let mut coeffs = raw;
        coeffs.resize(len, 0.0);
        let h = DiagonalHamiltonian::new(coeffs).unwrap();
        let q = quantize_hamiltonian(&h, m);
        let qq = quantize_hamiltonian(&q, m);
        prop_assert_eq!(q.coeffs(), qq.coeffs());
        let grid = 2.0f64.powi(-(m as i32));
        for (orig, quant) in h.coeffs().iter().zip(q.coeffs()) {
            let canonical = orig.rem_euclid(2.0 * std::f64::consts::PI);
            prop_assert!((canonical - quant).abs() <= grid / 2.0 + 1e-12);
        }
    }

    #[test]
    fn amplitude_text_round_trips(values in vec(0.0f64..100.0, 2..64)) {
        // keep to power-of-two lengths with at least one nonzero entry
        let len = values.len().next_power_of_two() / 2;
        prop_assume!(len >= 2);
        let mut values = values[..len].to_vec();
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut values {
            *v /= norm;
        }
        let state = StateVector::from_real(&values).unwrap();
        let mut buf = Vec::new();
        walsh_prep::datasets::save_amplitudes(&state, &mut buf).unwrap();
        let back = walsh_prep::datasets::parse_amplitudes(std::str::from_utf8(&buf).unwrap())
            .unwrap();
        for (a, b) in state.amplitudes().iter().zip(back.amplitudes()) {
            prop_assert!((a.re - b.re).abs() < 1e-12);
        }
    }

    #[test]
    fn state_binary_round_trips(values in vec(-5.0f64..5.0, 2..64)) {
        let len = values.len().next_power_of_two() / 2;
        prop_assume!(len >= 2);
        prop_assume!(values[..len].iter().any(|&v| v != 0.0));
        let norm = values[..len].iter().map(|v| v * v).sum::<f64>().sqrt();
        let normalized: Vec<f64> = values[..len].iter().map(|v| v / norm).collect();
        let state = StateVector::from_real(&normalized).unwrap();
        let mut buf = Vec::new();
        state.write_binary(&mut buf).unwrap();
        let back = StateVector::from_binary_bytes(&buf).unwrap();
        prop_assert_eq!(state.amplitudes(), back.amplitudes());
    }

    #[test]
    fn spectrum_json_round_trips(
        n in 1u32..=8,
        pairs in vec((0usize..256, -10.0f64..10.0), 0..16),
    ) {
        let len = 1usize << n;
        let terms: BTreeMap<usize, f64> =
            pairs.into_iter().map(|(r, c)| (r % len, c)).collect();
        let spectrum = WalshSpectrum::from_terms(n, terms).unwrap();
        let back = WalshSpectrum::from_json_str(&spectrum.to_json().to_string()).unwrap();
        prop_assert_eq!(spectrum.n_qubits, back.n_qubits);
        for (r, c) in spectrum.iter() {
            prop_assert_eq!(c, back.get(r));
        }
    }

    #[test]
    fn term_sets_exclude_identity_and_stay_sorted(n in 1u32..=8, k in 1u32..=3) {
        let set = select_terms(n, SelectionKind::KLocal { k }).unwrap();
        let indices = set.indices();
        prop_assert!(!indices.contains(&0));
        prop_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(indices.iter().all(|&r| (r as u32).count_ones() <= k));
    }
}
