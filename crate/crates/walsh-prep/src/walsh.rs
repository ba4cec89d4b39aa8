//! Walsh-basis machinery: transforms between computational-basis diagonals
//! and Walsh coefficients, truncated term-set selection (k-local and
//! topology-restricted), and the fixed-point model of the coefficient
//! oracle's ancilla register.
//!
//! Bit convention, fixed globally: bit 0 of a Walsh index r corresponds to
//! qubit 0, the last tensor factor, so W_r = Z^{r_{n-1}} ⊗ ... ⊗ Z^{r_0}
//! and the diagonal entry at basis state j is (-1)^{popcount(r & j)}.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::statevec::{check_qubits, fwht_butterfly};
use crate::{DiagonalHamiltonian, Error, Result};

/// Sparse set of Walsh coefficients c_r for H = Σ_{r} c_r W_r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    pub n_qubits: u32,
    terms: BTreeMap<usize, f64>,
}

impl WalshSpectrum {
    pub fn new(n_qubits: u32) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(n_qubits: u32, terms: BTreeMap<usize, f64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let len = 1usize << n_qubits;
        if let Some((&r, _)) = terms.iter().find(|(&r, _)| r >= len) {
            return Err(Error::WalshIndex { index: r, n_qubits });
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn set(&mut self, r: usize, c: f64) -> Result<()> {
        if r >= (1usize << self.n_qubits) {
            return Err(Error::WalshIndex {
                index: r,
                n_qubits: self.n_qubits,
            });
        }
        self.terms.insert(r, c);
        Ok(())
    }

    pub fn get(&self, r: usize) -> f64 {
        self.terms.get(&r).copied().unwrap_or(0.0)
    }

    /// Iterates (r, c_r) in ascending r.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms.iter().map(|(&r, &c)| (r, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// JSON wire format: {"n_qubits": n, "terms": [{"r": .., "c": ..}, ..]}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n_qubits": self.n_qubits,
            "terms": self.iter().map(|(r, c)| serde_json::json!({"r": r, "c": c})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Term {
            r: usize,
            c: f64,
        }
        #[derive(Deserialize)]
        struct Wire {
            n_qubits: u32,
            terms: Vec<Term>,
        }
        let wire: Wire = serde_json::from_str(s)?;
        let mut terms = BTreeMap::new();
        for t in wire.terms {
            if !t.c.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite coefficient for r={}",
                    t.r
                )));
            }
            terms.insert(t.r, t.c);
        }
        Self::from_terms(wire.n_qubits, terms)
    }
}

/// How a trainable term set was selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SelectionKind {
    /// All r in [1, N). Index 0 is always excluded: W_0 contributes only a
    /// global phase and would add a flat direction to the optimization.
    Full,
    KLocal { k: u32 },
    Topology { graph: TopologyGraph },
}

/// The ordered Walsh index set ℛ the optimizer trains over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSet {
    pub n_qubits: u32,
    pub selection: SelectionKind,
    indices: Vec<usize>,
}

impl TermSet {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Pairs this term set's indices with a coefficient slice of equal
    /// length, producing a spectrum.
    pub fn spectrum(&self, coeffs: &[f64]) -> Result<WalshSpectrum> {
        if coeffs.len() != self.indices.len() {
            return Err(Error::ShapeMismatch {
                left: self.indices.len(),
                right: coeffs.len(),
            });
        }
        let terms = self
            .indices
            .iter()
            .zip(coeffs)
            .map(|(&r, &c)| (r, c))
            .collect();
        WalshSpectrum::from_terms(self.n_qubits, terms)
    }
}

/// Undirected qubit connectivity graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyGraph {
    pub n_qubits: u32,
    edges: Vec<(u32, u32)>,
}

impl TopologyGraph {
    /// Edges are stored with the smaller endpoint first, sorted, deduplicated.
    pub fn new(n_qubits: u32, edges: Vec<(u32, u32)>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut normalized: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Topology(format!("self-loop at qubit {a}")));
            }
            if a >= n_qubits || b >= n_qubits {
                return Err(Error::Topology(format!(
                    "edge ({a}, {b}) outside qubit range 0..{n_qubits}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        if normalized.len() != before {
            return Err(Error::Topology("duplicate edge".into()));
        }
        Ok(Self {
            n_qubits,
            edges: normalized,
        })
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges.binary_search(&e).is_ok()
    }
}

/// Ladder connectivity: qubits 0..n/2 form rail A, n/2..n rail B, rung i
/// connects (i, i + n/2). For n=8 this gives 10 edges.
pub fn ladder_graph(n_qubits: u32) -> Result<TopologyGraph> {
    if n_qubits < 4 || n_qubits % 2 != 0 {
        return Err(Error::Topology(format!(
            "ladder topology needs an even qubit count >= 4, got {n_qubits}"
        )));
    }
    let half = n_qubits / 2;
    let mut edges = Vec::new();
    for i in 0..half - 1 {
        edges.push((i, i + 1));
        edges.push((half + i, half + i + 1));
    }
    for i in 0..half {
        edges.push((i, i + half));
    }
    TopologyGraph::new(n_qubits, edges)
}

/// Builds the trainable index set for the given selection. Deterministic
/// ascending order; index 0 is never included.
pub fn select_terms(n_qubits: u32, kind: SelectionKind) -> Result<TermSet> {
    check_qubits(n_qubits)?;
    let len = 1usize << n_qubits;
    let indices: Vec<usize> = match &kind {
        SelectionKind::Full => (1..len).collect(),
        SelectionKind::KLocal { k } => {
            if *k < 1 {
                return Err(Error::Validation("k_local requires k >= 1".into()));
            }
            (1..len)
                .filter(|r| r.count_ones() <= *k)
                .collect()
        }
        SelectionKind::Topology { graph } => {
            if graph.n_qubits != n_qubits {
                return Err(Error::Topology(format!(
                    "graph is over {} qubits, term set over {n_qubits}",
                    graph.n_qubits
                )));
            }
            (1..len)
                .filter(|&r| match r.count_ones() {
                    1 => true,
                    2 => {
                        let a = r.trailing_zeros();
                        let b = (usize::BITS - 1) - r.leading_zeros();
                        graph.has_edge(a, b)
                    }
                    _ => false,
                })
                .collect()
        }
    };
    Ok(TermSet {
        n_qubits,
        selection: kind,
        indices,
    })
}

/// Full Walsh spectrum of a diagonal: c_r = (1/N) Σ_j (-1)^{r·j} h_j,
/// computed with an unnormalized FWHT and a single 1/N scaling.
pub fn walsh_coefficients(h: &DiagonalHamiltonian) -> WalshSpectrum {
    let mut data = h.coeffs().to_vec();
    fwht_butterfly(&mut data, false);
    let scale = 1.0 / data.len() as f64;
    let terms = data
        .into_iter()
        .enumerate()
        .map(|(r, v)| (r, v * scale))
        .collect();
    WalshSpectrum {
        n_qubits: h.n_qubits(),
        terms,
    }
}

// Sparse expansion is O(|terms|·N); beyond this many terms the dense FWHT
// route is cheaper.
fn sparse_dense_crossover(n_qubits: u32) -> usize {
    4 * n_qubits as usize
}

/// Expands a spectrum back to the computational-basis diagonal
/// h_j = Σ_{r∈terms} c_r (-1)^{r·j}.
pub fn expand_diagonal(spec: &WalshSpectrum) -> DiagonalHamiltonian {
    let len = 1usize << spec.n_qubits;
    let mut h = vec![0.0f64; len];
    if spec.terms.len() <= sparse_dense_crossover(spec.n_qubits) {
        for (&r, &c) in &spec.terms {
            for (j, hj) in h.iter_mut().enumerate() {
                if (r & j).count_ones() % 2 == 0 {
                    *hj += c;
                } else {
                    *hj -= c;
                }
            }
        }
    } else {
        for (&r, &c) in &spec.terms {
            h[r] = c;
        }
        // unnormalized FWHT of the coefficient vector is exactly the
        // synthesis sum Σ_r c_r (-1)^{r·j}
        fwht_butterfly(&mut h, false);
    }
    DiagonalHamiltonian::new(h).expect("length is a power of two by construction")
}

/// Models the oracle's fixed-point ancilla register: each coefficient is
/// reduced mod 2π, then rounded to the nearest multiple of 2^-m (3 integer
/// bits + m fractional bits cover [0, 2π)).
pub fn quantize_hamiltonian(h: &DiagonalHamiltonian, m: u32) -> DiagonalHamiltonian {
    let step = (2.0f64).powi(-(m as i32));
    let coeffs = h
        .coeffs()
        .iter()
        .map(|x| (x.rem_euclid(2.0 * PI) / step).round() * step)
        .collect();
    DiagonalHamiltonian::new(coeffs).expect("length unchanged")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_diagonal_is_pure_dc() {
        let h = DiagonalHamiltonian::new(vec![1.3; 8]).unwrap();
        let spec = walsh_coefficients(&h);
        assert!((spec.get(0) - 1.3).abs() < 1e-15);
        for r in 1..8 {
            assert!(spec.get(r).abs() < 1e-15);
        }
    }

    #[test]
    fn four_point_spectrum_by_hand() {
        let h = DiagonalHamiltonian::new(vec![0.0, PI, PI, 0.0]).unwrap();
        let spec = walsh_coefficients(&h);
        assert!((spec.get(0) - PI / 2.0).abs() < 1e-15);
        assert!((spec.get(3) + PI / 2.0).abs() < 1e-15);
        assert!(spec.get(1).abs() < 1e-15);
        assert!(spec.get(2).abs() < 1e-15);
    }

    #[test]
    fn walsh_function_diagonal_has_unit_coefficient() {
        let r = 5usize;
        let h = DiagonalHamiltonian::new(
            (0..8)
                .map(|j| if (r & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
        )
        .unwrap();
        let spec = walsh_coefficients(&h);
        for q in 0..8 {
            let expect = if q == r { 1.0 } else { 0.0 };
            assert!((spec.get(q) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn expand_single_terms() {
        let mut spec = WalshSpectrum::new(2).unwrap();
        spec.set(0, 0.7).unwrap();
        let h = expand_diagonal(&spec);
        assert!(h.coeffs().iter().all(|&x| (x - 0.7).abs() < 1e-15));

        let mut spec = WalshSpectrum::new(2).unwrap();
        spec.set(3, 1.0).unwrap();
        let h = expand_diagonal(&spec);
        assert_eq!(h.coeffs(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn transform_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2u32, 5, 10] {
            let len = 1usize << n;
            let h = DiagonalHamiltonian::new(
                (0..len).map(|_| rng.gen_range(-4.0..4.0)).collect(),
            )
            .unwrap();
            let spec = walsh_coefficients(&h);
            let back = expand_diagonal(&spec);
            for (a, b) in h.coeffs().iter().zip(back.coeffs()) {
                assert!((a - b).abs() < 1e-12);
            }
            let spec2 = walsh_coefficients(&back);
            for r in 0..len {
                assert!((spec.get(r) - spec2.get(r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expand_matches_brute_force_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6u32 {
            let set = select_terms(n, SelectionKind::KLocal { k: 2 }).unwrap();
            let coeffs: Vec<f64> = (0..set.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let spec = set.spectrum(&coeffs).unwrap();
            let h = expand_diagonal(&spec);
            for j in 0..(1usize << n) {
                let mut expect = 0.0;
                for (r, c) in spec.iter() {
                    expect += if (r & j).count_ones() % 2 == 0 { c } else { -c };
                }
                assert!((h.coeffs()[j] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=8u32 {
            let len = 1usize << n;
            let h = DiagonalHamiltonian::new(
                (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            )
            .unwrap();
            let spec = walsh_coefficients(&h);
            let lhs: f64 = h.coeffs().iter().map(|x| x * x).sum();
            let rhs: f64 = len as f64 * spec.iter().map(|(_, c)| c * c).sum::<f64>();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
        }
    }

    #[test]
    fn walsh_orthogonality_integer_brute_force() {
        for n in 1..=6u32 {
            let len = 1usize << n;
            for r in 0..len {
                for s in 0..len {
                    let mut dot: i64 = 0;
                    for j in 0..len {
                        let a = if (r & j).count_ones() % 2 == 0 { 1i64 } else { -1 };
                        let b = if (s & j).count_ones() % 2 == 0 { 1i64 } else { -1 };
                        dot += a * b;
                    }
                    assert_eq!(dot, if r == s { len as i64 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn select_terms_cardinalities() {
        for n in 2..=12u32 {
            let set = select_terms(n, SelectionKind::KLocal { k: 2 }).unwrap();
            let expect = n as usize + (n as usize * (n as usize - 1)) / 2;
            assert_eq!(set.len(), expect);
        }
        let set = select_terms(8, SelectionKind::KLocal { k: 2 }).unwrap();
        assert_eq!(set.len(), 36);
        let set = select_terms(2, SelectionKind::KLocal { k: 1 }).unwrap();
        assert_eq!(set.indices(), &[1, 2]);
    }

    #[test]
    fn select_terms_excludes_identity_and_sorts() {
        let set = select_terms(4, SelectionKind::Full).unwrap();
        assert_eq!(set.len(), 15);
        assert_eq!(set.indices()[0], 1);
        assert!(set.indices().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ladder_edge_counts() {
        assert_eq!(ladder_graph(8).unwrap().edges().len(), 10);
        assert_eq!(ladder_graph(4).unwrap().edges().len(), 4);
        assert_eq!(ladder_graph(6).unwrap().edges().len(), 7);
        assert!(ladder_graph(5).is_err());
        assert!(ladder_graph(2).is_err());
    }

    #[test]
    fn hardware_efficient_term_count() {
        let graph = ladder_graph(8).unwrap();
        let set = select_terms(8, SelectionKind::Topology { graph }).unwrap();
        assert_eq!(set.len(), 18);
    }

    #[test]
    fn topology_validation() {
        assert!(TopologyGraph::new(4, vec![(0, 0)]).is_err());
        assert!(TopologyGraph::new(4, vec![(0, 5)]).is_err());
        assert!(TopologyGraph::new(4, vec![(0, 1), (1, 0)]).is_err());
        let graph = TopologyGraph::new(4, vec![(2, 0)]).unwrap();
        assert!(graph.has_edge(0, 2));
        assert!(!graph.has_edge(0, 1));
        let mismatched = select_terms(6, SelectionKind::Topology { graph });
        assert!(mismatched.is_err());
    }

    #[test]
    fn quantization_grid() {
        let h = DiagonalHamiltonian::new(vec![PI, 0.0]).unwrap();
        let q = quantize_hamiltonian(&h, 10);
        assert!((q.coeffs()[0] - 3.1416015625).abs() < 1e-15);

        let h = DiagonalHamiltonian::new(vec![0.1, 1.9, 3.7, 6.1]).unwrap();
        let q = quantize_hamiltonian(&h, 0);
        for x in q.coeffs() {
            assert_eq!(x.fract(), 0.0);
            assert!((0.0..=6.0).contains(x));
        }
    }

    #[test]
    fn quantization_idempotent() {
        let h = DiagonalHamiltonian::new(vec![0.123, 2.456, 5.789, 1.234]).unwrap();
        let q1 = quantize_hamiltonian(&h, 8);
        let q2 = quantize_hamiltonian(&q1, 8);
        assert_eq!(q1.coeffs(), q2.coeffs());
    }

    #[test]
    fn spectrum_json_round_trip() {
        let mut spec = WalshSpectrum::new(3).unwrap();
        spec.set(1, 0.25).unwrap();
        spec.set(6, -1.5).unwrap();
        let json = spec.to_json().to_string();
        let back = WalshSpectrum::from_json_str(&json).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn spectrum_json_rejects_bad_input() {
        assert!(WalshSpectrum::from_json_str("{}").is_err());
        assert!(WalshSpectrum::from_json_str(
            r#"{"n_qubits": 2, "terms": [{"r": 9, "c": 1.0}]}"#
        )
        .is_err());
    }
}
