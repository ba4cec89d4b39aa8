//! Loss functions, exact analytic gradients via a reverse (adjoint) pass
//! through the Hadamard/diagonal layers, the optimizer, and the training
//! loop.
//!
//! The reverse pass uses the Wirtinger cotangent g_j = ∂L/∂ψ_j*. For a real
//! loss, dL = 2·Re Σ conj(g_j)·dψ_j; pulling g back through a unitary U is
//! g ← U†g, and the gradient with respect to a diagonal layer's coefficient
//! h_j is 2·Im(ψ_j·conj(g_j)) evaluated at that layer's output. One forward
//! plus one reverse pass, O(layers·N log N) — never N finite differences.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::datasets::{random_state, RandomKind};
use crate::pipeline::{
    forward_with_taps, layer_phases, prepared_state_method1, Method, ParameterVector,
    PipelineConfig,
};
use crate::statevec::{fwht_butterfly, PHASE_EPS};
use crate::walsh::walsh_coefficients;
use crate::{DiagonalHamiltonian, Error, Result, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LossKind {
    /// Σ (|ψ_j| − x_j)²: the amplitude-only training objective.
    AmplitudeSse,
    /// Σ (|ψ_j| − x_j)² + w·θ_j², with θ the thresholded principal phase:
    /// the combined amplitude-plus-phase objective for the oracle-free
    /// regime.
    AmplitudeSsePlusPhase { weight: f64 },
    /// Σ |ψ_j − x_j|²: smooth surrogate that drives amplitudes and phases
    /// jointly; the default (no |·| or arg kinks).
    ComplexSse,
}

impl Default for LossKind {
    fn default() -> Self {
        LossKind::ComplexSse
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OptimizerKind {
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
    GradientDescent,
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitKind {
    /// i.i.d. zero-mean normal draws; zero init is a symmetric saddle, so a
    /// small spread is the default.
    Normal { sigma: f64 },
    Zeros,
}

impl Default for InitKind {
    fn default() -> Self {
        InitKind::Normal { sigma: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub loss: LossKind,
    pub init: InitKind,
    pub log_every: usize,
    /// Early stop once the loss drops to this value.
    pub target_loss: Option<f64>,
    /// Epochs trained on the amplitude-only objective before switching to
    /// the configured loss. At the switch the last diagonal layer is seeded
    /// with the Walsh projection of the residual phases, so the joint
    /// objective starts from a state whose amplitudes are already fit.
    #[serde(default)]
    pub phase_warmup: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            learning_rate: 0.05,
            optimizer: OptimizerKind::default(),
            seed: 0,
            loss: LossKind::default(),
            init: InitKind::default(),
            log_every: 1,
            target_loss: Some(1e-14),
            phase_warmup: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Validation("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Validation("learning_rate must be > 0".into()));
        }
        if let LossKind::AmplitudeSsePlusPhase { weight } = self.loss {
            if !(weight > 0.0) {
                return Err(Error::Validation("phase weight must be > 0".into()));
            }
        }
        if self.log_every < 1 {
            return Err(Error::Validation("log_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Persisted record of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub loss_trace: Vec<(usize, f64)>,
    pub final_params: ParameterVector,
    pub final_loss: f64,
    pub final_infidelity: f64,
    pub wall_clock_seconds: f64,
    pub seed: u64,
}

fn validate_target(target: &StateVector, config: &PipelineConfig) -> Result<()> {
    if target.n_qubits() != config.n_qubits {
        return Err(Error::ShapeMismatch {
            left: target.len(),
            right: 1usize << config.n_qubits,
        });
    }
    if (target.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(Error::Validation("target is not unit norm".into()));
    }
    if target
        .amplitudes()
        .iter()
        .any(|a| a.im != 0.0 || a.re < 0.0)
    {
        return Err(Error::Validation(
            "target must be real nonnegative amplitude data".into(),
        ));
    }
    Ok(())
}

fn loss_value(psi: &StateVector, target: &StateVector, kind: LossKind) -> f64 {
    let mut total = 0.0;
    for (p, t) in psi.amplitudes().iter().zip(target.amplitudes()) {
        let x = t.re;
        match kind {
            LossKind::AmplitudeSse => {
                let d = p.norm() - x;
                total += d * d;
            }
            LossKind::AmplitudeSsePlusPhase { weight } => {
                let d = p.norm() - x;
                total += d * d;
                if p.norm() >= PHASE_EPS {
                    let mut theta = -p.arg();
                    if theta <= -PI {
                        theta += 2.0 * PI;
                    }
                    total += weight * theta * theta;
                }
            }
            LossKind::ComplexSse => {
                total += (p - Complex64::new(x, 0.0)).norm_sqr();
            }
        }
    }
    total
}

/// ∂L/∂ψ* elementwise. Amplitude and phase terms are thresholded at
/// `PHASE_EPS` (subgradient 0 at the kink/wrap points).
fn loss_cotangent(psi: &StateVector, target: &StateVector, kind: LossKind) -> Vec<Complex64> {
    psi.amplitudes()
        .iter()
        .zip(target.amplitudes())
        .map(|(p, t)| {
            let x = t.re;
            match kind {
                LossKind::AmplitudeSse => {
                    let y = p.norm();
                    if y < PHASE_EPS {
                        Complex64::new(0.0, 0.0)
                    } else {
                        p * ((y - x) / y)
                    }
                }
                LossKind::AmplitudeSsePlusPhase { weight } => {
                    let y = p.norm();
                    if y < PHASE_EPS {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let mut theta = -p.arg();
                        if theta <= -PI {
                            theta += 2.0 * PI;
                        }
                        p * ((y - x) / y)
                            + Complex64::new(0.0, -weight * theta) / p.conj()
                    }
                }
                LossKind::ComplexSse => p - Complex64::new(x, 0.0),
            }
        })
        .collect()
}

/// Loss of the circuit output against the target.
pub fn loss(
    params: &ParameterVector,
    target: &StateVector,
    config: &PipelineConfig,
    kind: LossKind,
) -> Result<f64> {
    validate_target(target, config)?;
    let psi = forward_with_taps(params, config, None)?;
    Ok(loss_value(&psi, target, kind))
}

/// One forward pass plus one reverse pass; returns (loss, gradient) with the
/// gradient laid out exactly like `params`.
pub fn loss_and_gradient(
    params: &ParameterVector,
    target: &StateVector,
    config: &PipelineConfig,
    kind: LossKind,
) -> Result<(f64, Vec<f64>)> {
    validate_target(target, config)?;
    let mut taps: Vec<StateVector> = Vec::with_capacity(config.trained_layers());
    let psi = forward_with_taps(params, config, Some(&mut taps))?;
    let value = loss_value(&psi, target, kind);

    let mut g = loss_cotangent(&psi, target, kind);
    let trained = config.trained_layers();
    let len = 1usize << config.n_qubits;
    // diagonal-space gradient per trained layer, in circuit order
    let mut h_grads: Vec<Vec<f64>> = vec![Vec::new(); trained];

    // Method 2 has its extra diagonal layer after the final Hadamard; there
    // is no transform between it and the loss.
    let mut layer = trained;
    if config.method == Method::WalshTruncated {
        layer -= 1;
        h_grads[layer] = diag_gradient(&taps[layer], &g);
        pull_back_diagonal(&mut g, &layer_phases(params, config, layer));
    }
    while layer > 0 {
        layer -= 1;
        // back through the Hadamard layer that followed this diagonal
        fwht_butterfly(&mut g, true);
        h_grads[layer] = diag_gradient(&taps[layer], &g);
        pull_back_diagonal(&mut g, &layer_phases(params, config, layer));
    }

    let mut grad = Vec::with_capacity(params.len());
    match config.method {
        Method::FullOracle => {
            for hg in h_grads {
                grad.extend(hg);
            }
        }
        Method::WalshTruncated => {
            // chain rule through h_j = Σ_r c_r (-1)^{r·j}: the c-space
            // gradient is the unnormalized Walsh transform of the h-space
            // gradient, restricted to the term set
            let set = config.term_set.as_ref().expect("validated");
            for mut hg in h_grads {
                debug_assert_eq!(hg.len(), len);
                fwht_butterfly(&mut hg, false);
                grad.extend(set.indices().iter().map(|&r| hg[r]));
            }
        }
    }
    Ok((value, grad))
}

fn diag_gradient(layer_output: &StateVector, cotangent: &[Complex64]) -> Vec<f64> {
    layer_output
        .amplitudes()
        .iter()
        .zip(cotangent)
        .map(|(psi, g)| 2.0 * (psi * g.conj()).im)
        .collect()
}

fn pull_back_diagonal(cotangent: &mut [Complex64], phases: &[f64]) {
    for (g, &h) in cotangent.iter_mut().zip(phases) {
        *g *= Complex64::from_polar(1.0, h);
    }
}

struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    fn new(lr: f64, beta1: f64, beta2: f64, epsilon: f64, dim: usize) -> Self {
        Adam {
            lr,
            beta1,
            beta2,
            epsilon,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

enum Stepper {
    Adam(Adam),
    Sgd { lr: f64 },
}

impl Stepper {
    fn new(tconfig: &TrainConfig, dim: usize) -> Self {
        match tconfig.optimizer {
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            } => Stepper::Adam(Adam::new(tconfig.learning_rate, beta1, beta2, epsilon, dim)),
            OptimizerKind::GradientDescent => Stepper::Sgd {
                lr: tconfig.learning_rate,
            },
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        match self {
            Stepper::Adam(a) => a.step(params, grad),
            Stepper::Sgd { lr } => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= *lr * g;
                }
            }
        }
    }
}

pub fn init_params(config: &PipelineConfig, tconfig: &TrainConfig) -> ParameterVector {
    match tconfig.init {
        InitKind::Zeros => ParameterVector::zeros(config),
        InitKind::Normal { sigma } => {
            let mut rng = ChaCha8Rng::seed_from_u64(tconfig.seed);
            let dist = Normal::new(0.0, sigma).expect("sigma is finite");
            let values = (0..config.param_len()).map(|_| dist.sample(&mut rng)).collect();
            ParameterVector::from_values(config, values).expect("length by construction")
        }
    }
}

/// Runs the optimizer until `epochs` or the early-stop target. Deterministic
/// for a fixed seed. The reported infidelity is measured on the fully
/// prepared state: method 1 after analytic phase correction, method 2
/// directly on the circuit output.
pub fn fit(
    target: &StateVector,
    pconfig: &PipelineConfig,
    tconfig: &TrainConfig,
) -> Result<TrainReport> {
    pconfig.validate()?;
    tconfig.validate()?;
    validate_target(target, pconfig)?;
    let start = Instant::now();

    let mut params = init_params(pconfig, tconfig);
    let mut stepper = Stepper::new(tconfig, params.len());
    let mut trace = Vec::new();

    let warmup = tconfig.phase_warmup.min(tconfig.epochs);
    let loss_at = |epoch: usize| {
        if epoch < warmup {
            LossKind::AmplitudeSse
        } else {
            tconfig.loss
        }
    };

    let (mut current_loss, mut grad) = loss_and_gradient(&params, target, pconfig, loss_at(0))?;
    trace.push((0usize, current_loss));
    let mut last_finite = current_loss;

    for epoch in 1..=tconfig.epochs {
        if epoch == warmup && warmup > 0 {
            // warmup is over: seed the phase layer analytically, restart the
            // optimizer state, and re-evaluate under the full objective
            if pconfig.method == Method::WalshTruncated {
                seed_phase_layer(&mut params, pconfig)?;
            }
            stepper = Stepper::new(tconfig, params.len());
            let (l, g) = loss_and_gradient(&params, target, pconfig, loss_at(epoch))?;
            current_loss = l;
            last_finite = l;
            grad = g;
        }
        if epoch > warmup
            && tconfig
                .target_loss
                .map_or(false, |t| current_loss <= t)
        {
            break;
        }
        stepper.step(params.values_mut(), &grad);
        let (l, g) = loss_and_gradient(&params, target, pconfig, loss_at(epoch))?;
        if !l.is_finite() {
            return Err(Error::Divergence {
                epoch,
                last_loss: last_finite,
            });
        }
        current_loss = l;
        last_finite = l;
        grad = g;
        if epoch % tconfig.log_every == 0 || epoch == tconfig.epochs {
            trace.push((epoch, current_loss));
        }
    }
    if trace.last().map(|&(_, l)| l) != Some(current_loss) {
        let epoch = trace.last().map_or(0, |&(e, _)| e);
        trace.push((epoch + 1, current_loss));
    }

    let prepared = match pconfig.method {
        Method::FullOracle => prepared_state_method1(&params, pconfig)?,
        Method::WalshTruncated => forward_with_taps(&params, pconfig, None)?,
    };
    let final_infidelity = 1.0 - prepared.fidelity(target)?;

    Ok(TrainReport {
        loss_trace: trace,
        final_params: params,
        final_loss: current_loss,
        final_infidelity,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        seed: tconfig.seed,
    })
}

/// Overwrites the last diagonal layer with the truncated Walsh expansion of
/// the residual phases left by the earlier layers, so that layer starts out
/// cancelling as much phase as the term set can express.
fn seed_phase_layer(params: &mut ParameterVector, pconfig: &PipelineConfig) -> Result<()> {
    let per = pconfig.params_per_layer();
    let start = params.len() - per;
    for v in &mut params.values_mut()[start..] {
        *v = 0.0;
    }
    let state = forward_with_taps(params, pconfig, None)?;
    // phases() returns θ = −arg ψ; the cancelling evolution needs h = arg ψ
    let h: Vec<f64> = state.phases(PHASE_EPS).iter().map(|t| -t).collect();
    let spectrum = walsh_coefficients(&DiagonalHamiltonian::new(h)?);
    let set = pconfig.term_set.as_ref().expect("validated walsh config");
    let indices: Vec<usize> = set.indices().to_vec();
    for (slot, r) in params.values_mut()[start..].iter_mut().zip(indices) {
        *slot = spectrum.get(r);
    }
    Ok(())
}

/// Deterministic multi-start: runs `fit` with `restarts` seeds derived from
/// `tconfig.seed` and keeps the run with the lowest final infidelity. The
/// truncated-parametrization landscape has bad local minima that trap a
/// fraction of random inits; a handful of restarts steps around them.
pub fn fit_best_of(
    target: &StateVector,
    pconfig: &PipelineConfig,
    tconfig: &TrainConfig,
    restarts: u64,
) -> Result<TrainReport> {
    if restarts == 0 {
        return Err(Error::Validation("restarts must be >= 1".into()));
    }
    let mut best: Option<TrainReport> = None;
    for trial in 0..restarts {
        let run = TrainConfig {
            seed: derive_seed(tconfig.seed, trial),
            ..tconfig.clone()
        };
        let report = fit(target, pconfig, &run)?;
        if best
            .as_ref()
            .map_or(true, |b| report.final_infidelity < b.final_infidelity)
        {
            best = Some(report);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Seed mixing for independent trials: base seed XOR a hashed trial index.
pub fn derive_seed(base: u64, trial: u64) -> u64 {
    let mut z = base ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTrial {
    pub n_qubits: u32,
    pub distribution: RandomKind,
    pub trial: u64,
    pub final_loss: Option<f64>,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub n_qubits: u32,
    pub distribution: RandomKind,
    pub mean_final_loss: f64,
    pub std_final_loss: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub trials: Vec<SweepTrial>,
    pub cells: Vec<SweepCell>,
}

/// Final-loss statistics over independent seeded datasets per (size,
/// distribution) cell. Uses the two-layer full-parametrization pipeline.
/// Per-trial failures are recorded, not fatal.
pub fn sweep_dataset_sizes(
    sizes: &[u32],
    distributions: &[RandomKind],
    trials: u64,
    tconfig: &TrainConfig,
) -> Result<SweepResult> {
    if trials < 1 {
        return Err(Error::Validation("trials must be >= 1".into()));
    }
    let mut all_trials = Vec::new();
    let mut cells = Vec::new();
    for &n in sizes {
        for &dist in distributions {
            let mut finals = Vec::new();
            for trial in 0..trials {
                let seed = derive_seed(tconfig.seed, trial);
                let start = Instant::now();
                let result = random_state(dist, n, seed).and_then(|target| {
                    let pconfig = PipelineConfig {
                        n_qubits: n,
                        method: Method::FullOracle,
                        layers: 2,
                        term_set: None,
                    };
                    let tc = TrainConfig {
                        seed,
                        ..tconfig.clone()
                    };
                    fit(&target, &pconfig, &tc)
                });
                let elapsed = start.elapsed().as_secs_f64();
                match result {
                    Ok(report) => {
                        finals.push(report.final_loss);
                        all_trials.push(SweepTrial {
                            n_qubits: n,
                            distribution: dist,
                            trial,
                            final_loss: Some(report.final_loss),
                            error: None,
                            wall_clock_seconds: elapsed,
                        });
                    }
                    Err(e) => all_trials.push(SweepTrial {
                        n_qubits: n,
                        distribution: dist,
                        trial,
                        final_loss: None,
                        error: Some(e.to_string()),
                        wall_clock_seconds: elapsed,
                    }),
                }
            }
            if !finals.is_empty() {
                let mean = finals.iter().sum::<f64>() / finals.len() as f64;
                let var = finals.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>()
                    / finals.len() as f64;
                cells.push(SweepCell {
                    n_qubits: n,
                    distribution: dist,
                    mean_final_loss: mean,
                    std_final_loss: var.sqrt(),
                    trials: finals.len(),
                });
            }
        }
    }
    Ok(SweepResult {
        trials: all_trials,
        cells,
    })
}
