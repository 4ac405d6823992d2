//! Rotosolve optimization of the reductive cost functions, the full
//! reductive pipeline, and the single-shot standard algorithm it replaces.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adjoint::{anticommuting_weight, conjugate, conjugate_factor, inner, residual, Ansatz, Direction};
use crate::algebra::{generate_dla, DEFAULT_MAX_DIM};
use crate::cartan::{CartanStructure, DecomposeOptions};
use crate::circuits::compressed_tfxy_factors;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::qsim::{ShotConfig, ShotEvaluator};

/// Amplitude below which the exact backend treats a sinusoid as flat.
pub const EXACT_FLAT_TOL: f64 = 1e-12;

/// Evaluates `⟨K target K†, H⟩`, exactly or from simulated measurements.
pub trait CostEvaluator {
    fn evaluate(&mut self, ansatz: &Ansatz, target: &PauliSum, h: &PauliSum) -> Result<f64>;

    /// Standard deviation of one evaluation against `h` (zero when exact).
    fn noise_scale(&self, h: &PauliSum) -> f64;

    /// Evaluations performed so far.
    fn calls(&self) -> u64;

    /// The exact backend, when this is one; enables cached sweeps.
    fn as_exact(&mut self) -> Option<&mut ExactEvaluator> {
        None
    }
}

#[derive(Debug, Default, Clone)]
pub struct ExactEvaluator {
    calls: u64,
}

impl ExactEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// One Rotosolve sweep over all angles of a forward ansatz, returning
    /// the final fitted cost. Counts three evaluations per angle, like
    /// [`rotosolve_angle`], but reuses the conjugated operands between angles.
    pub fn sweep(&mut self, ansatz: &mut Ansatz, target: &PauliSum, h: &PauliSum, flat_tol: f64) -> Result<f64> {
        let m = ansatz.len();
        // suffix[j] = F_{j+1} … F_{m-1} · target · (…)†
        let mut suffix = vec![target.clone(); m];
        for j in (0..m.saturating_sub(1)).rev() {
            let (p, theta) = ansatz.factors[j + 1];
            suffix[j] = conjugate_factor(&suffix[j + 1], &p, theta)?;
        }
        // frame = F_{<j}† · h · F_{<j}, with already updated angles
        let mut frame = h.clone();
        let mut cost = 0.0;
        for (j, inner_op) in suffix.iter().enumerate() {
            let (p, current) = ansatz.factors[j];
            let mut f = [0.0; 3];
            for (slot, theta) in f.iter_mut().zip([0.0, FRAC_PI_4, FRAC_PI_2]) {
                *slot = inner(&conjugate_factor(inner_op, &p, theta)?, &frame)?;
            }
            self.calls += 3;
            let (a, b, c) = fit_sinusoid(f[0], f[1], f[2]);
            let upd = sinusoid_argmin(a, b, c, current, flat_tol);
            ansatz.set_angle(j, upd.angle);
            cost = upd.predicted;
            if j + 1 < m {
                frame = conjugate_factor(&frame, &p, -upd.angle)?;
            }
        }
        Ok(cost)
    }
}

impl CostEvaluator for ExactEvaluator {
    fn evaluate(&mut self, ansatz: &Ansatz, target: &PauliSum, h: &PauliSum) -> Result<f64> {
        self.calls += 1;
        let forward = Ansatz { direction: Direction::Forward, ..ansatz.clone() };
        inner(&conjugate(&forward, target)?, h)
    }

    fn noise_scale(&self, _h: &PauliSum) -> f64 {
        0.0
    }

    fn calls(&self) -> u64 {
        self.calls
    }

    fn as_exact(&mut self) -> Option<&mut ExactEvaluator> {
        Some(self)
    }
}

/// Outcome of one Rotosolve update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleUpdate {
    pub angle: f64,
    pub predicted: f64,
    /// Fitted `√(a² + b²)` of `a cos2θ + b sin2θ + c`.
    pub amplitude: f64,
    pub skipped: bool,
}

/// Fits `a cos2θ + b sin2θ + c` to samples at `0, π/4, π/2`.
pub fn fit_sinusoid(f0: f64, f_quarter: f64, f_half: f64) -> (f64, f64, f64) {
    let c = 0.5 * (f0 + f_half);
    (f0 - c, f_quarter - c, c)
}

/// Minimizer in `[0, π)` of `a cos2θ + b sin2θ + c`, unless the amplitude is
/// below `flat_tol`, in which case `current` is kept.
pub fn sinusoid_argmin(a: f64, b: f64, c: f64, current: f64, flat_tol: f64) -> AngleUpdate {
    let amplitude = a.hypot(b);
    if amplitude < flat_tol {
        let (s, co) = (2.0 * current).sin_cos();
        return AngleUpdate { angle: current, predicted: a * co + b * s + c, amplitude, skipped: true };
    }
    let mut angle = 0.5 * (-b).atan2(-a);
    if angle < 0.0 {
        angle += PI;
    }
    if angle >= PI {
        angle -= PI;
    }
    AngleUpdate { angle, predicted: c - amplitude, amplitude, skipped: false }
}

/// One Rotosolve step on factor `index`: three samples, a sinusoid fit and
/// a jump to the fitted minimum. The ansatz is updated in place.
pub fn rotosolve_angle(
    evaluator: &mut dyn CostEvaluator,
    ansatz: &mut Ansatz,
    index: usize,
    target: &PauliSum,
    h: &PauliSum,
    flat_tol: f64,
) -> Result<AngleUpdate> {
    if index >= ansatz.len() {
        return Err(Error::Precondition(format!("angle index {index} out of range")));
    }
    let current = ansatz.factors[index].1;
    let mut probe = ansatz.clone();
    let mut sample = |theta: f64| {
        probe.set_angle(index, theta);
        evaluator.evaluate(&probe, target, h)
    };
    let (f0, fq, fh) = (sample(0.0)?, sample(FRAC_PI_4)?, sample(FRAC_PI_2)?);
    let (a, b, c) = fit_sinusoid(f0, fq, fh);
    let upd = sinusoid_argmin(a, b, c, current, flat_tol);
    ansatz.set_angle(index, upd.angle);
    Ok(upd)
}

/// Stopping rules shared by both algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Exact backend: stop once a sweep improves the cost by less than
    /// `rel_tol · ‖H‖ · ‖target‖`.
    pub rel_tol: f64,
    /// Shot backend: stop after this many sweeps without improvement beyond
    /// twice the evaluation noise.
    pub patience: usize,
    /// Stop early once the monitored residual reaches this value.
    pub target_residual: Option<f64>,
    /// Shot backend: extra sweeps after the patience stop whose angles are
    /// averaged (circular mean, period π) into the returned angles.
    #[serde(default)]
    pub average_sweeps: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { rel_tol: 1e-10, patience: 3, target_residual: None, average_sweeps: 40 }
    }
}

/// What a sweep loop reports back.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub ansatz: Ansatz,
    pub iterations: usize,
    pub converged: bool,
    pub cost_trace: Vec<f64>,
    pub residual_trace: Vec<f64>,
    pub calls: u64,
}

/// Rotosolve sweeps until the stop rule fires or `max_iters` sweeps ran.
///
/// `monitor` returns `(trace_value, early_stop_value)` for the current
/// angles; the second is compared against `rule.target_residual`.
pub fn sweep_until_converged(
    evaluator: &mut dyn CostEvaluator,
    mut ansatz: Ansatz,
    target: &PauliSum,
    h: &PauliSum,
    rule: &StopRule,
    max_iters: usize,
    mut monitor: impl FnMut(&Ansatz) -> Result<(f64, f64)>,
) -> Result<SweepOutcome> {
    let calls_before = evaluator.calls();
    let sigma = evaluator.noise_scale(h);
    let exact = sigma == 0.0;
    let flat_tol = if exact { EXACT_FLAT_TOL } else { 2.0 * sigma };
    let scale = h.norm() * target.norm();

    let mut cost_trace = Vec::new();
    let mut residual_trace = Vec::new();
    let mut converged = ansatz.is_empty();
    let mut iterations = 0;
    if !ansatz.is_empty() && max_iters > 0 {
        let mut prev = evaluator.evaluate(&ansatz, target, h)?;
        let mut best = prev;
        let mut stall = 0;
        while iterations < max_iters {
            let cost = match (ansatz.direction, evaluator.as_exact()) {
                (Direction::Forward, Some(ex)) => ex.sweep(&mut ansatz, target, h, flat_tol)?,
                _ => {
                    let mut cost = prev;
                    for j in 0..ansatz.len() {
                        cost = rotosolve_angle(evaluator, &mut ansatz, j, target, h, flat_tol)?.predicted;
                    }
                    cost
                }
            };
            iterations += 1;
            cost_trace.push(cost);
            let (trace, watched) = monitor(&ansatz)?;
            residual_trace.push(trace);
            if rule.target_residual.is_some_and(|t| watched <= t) {
                converged = true;
                break;
            }
            if exact {
                if prev - cost <= rule.rel_tol * scale {
                    converged = true;
                    break;
                }
            } else if cost < best - flat_tol {
                best = cost;
                stall = 0;
            } else {
                stall += 1;
                if stall >= rule.patience {
                    converged = true;
                    break;
                }
            }
            prev = cost;
        }
        if !exact && converged && rule.average_sweeps > 0 {
            let mut sums = vec![(0.0, 0.0); ansatz.len()];
            let mut taken = 0;
            while taken < rule.average_sweeps && iterations < max_iters {
                let mut cost = prev;
                for j in 0..ansatz.len() {
                    cost = rotosolve_angle(evaluator, &mut ansatz, j, target, h, flat_tol)?.predicted;
                }
                for (acc, (_, theta)) in sums.iter_mut().zip(&ansatz.factors) {
                    let (s, c) = (2.0 * theta).sin_cos();
                    acc.0 += s;
                    acc.1 += c;
                }
                iterations += 1;
                taken += 1;
                cost_trace.push(cost);
                prev = cost;
            }
            if taken > 0 {
                for (j, (s, c)) in sums.into_iter().enumerate() {
                    if s != 0.0 || c != 0.0 {
                        ansatz.set_angle(j, (0.5 * s.atan2(c)).rem_euclid(PI));
                    }
                }
                let (trace, _) = monitor(&ansatz)?;
                residual_trace.push(trace);
            }
        }
    }
    Ok(SweepOutcome {
        ansatz,
        iterations,
        converged,
        cost_trace,
        residual_trace,
        calls: evaluator.calls() - calls_before,
    })
}

/// Result of optimizing one fragment.
#[derive(Debug, Clone)]
pub struct FragmentOutcome {
    pub angles: Vec<f64>,
    pub h_next: PauliSum,
    pub sweep: SweepOutcome,
    /// Relative weight of `H_{r+1}` on strings anticommuting with `b₁ … b_r`.
    pub staging_residual: f64,
}

/// Minimizes `f_r` over one fragment and stages `H_{r+1} = K† H_r K`.
///
/// `preceding` holds `b₁ … b_{r-1}`; `h_basis` only feeds the residual trace.
#[allow(clippy::too_many_arguments)]
pub fn minimize_fragment(
    evaluator: &mut dyn CostEvaluator,
    factors: &[PauliString],
    initial_angles: &[f64],
    b_r: &PauliString,
    preceding: &[PauliString],
    h_r: &PauliSum,
    h_basis: &[PauliString],
    rule: &StopRule,
    max_iters: usize,
) -> Result<FragmentOutcome> {
    let target = PauliSum::single(*b_r, 1.0);
    let mut staged: Vec<PauliString> = preceding.to_vec();
    staged.push(*b_r);
    let monitor = |a: &Ansatz| {
        let moved = conjugate(&a.dagger(), h_r)?;
        Ok((residual(&moved, h_basis)?, anticommuting_weight(&moved, &staged)))
    };
    let ansatz = Ansatz::from_parts(factors, initial_angles);
    let sweep = sweep_until_converged(evaluator, ansatz, &target, h_r, rule, max_iters, monitor)?;
    let h_next = conjugate(&sweep.ansatz.dagger(), h_r)?;
    let staging_residual = anticommuting_weight(&h_next, &staged);
    Ok(FragmentOutcome { angles: sweep.ansatz.angles(), h_next, sweep, staging_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    /// One exponential per `k` string of each fragment.
    #[default]
    Product,
    /// Nearest-neighbour doublet ladder for TFIM/TFXY chains.
    Compressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Shots(ShotConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Redcard,
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub seed: u64,
    pub backend: Backend,
    pub ansatz: AnsatzKind,
    pub stop: StopRule,
    /// Cap on Rotosolve sweeps summed over all fragments.
    pub max_iters: usize,
    /// Staging residual above which an exact-backend fragment is flagged.
    pub staging_tol: f64,
    pub max_dim: usize,
    pub cartan_seed: Option<PauliString>,
    pub b_order: Option<Vec<usize>>,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            backend: Backend::Exact,
            ansatz: AnsatzKind::Product,
            stop: StopRule::default(),
            max_iters: 100_000,
            staging_tol: 1e-4,
            max_dim: DEFAULT_MAX_DIM,
            cartan_seed: None,
            b_order: None,
        }
    }
}

impl SynthesisConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let Backend::Shots(cfg) = &mut self.backend {
            cfg.seed = seed;
        }
        self
    }

    pub fn decompose_options(&self) -> DecomposeOptions {
        DecomposeOptions { seed: self.cartan_seed, b_order: self.b_order.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentResult {
    /// `b_r` for reductive steps; `None` for the single standard block.
    pub generator: Option<PauliString>,
    pub factors: Vec<(PauliString, f64)>,
    pub iterations: usize,
    pub cost_calls: u64,
    pub converged: bool,
    pub cost_trace: Vec<f64>,
    pub staging_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub method: Method,
    pub ansatz: AnsatzKind,
    pub config: SynthesisConfig,
    pub hamiltonian: PauliSum,
    pub h_basis: Vec<PauliString>,
    pub b_basis: Vec<PauliString>,
    pub fragments: Vec<FragmentResult>,
    /// `K† H K`, ideally supported on `h_basis`.
    pub h: PauliSum,
    pub residual: f64,
    /// Residual against `h` after every sweep, across all fragments.
    pub residual_trace: Vec<f64>,
    pub cost_calls: u64,
    pub iterations: usize,
    pub converged: bool,
}

impl SynthesisResult {
    /// `K = K¹ K² …` as one forward ansatz.
    pub fn full_ansatz(&self) -> Ansatz {
        Ansatz::new(self.fragments.iter().flat_map(|f| f.factors.iter().copied()).collect())
    }

    /// Coefficients of the final Cartan element on `h_basis`.
    pub fn h_coefficients(&self) -> Vec<f64> {
        self.h_basis.iter().map(|p| self.h.coeff(p)).collect()
    }
}

fn factor_layout(structure: &CartanStructure, kind: AnsatzKind) -> Result<Vec<Vec<PauliString>>> {
    match kind {
        AnsatzKind::Product => Ok(structure.fragments.clone()),
        AnsatzKind::Compressed => compressed_tfxy_factors(structure),
    }
}

fn random_angles(rng: &mut ChaCha8Rng, layout: &[Vec<PauliString>]) -> Vec<Vec<f64>> {
    layout.iter().map(|f| f.iter().map(|_| rng.random_range(0.0..PI)).collect()).collect()
}

fn make_evaluator(backend: &Backend) -> Box<dyn CostEvaluator> {
    match backend {
        Backend::Exact => Box::new(ExactEvaluator::new()),
        Backend::Shots(cfg) => Box::new(ShotEvaluator::new(*cfg)),
    }
}

/// Builds the algebra and decomposition, then runs the reductive pipeline.
pub fn run_redcard(hamiltonian: &PauliSum, config: &SynthesisConfig) -> Result<SynthesisResult> {
    let dla = generate_dla(hamiltonian, config.max_dim)?;
    let structure = CartanStructure::build(&dla, hamiltonian, &config.decompose_options())?;
    run_redcard_with(hamiltonian, &structure, config)
}

/// Sequentially minimizes `f_1, f_2, …` over the fragments of `structure`.
pub fn run_redcard_with(
    hamiltonian: &PauliSum,
    structure: &CartanStructure,
    config: &SynthesisConfig,
) -> Result<SynthesisResult> {
    let layout = factor_layout(structure, config.ansatz)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = random_angles(&mut rng, &layout);
    let mut evaluator = make_evaluator(&config.backend);
    let exact = matches!(config.backend, Backend::Exact);

    let active = layout.iter().filter(|f| !f.is_empty()).count().max(1);
    let mut rule = config.stop;
    rule.target_residual = config.stop.target_residual.map(|t| t / (active as f64).sqrt());

    let mut h_r = hamiltonian.clone();
    let mut fragments = Vec::with_capacity(layout.len());
    let mut residual_trace = Vec::new();
    let mut iterations = 0;
    for (r, factors) in layout.iter().enumerate() {
        let b_r = structure.b_basis[r];
        let preceding = &structure.b_basis[..r];
        if factors.is_empty() {
            fragments.push(FragmentResult {
                generator: Some(b_r),
                factors: Vec::new(),
                iterations: 0,
                cost_calls: 0,
                converged: true,
                cost_trace: Vec::new(),
                staging_residual: anticommuting_weight(&h_r, &structure.b_basis[..=r]),
            });
            continue;
        }
        let out = minimize_fragment(
            evaluator.as_mut(),
            factors,
            &init[r],
            &b_r,
            preceding,
            &h_r,
            &structure.h_basis,
            &rule,
            config.max_iters.saturating_sub(iterations),
        )?;
        iterations += out.sweep.iterations;
        residual_trace.extend_from_slice(&out.sweep.residual_trace);
        let staged_ok = !exact || rule.target_residual.is_some() || out.staging_residual <= config.staging_tol;
        fragments.push(FragmentResult {
            generator: Some(b_r),
            factors: factors.iter().copied().zip(out.angles.iter().copied()).collect(),
            iterations: out.sweep.iterations,
            cost_calls: out.sweep.calls,
            converged: out.sweep.converged && staged_ok,
            cost_trace: out.sweep.cost_trace,
            staging_residual: out.staging_residual,
        });
        h_r = out.h_next;
    }
    let res = residual(&h_r, &structure.h_basis)?;
    Ok(SynthesisResult {
        method: Method::Redcard,
        ansatz: config.ansatz,
        config: config.clone(),
        hamiltonian: hamiltonian.clone(),
        h_basis: structure.h_basis.clone(),
        b_basis: structure.b_basis.clone(),
        converged: fragments.iter().all(|f| f.converged),
        fragments,
        h: h_r,
        residual: res,
        residual_trace,
        cost_calls: evaluator.calls(),
        iterations,
    })
}

/// `γ_j = π^{-j}` for `j = 1, 2, …`: pairwise ratios are irrational.
pub fn irrational_weights(count: usize) -> Vec<f64> {
    (1..=count).map(|j| PI.powi(-(j as i32))).collect()
}

/// Builds the algebra and decomposition, then runs the standard algorithm.
pub fn run_standard(hamiltonian: &PauliSum, config: &SynthesisConfig) -> Result<SynthesisResult> {
    let dla = generate_dla(hamiltonian, config.max_dim)?;
    let structure = CartanStructure::build(&dla, hamiltonian, &config.decompose_options())?;
    run_standard_with(hamiltonian, &structure, config)
}

/// One optimization of `⟨K v K†, H⟩` over every angle of `K`, with
/// `v = Σ γ_j h_j`.
pub fn run_standard_with(
    hamiltonian: &PauliSum,
    structure: &CartanStructure,
    config: &SynthesisConfig,
) -> Result<SynthesisResult> {
    if !matches!(config.backend, Backend::Exact) {
        return Err(Error::Precondition(
            "the standard cost needs a dense mixed state and has no shot backend".into(),
        ));
    }
    let layout = factor_layout(structure, config.ansatz)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init: Vec<f64> = random_angles(&mut rng, &layout).into_iter().flatten().collect();
    let factors: Vec<PauliString> = layout.into_iter().flatten().collect();
    let v = PauliSum::from_terms(
        hamiltonian.n_qubits(),
        structure.h_basis.iter().copied().zip(irrational_weights(structure.h_basis.len())),
    )?;
    let mut evaluator = ExactEvaluator::new();
    let monitor = |a: &Ansatz| {
        let r = residual(&conjugate(&a.dagger(), hamiltonian)?, &structure.h_basis)?;
        Ok((r, r))
    };
    let sweep = sweep_until_converged(
        &mut evaluator,
        Ansatz::from_parts(&factors, &init),
        &v,
        hamiltonian,
        &config.stop,
        config.max_iters,
        monitor,
    )?;
    let h = conjugate(&sweep.ansatz.dagger(), hamiltonian)?;
    let res = residual(&h, &structure.h_basis)?;
    let block = FragmentResult {
        generator: None,
        factors: sweep.ansatz.factors.clone(),
        iterations: sweep.iterations,
        cost_calls: sweep.calls,
        converged: sweep.converged,
        cost_trace: sweep.cost_trace,
        staging_residual: res,
    };
    Ok(SynthesisResult {
        method: Method::Standard,
        ansatz: config.ansatz,
        config: config.clone(),
        hamiltonian: hamiltonian.clone(),
        h_basis: structure.h_basis.clone(),
        b_basis: structure.b_basis.clone(),
        converged: block.converged,
        fragments: vec![block],
        h,
        residual: res,
        residual_trace: sweep.residual_trace,
        cost_calls: evaluator.calls(),
        iterations: sweep.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build, ModelSpec};

    struct Fixed(fn(f64) -> f64, u64);

    impl CostEvaluator for Fixed {
        fn evaluate(&mut self, a: &Ansatz, _t: &PauliSum, _h: &PauliSum) -> Result<f64> {
            self.1 += 1;
            Ok((self.0)(a.factors[0].1))
        }
        fn noise_scale(&self, _h: &PauliSum) -> f64 {
            0.0
        }
        fn calls(&self) -> u64 {
            self.1
        }
    }

    fn dummy() -> (Ansatz, PauliSum) {
        let p: PauliString = "X".parse().unwrap();
        (Ansatz::new(vec![(p, 0.3)]), PauliSum::single(p, 1.0))
    }

    #[test]
    fn cosine_minimum() {
        let (mut a, s) = dummy();
        let mut ev = Fixed(|t| (2.0 * t).cos(), 0);
        let upd = rotosolve_angle(&mut ev, &mut a, 0, &s, &s, EXACT_FLAT_TOL).unwrap();
        assert!((upd.angle - FRAC_PI_2).abs() < 1e-12);
        assert!((upd.predicted + 1.0).abs() < 1e-12);
        assert_eq!(ev.calls(), 3);
    }

    #[test]
    fn flat_keeps_angle() {
        let (mut a, s) = dummy();
        let mut ev = Fixed(|_| 0.7, 0);
        let upd = rotosolve_angle(&mut ev, &mut a, 0, &s, &s, EXACT_FLAT_TOL).unwrap();
        assert!(upd.skipped);
        assert_eq!(a.factors[0].1, 0.3);
        assert!((upd.predicted - 0.7).abs() < 1e-15);
    }

    #[test]
    fn argmin_phase_shifted() {
        // f = cos(2θ - 1) is minimal at θ = (1 + π)/2
        let (mut a, s) = dummy();
        let mut ev = Fixed(|t| (2.0 * t - 1.0).cos() + 0.5, 0);
        let upd = rotosolve_angle(&mut ev, &mut a, 0, &s, &s, EXACT_FLAT_TOL).unwrap();
        assert!((upd.angle - (1.0 + PI) / 2.0).abs() < 1e-12);
        assert!((upd.predicted + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bad_index() {
        let (mut a, s) = dummy();
        let mut ev = ExactEvaluator::new();
        assert!(rotosolve_angle(&mut ev, &mut a, 5, &s, &s, 0.0).is_err());
    }

    #[test]
    fn abelian_hamiltonian_needs_no_angles() {
        let h = PauliSum::from_text(&[("ZI", 0.5), ("IZ", 0.5)]).unwrap();
        let res = run_redcard(&h, &SynthesisConfig::default()).unwrap();
        assert!(res.fragments.iter().all(|f| f.factors.is_empty()));
        assert_eq!(res.h, h);
        assert_eq!(res.residual, 0.0);
        assert_eq!(res.cost_calls, 0);
        let std = run_standard(&h, &SynthesisConfig::default()).unwrap();
        assert_eq!(std.iterations, 0);
    }

    #[test]
    fn empty_fragment_passes_through() {
        let h = build(&ModelSpec::tfim(2, 1.0, 0.5)).unwrap();
        let res = run_redcard(&h, &SynthesisConfig::default()).unwrap();
        assert_eq!(res.fragments.len(), 2);
        assert!(res.fragments[1].factors.is_empty());
        assert_eq!(res.fragments[1].iterations, 0);
    }

    #[test]
    fn cached_sweep_matches_plain_sweep() {
        let h = build(&ModelSpec::tfim(3, 1.0, 0.5)).unwrap();
        let dla = generate_dla(&h, DEFAULT_MAX_DIM).unwrap();
        let s = CartanStructure::build(&dla, &h, &DecomposeOptions::default()).unwrap();
        let factors: Vec<PauliString> = s.fragments.concat();
        let angles: Vec<f64> = (0..factors.len()).map(|i| 0.3 + 0.7 * i as f64).collect();
        let v = PauliSum::from_terms(3, s.h_basis.iter().copied().zip(irrational_weights(3))).unwrap();
        let mut plain = Ansatz::from_parts(&factors, &angles);
        let mut cached = plain.clone();
        let mut ev = ExactEvaluator::new();
        let mut last = 0.0;
        for j in 0..plain.len() {
            last = rotosolve_angle(&mut ev, &mut plain, j, &v, &h, EXACT_FLAT_TOL).unwrap().predicted;
        }
        let calls = ev.calls();
        let fast = ev.sweep(&mut cached, &v, &h, EXACT_FLAT_TOL).unwrap();
        assert_eq!(ev.calls(), 2 * calls);
        assert!((fast - last).abs() < 1e-10);
        for (a, b) in plain.angles().iter().zip(cached.angles()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn weights_are_decreasing_powers() {
        let w = irrational_weights(3);
        assert!((w[0] - 1.0 / PI).abs() < 1e-15);
        assert!((w[2] - PI.powi(-3)).abs() < 1e-15);
    }
}
