//! Simulated measurement of the reductive cost on `ρ_r = (I + b_r)/2ⁿ`
//! and the ancilla-assisted circuits that prepare such states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::adjoint::{conjugate, Ansatz, Direction};
use crate::circuits::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::optimize::{fit_sinusoid, sinusoid_argmin, CostEvaluator, EXACT_FLAT_TOL};
use crate::pauli::{PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotConfig {
    /// Shots spent on each Hamiltonian term.
    pub shots: u64,
    pub seed: u64,
    /// Uniform depolarizing scale `λ`: expectations shrink by `1 - λ`.
    #[serde(default)]
    pub depol: f64,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        Self { shots, seed, depol: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Precondition("shots must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.depol) {
            return Err(Error::Precondition(format!("depolarizing scale {} outside [0, 1]", self.depol)));
        }
        Ok(())
    }
}

fn single_target(target: &PauliSum) -> Result<PauliString> {
    match target.iter().next() {
        Some((p, c)) if target.len() == 1 && c == 1.0 && !p.is_identity() => Ok(*p),
        _ => Err(Error::Precondition(
            "shot estimation needs ρ = (I + b)/2ⁿ for a single non-identity string b".into(),
        )),
    }
}

/// Exact `⟨K† P_t K⟩_ρ` for every non-identity term `P_t` of `h_r`, paired
/// with its coefficient.
///
/// With `ρ = (I + b)/2ⁿ` the expectation is the `b` coefficient of
/// `K† P_t K`, which equals the `P_t` coefficient of `K b K†`.
pub fn term_expectations(ansatz: &Ansatz, b_r: &PauliString, h_r: &PauliSum) -> Result<Vec<(f64, f64)>> {
    let forward = Ansatz { direction: Direction::Forward, ..ansatz.clone() };
    let moved = conjugate(&forward, &PauliSum::single(*b_r, 1.0))?;
    Ok(h_r.iter().filter(|(p, _)| !p.is_identity()).map(|(p, c)| (c, moved.coeff(p))).collect())
}

/// Sampled mean of `shots` outcomes `±1` with `P(+1) = (1 + (1-λ)p)/2`.
pub fn sample_mean(p: f64, cfg: &ShotConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let scaled = (1.0 - cfg.depol) * p;
    if scaled.abs() > 1.0 + 1e-9 {
        return Err(Error::Consistency(format!("expectation {scaled} outside [-1, 1]")));
    }
    let prob = (0.5 * (1.0 + scaled)).clamp(0.0, 1.0);
    let ups = Binomial::new(cfg.shots, prob)
        .map_err(|e| Error::Consistency(format!("binomial sampler: {e}")))?
        .sample(rng);
    Ok(2.0 * ups as f64 / cfg.shots as f64 - 1.0)
}

/// `Σ_t c_t · (sampled ⟨K† P_t K⟩)`, i.e. `f_r` without the identity term.
pub fn estimate_cost_with(
    ansatz: &Ansatz,
    b_r: &PauliString,
    h_r: &PauliSum,
    cfg: &ShotConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut total = 0.0;
    for (c, p) in term_expectations(ansatz, b_r, h_r)? {
        total += c * sample_mean(p, cfg, rng)?;
    }
    Ok(total)
}

/// One estimate with a fresh generator seeded from `cfg.seed`.
pub fn estimate_cost(ansatz: &Ansatz, b_r: &PauliString, h_r: &PauliSum, cfg: &ShotConfig) -> Result<f64> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    estimate_cost_with(ansatz, b_r, h_r, cfg, &mut rng)
}

/// The infinite-shot value of the estimator, depolarizing scale included.
pub fn analytic_cost(ansatz: &Ansatz, b_r: &PauliString, h_r: &PauliSum, depol: f64) -> Result<f64> {
    let terms = term_expectations(ansatz, b_r, h_r)?;
    Ok((1.0 - depol) * terms.iter().map(|(c, p)| c * p).sum::<f64>())
}

/// Standard deviation bound `‖H_r without identity‖ / √shots`.
pub fn shot_sigma(h_r: &PauliSum, shots: u64) -> f64 {
    let sq: f64 = h_r.iter().filter(|(p, _)| !p.is_identity()).map(|(_, c)| c * c).sum();
    (sq / shots as f64).sqrt()
}

/// Cost evaluator that draws from one seeded stream.
#[derive(Debug, Clone)]
pub struct ShotEvaluator {
    cfg: ShotConfig,
    rng: ChaCha8Rng,
    calls: u64,
}

impl ShotEvaluator {
    pub fn new(cfg: ShotConfig) -> Self {
        Self { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed), calls: 0 }
    }

    pub fn config(&self) -> &ShotConfig {
        &self.cfg
    }
}

impl CostEvaluator for ShotEvaluator {
    fn evaluate(&mut self, ansatz: &Ansatz, target: &PauliSum, h: &PauliSum) -> Result<f64> {
        self.cfg.validate()?;
        let b = single_target(target)?;
        self.calls += 1;
        estimate_cost_with(ansatz, &b, h, &self.cfg, &mut self.rng)
    }

    fn noise_scale(&self, h: &PauliSum) -> f64 {
        shot_sigma(h, self.cfg.shots)
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// Where the discarded randomness of the state preparation goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AncillaMode {
    /// One ancilla, reset after every use.
    #[default]
    Single,
    /// One fresh ancilla per mixed qubit, no resets.
    PerQubit,
}

/// Circuit preparing `(I + σ)/2ⁿ` from `|0…0⟩` with `n + w - 2` CNOTs.
pub fn state_prep_circuit(sigma: &PauliString, mode: AncillaMode) -> Result<Circuit> {
    if sigma.is_identity() {
        return Err(Error::IdentityString);
    }
    let n = sigma.n_qubits();
    let support = sigma.support();
    let anchor = support[0];
    let ancillas = match mode {
        AncillaMode::Single => usize::from(n > 1),
        AncillaMode::PerQubit => n - 1,
    };
    let mut c = Circuit::new(n, ancillas);
    let mut slot = 0;
    for q in (0..n).filter(|&q| q != anchor) {
        let a = n + slot;
        c.push(Gate::H { qubit: q })?;
        c.push(Gate::Cnot { control: q, target: a })?;
        match mode {
            AncillaMode::Single => c.push(Gate::Reset { qubit: a })?,
            AncillaMode::PerQubit => slot += 1,
        }
    }
    for &k in &support[1..] {
        c.push(Gate::Cnot { control: k, target: anchor })?;
    }
    for &q in &support {
        match sigma.letter(q) {
            'X' => c.push(Gate::H { qubit: q })?,
            'Y' => {
                c.push(Gate::H { qubit: q })?;
                c.push(Gate::S { qubit: q })?;
            }
            _ => {}
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleInvarianceReport {
    pub clean_angle: f64,
    pub scaled_angle: f64,
    pub clean_amplitude: f64,
    pub scaled_amplitude: f64,
    pub skipped: bool,
    pub consistent: bool,
}

/// Compares the Rotosolve update of factor `index` with and without a uniform
/// scale `1 - λ` on every sample, both on the infinite-shot path.
pub fn depolarizing_scale_invariance_check(
    ansatz: &Ansatz,
    index: usize,
    b_r: &PauliString,
    h_r: &PauliSum,
    depol: f64,
    flat_tol: Option<f64>,
) -> Result<ScaleInvarianceReport> {
    if index >= ansatz.len() {
        return Err(Error::Precondition(format!("angle index {index} out of range")));
    }
    let tol = flat_tol.unwrap_or(EXACT_FLAT_TOL);
    let current = ansatz.factors[index].1;
    let fit = |lam: f64| -> Result<_> {
        let mut probe = ansatz.clone();
        let mut f = [0.0; 3];
        for (slot, theta) in f.iter_mut().zip([0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2]) {
            probe.set_angle(index, theta);
            *slot = analytic_cost(&probe, b_r, h_r, lam)?;
        }
        let (a, b, c) = fit_sinusoid(f[0], f[1], f[2]);
        Ok(sinusoid_argmin(a, b, c, current, tol))
    };
    let clean = fit(0.0)?;
    let scaled = fit(depol)?;
    let consistent = if scaled.skipped {
        scaled.angle == current
    } else {
        let d = (clean.angle - scaled.angle).rem_euclid(std::f64::consts::PI);
        d.min(std::f64::consts::PI - d) <= 1e-9
    };
    Ok(ScaleInvarianceReport {
        clean_angle: clean.angle,
        scaled_angle: scaled.angle,
        clean_amplitude: clean.amplitude,
        scaled_amplitude: scaled.amplitude,
        skipped: scaled.skipped,
        consistent,
    })
}
