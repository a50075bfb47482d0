//! Binary discrimination of nonorthogonal qubit states over many copies.
//!
//! The two hypotheses are `|φ±⟩ = cos α |0⟩ ± sin α |1⟩` with prior `q` on
//! the `+` state, so the overlap is `cos 2α`. Three measurement strategies
//! are provided:
//!
//! - [`adaptive_local_run`] — the locally optimal single-copy projective
//!   measurement given the running posterior odds, updated copy by copy.
//!   For pure states this greedy scheme attains the ensemble optimum: its
//!   error equals the Helstrom bound evaluated at `overlap^M`.
//! - [`majority_vote_run`] — a fixed unbiased basis on every copy, guess by
//!   majority; the non-adaptive baseline.
//! - [`dolinar_qubit_pair`] — the coherent-state receiver reduced to qubit
//!   copies: `|±α⟩` chopped into `M` segments, each a weakly excited qubit.
//!
//! All Bloch vectors live in the x–z plane spanned by the two hypotheses;
//! that plane is closed under every optimal measurement here, so a basis is
//! a single angle.

use rand::Rng;

use crate::{Error, Result};

/// Posterior odds are clamped to this open interval to avoid absorbing
/// states from finite-precision likelihoods.
const POSTERIOR_CLAMP: f64 = 1e-12;

/// A pair of pure-state hypotheses on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPair {
    /// Half-angle `α ∈ (0, π/4]` between each state and the z axis.
    pub half_angle: f64,
    /// Prior probability of the `+` hypothesis, in `(0, 1)`.
    pub prior_plus: f64,
}

impl QubitPair {
    /// Builds a pair from its half-angle.
    pub fn new(half_angle: f64, prior_plus: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle <= std::f64::consts::FRAC_PI_4) {
            return Err(Error::InvalidSchedule(format!(
                "half-angle {half_angle} outside (0, π/4]"
            )));
        }
        if !(prior_plus > 0.0 && prior_plus < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "prior {prior_plus} outside (0, 1)"
            )));
        }
        Ok(Self { half_angle, prior_plus })
    }

    /// Builds a pair from the state overlap `⟨φ₊|φ₋⟩ = cos 2α ∈ [0, 1)`.
    pub fn from_overlap(overlap: f64, prior_plus: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&overlap) {
            return Err(Error::InvalidSchedule(format!(
                "overlap {overlap} outside [0, 1)"
            )));
        }
        Self::new(overlap.acos() / 2.0, prior_plus)
    }

    /// `⟨φ₊|φ₋⟩ = cos 2α`.
    pub fn overlap(&self) -> f64 {
        (2.0 * self.half_angle).cos()
    }

    /// Bloch vector `(x, z)` of hypothesis `s` (`+1` or `−1`).
    fn bloch(&self, plus: bool) -> (f64, f64) {
        let two_alpha = 2.0 * self.half_angle;
        let x = two_alpha.sin();
        (if plus { x } else { -x }, two_alpha.cos())
    }
}

/// Minimum achievable error probability for one-shot discrimination of two
/// pure states with overlap `overlap` and prior `q`:
/// `[1 − √(1 − 4q(1−q)·overlap²)] / 2`.
pub fn helstrom_bound(q: f64, overlap: f64) -> f64 {
    0.5 * (1.0 - (1.0 - 4.0 * q * (1.0 - q) * overlap * overlap).max(0.0).sqrt())
}

/// Per-copy record of one discrimination run.
#[derive(Debug, Clone)]
pub struct DiscriminationRecord {
    /// Bloch-plane angle of the measurement basis used on each copy.
    pub basis_angles: Vec<f64>,
    /// Outcome of each copy: `true` for the +basis eigenstate.
    pub outcomes: Vec<bool>,
    /// Posterior `q_t` after each copy.
    pub posteriors: Vec<f64>,
    /// Final guess: `true` for the `+` hypothesis.
    pub guess_plus: bool,
    /// Ground truth used for the simulation.
    pub truth_plus: bool,
}

impl DiscriminationRecord {
    /// Whether the final guess was wrong.
    pub fn is_error(&self) -> bool {
        self.guess_plus != self.truth_plus
    }
}

fn draw_truth<R: Rng + ?Sized>(pair: &QubitPair, rng: &mut R) -> bool {
    rng.gen::<f64>() < pair.prior_plus
}

/// Measures `σ·n̂(basis)` on a copy in the true state; returns `true` for
/// the +1 eigenvalue. `basis` is the Bloch-plane angle of `n̂` from z.
fn measure_copy<R: Rng + ?Sized>(
    pair: &QubitPair,
    truth_plus: bool,
    basis: f64,
    rng: &mut R,
) -> bool {
    let (rx, rz) = pair.bloch(truth_plus);
    let p_plus = 0.5 * (1.0 + rx * basis.sin() + rz * basis.cos());
    rng.gen::<f64>() < p_plus
}

/// Probability of the +1 outcome under hypothesis `plus` for basis angle.
fn outcome_probability(pair: &QubitPair, plus: bool, basis: f64) -> f64 {
    let (rx, rz) = pair.bloch(plus);
    0.5 * (1.0 + rx * basis.sin() + rz * basis.cos())
}

/// Bloch-plane angle of the single-copy Helstrom basis at posterior `q`:
/// the direction diagonalizing `q|φ₊⟩⟨φ₊| − (1−q)|φ₋⟩⟨φ₋|`.
pub fn helstrom_basis_angle(pair: &QubitPair, q: f64) -> f64 {
    let two_alpha = 2.0 * pair.half_angle;
    let vx = two_alpha.sin();
    let vz = (2.0 * q - 1.0) * two_alpha.cos();
    vx.atan2(vz)
}

/// Adaptive local-Helstrom discrimination over `copies` copies: each copy is
/// measured in the Helstrom basis for the current posterior, which is then
/// Bayes-updated; the final guess takes the posterior mode.
pub fn adaptive_local_run<R: Rng + ?Sized>(
    pair: &QubitPair,
    copies: usize,
    rng: &mut R,
) -> DiscriminationRecord {
    let truth_plus = draw_truth(pair, rng);
    let mut q = pair.prior_plus;
    let mut basis_angles = Vec::with_capacity(copies);
    let mut outcomes = Vec::with_capacity(copies);
    let mut posteriors = Vec::with_capacity(copies);
    for _ in 0..copies {
        let basis = helstrom_basis_angle(pair, q);
        let outcome = measure_copy(pair, truth_plus, basis, rng);
        let like_plus = outcome_likelihood(pair, true, basis, outcome);
        let like_minus = outcome_likelihood(pair, false, basis, outcome);
        let joint = q * like_plus + (1.0 - q) * like_minus;
        q = (q * like_plus / joint).clamp(POSTERIOR_CLAMP, 1.0 - POSTERIOR_CLAMP);
        basis_angles.push(basis);
        outcomes.push(outcome);
        posteriors.push(q);
    }
    DiscriminationRecord {
        basis_angles,
        outcomes,
        posteriors,
        guess_plus: q >= 0.5,
        truth_plus,
    }
}

fn outcome_likelihood(pair: &QubitPair, plus: bool, basis: f64, outcome: bool) -> f64 {
    let p = outcome_probability(pair, plus, basis);
    if outcome {
        p
    } else {
        1.0 - p
    }
}

/// Majority vote with the fixed unbiased basis (the Helstrom basis at
/// `q = 1/2`, i.e. the x axis). Even-`copies` ties are broken by a fair
/// coin.
pub fn majority_vote_run<R: Rng + ?Sized>(
    pair: &QubitPair,
    copies: usize,
    rng: &mut R,
) -> DiscriminationRecord {
    let truth_plus = draw_truth(pair, rng);
    let basis = helstrom_basis_angle(pair, 0.5);
    let mut plus_votes = 0usize;
    let mut basis_angles = Vec::with_capacity(copies);
    let mut outcomes = Vec::with_capacity(copies);
    let mut posteriors = Vec::with_capacity(copies);
    for t in 0..copies {
        let outcome = measure_copy(pair, truth_plus, basis, rng);
        if outcome {
            plus_votes += 1;
        }
        basis_angles.push(basis);
        outcomes.push(outcome);
        posteriors.push(plus_votes as f64 / (t + 1) as f64);
    }
    let guess_plus = match (2 * plus_votes).cmp(&copies) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => rng.gen::<bool>(),
    };
    DiscriminationRecord {
        basis_angles,
        outcomes,
        posteriors,
        guess_plus,
        truth_plus,
    }
}

/// Exact error probability of the majority vote (brute-force binomial
/// tail), used as the oracle for [`majority_vote_run`] at `q = 1/2`.
pub fn majority_vote_error_exact(pair: &QubitPair, copies: usize) -> f64 {
    // Per-copy probability of a wrong-sign outcome in the unbiased basis.
    let eps = 0.5 * (1.0 - (2.0 * pair.half_angle).sin());
    let mut error = 0.0;
    for wrong in 0..=copies {
        let weight = binomial(copies, wrong) * eps.powi(wrong as i32)
            * (1.0 - eps).powi((copies - wrong) as i32);
        if 2 * wrong > copies {
            error += weight;
        } else if 2 * wrong == copies {
            error += 0.5 * weight;
        }
    }
    error
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Coherent-state receiver in its qubit-copy limit.
#[derive(Debug, Clone, Copy)]
pub struct DolinarSetup {
    /// The per-segment qubit hypothesis pair.
    pub pair: QubitPair,
    /// Number of segments `M`.
    pub segments: usize,
    /// Ensemble error floor `[1 − √(1 − e^{−Δα²})]/2`.
    pub predicted_error: f64,
}

/// Maps the coherent-state pair `|±α⟩` with `α = Δα/2` onto `M` weakly
/// excited qubit copies `∝ |0⟩ ± (α/√M)|1⟩` and predicts the ensemble
/// error floor. Errors out when a segment is too strongly excited for the
/// two-level reduction (mean excitation above 0.1).
pub fn dolinar_qubit_pair(delta_alpha: f64, segments: usize) -> Result<DolinarSetup> {
    assert!(segments >= 1);
    let alpha = delta_alpha / 2.0;
    let excitation = alpha * alpha / segments as f64;
    if excitation > 0.1 {
        return Err(Error::SegmentTooStrong(excitation));
    }
    let half_angle = (alpha / (segments as f64).sqrt()).atan();
    let pair = QubitPair::new(half_angle.max(f64::MIN_POSITIVE), 0.5)?;
    let overlap_sq = (-delta_alpha * delta_alpha).exp();
    Ok(DolinarSetup {
        pair,
        segments,
        predicted_error: 0.5 * (1.0 - (1.0 - overlap_sq).sqrt()),
    })
}
