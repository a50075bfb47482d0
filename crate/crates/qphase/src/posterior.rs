//! Bayesian knowledge of the unknown phase as a finite Fourier series.
//!
//! Every measurement likelihood in this crate is of the form
//! `[1 ± cos(pφ − θ)]/2`, so a posterior that starts uniform stays an exact
//! trigonometric polynomial. We store its Fourier moments
//! `c_n = E[e^{inφ}]` for `n = 0..=H`; negative harmonics follow from
//! conjugate symmetry and are not stored. This keeps updates exact and O(H),
//! with the grid-based route relegated to [`grid_bayes_posterior`] as a
//! brute-force cross-check.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::interferometer::{likelihood, Shot};
use crate::{Error, Result};

/// Moments with magnitude below this are treated as vanishing when taking
/// `arg` or inverting for a variance.
pub const MOMENT_FLOOR: f64 = 1e-12;

/// Unnormalized outcome probabilities at or below this signal an impossible
/// outcome rather than a rounding artifact.
const PROBABILITY_FLOOR: f64 = 1e-300;

/// Phase distribution stored as Fourier moments `c_0..c_H`.
///
/// Invariants kept by every constructor and update:
/// - `c_0 = 1` exactly,
/// - `|c_n| ≤ 1` up to rounding,
/// - the reconstructed density is nonnegative up to rounding slack.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePosterior {
    coeffs: Vec<Complex64>,
}

impl PhasePosterior {
    /// The uniform density on `[0, 2π)`: no harmonics, `c_0 = 1`.
    pub fn uniform_prior() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Builds a posterior directly from moments. `coeffs[0]` must be 1 and
    /// magnitudes must not exceed 1; intended for tests and shifted copies.
    pub fn from_moments(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        debug_assert!((coeffs[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        Self { coeffs }
    }

    /// Highest harmonic that can be nonzero given the measurements absorbed
    /// so far (the total pass count).
    pub fn max_harmonic(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Stored moments `c_0..c_H`.
    pub fn moments(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Moment `c_n` for any integer `n`, using conjugate symmetry below zero
    /// and the harmonic budget (zero) above `H`.
    pub fn moment(&self, n: i64) -> Complex64 {
        let idx = n.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            None => Complex64::new(0.0, 0.0),
            Some(c) if n >= 0 => *c,
            Some(c) => c.conj(),
        }
    }

    /// Reconstructed density at `phi`:
    /// `P(φ) = (1/2π)[1 + 2 Σ_{n≥1} Re(c_n e^{-inφ})]`.
    pub fn density(&self, phi: f64) -> f64 {
        let mut acc = 1.0;
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            let rot = Complex64::from_polar(1.0, -(n as f64) * phi);
            acc += 2.0 * (c * rot).re;
        }
        acc / TAU
    }

    /// Absorbs one shot with pass count `passes`, auxiliary phase `theta`,
    /// and outcome bit `outcome`, returning the normalized posterior.
    ///
    /// The unnormalized update in Fourier form is
    /// `c'_n = c_n/2 + (−1)^u (e^{−iθ} c_{n+p} + e^{iθ} c_{n−p})/4`;
    /// the new moments are then divided by `c'_0` (the outcome probability)
    /// and the harmonic budget grows by `passes`.
    pub fn bayes_update(&self, passes: u32, theta: f64, outcome: u8) -> Result<Self> {
        debug_assert!(passes >= 1);
        debug_assert!(outcome <= 1);
        let p = i64::from(passes);
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let e_minus = Complex64::from_polar(0.25 * sign, -theta);
        let e_plus = Complex64::from_polar(0.25 * sign, theta);

        let new_len = self.coeffs.len() + passes as usize;
        let mut updated = Vec::with_capacity(new_len);
        for n in 0..new_len as i64 {
            updated.push(0.5 * self.moment(n) + e_minus * self.moment(n + p) + e_plus * self.moment(n - p));
        }

        let norm = updated[0].re;
        if norm <= PROBABILITY_FLOOR {
            return Err(Error::DegenerateLikelihood {
                passes,
                theta,
                outcome,
            });
        }
        for c in &mut updated {
            *c /= norm;
        }
        updated[0] = Complex64::new(1.0, 0.0);
        Ok(Self { coeffs: updated })
    }

    /// Probability of observing `outcome` on the next shot, given this
    /// posterior: the normalizer of the corresponding update.
    pub fn outcome_probability(&self, passes: u32, theta: f64, outcome: u8) -> f64 {
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let cp = self.moment(i64::from(passes));
        0.5 + 0.5 * sign * (Complex64::from_polar(1.0, -theta) * cp).re
    }

    /// Rigid rotation of the distribution: `c_n ← c_n e^{inΔ}` shifts all
    /// probability mass by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * delta))
            .collect();
        Self { coeffs }
    }

    /// Circular mean `arg(c_1)` mapped to `[0, 2π)`.
    pub fn circular_mean(&self) -> Result<f64> {
        let c1 = self.moment(1);
        if c1.norm() < MOMENT_FLOOR {
            return Err(Error::UndefinedEstimate);
        }
        Ok(c1.arg().rem_euclid(TAU))
    }

    /// Holevo variance `|c_1|⁻² − 1`; `f64::INFINITY` when the first moment
    /// vanishes (uniform prior, symmetric bimodal distributions, ...).
    pub fn holevo_variance(&self) -> f64 {
        holevo_variance_from_sharpness(self.moment(1).norm())
    }
}

/// Holevo variance of a set of angular errors: with
/// `S = |mean of e^{iδ}|`, returns `S⁻² − 1`, divergent as `f64::INFINITY`
/// when `S` vanishes.
pub fn holevo_variance_of_samples(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for &e in errors {
        sum += Complex64::from_polar(1.0, e);
    }
    Ok(holevo_variance_from_sharpness(sum.norm() / errors.len() as f64))
}

/// `S⁻² − 1` with the divergence cutoff at [`MOMENT_FLOOR`].
pub fn holevo_variance_from_sharpness(sharpness: f64) -> f64 {
    if sharpness < MOMENT_FLOOR {
        f64::INFINITY
    } else {
        sharpness.powi(-2) - 1.0
    }
}

/// Brute-force posterior: multiplies the shot likelihoods pointwise on a
/// uniform `grid_size`-point grid over `[0, 2π)` and recovers the Fourier
/// moments by quadrature. Exact for trigonometric polynomials whenever
/// `grid_size` exceeds twice the total pass count; the precondition
/// `grid_size ≥ 16 · Σp` leaves ample margin. Cross-check only — the
/// sequential [`PhasePosterior::bayes_update`] is the production path.
pub fn grid_bayes_posterior(shots: &[Shot], grid_size: usize) -> Result<PhasePosterior> {
    let budget: usize = shots.iter().map(|s| s.setting.passes as usize).sum();
    debug_assert!(grid_size >= 16 * budget.max(1));

    let mut weights = vec![1.0f64; grid_size];
    for shot in shots {
        for (j, w) in weights.iter_mut().enumerate() {
            let phi = TAU * j as f64 / grid_size as f64;
            *w *= likelihood(shot.outcome, phi, &shot.setting);
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= PROBABILITY_FLOOR {
        let last = shots.last().expect("empty shot list cannot be degenerate");
        return Err(Error::DegenerateLikelihood {
            passes: last.setting.passes,
            theta: last.setting.theta,
            outcome: last.outcome,
        });
    }

    let mut coeffs = Vec::with_capacity(budget + 1);
    for n in 0..=budget {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &w) in weights.iter().enumerate() {
            let phi = TAU * j as f64 / grid_size as f64;
            acc += w * Complex64::from_polar(1.0, n as f64 * phi);
        }
        coeffs.push(acc / total);
    }
    coeffs[0] = Complex64::new(1.0, 0.0);
    Ok(PhasePosterior { coeffs })
}
