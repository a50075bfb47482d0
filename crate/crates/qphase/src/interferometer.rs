//! Physical model of one interferometer shot.
//!
//! A qubit prepared in `|+⟩` picks up the unknown phase `p` times
//! (`exp(ipφ|1⟩⟨1|)`) and the auxiliary phase once (`exp(iθ|0⟩⟨0|)`),
//! then is measured in the X basis. The outcome bit `u` has probability
//! `P(u | φ; p, θ) = [1 + (−1)^u cos(pφ − θ)] / 2`.

use rand::Rng;

/// One shot configuration: pass count and auxiliary phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    /// Number of passes through the unknown phase gate; each pass consumes
    /// one resource.
    pub passes: u32,
    /// Auxiliary phase in radians, normalized to `[0, 2π)`.
    pub theta: f64,
}

/// A setting together with its observed outcome bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    /// The issued setting.
    pub setting: MeasurementSetting,
    /// X-basis outcome, `0` or `1`.
    pub outcome: u8,
}

/// Probability of `outcome` given the true phase and a setting.
pub fn likelihood(outcome: u8, phi: f64, setting: &MeasurementSetting) -> f64 {
    debug_assert!(outcome <= 1);
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    0.5 * (1.0 + sign * (f64::from(setting.passes) * phi - setting.theta).cos())
}

/// Draws one outcome bit from the shot distribution.
pub fn sample_outcome<R: Rng + ?Sized>(phi: f64, setting: &MeasurementSetting, rng: &mut R) -> u8 {
    if rng.gen::<f64>() < likelihood(0, phi, setting) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    /// Brute-force 2-dimensional state-vector simulation of the circuit:
    /// |0⟩ → H → exp(iθ|0⟩⟨0|) → p × exp(iφ|1⟩⟨1|) → measure X.
    fn circuit_probability(outcome: u8, phi: f64, setting: &MeasurementSetting) -> f64 {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        // H|0⟩
        let mut amp0 = Complex64::new(inv_sqrt2, 0.0);
        let mut amp1 = Complex64::new(inv_sqrt2, 0.0);
        // auxiliary phase on |0⟩
        amp0 *= Complex64::from_polar(1.0, setting.theta);
        // p applications of the unknown phase on |1⟩
        for _ in 0..setting.passes {
            amp1 *= Complex64::from_polar(1.0, phi);
        }
        // X measurement: project on (|0⟩ ± |1⟩)/√2
        let plus = (amp0 + amp1) * inv_sqrt2;
        let minus = (amp0 - amp1) * inv_sqrt2;
        if outcome == 0 {
            plus.norm_sqr()
        } else {
            minus.norm_sqr()
        }
    }

    #[test]
    fn formula_matches_state_vector_circuit() {
        // Sign/offset convention check against the gate-level simulation.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let phi = rng.gen::<f64>() * TAU;
            let setting = MeasurementSetting {
                passes: rng.gen_range(1..=16),
                theta: rng.gen::<f64>() * TAU,
            };
            for outcome in [0u8, 1] {
                let formula = likelihood(outcome, phi, &setting);
                let circuit = circuit_probability(outcome, phi, &setting);
                assert!(
                    (formula - circuit).abs() < 1e-12,
                    "p={}, θ={}, φ={}: {} vs {}",
                    setting.passes,
                    setting.theta,
                    phi,
                    formula,
                    circuit
                );
            }
        }
    }

    #[test]
    fn interference_extremes() {
        let s = MeasurementSetting { passes: 1, theta: 0.9 };
        assert!((likelihood(0, 0.9, &s) - 1.0).abs() < 1e-15);
        assert!(likelihood(1, 0.9, &s).abs() < 1e-15);

        let s2 = MeasurementSetting { passes: 2, theta: PI / 2.0 };
        assert!((likelihood(0, PI / 2.0, &s2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = MeasurementSetting {
                passes: rng.gen_range(1..=32),
                theta: rng.gen::<f64>() * TAU,
            };
            let phi = rng.gen::<f64>() * TAU;
            let total = likelihood(0, phi, &s) + likelihood(1, phi, &s);
            assert_eq!(total, 1.0);
        }
    }

    #[test]
    fn periodic_in_phi_with_period_tau_over_p() {
        let s = MeasurementSetting { passes: 4, theta: 1.3 };
        for k in 0..4 {
            let phi = 0.77;
            let shifted = phi + TAU / 4.0 * k as f64;
            assert!((likelihood(0, phi, &s) - likelihood(0, shifted, &s)).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_shift_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = rng.gen_range(1..=8);
            let theta = rng.gen::<f64>() * TAU;
            let phi = rng.gen::<f64>() * TAU;
            let delta = rng.gen::<f64>() * TAU;
            let a = likelihood(0, phi, &MeasurementSetting { passes: p, theta });
            let b = likelihood(
                0,
                phi + delta,
                &MeasurementSetting {
                    passes: p,
                    theta: theta + f64::from(p) * delta,
                },
            );
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sampler_is_deterministic_at_certainty() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = MeasurementSetting { passes: 1, theta: 2.0 };
        for _ in 0..100 {
            assert_eq!(sample_outcome(2.0, &s, &mut rng), 0);
            assert_eq!(sample_outcome(2.0 + PI, &s, &mut rng), 1);
        }
    }

    #[test]
    fn sampler_frequency_tracks_likelihood() {
        // cos(π/3) = 1/2 → P(0) = 3/4.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = MeasurementSetting { passes: 1, theta: 0.0 };
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| sample_outcome(PI / 3.0, &s, &mut rng) == 0)
            .count();
        let p_hat = zeros as f64 / n as f64;
        let sigma = (0.75 * 0.25 / n as f64).sqrt();
        assert!((p_hat - 0.75).abs() < 3.0 * sigma);
    }
}
