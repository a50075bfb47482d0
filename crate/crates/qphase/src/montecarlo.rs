//! Monte Carlo harness: independent protocol trials, Holevo variance with
//! percentile-bootstrap confidence intervals, and log-log scaling fits.
//!
//! Reproducibility contract: all randomness of a batch derives from
//! `(seed, trial_index)` via independent ChaCha streams, so results are
//! bit-identical regardless of thread count or execution order. Bootstrap
//! resampling uses a stream index no trial can reach.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::policies::{Protocol, ProtocolRun, ProtocolSchedule};
use crate::posterior::holevo_variance_of_samples;
use crate::stats::{bootstrap_holevo_ci, wrap_to_signed};
use crate::{Error, Result};

/// Bootstrap resample count for the 95% confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 2000;

const BOOTSTRAP_STREAM: u64 = u64::MAX;

/// Deterministic per-trial random stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Mixes a base seed with a sweep index into an independent batch seed
/// (splitmix64 step).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Aggregated result of many independent trials of one schedule.
#[derive(Debug, Clone)]
pub struct TrialBatch {
    /// The protocol that was run.
    pub protocol: Protocol,
    /// Number of trials.
    pub trials: usize,
    /// Batch seed.
    pub seed: u64,
    /// Wrapped estimate errors `φ_est − φ ∈ (−π, π]`, one per trial,
    /// in trial order.
    pub errors: Vec<f64>,
    /// Holevo variance of the errors; `f64::INFINITY` when divergent.
    pub holevo_variance: f64,
    /// Lower 95% percentile-bootstrap bound.
    pub ci_low: f64,
    /// Upper 95% percentile-bootstrap bound.
    pub ci_high: f64,
}

impl TrialBatch {
    /// Resource count `N` of the protocol.
    pub fn resources(&self) -> u64 {
        self.protocol.total_resources()
    }

    /// Whether the variance estimate diverged.
    pub fn is_divergent(&self) -> bool {
        !self.holevo_variance.is_finite()
    }

    /// `√V`, the dispersion the scaling plots use.
    pub fn dispersion(&self) -> f64 {
        self.holevo_variance.sqrt()
    }
}

/// Runs `trials` independent executions of `protocol` with per-trial
/// `φ ~ U[0, 2π)` and `θ_init ~ U[0, 2π)` drawn from stream
/// `(seed, trial)`, and aggregates the Holevo variance with a 95%
/// percentile-bootstrap interval.
pub fn run_batch(protocol: &Protocol, trials: usize, seed: u64) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::EmptySamples);
    }
    protocol.validate()?;

    let results: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let phi = rng.gen::<f64>() * TAU;
            let theta_init = rng.gen::<f64>() * TAU;
            let mut run = ProtocolRun::new(ProtocolSchedule {
                protocol: protocol.clone(),
                theta_init,
            })?;
            let estimate = run.run_to_completion(phi, &mut rng)?;
            Ok(wrap_to_signed(estimate - phi))
        })
        .collect();

    let mut errors = Vec::with_capacity(trials);
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(e) => errors.push(e),
            Err(e) => {
                return Err(Error::TrialFailed {
                    trial,
                    source: Box::new(e),
                })
            }
        }
    }

    let holevo_variance = holevo_variance_of_samples(&errors)?;
    let mut boot_rng = ChaCha8Rng::seed_from_u64(seed);
    boot_rng.set_stream(BOOTSTRAP_STREAM);
    let (ci_low, ci_high) =
        bootstrap_holevo_ci(&errors, BOOTSTRAP_RESAMPLES, 0.025, 0.975, &mut boot_rng);

    Ok(TrialBatch {
        protocol: protocol.clone(),
        trials,
        seed,
        errors,
        holevo_variance,
        ci_low,
        ci_high,
    })
}

/// Power-law fit of variance against resource count.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    /// The fitted `(N, V)` points.
    pub points: Vec<(f64, f64)>,
    /// Free least-squares slope of `ln V` against `ln N`.
    pub exponent: f64,
    /// Free-fit intercept (`ln V` at `ln N = 0`).
    pub intercept: f64,
    /// Constant `C` of the fixed-slope model `V = (C/N)²`.
    pub constant: f64,
    /// Free-fit residuals in `ln V`.
    pub residuals: Vec<f64>,
}

/// Least squares on `(ln N, ln V)`: free slope plus the fixed-slope(−2)
/// constant `C = exp(intercept₋₂ / 2)`. Requires at least three points
/// with distinct `N` and finite positive `V`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let clean: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(n, v)| n > 0.0 && v > 0.0 && v.is_finite())
        .collect();
    let mut ns: Vec<u64> = clean.iter().map(|&(n, _)| n.to_bits()).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::DegenerateFit);
    }

    let logs: Vec<(f64, f64)> = clean.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let exponent = (m * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / m;
    let residuals = logs
        .iter()
        .map(|&(x, y)| y - (intercept + exponent * x))
        .collect();

    // slope pinned to −2: intercept is the mean of ln V + 2 ln N
    let intercept_fixed = logs.iter().map(|&(x, y)| y + 2.0 * x).sum::<f64>() / m;
    let constant = (intercept_fixed / 2.0).exp();

    Ok(ScalingFit {
        points: clean,
        exponent,
        intercept,
        constant,
        residuals,
    })
}

/// Runs one batch per protocol in `family` (derived per-size seeds) and
/// fits the scaling of variance against resources.
pub fn sweep(family: &[Protocol], trials: usize, seed: u64) -> Result<(Vec<TrialBatch>, ScalingFit)> {
    let mut batches = Vec::with_capacity(family.len());
    for (i, protocol) in family.iter().enumerate() {
        batches.push(run_batch(protocol, trials, derive_seed(seed, i as u64))?);
    }
    let points: Vec<(f64, f64)> = batches
        .iter()
        .map(|b| (b.resources() as f64, b.holevo_variance))
        .collect();
    let fit = fit_scaling(&points)?;
    Ok((batches, fit))
}
