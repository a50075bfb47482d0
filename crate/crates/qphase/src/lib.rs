//! Simulation and analysis toolkit for single-qubit interferometric phase
//! estimation and binary quantum state discrimination.
//!
//! A single qubit passes `p` times through an unknown phase gate and once
//! through a controllable auxiliary phase, then is measured in the X basis.
//! Everything else in this crate is built around that one-bit measurement:
//!
//! - [`posterior`] — exact Bayesian knowledge of the phase as a finite
//!   Fourier series, with circular mean and Holevo variance.
//! - [`interferometer`] — outcome probabilities and sampling for a single
//!   multi-pass shot.
//! - [`policies`] — the protocol schedulers (standard sweep, adaptive
//!   standard, phase estimation algorithm and its generalization, hybrid,
//!   and the non-adaptive ramped schedules), each deciding the next shot
//!   and producing a final estimate.
//! - [`oracles`] — closed-form references: canonical phase measurement on
//!   symmetric states, standard-quantum-limit and Heisenberg-limit curves,
//!   the Fejér error kernel, Fisher information.
//! - [`discrimination`] — Helstrom bound, adaptive local-Helstrom
//!   discrimination of nonorthogonal qubit pairs, majority voting, and the
//!   coherent-state receiver in its qubit-copy limit.
//! - [`montecarlo`] — reproducible trial batches, bootstrap confidence
//!   intervals, and log-log scaling fits.
//!
//! Angles are radians everywhere. Variances of angular errors use the
//! Holevo measure `|⟨e^{iδ}⟩|⁻² − 1`, which is cycle-safe and diverges
//! (reported as `f64::INFINITY`) when the mean resultant length vanishes.
//!
//! # Quick start
//!
//! ```
//! use qphase::montecarlo::run_batch;
//! use qphase::policies::Protocol;
//!
//! // Phase estimation algorithm with pass counts 8, 4, 2, 1 (15 resources).
//! let batch = run_batch(&Protocol::Qpea { max_level: 3 }, 2000, 7).unwrap();
//! assert!(batch.holevo_variance > 0.0 && batch.holevo_variance < 1.0);
//! ```

pub mod discrimination;
pub mod interferometer;
pub mod montecarlo;
pub mod oracles;
pub mod policies;
pub mod posterior;
pub mod stats;

pub mod guide;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The observed outcome has (numerically) zero probability under the
    /// prior, so the Bayesian update cannot be normalized.
    #[error("outcome {outcome} has zero probability under the prior (p = {passes}, theta = {theta})")]
    DegenerateLikelihood {
        /// Pass count of the offending shot.
        passes: u32,
        /// Auxiliary phase of the offending shot.
        theta: f64,
        /// Observed outcome bit.
        outcome: u8,
    },

    /// The first posterior moment vanishes; no circular mean exists.
    #[error("first posterior moment vanishes; circular mean is undefined")]
    UndefinedEstimate,

    /// An aggregate over samples was requested for an empty sample set.
    #[error("empty sample set")]
    EmptySamples,

    /// A shot was absorbed that does not match the setting last issued.
    #[error("shot does not match the pending setting")]
    OutOfOrderShot,

    /// A final estimate was requested before the resource budget was spent.
    #[error("protocol run is not complete")]
    IncompleteRun,

    /// A shot was absorbed after the resource budget was exhausted.
    #[error("protocol run is already complete")]
    RunComplete,

    /// Schedule parameters are inconsistent with the protocol kind.
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    /// A scaling fit needs at least three distinct finite points.
    #[error("scaling fit needs at least 3 distinct resource counts with finite variance")]
    DegenerateFit,

    /// The coherent-state segmentation is too coarse for the qubit reduction.
    #[error("per-segment excitation {0} exceeds 0.1; use more segments")]
    SegmentTooStrong(f64),

    /// A Monte Carlo trial failed; carries the offending trial index.
    #[error("trial {trial} failed: {source}")]
    TrialFailed {
        /// Index of the trial that failed.
        trial: usize,
        /// Underlying error.
        source: Box<Error>,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
