//! Protocol schedulers: who measures next, with how many passes, at which
//! auxiliary phase, and what the final estimate is.
//!
//! All seven schedulers consume a fixed resource budget `N` (total passes
//! through the unknown phase gate) and share the same inner loop:
//! [`ProtocolRun::next_setting`] issues a [`MeasurementSetting`], the caller
//! samples an outcome, and [`ProtocolRun::absorb`] folds the shot into the
//! exact Fourier posterior (plus, for the phase estimation algorithm, the
//! classical feedback register).
//!
//! The kinds:
//!
//! - `Standard` — `N` single-pass shots, auxiliary phase swept in steps of
//!   `π/N`; the standard-quantum-limit baseline.
//! - `AdaptiveStandard` — single-pass shots with the locally optimal phase
//!   chosen before each shot.
//! - `Qpea` — one shot per level at `p = 2^K … 1`, bit feedback
//!   `θ ← θ + u·π/2^k`, estimate read from the feedback register.
//! - `Gqpea` — `M` shots per level with the locally optimal phase; the
//!   `M = 1` case reproduces `Qpea` exactly.
//! - `Hybrid` — a full `Qpea` stage on roughly a `qpea_fraction` share of
//!   the budget, then a standard sweep on the remainder.
//! - `Nala` — non-adaptive: `M(K,k) = M_K + ⌊μ(K−k)⌋` shots per level with
//!   a deterministic in-level sweep of `π/M(K,k)`.
//! - `NalaTwoTheta` — the provable variant with
//!   `M(K,k) = 18 + ⌊16 ln 2 · (K−k)⌋` shots alternating between two
//!   quadratures.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::interferometer::{sample_outcome, MeasurementSetting, Shot};
use crate::posterior::PhasePosterior;
use crate::{Error, Result};

/// Highest supported pass exponent; keeps `2^K` comfortably inside `u32`.
pub const MAX_LEVEL_CAP: u32 = 25;

/// A protocol kind with its parameters. Total resources are derived, never
/// stored, so a schedule cannot be internally inconsistent.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    /// `N` single-pass shots, phase swept by `π/N`.
    Standard {
        /// Number of qubits = resources `N`.
        qubits: u64,
    },
    /// `N` single-pass shots, locally optimal phase before every shot.
    AdaptiveStandard {
        /// Number of qubits = resources `N`.
        qubits: u64,
    },
    /// Phase estimation algorithm: levels `k = K..0`, one shot per level.
    Qpea {
        /// Maximum pass exponent `K`; resources `N = 2^{K+1} − 1`.
        max_level: u32,
    },
    /// Generalized algorithm: `M` shots per level, adaptive phase.
    Gqpea {
        /// Maximum pass exponent `K`.
        max_level: u32,
        /// Shots per level `M`; resources `N = M(2^{K+1} − 1)`.
        shots_per_level: u32,
    },
    /// Phase estimation algorithm stage followed by a standard sweep.
    Hybrid {
        /// Total resources `N`.
        resources: u64,
        /// Share of `N` given to the first stage (default 2/3).
        qpea_fraction: f64,
    },
    /// Non-adaptive local algorithm with a ramped repetition schedule.
    Nala {
        /// Maximum pass exponent `K`.
        max_level: u32,
        /// Repetitions at the top level, `M_K ≥ 1`.
        base_shots: u32,
        /// Ramp rate `μ ≥ 0` in `M(K,k) = M_K + ⌊μ(K−k)⌋`.
        ramp: f64,
    },
    /// Non-adaptive variant restricted to two phase values per level,
    /// with `M(K,k) = 18 + ⌊16 ln 2 · (K−k)⌋`.
    NalaTwoTheta {
        /// Maximum pass exponent `K`.
        max_level: u32,
    },
}

impl Protocol {
    /// Stable lower-case identifier used in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Standard { .. } => "standard",
            Protocol::AdaptiveStandard { .. } => "adaptive_standard",
            Protocol::Qpea { .. } => "qpea",
            Protocol::Gqpea { .. } => "gqpea",
            Protocol::Hybrid { .. } => "hybrid",
            Protocol::Nala { .. } => "nala",
            Protocol::NalaTwoTheta { .. } => "nala_two_theta",
        }
    }

    /// Checks parameter ranges; every run constructor calls this.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        match *self {
            Protocol::Standard { qubits } | Protocol::AdaptiveStandard { qubits } => {
                if qubits < 1 {
                    return bad("standard schemes need at least one qubit".into());
                }
            }
            Protocol::Qpea { max_level } | Protocol::NalaTwoTheta { max_level } => {
                if max_level > MAX_LEVEL_CAP {
                    return bad(format!("max level {max_level} exceeds cap {MAX_LEVEL_CAP}"));
                }
            }
            Protocol::Gqpea { max_level, shots_per_level } => {
                if max_level > MAX_LEVEL_CAP {
                    return bad(format!("max level {max_level} exceeds cap {MAX_LEVEL_CAP}"));
                }
                if shots_per_level < 1 {
                    return bad("shots per level must be at least 1".into());
                }
            }
            Protocol::Hybrid { resources, qpea_fraction } => {
                if !(qpea_fraction > 0.0 && qpea_fraction < 1.0) {
                    return bad(format!("fraction {qpea_fraction} must lie in (0, 1)"));
                }
                if (qpea_fraction * resources as f64) < 1.0 {
                    return bad(format!(
                        "budget {resources} with fraction {qpea_fraction} leaves no room for the first stage"
                    ));
                }
            }
            Protocol::Nala { max_level, base_shots, ramp } => {
                if max_level > MAX_LEVEL_CAP {
                    return bad(format!("max level {max_level} exceeds cap {MAX_LEVEL_CAP}"));
                }
                if base_shots < 1 {
                    return bad("base repetition count must be at least 1".into());
                }
                if !(ramp >= 0.0 && ramp.is_finite()) {
                    return bad(format!("ramp {ramp} must be finite and nonnegative"));
                }
            }
        }
        Ok(())
    }

    /// Total resource count `N` consumed by one complete run.
    pub fn total_resources(&self) -> u64 {
        match *self {
            Protocol::Standard { qubits } | Protocol::AdaptiveStandard { qubits } => qubits,
            Protocol::Qpea { max_level } => (1u64 << (max_level + 1)) - 1,
            Protocol::Gqpea { max_level, shots_per_level } => {
                u64::from(shots_per_level) * ((1u64 << (max_level + 1)) - 1)
            }
            Protocol::Hybrid { resources, .. } => resources,
            Protocol::Nala { max_level, base_shots, ramp } => (0..=max_level)
                .map(|k| (1u64 << k) * nala_level_shots(base_shots, ramp, max_level, k))
                .sum(),
            Protocol::NalaTwoTheta { max_level } => (0..=max_level)
                .map(|k| (1u64 << k) * two_theta_level_shots(max_level, k))
                .sum(),
        }
    }
}

/// Repetition count `M(K,k) = M_K + ⌊μ(K−k)⌋`, clamped to at least 1.
pub fn nala_level_shots(base_shots: u32, ramp: f64, max_level: u32, level: u32) -> u64 {
    let extra = (ramp * f64::from(max_level - level)).floor() as u64;
    (u64::from(base_shots) + extra).max(1)
}

/// Repetition count `18 + ⌊16 ln 2 · (K−k)⌋` of the two-phase variant.
pub fn two_theta_level_shots(max_level: u32, level: u32) -> u64 {
    18 + (16.0 * std::f64::consts::LN_2 * f64::from(max_level - level)).floor() as u64
}

/// A protocol plus the per-run random phase offset.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSchedule {
    /// Protocol kind and parameters.
    pub protocol: Protocol,
    /// Random offset `θ_init`, drawn per trial to make estimates unbiased.
    pub theta_init: f64,
}

/// One level of a multi-level plan.
#[derive(Debug, Clone, Copy)]
struct LevelSpec {
    /// Pass exponent `k`.
    exponent: u32,
    /// Shots scheduled at this level.
    shots: u64,
    /// Global shot index at which this level starts.
    start: u64,
}

/// How a level-structured plan picks the phase of each shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LevelRule {
    /// Applied phase is `p` times the bit-feedback register.
    Register,
    /// Locally optimal phase from the posterior before every shot.
    Adaptive,
    /// Deterministic in-level sweep of the applied phase by `π/M`.
    Sweep,
    /// Alternation between two fixed quadratures.
    TwoTheta,
}

/// Per-kind derived structure fixed at construction.
#[derive(Debug, Clone)]
enum Plan {
    /// Single-pass shots with a deterministic sweep.
    Sweep { shots: u64 },
    /// Single-pass shots with the locally optimal phase.
    AdaptiveSweep { shots: u64 },
    /// Descending power-of-two levels.
    Levels { levels: Vec<LevelSpec>, rule: LevelRule },
    /// Descending levels followed by a single-pass sweep.
    TwoStage { levels: Vec<LevelSpec>, sweep_shots: u64 },
}

fn descending_levels(max_level: u32, shots_at: impl Fn(u32) -> u64) -> Vec<LevelSpec> {
    let mut start = 0;
    (0..=max_level)
        .rev()
        .map(|k| {
            let shots = shots_at(k);
            let spec = LevelSpec { exponent: k, shots, start };
            start += shots;
            spec
        })
        .collect()
}

/// State of one protocol execution: schedule, exact posterior, shot record,
/// and the classical feedback register.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    schedule: ProtocolSchedule,
    plan: Plan,
    posterior: PhasePosterior,
    shots: Vec<Shot>,
    /// Feedback register `θ_current` of the phase estimation algorithm.
    register: f64,
    total_shots: u64,
}

impl ProtocolRun {
    /// Validates the schedule and derives the shot plan.
    pub fn new(schedule: ProtocolSchedule) -> Result<Self> {
        schedule.protocol.validate()?;
        let plan = match schedule.protocol {
            Protocol::Standard { qubits } => Plan::Sweep { shots: qubits },
            Protocol::AdaptiveStandard { qubits } => Plan::AdaptiveSweep { shots: qubits },
            Protocol::Qpea { max_level } => Plan::Levels {
                levels: descending_levels(max_level, |_| 1),
                rule: LevelRule::Register,
            },
            Protocol::Gqpea { max_level, shots_per_level } => Plan::Levels {
                levels: descending_levels(max_level, |_| u64::from(shots_per_level)),
                rule: LevelRule::Adaptive,
            },
            Protocol::Nala { max_level, base_shots, ramp } => Plan::Levels {
                levels: descending_levels(max_level, |k| nala_level_shots(base_shots, ramp, max_level, k)),
                rule: LevelRule::Sweep,
            },
            Protocol::NalaTwoTheta { max_level } => Plan::Levels {
                levels: descending_levels(max_level, |k| two_theta_level_shots(max_level, k)),
                rule: LevelRule::TwoTheta,
            },
            Protocol::Hybrid { resources, qpea_fraction } => {
                let budget = qpea_fraction * resources as f64;
                let mut max_level = 0u32;
                while ((1u64 << (max_level + 2)) - 1) as f64 <= budget {
                    max_level += 1;
                }
                let stage_one = (1u64 << (max_level + 1)) - 1;
                let sweep_shots = resources - stage_one;
                Plan::TwoStage {
                    levels: descending_levels(max_level, |_| 1),
                    sweep_shots,
                }
            }
        };
        let total_shots = match &plan {
            Plan::Sweep { shots } | Plan::AdaptiveSweep { shots } => *shots,
            Plan::Levels { levels, .. } => levels.iter().map(|l| l.shots).sum(),
            Plan::TwoStage { levels, sweep_shots } => {
                levels.iter().map(|l| l.shots).sum::<u64>() + sweep_shots
            }
        };
        let register = schedule.theta_init;
        Ok(Self {
            schedule,
            plan,
            posterior: PhasePosterior::uniform_prior(),
            shots: Vec::new(),
            register,
            total_shots,
        })
    }

    /// The schedule this run executes.
    pub fn schedule(&self) -> &ProtocolSchedule {
        &self.schedule
    }

    /// Current posterior.
    pub fn posterior(&self) -> &PhasePosterior {
        &self.posterior
    }

    /// All shots absorbed so far, in order.
    pub fn shots(&self) -> &[Shot] {
        &self.shots
    }

    /// Resources consumed so far.
    pub fn resources_used(&self) -> u64 {
        self.shots.iter().map(|s| u64::from(s.setting.passes)).sum()
    }

    /// Whether the resource budget is spent.
    pub fn is_complete(&self) -> bool {
        self.shots.len() as u64 == self.total_shots
    }

    fn level_at(levels: &[LevelSpec], index: u64) -> (LevelSpec, u64) {
        for spec in levels {
            if index < spec.start + spec.shots {
                return (*spec, index - spec.start);
            }
        }
        unreachable!("index beyond plan");
    }

    /// The next measurement to perform, or `None` when the budget is spent.
    ///
    /// Pure with respect to run state: calling it repeatedly without
    /// absorbing a shot returns the same setting.
    pub fn next_setting(&self) -> Option<MeasurementSetting> {
        let index = self.shots.len() as u64;
        if index >= self.total_shots {
            return None;
        }
        let theta_init = self.schedule.theta_init;
        let setting = match &self.plan {
            Plan::Sweep { shots } => MeasurementSetting {
                passes: 1,
                theta: (theta_init + index as f64 * PI / *shots as f64).rem_euclid(TAU),
            },
            Plan::AdaptiveSweep { .. } => MeasurementSetting {
                passes: 1,
                theta: if index == 0 {
                    theta_init.rem_euclid(TAU)
                } else {
                    locally_optimal_theta(&self.posterior, 1)
                },
            },
            Plan::Levels { levels, rule } => {
                let (level, within) = Self::level_at(levels, index);
                let passes = 1u32 << level.exponent;
                let theta = match rule {
                    LevelRule::Register => (f64::from(passes) * self.register).rem_euclid(TAU),
                    LevelRule::Adaptive => {
                        if index == 0 {
                            (f64::from(passes) * theta_init).rem_euclid(TAU)
                        } else {
                            locally_optimal_theta(&self.posterior, passes)
                        }
                    }
                    LevelRule::TwoTheta => {
                        let quadrature = if within % 2 == 0 { 0.0 } else { PI / 2.0 };
                        (f64::from(passes) * theta_init + quadrature).rem_euclid(TAU)
                    }
                    LevelRule::Sweep => {
                        // The sweep steps the applied phase. Stepping the
                        // register θ instead would step the applied phase
                        // by 2^k π/M, which wraps to zero whenever M
                        // divides 2^{k−1} and leaves whole levels
                        // measuring a single quadrature.
                        let step = PI / level.shots as f64;
                        (f64::from(passes) * theta_init + within as f64 * step).rem_euclid(TAU)
                    }
                };
                MeasurementSetting { passes, theta }
            }
            Plan::TwoStage { levels, sweep_shots } => {
                let stage_one: u64 = levels.iter().map(|l| l.shots).sum();
                if index < stage_one {
                    let (level, _) = Self::level_at(levels, index);
                    let passes = 1u32 << level.exponent;
                    MeasurementSetting {
                        passes,
                        theta: (f64::from(passes) * self.register).rem_euclid(TAU),
                    }
                } else {
                    let j = index - stage_one;
                    MeasurementSetting {
                        passes: 1,
                        theta: (theta_init + j as f64 * PI / *sweep_shots as f64).rem_euclid(TAU),
                    }
                }
            }
        };
        Some(setting)
    }

    /// Absorbs the outcome of the setting last issued by
    /// [`Self::next_setting`]: Bayesian posterior update plus, for
    /// register-driven kinds, the bit feedback `θ ← θ + u·π/2^k`.
    pub fn absorb(&mut self, shot: Shot) -> Result<()> {
        let expected = self.next_setting().ok_or(Error::RunComplete)?;
        if shot.setting != expected {
            return Err(Error::OutOfOrderShot);
        }
        self.posterior = self
            .posterior
            .bayes_update(shot.setting.passes, shot.setting.theta, shot.outcome)?;

        let register_driven = match &self.plan {
            Plan::Levels { rule, .. } => *rule == LevelRule::Register,
            Plan::TwoStage { levels, .. } => {
                (self.shots.len() as u64) < levels.iter().map(|l| l.shots).sum::<u64>()
            }
            _ => false,
        };
        if register_driven && shot.outcome == 1 {
            self.register += PI / f64::from(shot.setting.passes);
        }
        self.shots.push(shot);
        Ok(())
    }

    /// Final phase estimate in `[0, 2π)`.
    ///
    /// The plain phase estimation algorithm reads its feedback register;
    /// every other kind takes the circular mean of the posterior.
    pub fn finalize(&self) -> Result<f64> {
        if !self.is_complete() {
            return Err(Error::IncompleteRun);
        }
        match self.schedule.protocol {
            Protocol::Qpea { .. } => Ok(self.register.rem_euclid(TAU)),
            _ => self.posterior.circular_mean(),
        }
    }

    /// Drives the full loop against a true phase `phi`, sampling outcomes
    /// from `rng`, and returns the final estimate.
    pub fn run_to_completion<R: Rng + ?Sized>(&mut self, phi: f64, rng: &mut R) -> Result<f64> {
        while let Some(setting) = self.next_setting() {
            let outcome = sample_outcome(phi, &setting, rng);
            self.absorb(Shot { setting, outcome })?;
        }
        self.finalize()
    }
}

/// Locally optimal auxiliary phase for a `passes`-pass shot on `post`.
///
/// Maximizes the expected post-measurement sharpness at the harmonic the
/// shot probes: `G(θ) = Σ_u |c'_p(u; θ)|` with the unnormalized moments
/// `c'_p(u; θ) = c_p/2 + (−1)^u (e^{−iθ} c_{2p} + e^{iθ} c_0)/4`.
/// For `p = 1` this is the expected first-moment sharpness (the expected
/// Holevo variance is minimized by maximizing it); for larger `p` it is the
/// same objective one octave up, which is what makes the generalized
/// algorithm at one shot per level coincide with the plain bit-feedback
/// rule. A flat objective (uniform prior) returns 0 by the tie-break; the
/// caller is expected to add its own random offset in that case.
///
/// Solved on a 64-point grid refined by golden section to below 1e−10.
pub fn locally_optimal_theta(post: &PhasePosterior, passes: u32) -> f64 {
    let p = i64::from(passes);
    let half_cp = 0.5 * post.moment(p);
    let c2p = post.moment(2 * p);

    let objective = |theta: f64| -> f64 {
        let fwd = Complex64::from_polar(0.25, theta);
        let back = Complex64::from_polar(0.25, -theta) * c2p;
        let arm = fwd + back;
        (half_cp + arm).norm() + (half_cp - arm).norm()
    };

    const GRID: usize = 64;
    let mut best_idx = 0;
    let mut best = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    for i in 0..GRID {
        let theta = TAU * i as f64 / GRID as f64;
        let g = objective(theta);
        if g > best {
            best = g;
            best_idx = i;
        }
        worst = worst.min(g);
    }
    if best - worst < 1e-14 * best.max(1.0) {
        return 0.0; // flat objective: every phase is equally good
    }

    let step = TAU / GRID as f64;
    let center = TAU * best_idx as f64 / GRID as f64;
    golden_section_max(objective, center - step, center + step, 1e-10).rem_euclid(TAU)
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}
