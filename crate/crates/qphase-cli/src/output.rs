//! Runners and serialization. CSV schemas are frozen strings; floats are
//! written with Rust's shortest round-trip formatting, so reruns are
//! byte-identical.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qphase::discrimination::{
    adaptive_local_run, dolinar_qubit_pair, helstrom_bound, majority_vote_run, QubitPair,
};
use qphase::montecarlo::{run_batch, trial_rng, TrialBatch};
use qphase::oracles::{
    canonical_holevo_variance, canonical_sharpness, flat_state, noon_state, optimal_state,
    phase_limits, qpea_error_density,
};
use qphase::policies::Protocol;

use crate::args::{
    CliError, CliResult, DiscriminateConfig, OracleConfig, Scheme, SimulateConfig, StateKind,
};

/// Successful-run disposition.
pub enum Status {
    Ok,
    /// Every emitted row was divergent (exit code 4).
    AllDivergent,
}

pub const SIMULATE_COMMENT: &str =
    "# qphase simulate: angles in radians; holevo_variance = |<e^{i d}>|^-2 - 1, inf when divergent";
pub const SIMULATE_HEADER: &str =
    "protocol,K,M,M_K,mu,N,trials,seed,holevo_variance,ci_low,ci_high,sqrt_V,divergent";
pub const LIMITS_COMMENT: &str =
    "# qphase oracle --limits: variances against resource count N; angles in radians";
pub const LIMITS_HEADER: &str = "N,sql,hl,hl_asymptotic";
pub const DENSITY_COMMENT: &str =
    "# qphase oracle --qpea-density: error density for N resources (kernel order N+1); angles in radians";
pub const DENSITY_HEADER: &str = "delta_phi,density";
pub const STATE_COMMENT: &str =
    "# qphase oracle --state: canonical-measurement summary; angles in radians";
pub const STATE_HEADER: &str = "state,N,sharpness,holevo_variance,divergent";
pub const DISCRIMINATE_COMMENT: &str =
    "# qphase discriminate: error rates with Wilson 95% intervals; angles in radians";
pub const DISCRIMINATE_HEADER: &str =
    "scheme,alpha,overlap,M,q,trials,seed,error_rate,helstrom_bound,ci_low,ci_high";

/// Shortest round-trip decimal; infinities print as `inf`.
fn fmt(v: f64) -> String {
    format!("{v}")
}

fn deliver(csv: &str, out: Option<&Path>, sidecar: Option<serde_json::Value>) -> CliResult<()> {
    match out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, csv)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if let Some(json) = sidecar {
                let sidecar_path = sidecar_path(path);
                let pretty = serde_json::to_string_pretty(&json)
                    .expect("sidecar serialization cannot fail");
                std::fs::write(&sidecar_path, pretty + "\n")
                    .map_err(|e| CliError::Io(format!("{}: {e}", sidecar_path.display())))?;
            }
            Ok(())
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Short factual description of each protocol, recorded in the sidecar.
fn protocol_note(protocol: &Protocol) -> &'static str {
    match protocol {
        Protocol::Standard { .. } => {
            "single-pass shots, auxiliary phase swept in steps of pi/N, posterior-mean estimate"
        }
        Protocol::AdaptiveStandard { .. } => {
            "single-pass shots, locally optimal auxiliary phase, posterior-mean estimate"
        }
        Protocol::Qpea { .. } => {
            "one shot per power-of-two pass count, bit feedback theta += u*pi/2^k, register estimate"
        }
        Protocol::Gqpea { .. } => {
            "M shots per power-of-two pass count, locally optimal phase, posterior-mean estimate"
        }
        Protocol::Hybrid { .. } => {
            "register-feedback stage on ~2/3 of the budget, then a single-pass sweep; posterior-mean estimate"
        }
        Protocol::Nala { .. } => {
            "non-adaptive: M_K + floor(mu*(K-k)) shots per level, in-level sweep pi/M; posterior-mean estimate"
        }
        Protocol::NalaTwoTheta { .. } => {
            "non-adaptive proof variant: 18 + floor(16 ln2 (K-k)) shots per level, two quadratures; posterior-mean estimate"
        }
    }
}

fn simulate_row(batch: &TrialBatch) -> String {
    let p = &batch.protocol;
    let (k, m, m_k, mu) = match *p {
        Protocol::Standard { qubits } | Protocol::AdaptiveStandard { qubits } => {
            (String::new(), qubits.to_string(), String::new(), String::new())
        }
        Protocol::Qpea { max_level } => {
            (max_level.to_string(), String::new(), String::new(), String::new())
        }
        Protocol::Gqpea { max_level, shots_per_level } => (
            max_level.to_string(),
            shots_per_level.to_string(),
            String::new(),
            String::new(),
        ),
        Protocol::Hybrid { .. } => (String::new(), String::new(), String::new(), String::new()),
        Protocol::Nala { max_level, base_shots, ramp } => (
            max_level.to_string(),
            String::new(),
            base_shots.to_string(),
            fmt(ramp),
        ),
        Protocol::NalaTwoTheta { max_level } => {
            (max_level.to_string(), String::new(), String::new(), String::new())
        }
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        p.name(),
        k,
        m,
        m_k,
        mu,
        batch.resources(),
        batch.trials,
        batch.seed,
        fmt(batch.holevo_variance),
        fmt(batch.ci_low),
        fmt(batch.ci_high),
        fmt(batch.dispersion()),
        batch.is_divergent()
    )
}

pub fn run_simulate(cfg: SimulateConfig) -> CliResult<Status> {
    let mut batches = Vec::with_capacity(cfg.family.len());
    let mut fit_json = serde_json::Value::Null;
    if cfg.sweep {
        // Same seed derivation as `montecarlo::sweep`, but a sweep too
        // short (or too divergent) for a scaling fit still emits its rows;
        // the sidecar then reports no fit.
        for (i, protocol) in cfg.family.iter().enumerate() {
            let seed = qphase::montecarlo::derive_seed(cfg.seed, i as u64);
            batches.push(
                run_batch(protocol, cfg.trials, seed)
                    .map_err(|e| CliError::Invalid(e.to_string()))?,
            );
        }
        let points: Vec<(f64, f64)> = batches
            .iter()
            .map(|b| (b.resources() as f64, b.holevo_variance))
            .collect();
        if let Ok(fit) = qphase::montecarlo::fit_scaling(&points) {
            fit_json = serde_json::json!({
                "exponent": fit.exponent,
                "fixed_slope_constant": fit.constant,
            });
        }
    } else {
        for protocol in &cfg.family {
            batches.push(
                run_batch(protocol, cfg.trials, cfg.seed)
                    .map_err(|e| CliError::Invalid(e.to_string()))?,
            );
        }
    }

    let mut csv = String::new();
    csv.push_str(SIMULATE_COMMENT);
    csv.push('\n');
    csv.push_str(SIMULATE_HEADER);
    csv.push('\n');
    for batch in &batches {
        csv.push_str(&simulate_row(batch));
        csv.push('\n');
    }

    let mut notes = serde_json::Map::new();
    for batch in &batches {
        notes.insert(
            batch.protocol.name().to_string(),
            serde_json::Value::String(protocol_note(&batch.protocol).to_string()),
        );
    }
    let sidecar = serde_json::json!({
        "config": cfg.descriptor,
        "fit": fit_json,
        "protocols": notes,
    });

    deliver(&csv, cfg.out.as_deref(), Some(sidecar))?;
    if batches.iter().all(TrialBatch::is_divergent) {
        Ok(Status::AllDivergent)
    } else {
        Ok(Status::Ok)
    }
}

pub fn run_oracle(cfg: OracleConfig) -> CliResult<Status> {
    match cfg {
        OracleConfig::Limits { range, out, descriptor } => {
            let mut csv = format!("{LIMITS_COMMENT}\n{LIMITS_HEADER}\n");
            for n in range.0..=range.1 {
                let l = phase_limits(n as usize);
                csv.push_str(&format!(
                    "{n},{},{},{}\n",
                    fmt(l.sql),
                    fmt(l.heisenberg),
                    fmt(l.heisenberg_asymptotic)
                ));
            }
            let sidecar = serde_json::json!({ "config": descriptor });
            deliver(&csv, out.as_deref(), Some(sidecar))?;
            Ok(Status::Ok)
        }
        OracleConfig::Density { resources, points, out, descriptor } => {
            let order = resources + 1;
            let mut csv = format!("{DENSITY_COMMENT}\n{DENSITY_HEADER}\n");
            for j in 0..points {
                let delta = -PI + 2.0 * PI * j as f64 / (points - 1) as f64;
                let density = qpea_error_density(delta, order) / (2.0 * PI);
                csv.push_str(&format!("{},{}\n", fmt(delta), fmt(density)));
            }
            let sidecar = serde_json::json!({ "config": descriptor, "kernel_order": order });
            deliver(&csv, out.as_deref(), Some(sidecar))?;
            Ok(Status::Ok)
        }
        OracleConfig::State { kind, resources, out, descriptor } => {
            let (label, state) = match kind {
                StateKind::Flat => ("flat", flat_state(resources)),
                StateKind::Optimal => ("optimal", optimal_state(resources)),
                StateKind::Noon => ("noon", noon_state(resources)),
            };
            let sharpness = canonical_sharpness(&state);
            let variance = canonical_holevo_variance(&state);
            let mut csv = format!("{STATE_COMMENT}\n{STATE_HEADER}\n");
            csv.push_str(&format!(
                "{label},{resources},{},{},{}\n",
                fmt(sharpness),
                fmt(variance),
                !variance.is_finite()
            ));
            let sidecar = serde_json::json!({ "config": descriptor });
            deliver(&csv, out.as_deref(), Some(sidecar))?;
            if variance.is_finite() {
                Ok(Status::Ok)
            } else {
                Ok(Status::AllDivergent)
            }
        }
    }
}

/// Wilson 95% interval for a binomial proportion.
fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054; // 97.5th normal percentile
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn run_discriminate(cfg: DiscriminateConfig) -> CliResult<Status> {
    let invalid = |e: qphase::Error| CliError::Invalid(e.to_string());

    let (label, pair, copies, reference) = match cfg.scheme {
        Scheme::Adaptive | Scheme::Majority => {
            let pair = match (cfg.alpha, cfg.overlap) {
                (Some(alpha), _) => QubitPair::new(alpha, cfg.prior).map_err(invalid)?,
                (None, Some(overlap)) => {
                    QubitPair::from_overlap(overlap, cfg.prior).map_err(invalid)?
                }
                (None, None) => unreachable!("validated in merge"),
            };
            let copies = cfg.copies.expect("validated in merge");
            let reference = helstrom_bound(cfg.prior, pair.overlap().powi(copies as i32));
            let label = if cfg.scheme == Scheme::Adaptive { "adaptive" } else { "majority" };
            (label, pair, copies, reference)
        }
        Scheme::Dolinar => {
            let setup = dolinar_qubit_pair(
                cfg.delta_alpha.expect("validated in merge"),
                cfg.segments.expect("validated in merge"),
            )
            .map_err(invalid)?;
            ("dolinar", setup.pair, setup.segments, setup.predicted_error)
        }
    };

    let mut errors = 0usize;
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t);
        let wrong = match cfg.scheme {
            Scheme::Majority => majority_vote_run(&pair, copies, &mut rng).is_error(),
            _ => adaptive_local_run(&pair, copies, &mut rng).is_error(),
        };
        if wrong {
            errors += 1;
        }
    }
    let rate = errors as f64 / cfg.trials as f64;
    let (ci_low, ci_high) = wilson_interval(errors, cfg.trials);

    let mut csv = format!("{DISCRIMINATE_COMMENT}\n{DISCRIMINATE_HEADER}\n");
    csv.push_str(&format!(
        "{label},{},{},{copies},{},{},{},{},{},{},{}\n",
        fmt(pair.half_angle),
        fmt(pair.overlap()),
        fmt(pair.prior_plus),
        cfg.trials,
        cfg.seed,
        fmt(rate),
        fmt(reference),
        fmt(ci_low),
        fmt(ci_high)
    ));
    let sidecar = serde_json::json!({ "config": cfg.descriptor });
    deliver(&csv, cfg.out.as_deref(), Some(sidecar))?;
    Ok(Status::Ok)
}
