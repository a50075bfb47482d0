//! Flag parsing, config-file merging, and validation.
//!
//! Every tunable is optional on the command line; missing values are
//! looked up in the `--config` file (flat `key=value` lines, `#`
//! comments), then fall back to defaults. Flags always win.

use clap::{Args, Parser, Subcommand, ValueEnum};
use qphase::policies::Protocol;
use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qphase",
    version,
    about = "Phase-estimation protocol simulator and reference tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run Monte Carlo batches of a phase-estimation protocol.
    Simulate(SimulateArgs),
    /// Emit closed-form reference tables (limits, error kernel, states).
    Oracle(OracleArgs),
    /// Run two-state discrimination schemes.
    Discriminate(DiscriminateArgs),
}

/// Errors surfaced to the user, mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid or inconsistent configuration (exit code 2).
    Invalid(String),
    /// Filesystem failure (exit code 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    Standard,
    AdaptiveStandard,
    Qpea,
    Gqpea,
    Hybrid,
    Nala,
    NalaTwoTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Flat,
    Optimal,
    Noon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Adaptive,
    Majority,
    Dolinar,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Protocol kind.
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolKind>,
    /// Maximum pass exponent K (pass counts up to 2^K).
    #[arg(long = "K")]
    pub k: Option<u32>,
    /// Shots per level (generalized algorithm) or qubit count (standard).
    #[arg(long = "M")]
    pub m: Option<u32>,
    /// Top-level repetition count of the ramped non-adaptive schedule.
    #[arg(long = "M-K", alias = "M_K")]
    pub m_k: Option<u32>,
    /// Ramp rate of the non-adaptive schedule.
    #[arg(long)]
    pub mu: Option<f64>,
    /// First-stage share of the hybrid budget (default 2/3).
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Total resource count N (standard, adaptive-standard, hybrid).
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Trials per batch (default 1000).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; all randomness derives from it (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sweep K over an inclusive range, e.g. 4..8.
    #[arg(long = "sweep-K")]
    pub sweep_k: Option<String>,
    /// Sweep N over a comma-separated list, e.g. 47,95,191.
    #[arg(long = "sweep-N")]
    pub sweep_n: Option<String>,
    /// Output CSV path; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Emit SQL / Heisenberg-limit reference curves over an N range.
    #[arg(long)]
    pub limits: bool,
    /// Emit the register error kernel for N resources.
    #[arg(long = "qpea-density")]
    pub qpea_density: bool,
    /// Emit the canonical-measurement summary of a named state.
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Resource count or inclusive range (e.g. 63 or 1..10).
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Sample points for the density table (default 512).
    #[arg(long)]
    pub points: Option<usize>,
    /// Output CSV path; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DiscriminateArgs {
    /// Discrimination scheme.
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    /// State overlap ⟨φ₊|φ₋⟩ (alternative to --alpha).
    #[arg(long)]
    pub overlap: Option<f64>,
    /// Hypothesis half-angle (alternative to --overlap).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Prior probability of the + hypothesis (default 0.5).
    #[arg(long)]
    pub q: Option<f64>,
    /// Number of copies measured per trial.
    #[arg(long = "M")]
    pub copies: Option<usize>,
    /// Coherent amplitude difference (receiver scheme).
    #[arg(long = "delta-alpha")]
    pub delta_alpha: Option<f64>,
    /// Segment count of the receiver scheme.
    #[arg(long)]
    pub segments: Option<usize>,
    /// Trials (default 1000).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flat `key=value` file with `#` comments. Keys are normalized so that
/// `M_K` and `M-K` are the same key.
fn load_config(path: Option<&PathBuf>) -> CliResult<HashMap<String, String>> {
    let mut map = HashMap::new();
    let Some(path) = path else { return Ok(map) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(invalid(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(
            key.trim().replace('_', "-").to_lowercase(),
            value.trim().to_string(),
        );
    }
    Ok(map)
}

fn config_parse<T: std::str::FromStr>(
    map: &HashMap<String, String>,
    key: &str,
) -> CliResult<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| invalid(format!("config key `{key}`: cannot parse `{raw}`"))),
    }
}

fn parse_range(text: &str) -> CliResult<(u64, u64)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| invalid(format!("`{text}`: expected an inclusive range like 4..8")))?;
    let lo = a.trim().parse().map_err(|_| invalid(format!("bad range start `{a}`")))?;
    let hi = b.trim().parse().map_err(|_| invalid(format!("bad range end `{b}`")))?;
    if hi < lo {
        return Err(invalid(format!("range `{text}` is empty")));
    }
    Ok((lo, hi))
}

/// Fully resolved `simulate` invocation.
pub struct SimulateConfig {
    pub family: Vec<Protocol>,
    pub trials: usize,
    pub seed: u64,
    pub sweep: bool,
    pub out: Option<PathBuf>,
    pub descriptor: serde_json::Value,
}

pub fn merge_simulate(args: SimulateArgs) -> CliResult<SimulateConfig> {
    let file = load_config(args.config.as_ref())?;

    let protocol_kind = match args.protocol {
        Some(p) => p,
        None => match file.get("protocol").map(String::as_str) {
            Some("standard") => ProtocolKind::Standard,
            Some("adaptive-standard") | Some("adaptive_standard") => ProtocolKind::AdaptiveStandard,
            Some("qpea") => ProtocolKind::Qpea,
            Some("gqpea") => ProtocolKind::Gqpea,
            Some("hybrid") => ProtocolKind::Hybrid,
            Some("nala") => ProtocolKind::Nala,
            Some("nala-two-theta") => ProtocolKind::NalaTwoTheta,
            Some(other) => return Err(invalid(format!("unknown protocol `{other}`"))),
            None => return Err(invalid("missing --protocol")),
        },
    };

    let k = match args.k {
        Some(v) => Some(v),
        None => config_parse(&file, "k")?,
    };
    let m = match args.m {
        Some(v) => Some(v),
        None => config_parse(&file, "m")?,
    };
    let m_k = match args.m_k {
        Some(v) => Some(v),
        None => config_parse(&file, "m-k")?,
    };
    let mu = match args.mu {
        Some(v) => Some(v),
        None => config_parse(&file, "mu")?,
    };
    let fraction = match args.fraction {
        Some(v) => Some(v),
        None => config_parse(&file, "fraction")?,
    }
    .unwrap_or(2.0 / 3.0);
    let n = match args.n {
        Some(v) => Some(v),
        None => config_parse(&file, "n")?,
    };
    let trials = match args.trials {
        Some(v) => Some(v),
        None => config_parse(&file, "trials")?,
    }
    .unwrap_or(1000);
    let seed = match args.seed {
        Some(v) => Some(v),
        None => config_parse(&file, "seed")?,
    }
    .unwrap_or(0);
    let sweep_k = args.sweep_k.or_else(|| file.get("sweep-k").cloned());
    let sweep_n = args.sweep_n.or_else(|| file.get("sweep-n").cloned());
    let out = args.out.or_else(|| file.get("out").map(PathBuf::from));

    if trials == 0 {
        return Err(invalid("--trials must be at least 1"));
    }
    if sweep_k.is_some() && sweep_n.is_some() {
        return Err(invalid("--sweep-K and --sweep-N are mutually exclusive"));
    }

    let need = |opt: Option<u32>, flag: &str| {
        opt.ok_or_else(|| invalid(format!("{flag} is required for this protocol")))
    };

    // One closure to build a protocol at a given size parameter.
    let build = |k_val: Option<u32>, n_val: Option<u64>| -> CliResult<Protocol> {
        let protocol = match protocol_kind {
            ProtocolKind::Standard => Protocol::Standard {
                qubits: n_val.ok_or_else(|| invalid("--N is required for standard"))?,
            },
            ProtocolKind::AdaptiveStandard => Protocol::AdaptiveStandard {
                qubits: n_val.ok_or_else(|| invalid("--N is required for adaptive-standard"))?,
            },
            ProtocolKind::Qpea => Protocol::Qpea {
                max_level: need(k_val, "--K")?,
            },
            ProtocolKind::Gqpea => Protocol::Gqpea {
                max_level: need(k_val, "--K")?,
                shots_per_level: need(m, "--M")?,
            },
            ProtocolKind::Hybrid => Protocol::Hybrid {
                resources: n_val.ok_or_else(|| invalid("--N is required for hybrid"))?,
                qpea_fraction: fraction,
            },
            ProtocolKind::Nala => Protocol::Nala {
                max_level: need(k_val, "--K")?,
                base_shots: need(m_k, "--M-K")?,
                ramp: mu.ok_or_else(|| invalid("--mu is required for nala"))?,
            },
            ProtocolKind::NalaTwoTheta => Protocol::NalaTwoTheta {
                max_level: need(k_val, "--K")?,
            },
        };
        protocol
            .validate()
            .map_err(|e| invalid(e.to_string()))?;
        Ok(protocol)
    };

    let level_parameterized = matches!(
        protocol_kind,
        ProtocolKind::Qpea | ProtocolKind::Gqpea | ProtocolKind::Nala | ProtocolKind::NalaTwoTheta
    );

    let (family, sweep) = if let Some(range) = &sweep_k {
        if !level_parameterized {
            return Err(invalid(format!(
                "{protocol_kind:?} is sized by --N; use --sweep-N"
            )));
        }
        let (lo, hi) = parse_range(range)?;
        let mut family = Vec::new();
        for kk in lo..=hi {
            family.push(build(Some(kk as u32), n)?);
        }
        (family, true)
    } else if let Some(list) = &sweep_n {
        if level_parameterized {
            return Err(invalid(format!(
                "{protocol_kind:?} is sized by --K; use --sweep-K"
            )));
        }
        let mut family = Vec::new();
        for item in list.split(',') {
            let nn: u64 = item
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad N `{item}` in --sweep-N")))?;
            family.push(build(k, Some(nn))?);
        }
        if family.is_empty() {
            return Err(invalid("--sweep-N lists no sizes"));
        }
        (family, true)
    } else {
        (vec![build(k, n)?], false)
    };

    let descriptor = serde_json::json!({
        "command": "simulate",
        "protocol": format!("{protocol_kind:?}").to_lowercase(),
        "K": k,
        "M": m,
        "M_K": m_k,
        "mu": mu,
        "fraction": fraction,
        "N": n,
        "trials": trials,
        "seed": seed,
        "sweep_K": sweep_k,
        "sweep_N": sweep_n,
    });

    Ok(SimulateConfig {
        family,
        trials,
        seed,
        sweep,
        out,
        descriptor,
    })
}

/// Fully resolved `oracle` invocation.
pub enum OracleConfig {
    Limits {
        range: (u64, u64),
        out: Option<PathBuf>,
        descriptor: serde_json::Value,
    },
    Density {
        resources: usize,
        points: usize,
        out: Option<PathBuf>,
        descriptor: serde_json::Value,
    },
    State {
        kind: StateKind,
        resources: usize,
        out: Option<PathBuf>,
        descriptor: serde_json::Value,
    },
}

pub fn merge_oracle(args: OracleArgs) -> CliResult<OracleConfig> {
    let file = load_config(args.config.as_ref())?;
    let n_text = args.n.or_else(|| file.get("n").cloned());
    let points = match args.points {
        Some(v) => Some(v),
        None => config_parse(&file, "points")?,
    }
    .unwrap_or(512);
    let out = args.out.or_else(|| file.get("out").map(PathBuf::from));

    let modes = args.limits as u8 + args.qpea_density as u8 + args.state.is_some() as u8;
    if modes != 1 {
        return Err(invalid(
            "choose exactly one of --limits, --qpea-density, --state",
        ));
    }

    let n_text = n_text.ok_or_else(|| invalid("--N is required"))?;
    if args.limits {
        let range = if n_text.contains("..") {
            parse_range(&n_text)?
        } else {
            let single: u64 = n_text
                .parse()
                .map_err(|_| invalid(format!("bad N `{n_text}`")))?;
            (single, single)
        };
        if range.0 < 1 {
            return Err(invalid("N must be at least 1"));
        }
        let descriptor =
            serde_json::json!({"command": "oracle", "mode": "limits", "N": n_text});
        return Ok(OracleConfig::Limits { range, out, descriptor });
    }

    let resources: usize = n_text
        .parse()
        .map_err(|_| invalid(format!("bad N `{n_text}`")))?;
    if resources < 1 {
        return Err(invalid("N must be at least 1"));
    }
    if args.qpea_density {
        if points < 2 {
            return Err(invalid("--points must be at least 2"));
        }
        let descriptor = serde_json::json!({
            "command": "oracle", "mode": "qpea-density", "N": resources, "points": points,
        });
        Ok(OracleConfig::Density { resources, points, out, descriptor })
    } else {
        let kind = args.state.expect("mode checked above");
        let descriptor = serde_json::json!({
            "command": "oracle", "mode": "state",
            "state": format!("{kind:?}").to_lowercase(), "N": resources,
        });
        Ok(OracleConfig::State { kind, resources, out, descriptor })
    }
}

/// Fully resolved `discriminate` invocation.
pub struct DiscriminateConfig {
    pub scheme: Scheme,
    pub overlap: Option<f64>,
    pub alpha: Option<f64>,
    pub prior: f64,
    pub copies: Option<usize>,
    pub delta_alpha: Option<f64>,
    pub segments: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub descriptor: serde_json::Value,
}

pub fn merge_discriminate(args: DiscriminateArgs) -> CliResult<DiscriminateConfig> {
    let file = load_config(args.config.as_ref())?;
    let scheme = match args.scheme {
        Some(s) => s,
        None => match file.get("scheme").map(String::as_str) {
            Some("adaptive") => Scheme::Adaptive,
            Some("majority") => Scheme::Majority,
            Some("dolinar") => Scheme::Dolinar,
            Some(other) => return Err(invalid(format!("unknown scheme `{other}`"))),
            None => return Err(invalid("missing --scheme")),
        },
    };
    let overlap = match args.overlap {
        Some(v) => Some(v),
        None => config_parse(&file, "overlap")?,
    };
    let alpha = match args.alpha {
        Some(v) => Some(v),
        None => config_parse(&file, "alpha")?,
    };
    let prior = match args.q {
        Some(v) => Some(v),
        None => config_parse(&file, "q")?,
    }
    .unwrap_or(0.5);
    let copies = match args.copies {
        Some(v) => Some(v),
        None => config_parse(&file, "m")?,
    };
    let delta_alpha = match args.delta_alpha {
        Some(v) => Some(v),
        None => config_parse(&file, "delta-alpha")?,
    };
    let segments = match args.segments {
        Some(v) => Some(v),
        None => config_parse(&file, "segments")?,
    };
    let trials = match args.trials {
        Some(v) => Some(v),
        None => config_parse(&file, "trials")?,
    }
    .unwrap_or(1000);
    let seed = match args.seed {
        Some(v) => Some(v),
        None => config_parse(&file, "seed")?,
    }
    .unwrap_or(0);
    let out = args.out.or_else(|| file.get("out").map(PathBuf::from));

    if trials == 0 {
        return Err(invalid("--trials must be at least 1"));
    }
    match scheme {
        Scheme::Adaptive | Scheme::Majority => {
            if overlap.is_none() && alpha.is_none() {
                return Err(invalid("--overlap or --alpha is required"));
            }
            if copies.is_none() {
                return Err(invalid("--M is required"));
            }
        }
        Scheme::Dolinar => {
            if delta_alpha.is_none() || segments.is_none() {
                return Err(invalid("--delta-alpha and --segments are required"));
            }
        }
    }

    let descriptor = serde_json::json!({
        "command": "discriminate",
        "scheme": format!("{scheme:?}").to_lowercase(),
        "overlap": overlap,
        "alpha": alpha,
        "q": prior,
        "M": copies,
        "delta_alpha": delta_alpha,
        "segments": segments,
        "trials": trials,
        "seed": seed,
    });

    Ok(DiscriminateConfig {
        scheme,
        overlap,
        alpha,
        prior,
        copies,
        delta_alpha,
        segments,
        trials,
        seed,
        out,
        descriptor,
    })
}
