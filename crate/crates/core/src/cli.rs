//! Command-line front end.
//!
//! Emits JSON records for single operating points and CSV for curves and
//! grids, so plotting scripts can consume the output directly. Identical
//! inputs (including `--seed`) produce byte-identical output.
//!
//! Exit codes: 0 on success, 1 for domain errors and verifier sweeps that
//! exceed tolerance, 2 for usage errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::Value;

use crate::fock::{
    self, mean_scale_fit, verify_bs_decomposition, verify_commutation, verify_composition,
    DensityMatrix, UnitarySpec,
};
use crate::reading::{
    numeric_optimal, optimal_strategy, sql_strategy, tradeoff_curve, ReadingTask, SearchConfig,
    Strategy,
};
use crate::states::SqueezedCoherentState;

#[derive(Parser, Debug)]
#[command(
    name = "qread",
    version,
    about = "Quantum reading strategies for phase-keyed optical memories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coherent-probe baseline (standard quantum limit) at one operating point
    Sql(PointArgs),
    /// Optimal squeezed-probe strategy at one operating point
    Optimal(PointArgs),
    /// Numeric (r, theta) search at one operating point
    Search(PointArgs),
    /// Energy/error tradeoff curve as CSV
    Curve(CurveArgs),
    /// Wigner-function grid as CSV
    Wigner(WignerArgs),
    /// Brute-force Fock-space verifier sweeps
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Default)]
pub struct PointArgs {
    /// Phase difference; radians or pi literals like "pi", "pi/2", "2pi/3"
    #[arg(long)]
    pub delta: Option<String>,
    /// Probe energy budget
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Composed efficiency in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Emit a JSON record (the default)
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit a CSV header plus one row instead of JSON
    #[arg(long)]
    pub csv: bool,
    /// JSON file whose keys mirror the flags; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Phase difference; radians or pi literals
    #[arg(long)]
    pub delta: Option<String>,
    /// Composed efficiency in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Lower end of the energy grid
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    /// Upper end of the energy grid
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file whose keys mirror the flags; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    /// Probe parameters "a,phi,r,theta"; phases accept pi literals
    #[arg(long)]
    pub state: Option<String>,
    /// Grid points per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the square phase-space window
    #[arg(long, allow_negative_numbers = true)]
    pub range: Option<f64>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file whose keys mirror the flags; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub suite: OracleSuite,
}

#[derive(Subcommand, Debug)]
pub enum OracleSuite {
    /// Loss channels compose multiplicatively
    Composition {
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Equal per-mode loss commutes with passive unitaries
    Commutation {
        #[arg(long, default_value_t = 12)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Run unequal per-mode losses instead, demonstrating that the
        /// equal-loss hypothesis is necessary (expected to exceed tolerance)
        #[arg(long)]
        unequal_witness: bool,
    },
    /// Three-mode beamsplitter rewriting identity
    Decomposition {
        #[arg(long, default_value_t = 12)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Homodyne statistics against the Gaussian formulas (width ratio and
    /// mean-scale constant kappa)
    Homodyne {
        #[arg(long, default_value_t = 40)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

/// A reproducible record of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub version: String,
}

impl RunRecord {
    /// Deterministic JSON: struct fields in declaration order (which is
    /// alphabetical) and map keys sorted by the BTreeMap.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Execute a parsed command line and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sql(args) => run_point("sql", &args),
        Command::Optimal(args) => run_point("optimal", &args),
        Command::Search(args) => run_point("search", &args),
        Command::Curve(args) => run_curve(&args),
        Command::Wigner(args) => run_wigner(&args),
        Command::Oracle(args) => run_oracle(&args.suite),
    }
}

/// Parse an angle given as plain radians or as a pi literal: "pi", "-pi/2",
/// "2pi/3", "0.25pi".
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*')
        .collect();
    if let Ok(v) = t.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
        return Err(format!("angle must be finite, got {s:?}"));
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    let Some(pos) = body.find("pi") else {
        return Err(format!("cannot parse angle {s:?}"));
    };
    let (coef_str, tail) = (&body[..pos], &body[pos + 2..]);
    let coef: f64 = if coef_str.is_empty() {
        1.0
    } else {
        coef_str
            .parse()
            .map_err(|_| format!("bad pi coefficient in {s:?}"))?
    };
    let divisor: f64 = if tail.is_empty() {
        1.0
    } else if let Some(d) = tail.strip_prefix('/') {
        d.parse().map_err(|_| format!("bad pi divisor in {s:?}"))?
    } else {
        return Err(format!("cannot parse angle {s:?}"));
    };
    if divisor == 0.0 || !coef.is_finite() || !divisor.is_finite() {
        return Err(format!("bad angle {s:?}"));
    }
    Ok(sign * coef * PI / divisor)
}

fn load_config(path: &Option<PathBuf>) -> Result<serde_json::Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(serde_json::Map::new());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(
            "config file must hold a JSON object".into(),
        )),
        Err(e) => Err(CliError::Usage(format!("config is not valid JSON: {e}"))),
    }
}

fn config_f64(map: &serde_json::Map<String, Value>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => Ok(n.as_f64()),
        Some(Value::String(s)) => parse_angle(s).map(Some).map_err(CliError::Usage),
        Some(other) => Err(CliError::Usage(format!(
            "config key {key:?} must be a number, got {other}"
        ))),
    }
}

fn config_usize(
    map: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<Option<usize>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => n.as_u64().map(|v| Some(v as usize)).ok_or_else(|| {
            CliError::Usage(format!("config key {key:?} must be a nonnegative integer"))
        }),
        Some(other) => Err(CliError::Usage(format!(
            "config key {key:?} must be an integer, got {other}"
        ))),
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag} (flag or config key)")))
}

struct PointParams {
    delta: f64,
    energy: f64,
    eta: f64,
}

fn resolve_point(args: &PointArgs) -> Result<PointParams, CliError> {
    let config = load_config(&args.config)?;
    let delta = match &args.delta {
        Some(s) => Some(parse_angle(s).map_err(CliError::Usage)?),
        None => config_f64(&config, "delta")?,
    };
    let energy = args.energy.or(config_f64(&config, "energy")?);
    let eta = args.eta.or(config_f64(&config, "eta")?);
    Ok(PointParams {
        delta: require(delta, "delta")?,
        energy: require(energy, "energy")?,
        eta: require(eta, "eta")?,
    })
}

fn strategy_outputs(task: &ReadingTask, s: &Strategy) -> BTreeMap<String, Value> {
    let mut flags = BTreeMap::new();
    flags.insert(
        "not_converged".to_string(),
        Value::Bool(s.flags.not_converged),
    );
    flags.insert(
        "regime_warning".to_string(),
        Value::Bool(s.flags.regime_warning),
    );
    flags.insert(
        "squeezing_above_feasible".to_string(),
        Value::Bool(s.flags.squeezing_above_feasible),
    );
    let mut out = BTreeMap::new();
    out.insert("a".to_string(), json_f64(s.probe.a));
    out.insert(
        "delta_reduced".to_string(),
        Value::Bool(task.delta_was_reduced()),
    );
    out.insert(
        "flags".to_string(),
        Value::Object(flags.into_iter().collect()),
    );
    out.insert(
        "method".to_string(),
        Value::String(s.method.as_str().into()),
    );
    out.insert("pe".to_string(), json_f64(s.pe));
    out.insert("phi".to_string(), json_f64(s.probe.phi));
    out.insert("psi".to_string(), json_f64(s.psi));
    out.insert("r".to_string(), json_f64(s.probe.r));
    out.insert("sinh2_r".to_string(), json_f64(s.sinh2_r()));
    out.insert("theta".to_string(), json_f64(s.probe.theta));
    out
}

fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn run_point(kind: &str, args: &PointArgs) -> Result<(), CliError> {
    let p = resolve_point(args)?;
    let task = ReadingTask::new(p.delta, p.energy, p.eta)?;
    let strategy = match kind {
        "sql" => sql_strategy(&task)?,
        "optimal" => optimal_strategy(&task)?,
        "search" => numeric_optimal(&task, &SearchConfig::default())?,
        _ => unreachable!(),
    };
    if args.csv {
        println!("delta,energy,eta,a,phi,r,theta,psi,pe,sinh2_r,method");
        println!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            task.delta,
            task.energy,
            task.eta,
            strategy.probe.a,
            strategy.probe.phi,
            strategy.probe.r,
            strategy.probe.theta,
            strategy.psi,
            strategy.pe,
            strategy.sinh2_r(),
            strategy.method.as_str()
        );
    } else {
        let mut inputs = BTreeMap::new();
        inputs.insert("delta".to_string(), json_f64(task.delta));
        inputs.insert("energy".to_string(), json_f64(task.energy));
        inputs.insert("eta".to_string(), json_f64(task.eta));
        let record = RunRecord {
            command: kind.to_string(),
            inputs,
            outputs: strategy_outputs(&task, &strategy),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        println!("{}", record.to_json());
    }
    Ok(())
}

/// Render the curve rows as CSV; the hybrid column appears exactly when the
/// bound applies (`delta = pi`, `eta = 1`).
pub fn curve_csv(rows: &[crate::reading::CurvePoint]) -> String {
    let hybrid = rows.first().is_some_and(|r| r.pe_hybrid.is_some());
    let mut out = String::from("E,pe_sql,pe_opt,r_opt,sinh2_r_opt");
    if hybrid {
        out.push_str(",pe_hybrid");
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}",
            row.energy, row.pe_sql, row.pe_opt, row.r_opt, row.sinh2_r_opt
        ));
        if let Some(h) = row.pe_hybrid {
            out.push_str(&format!(",{h}"));
        }
        out.push('\n');
    }
    out
}

fn run_curve(args: &CurveArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let delta = match &args.delta {
        Some(s) => Some(parse_angle(s).map_err(CliError::Usage)?),
        None => config_f64(&config, "delta")?,
    };
    let delta = require(delta, "delta")?;
    let eta = require(args.eta.or(config_f64(&config, "eta")?), "eta")?;
    let emin = require(args.emin.or(config_f64(&config, "emin")?), "emin")?;
    let emax = require(args.emax.or(config_f64(&config, "emax")?), "emax")?;
    let points = require(args.points.or(config_usize(&config, "points")?), "points")?;
    if points < 1 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if emin > emax {
        return Err(CliError::Domain(format!("emin {emin} exceeds emax {emax}")));
    }
    let grid: Vec<f64> = if points == 1 {
        vec![emin]
    } else {
        (0..points)
            .map(|i| emin + (emax - emin) * i as f64 / (points - 1) as f64)
            .collect()
    };
    let rows = tradeoff_curve(delta, eta, &grid)?;
    emit(&args.out, &curve_csv(&rows))
}

fn run_wigner(args: &WignerArgs) -> Result<(), CliError> {
    let config = load_config(&args.config)?;
    let state_str = match &args.state {
        Some(s) => Some(s.clone()),
        None => match config.get("state") {
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "config key \"state\" must be a string, got {other}"
                )))
            }
            None => None,
        },
    };
    let state_str = require(state_str, "state")?;
    let parts: Vec<&str> = state_str.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "--state needs \"a,phi,r,theta\", got {state_str:?}"
        )));
    }
    let a: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad displacement magnitude {:?}", parts[0])))?;
    let phi = parse_angle(parts[1]).map_err(CliError::Usage)?;
    let r: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad squeezing magnitude {:?}", parts[2])))?;
    let theta = parse_angle(parts[3]).map_err(CliError::Usage)?;
    let n = require(args.grid.or(config_usize(&config, "grid")?), "grid")?;
    let range = require(args.range.or(config_f64(&config, "range")?), "range")?;
    if !range.is_finite() || range <= 0.0 {
        return Err(CliError::Domain(format!(
            "range must be positive, got {range}"
        )));
    }

    let state = SqueezedCoherentState::new(a, phi, r, theta)?;
    let grid = state.wigner_grid((-range, range), (-range, range), n)?;
    let coord = |i: usize| -> f64 { -range + 2.0 * range * i as f64 / (n - 1) as f64 };
    let mut out = String::from("x\\p");
    for j in 0..n {
        out.push_str(&format!(",{}", coord(j)));
    }
    out.push('\n');
    for (i, row) in grid.iter().enumerate() {
        out.push_str(&format!("{}", coord(i)));
        for w in row {
            out.push_str(&format!(",{w}"));
        }
        out.push('\n');
    }
    emit(&args.out, &out)
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Largest probe energy and squeezing magnitude whose Fock tails clear the
/// state constructor's tolerance at truncation dimension `dim`. Coherent
/// tails fall off factorially, squeezed ones only like tanh(r)^n.
fn probe_caps(dim: usize) -> (f64, f64) {
    let n = dim as f64;
    let max_energy = ((libm::lgamma(n + 1.0) - 25.0) / n).exp();
    let max_r = (3e-11f64).powf(1.0 / n).atanh().min(0.55);
    (max_energy, max_r)
}

fn random_probe(
    rng: &mut StdRng,
    max_energy: f64,
    max_r: f64,
    dim: usize,
) -> Result<DensityMatrix, CliError> {
    let (mut cap_e, mut cap_r) = (max_energy, max_r);
    loop {
        let (state, _) = random_probe_state(rng, cap_e, cap_r);
        match fock::squeezed_coherent_vector(state.a, state.phi, state.r, state.theta, dim) {
            Ok(v) => return Ok(DensityMatrix::from_pure(&v)),
            Err(crate::Error::Truncation { .. }) => {
                // Too close to the truncation edge for this dimension.
                cap_e *= 0.8;
                cap_r *= 0.8;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Random probe parameters plus a quadrature angle. Squeezing tails decay
/// like tanh(r)^n, so `max_r` is kept in step with the truncation dimension
/// of the sweep that uses the probe.
fn random_probe_state(
    rng: &mut StdRng,
    max_energy: f64,
    max_r: f64,
) -> (SqueezedCoherentState, f64) {
    let r = rng.random_range(0.0..=max_r);
    let squeeze_energy = r.sinh() * r.sinh();
    let a = rng.random_range(0.0..=(max_energy - squeeze_energy).max(0.0).sqrt());
    let state =
        SqueezedCoherentState::new(a, rng.random_range(-PI..PI), r, rng.random_range(-PI..PI))
            .expect("magnitudes nonnegative");
    (state, rng.random_range(-PI..PI))
}

fn run_oracle(suite: &OracleSuite) -> Result<(), CliError> {
    match *suite {
        OracleSuite::Composition {
            dim,
            trials,
            seed,
            tol,
        } => {
            require_dim(dim)?;
            let mut rng = StdRng::seed_from_u64(seed);
            let (cap_e, cap_r) = probe_caps(dim);
            let mut worst = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..trials {
                let alpha = rng.random_range(0.05..1.0);
                let beta = rng.random_range(0.05..1.0);
                let probe = random_probe(&mut rng, cap_e.min(1.0), cap_r, dim)?;
                let d = verify_composition(alpha, beta, dim, &[probe])?;
                if d > worst.0 {
                    worst = (d, alpha, beta);
                }
            }
            println!(
                "composition: trials={trials} dim={dim} max_distance={:e}",
                worst.0
            );
            finish(
                "composition",
                worst.0,
                tol,
                &format!("alpha={} beta={}", worst.1, worst.2),
            )
        }
        OracleSuite::Commutation {
            dim,
            trials,
            seed,
            tol,
            unequal_witness,
        } => {
            require_dim(dim)?;
            let mut rng = StdRng::seed_from_u64(seed);
            let (cap_e, cap_r) = probe_caps(dim);
            let mut worst = (0.0f64, String::new());
            for _ in 0..trials {
                let phi = rng.random_range(-PI..PI);
                let eta = rng.random_range(0.3..1.0);
                let probe = random_probe(&mut rng, cap_e.min(1.0), cap_r, dim)?;
                let d = verify_commutation(UnitarySpec::PhaseShifter(phi), &[eta], dim, &[probe])?;
                if d > worst.0 {
                    worst = (d, format!("phase_shifter phi={phi} eta={eta}"));
                }

                let tau = rng.random_range(0.1..0.9);
                // Coherent pair probes keep the joint photon number well
                // inside the truncated space.
                let pair_cap = (cap_e / 2.0).min(0.35);
                let pair = random_probe(&mut rng, pair_cap, 0.0, dim)?
                    .tensor(&random_probe(&mut rng, pair_cap, 0.0, dim)?);
                let etas = if unequal_witness {
                    let eta1 = rng.random_range(0.3..1.0);
                    let eta2 = rng.random_range(0.3..1.0) * 0.5;
                    [eta1, eta2]
                } else {
                    [eta, eta]
                };
                let d = verify_commutation(UnitarySpec::Beamsplitter(tau), &etas, dim, &[pair])?;
                if d > worst.0 {
                    worst = (
                        d,
                        format!("beamsplitter tau={tau} etas={},{}", etas[0], etas[1]),
                    );
                }
            }
            println!(
                "commutation{}: trials={trials} dim={dim} max_distance={:e}",
                if unequal_witness {
                    " (unequal-loss witness)"
                } else {
                    ""
                },
                worst.0
            );
            finish("commutation", worst.0, tol, &worst.1)
        }
        OracleSuite::Decomposition {
            dim,
            trials,
            seed,
            tol,
        } => {
            require_dim(dim)?;
            let mut rng = StdRng::seed_from_u64(seed);
            let mut worst = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..trials {
                let alpha = rng.random_range(0.05..0.99);
                let beta = rng.random_range(0.05..0.99);
                let d = verify_bs_decomposition(alpha, beta, dim)?;
                if d > worst.0 {
                    worst = (d, alpha, beta);
                }
            }
            println!(
                "decomposition: trials={trials} dim={dim} max_distance={:e}",
                worst.0
            );
            finish(
                "decomposition",
                worst.0,
                tol,
                &format!("alpha={} beta={}", worst.1, worst.2),
            )
        }
        OracleSuite::Homodyne {
            dim,
            trials,
            seed,
            tol,
        } => {
            require_dim(dim)?;
            let mut rng = StdRng::seed_from_u64(seed);
            let mut samples: Vec<(SqueezedCoherentState, f64)> = vec![
                (
                    SqueezedCoherentState::coherent(0.5, 0.0).expect("valid"),
                    0.0,
                ),
                (
                    SqueezedCoherentState::coherent(1.0, 0.0).expect("valid"),
                    0.0,
                ),
                (
                    SqueezedCoherentState::coherent(1.25, 0.0).expect("valid"),
                    0.0,
                ),
            ];
            let (cap_e, cap_r) = probe_caps(dim);
            for _ in 0..trials {
                let (state, psi) = random_probe_state(&mut rng, cap_e.min(2.0), cap_r);
                // Keep the displacement visible along the measured quadrature.
                if state.a * (psi - state.phi).cos().abs() > 0.2 {
                    samples.push((state, psi));
                }
            }
            let fit = mean_scale_fit(&samples, dim)?;
            println!(
                "homodyne: samples={} dim={dim} kappa={} kappa_spread={:e} width_ratio={} width_ratio_spread={:e}",
                fit.samples, fit.kappa, fit.kappa_spread, fit.width_ratio, fit.width_ratio_spread
            );
            let worst = fit
                .kappa_spread
                .max((fit.width_ratio - 1.0).abs())
                .max(fit.width_ratio_spread);
            finish(
                "homodyne",
                worst,
                tol,
                "width/mean ratios drifted across samples",
            )
        }
    }
}

fn require_dim(dim: usize) -> Result<(), CliError> {
    if dim < 8 {
        return Err(CliError::Domain(format!(
            "oracle sweeps need dim >= 8, got {dim}"
        )));
    }
    Ok(())
}

fn finish(name: &str, worst: f64, tol: f64, detail: &str) -> Result<(), CliError> {
    if worst <= tol {
        println!("{name}: PASS (tolerance {tol:e})");
        Ok(())
    } else {
        println!("{name}: FAIL {worst:e} > {tol:e} at {detail}");
        Err(CliError::Domain(format!(
            "{name} exceeded tolerance: {worst:e} > {tol:e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_literals() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("2 * pi").unwrap(), 2.0 * PI);
        assert!((parse_angle("1.25").unwrap() - 1.25).abs() < 1e-15);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn record_json_is_sorted_and_stable() {
        let mut inputs = BTreeMap::new();
        inputs.insert("delta".to_string(), json_f64(PI));
        inputs.insert("energy".to_string(), json_f64(4.0));
        let record = RunRecord {
            command: "sql".into(),
            inputs,
            outputs: BTreeMap::new(),
            version: "0.0.0".into(),
        };
        let a = record.to_json();
        let b = record.to_json();
        assert_eq!(a, b);
        let cmd_pos = a.find("\"command\"").unwrap();
        let inp_pos = a.find("\"inputs\"").unwrap();
        let out_pos = a.find("\"outputs\"").unwrap();
        let ver_pos = a.find("\"version\"").unwrap();
        assert!(cmd_pos < inp_pos && inp_pos < out_pos && out_pos < ver_pos);
        let d_pos = a.find("\"delta\"").unwrap();
        let e_pos = a.find("\"energy\"").unwrap();
        assert!(d_pos < e_pos);
    }

    #[test]
    fn curve_csv_shape() {
        let rows = tradeoff_curve(PI, 1.0, &[0.5, 1.0]).unwrap();
        let csv = curve_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "E,pe_sql,pe_opt,r_opt,sinh2_r_opt,pe_hybrid"
        );
        assert_eq!(lines.count(), 2);

        let rows = tradeoff_curve(PI, 0.9, &[0.5]).unwrap();
        let csv = curve_csv(&rows);
        assert!(csv.starts_with("E,pe_sql,pe_opt,r_opt,sinh2_r_opt\n"));
    }
}
