//! Command-line front end. Every command prints a JSON report on stdout
//! that embeds its effective configuration; `--out DIR` additionally writes
//! `<command>.json` and, for sequence output, `<command>.csv`.
//!
//! Exit codes: 0 definite result, 1 numerical failure, 2 usage or
//! precondition error, 3 inconclusive classification.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classifier::{classify_c1_with, classify_dd_with, ClassifierConfig, Verdict};
use crate::dales_davie::{check_admissible_with, WeightSequence};
use crate::error::{Error, Result};
use crate::gleason_shift::{
    noncompact_witness, riesz_certificate, schwarz_check, shift_iterate_sup,
};
use crate::operator::{build_matrix, essential_radius_sequence_with_grid, NormKind};
use crate::poly::Interval;
use crate::report::{format_f64, Csv};
use crate::selfmap::PolyMap;
use crate::spectra::{compare, eigenvalues, predicted_spectrum};

pub const SEED_ENV: &str = "RIESZ_LAB_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "riesz-lab",
    version,
    about = "Riesz and power compact composition operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON file whose keys override the command's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for `<command>.json` and `<command>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed; falls back to RIESZ_LAB_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify T f = f ∘ φ on C¹ or on a Dales–Davie algebra.
    Classify(ClassifyOpts),
    /// Eigenvalues of the truncated operator against the predicted set.
    Spectrum(SpectrumOpts),
    /// Brackets on ‖Tⁿ - K‖^{1/n}.
    Essrad(EssradOpts),
    /// Fixed point and iterate brackets of φ.
    Iterate(IterateOpts),
    /// Admissibility of a weight sequence.
    Weights(WeightsOpts),
    /// The weighted shift on the ball of ℓ∞(ℕ²).
    Shift(ShiftOpts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Spectrum(_) => "spectrum",
            Command::Essrad(_) => "essrad",
            Command::Iterate(_) => "iterate",
            Command::Weights(_) => "weights",
            Command::Shift(_) => "shift",
        }
    }
}

const MAP_HELP: &str = "inline JSON {\"coeffs\": [...], \"domain\": [lo, hi]}, a JSON file, \
                        or one of identity, constant, x/2, x^2/2";

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyOpts {
    /// c1 or ddm.
    #[arg(long, default_value = "c1")]
    pub algebra: String,
    #[arg(long, help = MAP_HELP)]
    pub map: String,
    /// factorial_sq, factorial_pow, inline JSON or a JSON file (ddm only).
    #[arg(long)]
    pub weights: Option<String>,
    /// Number of weights.
    #[arg(long = "N", default_value_t = 40)]
    #[serde(rename = "N")]
    pub n_weights: usize,
    /// Exponent for factorial_pow.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub deriv_zero_tol: Option<f64>,
    #[arg(long)]
    pub iterate_cap: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Full classifier settings; set through --config.
    #[arg(skip)]
    pub classifier: Option<ClassifierConfig>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumOpts {
    #[arg(long, help = MAP_HELP)]
    pub map: String,
    #[arg(long, default_value_t = 32)]
    pub degree: usize,
    /// Relative tolerance when matching eigenvalues.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssradOpts {
    #[arg(long, help = MAP_HELP)]
    pub map: String,
    /// c1 or sup.
    #[arg(long, default_value = "c1")]
    pub norm: String,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateOpts {
    #[arg(long, help = MAP_HELP)]
    pub map: String,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    #[arg(long, default_value_t = 100)]
    pub seeds: usize,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsOpts {
    /// factorial_sq, factorial_pow or explicit.
    #[arg(long, default_value = "factorial_sq")]
    pub kind: String,
    #[arg(long = "N", default_value_t = 40)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long)]
    pub p: Option<f64>,
    /// JSON array M₀, M₁, … for explicit weights.
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long, default_value_t = crate::dales_davie::DEFAULT_TAIL_THRESHOLD)]
    pub tail_threshold: f64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftOpts {
    /// Report the non-compactness witness for Tⁿ instead of the decay bounds.
    #[arg(long)]
    pub witness: bool,
    /// Power used by the witness.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub jtest: usize,
    #[arg(long = "J", default_value_t = 64)]
    #[serde(rename = "J")]
    pub rows: usize,
    #[arg(long = "K", default_value_t = 64)]
    #[serde(rename = "K")]
    pub cols: usize,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    /// Random points per iterate for the empirical sup.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Random (point, test function) pairs for the Schwarz bound.
    #[arg(long, default_value_t = 1000)]
    pub schwarz_pairs: usize,
}

/// Result of one command before it is written out.
struct Output {
    report: Value,
    csv: Option<Csv>,
    exit: u8,
}

/// Parses `args` (including the program name) and runs the command,
/// writing the JSON report to `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(cli) {
        Ok((out, text)) => {
            let _ = stdout.write_all(text.as_bytes());
            out
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn main_entry() -> ExitCode {
    let code = run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. } | Error::Io(_) => 1,
        _ => 2,
    }
}

fn execute(cli: Cli) -> Result<(u8, String)> {
    let overrides = match &cli.config {
        Some(path) => Some(read_json(path)?),
        None => None,
    };
    let (overrides, config_seed) = split_seed(overrides)?;
    let seed = match cli.seed.or(config_seed) {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Error::Config(format!("{SEED_ENV} is not an unsigned integer: {v:?}"))
            })?,
            Err(_) => 0,
        },
    };
    let name = cli.command.name();
    let ov = overrides.as_ref();
    let (options, output) = match cli.command {
        Command::Classify(o) => {
            let o = merge(o, ov)?;
            (to_value(&o)?, cmd_classify(&o)?)
        }
        Command::Spectrum(o) => {
            let o = merge(o, ov)?;
            (to_value(&o)?, cmd_spectrum(&o)?)
        }
        Command::Essrad(o) => {
            let o = merge(o, ov)?;
            (to_value(&o)?, cmd_essrad(&o)?)
        }
        Command::Iterate(o) => {
            let o = merge(o, ov)?;
            (to_value(&o)?, cmd_iterate(&o)?)
        }
        Command::Weights(o) => {
            let o = merge(o, ov)?;
            (to_value(&o)?, cmd_weights(&o)?)
        }
        Command::Shift(o) => {
            let o = merge(o, ov)?;
            (to_value(&o)?, cmd_shift(&o, seed)?)
        }
    };
    let report = json!({
        "config": { "command": name, "seed": seed, "options": options },
        "result": output.report,
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{name}.json")), &text)?;
        if let Some(csv) = &output.csv {
            std::fs::write(dir.join(format!("{name}.csv")), csv.render())?;
        }
    }
    Ok((output.exit, text))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn split_seed(config: Option<Value>) -> Result<(Option<Value>, Option<u64>)> {
    let Some(value) = config else {
        return Ok((None, None));
    };
    let Value::Object(mut obj) = value else {
        return Err(Error::Config("--config must hold a JSON object".into()));
    };
    let seed =
        match obj.remove("seed") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| {
                Error::Config(format!("seed must be an unsigned integer, got {v}"))
            })?),
        };
    Ok((Some(Value::Object(obj)), seed))
}

/// Overlays `overrides` on the flag values; keys the command does not know
/// are rejected.
fn merge<T: Serialize + DeserializeOwned>(opts: T, overrides: Option<&Value>) -> Result<T> {
    let Some(Value::Object(over)) = overrides else {
        return Ok(opts);
    };
    let Value::Object(mut base) = serde_json::to_value(&opts)? else {
        unreachable!("options serialize as objects");
    };
    overlay(&mut base, over)?;
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::Config(e.to_string()))
}

fn overlay(base: &mut Map<String, Value>, over: &Map<String, Value>) -> Result<()> {
    for (key, value) in over {
        match base.get_mut(key) {
            None => return Err(Error::Config(format!("unknown config key {key:?}"))),
            // nested settings keep defaults for keys the file leaves out
            Some(Value::Object(inner)) => match value {
                Value::Object(v) => overlay(inner, v)?,
                _ => *base.get_mut(key).expect("present") = value.clone(),
            },
            Some(slot) => *slot = value.clone(),
        }
    }
    Ok(())
}

/// Resolves `--map`: a shorthand, inline JSON, or a JSON file.
pub fn parse_map(spec: &str) -> Result<PolyMap> {
    let unit = Interval::UNIT;
    match spec.trim() {
        "identity" | "x" => return Ok(PolyMap::identity(unit)),
        "constant" => return PolyMap::constant(0.5, unit),
        "x/2" => return PolyMap::on_unit(vec![0.0, 0.5]),
        "x^2/2" | "x2/2" => return PolyMap::on_unit(vec![0.0, 0.0, 0.5]),
        _ => {}
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| {
            Error::Config(format!(
                "map {spec:?} is neither a shorthand, JSON, nor a readable file: {e}"
            ))
        })?
    };
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad map: {e}")))
}

/// Resolves a weight spec for `classify`.
pub fn parse_weights(spec: &str, n: usize, p: Option<f64>) -> Result<WeightSequence> {
    match spec.trim() {
        "factorial_sq" => return Ok(WeightSequence::factorial_sq(n)),
        "factorial_pow" => {
            let p = p.ok_or_else(|| Error::Config("factorial_pow needs --p".into()))?;
            return WeightSequence::factorial_pow(p, n);
        }
        _ => {}
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| {
            Error::Config(format!(
                "weights {spec:?} are neither a known kind, JSON, nor a readable file: {e}"
            ))
        })?
    };
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad weights: {e}")))
}

fn find_attracting_fixed_point(map: &PolyMap) -> Result<f64> {
    let fp = map.find_fixed_point(100);
    if !fp.found() {
        return Err(Error::Precondition(
            "no unique attracting fixed point; the spectrum formula needs |phi'(x0)| < 1".into(),
        ));
    }
    if fp.derivative_at_x0.abs() >= 1.0 {
        return Err(Error::Precondition(format!(
            "|phi'(x0)| = {} is not below 1; a Riesz composition operator needs an attracting fixed point",
            fp.derivative_at_x0.abs()
        )));
    }
    Ok(fp.x0)
}

fn cmd_classify(o: &ClassifyOpts) -> Result<Output> {
    let map = parse_map(&o.map)?;
    let mut cfg = o.classifier.clone().unwrap_or_default();
    if let Some(v) = o.deriv_zero_tol {
        cfg.deriv_zero_tol = v;
    }
    if let Some(v) = o.iterate_cap {
        cfg.iterate_cap = v;
    }
    if let Some(v) = o.nmax {
        cfg.n_max = v;
    }
    cfg.validate()?;
    let c = match o.algebra.to_ascii_lowercase().as_str() {
        "c1" => classify_c1_with(&map, &cfg),
        "ddm" | "dd" => {
            let spec = o
                .weights
                .as_deref()
                .ok_or_else(|| Error::Config("--algebra ddm needs --weights".into()))?;
            classify_dd_with(&map, &parse_weights(spec, o.n_weights, o.p)?, &cfg)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown algebra {other:?}; use c1 or ddm"
            )))
        }
    };
    Ok(Output {
        exit: if c.verdict == Verdict::Inconclusive {
            3
        } else {
            0
        },
        report: to_value(&c)?,
        csv: None,
    })
}

fn cmd_spectrum(o: &SpectrumOpts) -> Result<Output> {
    let map = parse_map(&o.map)?;
    let x0 = find_attracting_fixed_point(&map)?;
    let matrix = build_matrix(&map, x0, o.degree)?;
    let computed = eigenvalues(&matrix)?;
    let predicted = predicted_spectrum(&map, x0, o.degree)?;
    let report = compare(&computed, &predicted, o.tol);
    Ok(Output {
        exit: 0,
        csv: Some(report.to_csv()),
        report: json!({
            "x0": x0,
            "degree": o.degree,
            "truncated": matrix.is_truncated(),
            "spectrum": report,
        }),
    })
}

fn cmd_essrad(o: &EssradOpts) -> Result<Output> {
    let map = parse_map(&o.map)?;
    let kind: NormKind = o.norm.parse()?;
    if kind == NormKind::Ddm {
        return Err(Error::Config("essrad supports the c1 and sup norms".into()));
    }
    let fp = map.find_fixed_point(100);
    if !fp.found() {
        return Err(Error::Precondition(
            "no unique fixed point to center the rank-one witness".into(),
        ));
    }
    let seq = essential_radius_sequence_with_grid(&map, fp.x0, kind, o.nmax, o.grid)?;
    Ok(Output {
        exit: 0,
        csv: Some(seq.to_csv()),
        report: json!({
            "r_n_max_upper": seq.last().log_upper.exp(),
            "r_n_max_lower": seq.last().log_lower.exp(),
            "upper_decreasing_from_5": seq.upper_decreasing_from(5),
            "sequence": seq,
        }),
    })
}

fn cmd_iterate(o: &IterateOpts) -> Result<Output> {
    let map = parse_map(&o.map)?;
    let fp = map.find_fixed_point(o.seeds);
    let center = if fp.found() {
        fp.x0
    } else {
        map.domain().mid()
    };
    let bounds = map.orbit_bounds(center, o.nmax, o.grid)?;
    let mut csv = Csv::new(["n", "diameter", "log_deriv_lower", "log_deriv_upper"]);
    for b in &bounds {
        csv.push([
            b.n.to_string(),
            format_f64(b.diameter),
            format_f64(b.log_deriv.lower),
            format_f64(b.log_deriv.upper),
        ]);
    }
    Ok(Output {
        exit: 0,
        csv: Some(csv),
        report: json!({ "map": map, "fixed_point": fp, "center": center, "iterates": bounds }),
    })
}

fn cmd_weights(o: &WeightsOpts) -> Result<Output> {
    let w = match o.kind.as_str() {
        "factorial_sq" => WeightSequence::factorial_sq(o.n),
        "factorial_pow" => WeightSequence::factorial_pow(
            o.p.ok_or_else(|| Error::Config("factorial_pow needs --p".into()))?,
            o.n,
        )?,
        "explicit" => {
            let text = o
                .values
                .as_deref()
                .ok_or_else(|| Error::Config("explicit weights need --values".into()))?;
            let values: Vec<f64> = serde_json::from_str(text)
                .map_err(|e| Error::Config(format!("bad --values: {e}")))?;
            WeightSequence::explicit(values)?
        }
        other => return Err(Error::Config(format!("unknown weight kind {other:?}"))),
    };
    let report = check_admissible_with(&w, o.tail_threshold)?;
    let mut csv = Csv::new(["n", "log_M", "tail"]);
    for n in 0..=w.max_index() {
        let tail = if n == 0 {
            String::new()
        } else {
            format_f64(report.nonanalytic_tail[n - 1])
        };
        csv.push([n.to_string(), format_f64(w.log_value(n)), tail]);
    }
    Ok(Output {
        exit: 0,
        csv: Some(csv),
        report: json!({ "weights": w, "admissibility": report, "usable": report.is_usable() }),
    })
}

fn cmd_shift(o: &ShiftOpts, seed: u64) -> Result<Output> {
    let truncation = (o.rows, o.cols);
    if o.rows == 0 || o.cols == 0 {
        return Err(Error::Config("J and K must be positive".into()));
    }
    if o.witness {
        let w = noncompact_witness(o.n, o.jtest, truncation)?;
        return Ok(Output {
            exit: 0,
            csv: Some(w.to_csv()),
            report: to_value(&w)?,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sups = (0..=o.nmax)
        .map(|n| shift_iterate_sup(n, truncation, o.samples, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let cert = riesz_certificate(o.nmax.max(1), truncation)?;
    let schwarz = schwarz_check(o.schwarz_pairs, truncation, &mut rng);
    Ok(Output {
        exit: 0,
        csv: Some(cert.to_csv()),
        report: json!({ "iterate_sup": sups, "certificate": cert, "schwarz": schwarz }),
    })
}
