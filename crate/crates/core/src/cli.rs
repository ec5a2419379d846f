//! Command-line front end: sweeps and tables written as CSV.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use crate::chirp::ChirpProfile;
use crate::error::Error;
use crate::normal_modes::IonChain;
use crate::oracle::{self, OracleConfig};
use crate::spectrum::{self, DetectorProbe};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_STEPS: usize = 33;
const FIG3_Y_T: [f64; 3] = [1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Modes,
    Scan,
    Fig3,
    Ratio,
    OracleCheck,
}

#[derive(Debug, Parser)]
#[command(name = "iontrap-unruh", version, about = "Detector-ion spectra in an exponentially chirped trap")]
pub struct Args {
    pub command: Command,
    /// Number of ions
    #[arg(long)]
    pub n: Option<usize>,
    /// Bare axial trap frequency ν/2π (Hz)
    #[arg(long, allow_hyphen_values = true)]
    pub nu_hz: Option<f64>,
    /// Chirp rate κ (1/s)
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Smallest detuning Δ (rad/s)
    #[arg(long, allow_hyphen_values = true)]
    pub delta_min: Option<f64>,
    /// Largest detuning Δ (rad/s)
    #[arg(long, allow_hyphen_values = true)]
    pub delta_max: Option<f64>,
    /// Number of detunings in a sweep
    #[arg(long)]
    pub steps: Option<usize>,
    /// Carrier Rabi frequency Ω₀/2π (Hz)
    #[arg(long, allow_hyphen_values = true)]
    pub rabi_hz: Option<f64>,
    /// Lamb-Dicke parameter η
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Switch-on time t₀ (s), `-inf` for an adiabatic switch-on in the far past
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// Switch-off time T (s)
    #[arg(long, allow_hyphen_values = true)]
    pub t_stop: Option<f64>,
    /// Final frequency ratio e^{κT}, an alternative to --t-stop
    #[arg(long, allow_hyphen_values = true)]
    pub y_t: Option<f64>,
    /// Fock cutoff of the Schrödinger oracle
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file with defaults for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("unknown key `{key}` in {origin}")]
    UnknownKey { key: String, origin: String },
    #[error("malformed value `{value}` for `{key}`")]
    MalformedNumber { key: String, value: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("{0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("{0} emitted row(s) failed validation")]
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Numerical(_) | CliError::Validation(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

/// Values of the named parameters, unset where neither file nor flag gave one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub n: Option<usize>,
    pub nu_hz: Option<f64>,
    pub kappa: Option<f64>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub steps: Option<usize>,
    pub rabi_hz: Option<f64>,
    pub eta: Option<f64>,
    pub t0: Option<f64>,
    pub t_stop: Option<f64>,
    pub y_t: Option<f64>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 13] = [
    "n", "nu_hz", "kappa", "delta_min", "delta_max", "steps", "rabi_hz", "eta", "t0", "t_stop", "y_t",
    "n_max", "out",
];

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value.parse().map_err(|_| CliError::MalformedNumber {
        key: key.into(),
        value: value.into(),
    })
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value.parse().map_err(|_| CliError::MalformedNumber {
        key: key.into(),
        value: value.into(),
    })
}

impl Params {
    /// Parses the line-oriented `key = value` format; `#` starts a comment.
    pub fn from_file_text(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::MalformedNumber {
                key: format!("line {}", lineno + 1),
                value: line.into(),
            })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::UnknownKey {
                    key,
                    origin: origin.into(),
                });
            }
            map.insert(key, value.trim().to_string());
        }
        let mut p = Params::default();
        for (key, value) in &map {
            let v = value.as_str();
            match key.as_str() {
                "n" => p.n = Some(parse_usize(key, v)?),
                "nu_hz" => p.nu_hz = Some(parse_f64(key, v)?),
                "kappa" => p.kappa = Some(parse_f64(key, v)?),
                "delta_min" => p.delta_min = Some(parse_f64(key, v)?),
                "delta_max" => p.delta_max = Some(parse_f64(key, v)?),
                "steps" => p.steps = Some(parse_usize(key, v)?),
                "rabi_hz" => p.rabi_hz = Some(parse_f64(key, v)?),
                "eta" => p.eta = Some(parse_f64(key, v)?),
                "t0" => p.t0 = Some(parse_f64(key, v)?),
                "t_stop" => p.t_stop = Some(parse_f64(key, v)?),
                "y_t" => p.y_t = Some(parse_f64(key, v)?),
                "n_max" => p.n_max = Some(parse_usize(key, v)?),
                "out" => p.out = Some(PathBuf::from(v)),
                _ => unreachable!(),
            }
        }
        Ok(p)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: Params) -> Params {
        Params {
            n: over.n.or(self.n),
            nu_hz: over.nu_hz.or(self.nu_hz),
            kappa: over.kappa.or(self.kappa),
            delta_min: over.delta_min.or(self.delta_min),
            delta_max: over.delta_max.or(self.delta_max),
            steps: over.steps.or(self.steps),
            rabi_hz: over.rabi_hz.or(self.rabi_hz),
            eta: over.eta.or(self.eta),
            t0: over.t0.or(self.t0),
            t_stop: over.t_stop.or(self.t_stop),
            y_t: over.y_t.or(self.y_t),
            n_max: over.n_max.or(self.n_max),
            out: over.out.or(self.out),
        }
    }
}

impl From<&Args> for Params {
    fn from(a: &Args) -> Self {
        Params {
            n: a.n,
            nu_hz: a.nu_hz,
            kappa: a.kappa,
            delta_min: a.delta_min,
            delta_max: a.delta_max,
            steps: a.steps,
            rabi_hz: a.rabi_hz,
            eta: a.eta,
            t0: a.t0,
            t_stop: a.t_stop,
            y_t: a.y_t,
            n_max: a.n_max,
            out: a.out.clone(),
        }
    }
}

/// Fully resolved run, angular frequencies in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n_ions: usize,
    pub nu: f64,
    pub kappa: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub steps: usize,
    pub rabi: f64,
    pub eta: f64,
    pub t0: f64,
    /// `T`, when the command needs a window.
    pub t_stop: Option<f64>,
    pub n_max: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn chi(&self) -> f64 {
        self.rabi * self.eta
    }

    pub fn detunings(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| self.delta_min + (self.delta_max - self.delta_min) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn chirp(&self) -> Result<ChirpProfile, CliError> {
        let t_stop = self.t_stop.ok_or(CliError::MissingKey("t_stop"))?;
        ChirpProfile::new(self.kappa, self.t0, t_stop).map_err(|e| CliError::Invalid {
            key: "t0",
            reason: e.to_string(),
        })
    }
}

fn require_positive(key: &'static str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Invalid {
            key,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

/// Merges defaults, the optional config file and the flags, then validates.
pub fn parse_config(args: &Args, file: Option<&str>) -> Result<RunConfig, CliError> {
    let base = match file {
        Some(text) => {
            let origin = args
                .config
                .as_ref()
                .map_or_else(|| "config".to_string(), |p| p.display().to_string());
            Params::from_file_text(text, &origin)?
        }
        None => Params::default(),
    };
    let mut p = base.overridden_by(Params::from(args));
    // a window end given on the command line replaces either form from the file
    match (args.t_stop, args.y_t) {
        (Some(_), None) => p.y_t = None,
        (None, Some(_)) => p.t_stop = None,
        _ => {}
    }
    let command = args.command;

    let kappa = p.kappa.unwrap_or(1.0);
    if !(kappa.is_finite() && kappa != 0.0) {
        return Err(CliError::Invalid {
            key: "kappa",
            reason: format!("chirp rate must be finite and nonzero, got {kappa}"),
        });
    }
    let nu = 2.0 * PI * require_positive("nu_hz", p.nu_hz.unwrap_or(1.0 / (2.0 * PI)))?;
    let rabi = 2.0 * PI * p.rabi_hz.unwrap_or(10.0 / (2.0 * PI));
    if !(rabi.is_finite() && rabi >= 0.0) {
        return Err(CliError::Invalid {
            key: "rabi_hz",
            reason: format!("must be non-negative, got {}", rabi / (2.0 * PI)),
        });
    }
    let eta = p.eta.unwrap_or(0.1);
    if !(0.0..1.0).contains(&eta) {
        return Err(CliError::Invalid {
            key: "eta",
            reason: format!("Lamb-Dicke parameter must lie in [0, 1), got {eta}"),
        });
    }
    let n_ions = p.n.unwrap_or(1);
    if n_ions == 0 {
        return Err(CliError::Invalid {
            key: "n",
            reason: "need at least one ion".into(),
        });
    }
    let steps = p.steps.unwrap_or(DEFAULT_STEPS);
    if steps < 2 {
        return Err(CliError::Invalid {
            key: "steps",
            reason: format!("sweeps need at least 2 points, got {steps}"),
        });
    }
    let (default_min, default_max) = (0.25 * kappa.abs() / (2.0 * PI), 8.0 * kappa.abs() / (2.0 * PI));
    let delta_min = p.delta_min.unwrap_or(default_min);
    let delta_max = p.delta_max.unwrap_or(default_max);
    for (key, v) in [("delta_min", delta_min), ("delta_max", delta_max)] {
        if !v.is_finite() {
            return Err(CliError::Invalid {
                key,
                reason: format!("must be finite, got {v}"),
            });
        }
    }
    if delta_min > delta_max {
        return Err(CliError::Invalid {
            key: "delta_max",
            reason: format!("must not be below delta_min ({delta_min} > {delta_max})"),
        });
    }
    let t0 = p.t0.unwrap_or(f64::NEG_INFINITY);
    if t0.is_nan() || t0 == f64::INFINITY {
        return Err(CliError::Invalid {
            key: "t0",
            reason: format!("must be finite or -inf, got {t0}"),
        });
    }
    let t_stop = match (p.t_stop, p.y_t) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid {
                key: "y_t",
                reason: "give either t_stop or y_t, not both".into(),
            })
        }
        (Some(t), None) => Some(t),
        (None, Some(y)) => Some(require_positive("y_t", y)?.ln() / kappa),
        (None, None) => None,
    };
    if matches!(command, Command::Scan | Command::OracleCheck) && t_stop.is_none() {
        return Err(CliError::MissingKey("t_stop"));
    }
    let n_max = p.n_max.unwrap_or(2);
    if !(1..=oracle::MAX_FOCK).contains(&n_max) {
        return Err(CliError::Invalid {
            key: "n_max",
            reason: format!("Fock cutoff must lie in 1..={}, got {n_max}", oracle::MAX_FOCK),
        });
    }
    Ok(RunConfig {
        command,
        n_ions,
        nu,
        kappa,
        delta_min,
        delta_max,
        steps,
        rabi,
        eta,
        t0,
        t_stop,
        n_max,
        out: p.out,
    })
}

/// Twelve significant digits, `nan` for undefined entries.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.11e}")
    }
}

fn row(cells: &[String]) -> String {
    let mut s = cells.join(",");
    s.push('\n');
    s
}

pub fn run_modes(cfg: &RunConfig) -> Result<String, CliError> {
    let chain = IonChain::new(cfg.n_ions, cfg.nu)?;
    let n = cfg.n_ions;
    let mut header = vec!["p".to_string(), "mu_p".into()];
    header.extend((1..=n).map(|m| format!("b_{m}")));
    header.extend((1..=n).map(|m| format!("s_{m}")));
    let mut out = row(&header);
    for p in 1..=n {
        let mut cells = vec![p.to_string(), fmt_num(chain.mode_eigenvalues()[p - 1])];
        cells.extend((1..=n).map(|m| fmt_num(chain.b(m, p))));
        cells.extend((1..=n).map(|m| fmt_num(chain.s(m, p))));
        out.push_str(&row(&cells));
    }
    Ok(out)
}

fn flag_text(point: &spectrum::SpectrumPoint) -> String {
    let mut f = if point.flags.unruh_regime { "thermal" } else { "transient" }.to_string();
    if !point.flags.perturbative {
        f.push_str("|strong");
    }
    f
}

/// Spectrum invariants every emitted row must satisfy.
fn row_is_valid(point: &spectrum::SpectrumPoint) -> bool {
    let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
    if !(finite_nonneg(point.p_red) && finite_nonneg(point.p_blue) && finite_nonneg(point.p_finite)) {
        return false;
    }
    // detailed balance between the two sidebands at |Δ|
    let z = 2.0 * PI * point.detuning.abs() / (2.0 * PI * point.unruh_temp);
    if point.p_blue > 0.0 && point.p_red > f64::MIN_POSITIVE {
        let ratio = point.p_red / point.p_blue;
        if (ratio - (-z).exp()).abs() > 1e-10 * (-z).exp() {
            return false;
        }
    }
    point.p_red <= point.p_blue
}

pub fn run_scan(cfg: &RunConfig) -> Result<Emitted, CliError> {
    let chain = IonChain::new(cfg.n_ions, cfg.nu)?;
    let chirp = cfg.chirp()?;
    let template = DetectorProbe::new(1.0, cfg.rabi, cfg.eta, 1)?;
    let rows: Vec<Result<(String, bool), Error>> = cfg
        .detunings()
        .par_iter()
        .map(|&delta| {
            let x = 2.0 * PI * delta / cfg.kappa;
            if delta == 0.0 {
                let cells = [fmt_num(delta), fmt_num(x), fmt_num(f64::NAN), fmt_num(f64::NAN), "pole".into()];
                return Ok((row(&cells), true));
            }
            let probe = template.at_detuning(delta)?;
            if cfg.kappa < 0.0 {
                let p = spectrum::finite_chirp_probability(&chain, &probe, &chirp)?;
                let ok = p.is_finite() && p >= 0.0;
                let flag = if p > spectrum::PERTURBATIVE_LIMIT { "down|strong" } else { "down" };
                let cells = [fmt_num(delta), fmt_num(x), fmt_num(f64::NAN), fmt_num(p), flag.into()];
                return Ok((row(&cells), ok));
            }
            let point = spectrum::spectrum_point(&chain, &probe, &chirp)?;
            let ok = row_is_valid(&point);
            let mut flag = flag_text(&point);
            if !ok {
                flag.push_str("|invalid");
            }
            let cells = [fmt_num(delta), fmt_num(x), fmt_num(point.p_unruh()), fmt_num(point.p_finite), flag];
            Ok((row(&cells), ok))
        })
        .collect();
    let mut out = row(&["delta", "x", "p_unruh", "p_finite", "flag"].map(String::from));
    let mut bad = 0;
    for r in rows {
        let (line, ok) = r?;
        bad += usize::from(!ok);
        out.push_str(&line);
    }
    Ok(Emitted { csv: out, invalid_rows: bad })
}

pub fn run_fig3(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.kappa <= 0.0 {
        return Err(CliError::Invalid {
            key: "kappa",
            reason: "the figure needs an upward chirp".into(),
        });
    }
    let chain = IonChain::new(cfg.n_ions, cfg.nu)?;
    let template = DetectorProbe::new(1.0, cfg.rabi, cfg.eta, 1)?;
    let chirps: Vec<ChirpProfile> = FIG3_Y_T
        .iter()
        .map(|&y| ChirpProfile::from_final_ratio(cfg.kappa, cfg.t0, y))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Result<String, Error>> = cfg
        .detunings()
        .par_iter()
        .map(|&delta| {
            let x = 2.0 * PI * delta / cfg.kappa;
            let mut cells = vec![fmt_num(x), fmt_num(delta)];
            if delta == 0.0 {
                cells.extend(std::iter::repeat_n(fmt_num(f64::NAN), 4));
                return Ok(row(&cells));
            }
            let probe = template.at_detuning(delta)?;
            for chirp in &chirps {
                cells.push(fmt_num(spectrum::finite_chirp_probability(&chain, &probe, chirp)?));
            }
            cells.push(fmt_num(spectrum::unruh_probability(&chain, &probe, cfg.kappa)?));
            Ok(row(&cells))
        })
        .collect();
    let mut out = row(&["x", "delta", "p_y_t_1", "p_y_t_10", "p_y_t_100", "p_unruh"].map(String::from));
    for r in rows {
        out.push_str(&r?);
    }
    Ok(out)
}

pub fn run_ratio(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.kappa <= 0.0 {
        return Err(CliError::Invalid {
            key: "kappa",
            reason: "the sideband ratio needs an upward chirp".into(),
        });
    }
    let probe = DetectorProbe::new(cfg.nu, cfg.rabi, cfg.eta, 1)?;
    let r = spectrum::sideband_ratio(cfg.nu, cfg.kappa)?;
    let cells = [
        fmt_num(cfg.nu),
        fmt_num(cfg.kappa),
        fmt_num(cfg.nu / cfg.kappa),
        fmt_num(2.0 * PI * cfg.nu / cfg.kappa),
        fmt_num(r),
        fmt_num(spectrum::unruh_temperature(cfg.kappa)?),
        fmt_num(spectrum::prefactor(&probe, cfg.nu)?),
    ];
    let mut out = row(&["nu", "kappa", "nu_over_kappa", "z", "ratio", "unruh_temp", "prefactor"].map(String::from));
    out.push_str(&row(&cells));
    Ok(out)
}

pub fn run_oracle_check(cfg: &RunConfig) -> Result<String, CliError> {
    let chain = IonChain::new(cfg.n_ions, cfg.nu)?;
    let chirp = cfg.chirp()?;
    let template = DetectorProbe::new(1.0, cfg.rabi, cfg.eta, 1)?;
    let oracle_cfg = OracleConfig::new(cfg.chi())?.with_n_max(cfg.n_max)?;
    let rows: Vec<Result<String, Error>> = cfg
        .detunings()
        .par_iter()
        .map(|&delta| {
            let x = 2.0 * PI * delta / cfg.kappa;
            let probe = template.at_detuning(delta)?;
            let closed = spectrum::finite_chirp_probability(&chain, &probe, &chirp)?;
            let double = oracle::perturbative_probability(&chain, &probe, &chirp)?;
            let evolved = oracle::evolve_schrodinger(&oracle_cfg, &chain, &probe, &chirp)?;
            let flag = if evolved.truncation_warning { "truncated" } else { "ok" };
            let cells = [
                fmt_num(delta),
                fmt_num(x),
                fmt_num(closed),
                fmt_num(double),
                fmt_num(evolved.excited_population),
                fmt_num((double - closed) / closed),
                fmt_num((evolved.excited_population - closed) / closed),
                fmt_num(evolved.norm_drift),
                flag.into(),
            ];
            Ok(row(&cells))
        })
        .collect();
    let header = [
        "delta",
        "x",
        "p_closed",
        "p_double",
        "p_schrodinger",
        "rel_double",
        "rel_schrodinger",
        "norm_drift",
        "flag",
    ];
    let mut out = row(&header.map(String::from));
    for r in rows {
        out.push_str(&r?);
    }
    Ok(out)
}

/// CSV text plus the number of rows the post-emission validator rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub csv: String,
    pub invalid_rows: usize,
}

impl From<String> for Emitted {
    fn from(csv: String) -> Self {
        Emitted { csv, invalid_rows: 0 }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Emitted, CliError> {
    match cfg.command {
        Command::Modes => run_modes(cfg).map(Emitted::from),
        Command::Scan => run_scan(cfg),
        Command::Fig3 => run_fig3(cfg).map(Emitted::from),
        Command::Ratio => run_ratio(cfg).map(Emitted::from),
        Command::OracleCheck => run_oracle_check(cfg).map(Emitted::from),
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Parses `args`, runs the command and writes the CSV; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run_parsed(&args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_parsed(args: &Args) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => Some(read_config(path).map_err(|e| match e {
            CliError::Io(m) => CliError::Invalid { key: "config", reason: m },
            other => other,
        })?),
        None => None,
    };
    let cfg = parse_config(args, text.as_deref())?;
    let emitted = execute(&cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, &emitted.csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(emitted.csv.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    if emitted.invalid_rows > 0 {
        return Err(CliError::Validation(emitted.invalid_rows));
    }
    Ok(())
}
