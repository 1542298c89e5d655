//! Command-line surface for pst-forge.
//!
//! [`run`] parses an argument list, executes one subcommand and writes its
//! output. It returns the process exit status: 0 on success, 1 when the
//! computation rejects its input, 2 when the command line itself is wrong.

mod config;
mod output;

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pst_forge::design::{enumerate_designs, TimeClass};
use pst_forge::dynamics::DEFAULT_STEPS;
use pst_forge::optimizer::{optimize, OptimizationConfig, PathSymmetry, TimeMode, DEFAULT_BOUNDS};
use pst_forge::reachability::{
    check_commensurability, check_criterion1, check_pst, classify, reachability_map, PstTolerances,
};
use pst_forge::{amplitude, decompose, trajectory, CouplingProfile, Geometry};

pub use config::ConfigFile;

use config::{parse_time, TimeArg};

/// Environment variable capping the worker thread count (0 or unset: automatic).
pub const THREADS_ENV: &str = "PST_FORGE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "pst-forge",
    version,
    about = "Perfect state transfer in engineered spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and eigenvectors of a coupling profile.
    Spectrum(ProfileCmd),
    /// Transfer fidelity at one time.
    Fidelity(FidelityCmd),
    /// Site occupation probabilities on a time grid.
    Trajectory(TrajectoryCmd),
    /// Criterion 1, commensurability and perfect-transfer time for a profile.
    Check(CheckCmd),
    /// Reachability verdict for one site pair.
    Classify(PairCmd),
    /// Reachability verdicts for every site pair.
    Map(MapCmd),
    /// Multi-start search for a high-fidelity coupling profile.
    Optimize(OptimizeCmd),
    /// Coupling profiles solved from integer spectra.
    Design(DesignCmd),
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// JSON file of default flag values; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
struct ChainOpts {
    #[arg(long)]
    geometry: Option<Geometry>,
    /// Comma-separated couplings J_1,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    couplings: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    /// Profile JSON, either bare or wrapped in a "profile" / "best_profile" field.
    #[arg(long)]
    profile_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProfileCmd {
    #[command(flatten)]
    chain: ChainOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct FidelityCmd {
    #[command(flatten)]
    chain: ChainOpts,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    to: Option<usize>,
    /// Time: a number, pi, pi/2, 3pi/4, ...
    #[arg(long)]
    time: Option<String>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct TrajectoryCmd {
    #[command(flatten)]
    chain: ChainOpts,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct CheckCmd {
    #[command(flatten)]
    chain: ChainOpts,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    to: Option<usize>,
    /// Loose tolerances for couplings quoted to about six significant figures.
    #[arg(long)]
    rounded: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct PairCmd {
    #[arg(long)]
    geometry: Option<Geometry>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    to: Option<usize>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct MapCmd {
    #[arg(long)]
    geometry: Option<Geometry>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct OptimizeCmd {
    #[arg(long)]
    geometry: Option<Geometry>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    to: Option<usize>,
    /// Retrieval time (number, pi, pi/2, ...) or `free`.
    #[arg(long)]
    time: Option<String>,
    /// Upper end of the time window in free-time mode.
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Coupling box as lo:hi.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long)]
    path_symmetric: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct DesignCmd {
    #[arg(long)]
    geometry: Option<Geometry>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    to: Option<usize>,
    #[arg(long)]
    emax: Option<i64>,
    #[arg(long)]
    time_class: Option<TimeClass>,
    #[command(flatten)]
    common: CommonOpts,
}

/// Why a command failed; decides the exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(pst_forge::Error),
}

impl From<pst_forge::Error> for Failure {
    fn from(e: pst_forge::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn required<T>(value: Option<T>, flag: &str) -> Outcome<T> {
    value.ok_or_else(|| Failure::Usage(format!("missing required flag --{flag}")))
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let common = cli.command.common().clone();
    let config = match common.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let format = common.format.or(config.format);

    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let result = pool.install(|| execute(cli.command, &config, format));
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            if format == Some(Format::Json) {
                let _ = writeln!(out, "{}", output::error_json(&e));
            }
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

impl Command {
    fn common(&self) -> &CommonOpts {
        match self {
            Command::Spectrum(c) => &c.common,
            Command::Fidelity(c) => &c.common,
            Command::Trajectory(c) => &c.common,
            Command::Check(c) => &c.common,
            Command::Classify(c) => &c.common,
            Command::Map(c) => &c.common,
            Command::Optimize(c) => &c.common,
            Command::Design(c) => &c.common,
        }
    }
}

fn execute(command: Command, cfg: &ConfigFile, format: Option<Format>) -> Outcome<String> {
    let fmt = |allowed: &[Format], default: Format| -> Outcome<Format> {
        let f = format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Failure::Usage(
                format!("format {f:?} is not available for this command").to_lowercase(),
            ))
        }
    };
    match command {
        Command::Spectrum(c) => {
            let f = fmt(&[Format::Json, Format::Csv, Format::Text], Format::Text)?;
            let profile = resolve_profile(&c.chain, cfg)?;
            let spec = decompose(&profile.hamiltonian())?;
            Ok(output::spectrum(&spec, f))
        }
        Command::Fidelity(c) => {
            let f = fmt(&[Format::Json, Format::Text], Format::Text)?;
            let from = required(c.from.or(cfg.from), "from")?;
            let to = required(c.to.or(cfg.to), "to")?;
            let time = resolve_time(c.time.as_deref(), cfg.time.as_ref(), "time")?;
            let profile = resolve_profile(&c.chain, cfg)?;
            let spec = decompose(&profile.hamiltonian())?;
            spec.check_site(from)?;
            spec.check_site(to)?;
            let a = amplitude(&spec, from, to, time);
            Ok(output::fidelity(from, to, time, a, f))
        }
        Command::Trajectory(c) => {
            let f = fmt(&[Format::Json, Format::Csv, Format::Text], Format::Csv)?;
            let from = required(c.from.or(cfg.from), "from")?;
            let tmax = resolve_time(c.tmax.as_deref(), cfg.tmax.as_ref(), "tmax")?;
            let steps = c.steps.or(cfg.steps).unwrap_or(DEFAULT_STEPS);
            let profile = resolve_profile(&c.chain, cfg)?;
            let record = trajectory(&profile.hamiltonian(), from, tmax, steps)?;
            Ok(output::trajectory(&record, f))
        }
        Command::Check(c) => {
            let f = fmt(&[Format::Json, Format::Text], Format::Text)?;
            let from = required(c.from.or(cfg.from), "from")?;
            let to = required(c.to.or(cfg.to), "to")?;
            let tol = if c.rounded || cfg.rounded.unwrap_or(false) {
                PstTolerances::rounded_data()
            } else {
                PstTolerances::default()
            };
            let profile = resolve_profile(&c.chain, cfg)?;
            let spec = decompose(&profile.hamiltonian())?;
            let c1 = check_criterion1(&spec, from, to, tol.criterion1)?;
            let comm = check_commensurability(spec.eigenvalues(), tol.max_denominator, tol.tol_ratio);
            let pst = check_pst(&spec, from, to, &tol)?;
            Ok(output::check(&profile, from, to, &c1, &comm, pst.as_ref(), f))
        }
        Command::Classify(c) => {
            let f = fmt(&[Format::Json, Format::Text], Format::Text)?;
            let geometry = required(c.geometry.or(cfg.geometry), "geometry")?;
            let n = required(c.n.or(cfg.n), "n")?;
            let from = required(c.from.or(cfg.from), "from")?;
            let to = required(c.to.or(cfg.to), "to")?;
            let verdict = classify(n, geometry, from, to)?;
            Ok(output::verdict(n, geometry, from, to, &verdict, f))
        }
        Command::Map(c) => {
            let f = fmt(&[Format::Json, Format::Text], Format::Text)?;
            let geometry = required(c.geometry.or(cfg.geometry), "geometry")?;
            let n = required(c.n.or(cfg.n), "n")?;
            let map = reachability_map(n, geometry)?;
            Ok(match f {
                Format::Json => output::json(&map),
                _ => map.to_table(),
            })
        }
        Command::Optimize(c) => {
            let f = fmt(&[Format::Json, Format::Text], Format::Text)?;
            let geometry = required(c.geometry.or(cfg.geometry), "geometry")?;
            let n = required(c.n.or(cfg.n), "n")?;
            let from = required(c.from.or(cfg.from), "from")?;
            let to = required(c.to.or(cfg.to), "to")?;
            let config = optimization_config(&c, cfg, from, to)?;
            let result = optimize(n, geometry, from, to, &config)?;
            Ok(output::optimization(&result, f))
        }
        Command::Design(c) => {
            let f = fmt(&[Format::Json, Format::Text], Format::Text)?;
            let geometry = required(c.geometry.or(cfg.geometry), "geometry")?;
            let n = required(c.n.or(cfg.n), "n")?;
            let from = required(c.from.or(cfg.from), "from")?;
            let to = required(c.to.or(cfg.to), "to")?;
            let emax = c.emax.or(cfg.emax).unwrap_or(4);
            let class = c.time_class.or(cfg.time_class).unwrap_or(TimeClass::Pi);
            let search = enumerate_designs(n, geometry, from, to, emax, class)?;
            Ok(output::designs(&search, f))
        }
    }
}

fn resolve_time(flag: Option<&str>, cfg: Option<&TimeArg>, name: &str) -> Outcome<f64> {
    let arg = match flag {
        Some(s) => parse_time(s).map_err(Failure::Usage)?,
        None => required(cfg.cloned(), name)?,
    };
    match arg {
        TimeArg::Value(t) => Ok(t),
        TimeArg::Free => Err(Failure::Usage(format!("--{name} needs a value, not free"))),
    }
}

fn resolve_profile(chain: &ChainOpts, cfg: &ConfigFile) -> Outcome<CouplingProfile> {
    let n = chain.n.or(cfg.n);
    if let Some(path) = chain.profile_file.as_ref().or(cfg.profile_file.as_ref()) {
        if chain.couplings.is_some() {
            return Err(Failure::Usage(
                "--profile-file and --couplings are mutually exclusive".into(),
            ));
        }
        let profile = config::load_profile(path)?;
        if n.is_some_and(|n| n != profile.n_sites()) {
            return Err(Failure::Usage(format!(
                "--n {} disagrees with the profile file ({} sites)",
                n.unwrap_or_default(),
                profile.n_sites()
            )));
        }
        return Ok(profile);
    }
    let geometry = required(chain.geometry.or(cfg.geometry), "geometry")?;
    let couplings = required(chain.couplings.clone().or_else(|| cfg.couplings.clone()), "couplings")?;
    Ok(match n {
        Some(n) => CouplingProfile::with_sites(geometry, n, couplings)?,
        None => CouplingProfile::new(geometry, couplings)?,
    })
}

fn optimization_config(c: &OptimizeCmd, cfg: &ConfigFile, from: usize, to: usize) -> Outcome<OptimizationConfig> {
    let mut config = OptimizationConfig::default();
    if let Some(r) = c.restarts.or(cfg.restarts) {
        config.restarts = r;
    }
    if let Some(s) = c.seed.or(cfg.seed) {
        config.seed = s;
    }
    if let Some(m) = c.max_evals.or(cfg.max_evals) {
        config.max_evals = m;
    }
    config.bounds = match c.bounds.as_deref().or(cfg.bounds.as_deref()) {
        Some(b) => config::parse_bounds(b).map_err(Failure::Usage)?,
        None => DEFAULT_BOUNDS,
    };
    let horizon = match c.horizon.as_deref() {
        Some(s) => Some(parse_time(s).map_err(Failure::Usage)?),
        None => cfg.horizon.clone(),
    };
    let horizon = match horizon {
        Some(TimeArg::Value(h)) => h,
        Some(TimeArg::Free) => return Err(Failure::Usage("--horizon needs a value".into())),
        None => TAU,
    };
    let time = match c.time.as_deref() {
        Some(s) => Some(parse_time(s).map_err(Failure::Usage)?),
        None => cfg.time.clone(),
    };
    config.time = match time.unwrap_or(TimeArg::Value(PI)) {
        TimeArg::Value(t) => TimeMode::Fixed { time: t },
        TimeArg::Free => TimeMode::Free { horizon },
    };
    if c.path_symmetric || cfg.path_symmetric.unwrap_or(false) {
        config.symmetry = Some(PathSymmetry::new(from, to));
    }
    Ok(config)
}
