//! Multi-start derivative-free maximization of transfer fidelity over
//! coupling profiles, with optional path symmetry on rings.

mod simplex;

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use simplex::{minimize, SimplexOptions, SimplexOutcome};

use crate::chain::{CouplingProfile, Geometry};
use crate::dynamics::amplitude;
use crate::error::{check_site, Error, Result};
use crate::spectral::decompose;

pub const DEFAULT_BOUNDS: (f64, f64) = (1e-3, 10.0);
pub const DEFAULT_HORIZON: f64 = TAU;
pub const DEFAULT_SUCCESS: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TimeMode {
    /// Fidelity is maximized at this retrieval time.
    Fixed { time: f64 },
    /// Couplings and retrieval time in `(0, horizon]` are optimized jointly.
    Free { horizon: f64 },
}

impl Default for TimeMode {
    fn default() -> Self {
        TimeMode::Fixed { time: PI }
    }
}

/// Ties couplings so that both ring paths from `source` to `target` read the
/// same forwards and backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSymmetry {
    pub source: usize,
    pub target: usize,
    pub enabled: bool,
}

impl PathSymmetry {
    pub fn new(source: usize, target: usize) -> Self {
        PathSymmetry {
            source,
            target,
            enabled: true,
        }
    }

    /// 0-based coupling indices along the clockwise path (`source`, `source+1`, ...)
    /// and the anticlockwise path, each listed from the source end.
    pub fn paths(&self, n_sites: usize) -> (Vec<usize>, Vec<usize>) {
        let n = n_sites;
        let (m, t) = (self.source - 1, self.target - 1);
        let forward_len = (t + n - m) % n;
        let forward = (0..forward_len).map(|k| (m + k) % n).collect();
        let backward = (0..n - forward_len).map(|k| (m + n - 1 - k) % n).collect();
        (forward, backward)
    }

    pub fn reduced_dimension(&self, n_sites: usize) -> usize {
        let (a, b) = self.paths(n_sites);
        a.len().div_ceil(2) + b.len().div_ceil(2)
    }

    fn validate(&self, geometry: Geometry, n_sites: usize) -> Result<()> {
        if geometry != Geometry::Closed {
            return Err(Error::InvalidArgument(
                "path symmetry applies only to closed chains".into(),
            ));
        }
        check_site(self.source, n_sites)?;
        check_site(self.target, n_sites)?;
        if self.source == self.target {
            return Err(Error::InvalidArgument("path symmetry needs distinct sites".into()));
        }
        Ok(())
    }
}

/// Expands a reduced parameter vector into a full ring coupling vector in
/// which both paths between the symmetry's sites are palindromic.
///
/// The reduced vector lists the first half of the clockwise path, then the
/// first half of the anticlockwise path, each read from the source end.
pub fn apply_symmetry(
    reduced: &[f64],
    symmetry: &PathSymmetry,
    geometry: Geometry,
    n_sites: usize,
) -> Result<Vec<f64>> {
    symmetry.validate(geometry, n_sites)?;
    let dim = symmetry.reduced_dimension(n_sites);
    if reduced.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "path symmetry on {n_sites} sites needs {dim} parameters, got {}",
            reduced.len()
        )));
    }
    let (forward, backward) = symmetry.paths(n_sites);
    let mut couplings = vec![0.0; n_sites];
    let mut offset = 0;
    for path in [&forward, &backward] {
        let len = path.len();
        for (k, &idx) in path.iter().enumerate() {
            couplings[idx] = reduced[offset + k.min(len - 1 - k)];
        }
        offset += len.div_ceil(2);
    }
    Ok(couplings)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    pub bounds: (f64, f64),
    pub restarts: usize,
    pub max_evals: usize,
    pub seed: u64,
    pub time: TimeMode,
    pub symmetry: Option<PathSymmetry>,
    pub success_threshold: f64,
    /// Stop after the first batch of restarts that contains a success.
    /// Batches have a fixed size, so the outcome does not depend on the thread count.
    pub stop_on_success: bool,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            bounds: DEFAULT_BOUNDS,
            restarts: 32,
            max_evals: 4000,
            seed: 0,
            time: TimeMode::default(),
            symmetry: None,
            success_threshold: DEFAULT_SUCCESS,
            stop_on_success: false,
        }
    }
}

const BATCH: usize = 8;

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bounds must satisfy 0 < lo < hi, got {lo}:{hi}"
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("at least one restart is required".into()));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidArgument("max_evals must be positive".into()));
        }
        match self.time {
            TimeMode::Fixed { time } if !(time.is_finite() && time > 0.0) => Err(Error::InvalidArgument(format!(
                "retrieval time must be positive, got {time}"
            ))),
            TimeMode::Free { horizon } if !(horizon.is_finite() && horizon > 0.0) => Err(Error::InvalidArgument(
                format!("time horizon must be positive, got {horizon}"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub fidelity: f64,
    pub time: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub couplings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub best_profile: CouplingProfile,
    pub best_fidelity: f64,
    pub best_time: f64,
    pub evaluations: usize,
    pub success: bool,
    pub per_restart: Vec<RestartSummary>,
}

/// Problem layout shared by every restart.
struct Layout {
    n_sites: usize,
    geometry: Geometry,
    source: usize,
    target: usize,
    symmetry: Option<PathSymmetry>,
    n_couplings: usize,
    log_lo: f64,
    log_hi: f64,
    time: TimeMode,
}

impl Layout {
    fn dim(&self) -> usize {
        self.n_couplings + usize::from(matches!(self.time, TimeMode::Free { .. }))
    }

    fn time_floor(horizon: f64) -> f64 {
        horizon * 1e-3
    }

    fn couplings(&self, x: &[f64]) -> Vec<f64> {
        let j: Vec<f64> = x[..self.n_couplings].iter().map(|v| v.exp()).collect();
        match &self.symmetry {
            Some(sym) => {
                apply_symmetry(&j, sym, self.geometry, self.n_sites).expect("symmetry validated before optimization")
            }
            None => j,
        }
    }

    fn time(&self, x: &[f64]) -> f64 {
        match self.time {
            TimeMode::Fixed { time } => time,
            TimeMode::Free { .. } => x[self.n_couplings],
        }
    }

    fn fidelity(&self, couplings: Vec<f64>, t: f64) -> f64 {
        let Ok(profile) = CouplingProfile::with_sites(self.geometry, self.n_sites, couplings) else {
            return 0.0;
        };
        match decompose(&profile.hamiltonian()) {
            Ok(spec) => amplitude(&spec, self.source, self.target, t).norm_sqr(),
            Err(_) => 0.0,
        }
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![self.log_lo; self.n_couplings];
        let mut hi = vec![self.log_hi; self.n_couplings];
        if let TimeMode::Free { horizon } = self.time {
            lo.push(Self::time_floor(horizon));
            hi.push(horizon);
        }
        (lo, hi)
    }

    fn initial_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.n_couplings)
            .map(|_| rng.gen_range(self.log_lo..self.log_hi))
            .collect();
        if let TimeMode::Free { horizon } = self.time {
            x.push(rng.gen_range(Self::time_floor(horizon)..horizon));
        }
        x
    }

    fn steps(&self) -> Vec<f64> {
        let mut s = vec![0.5; self.n_couplings];
        if let TimeMode::Free { horizon } = self.time {
            s.push(horizon / 8.0);
        }
        s
    }
}

fn run_restart(layout: &Layout, config: &OptimizationConfig, restart: usize) -> RestartSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let x0 = layout.initial_point(&mut rng);
    let (lower, upper) = layout.bounds();
    let opts = SimplexOptions {
        max_evals: config.max_evals,
        step: layout.steps(),
        lower,
        upper,
        f_tol: 1e-16,
        x_tol: 1e-9,
        target: 0.0,
    };
    let out = minimize(
        |x| 1.0 - layout.fidelity(layout.couplings(x), layout.time(x)),
        &x0,
        &opts,
    );
    let couplings = layout.couplings(&out.x);
    let time = layout.time(&out.x);
    RestartSummary {
        restart,
        fidelity: 1.0 - out.f,
        time,
        evaluations: out.evals,
        converged: out.converged,
        couplings,
    }
}

/// Maximizes `|<target| e^{-i t H} |source>|^2` over coupling profiles.
///
/// Each restart draws its starting point log-uniformly inside the bounds from
/// a generator seeded by `(seed, restart)`, so results do not depend on
/// scheduling. The best restart wins; equal fidelities go to the lowest index.
pub fn optimize(
    n_sites: usize,
    geometry: Geometry,
    source: usize,
    target: usize,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    if n_sites < geometry.min_sites() {
        return Err(Error::TooFewSites {
            geometry,
            n_sites,
            min: geometry.min_sites(),
        });
    }
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;
    let symmetry = config.symmetry.filter(|s| s.enabled);
    if let Some(sym) = &symmetry {
        sym.validate(geometry, n_sites)?;
        if (sym.source, sym.target) != (source, target) && (sym.source, sym.target) != (target, source) {
            return Err(Error::InvalidArgument(
                "path symmetry must be anchored at the transfer's sites".into(),
            ));
        }
    }
    let n_couplings = match &symmetry {
        Some(sym) => sym.reduced_dimension(n_sites),
        None => geometry.coupling_count(n_sites),
    };
    let layout = Layout {
        n_sites,
        geometry,
        source,
        target,
        symmetry,
        n_couplings,
        log_lo: config.bounds.0.ln(),
        log_hi: config.bounds.1.ln(),
        time: config.time,
    };
    debug_assert!(layout.dim() > 0);

    let mut outcomes: Vec<RestartSummary> = Vec::with_capacity(config.restarts);
    let mut next = 0;
    while next < config.restarts {
        let end = if config.stop_on_success {
            (next + BATCH).min(config.restarts)
        } else {
            config.restarts
        };
        let batch: Vec<RestartSummary> = (next..end)
            .into_par_iter()
            .map(|r| run_restart(&layout, config, r))
            .collect();
        outcomes.extend(batch);
        next = end;
        if config.stop_on_success && outcomes.iter().any(|o| o.fidelity >= config.success_threshold) {
            break;
        }
    }

    let best = outcomes
        .iter()
        .reduce(|best, o| if o.fidelity > best.fidelity { o } else { best })
        .expect("at least one restart");
    let best_profile = CouplingProfile::with_sites(geometry, n_sites, best.couplings.clone())?;
    let best_time = best.time;
    let spec = decompose(&best_profile.hamiltonian())?;
    let best_fidelity = amplitude(&spec, source, target, best_time).norm_sqr();
    Ok(OptimizationResult {
        best_profile,
        best_fidelity,
        best_time,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        success: best_fidelity >= config.success_threshold,
        per_restart: outcomes,
    })
}
