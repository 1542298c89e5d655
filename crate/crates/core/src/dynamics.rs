//! Transition amplitudes, fidelity and probability trajectories.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::HamiltonianMatrix;
use crate::error::{check_site, Error, Result};
use crate::spectral::{decompose, SpectralDecomposition};

/// Default number of samples in a trajectory grid.
pub const DEFAULT_STEPS: usize = 201;

/// Transfer of an excitation from `source` to `target` (1-indexed sites).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferSpec {
    pub source: usize,
    pub target: usize,
    /// When set, fidelity is reported at exactly this time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval_time: Option<f64>,
}

impl TransferSpec {
    pub fn new(source: usize, target: usize) -> Self {
        TransferSpec {
            source,
            target,
            retrieval_time: None,
        }
    }

    pub fn at(mut self, time: f64) -> Self {
        self.retrieval_time = Some(time);
        self
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        check_site(self.source, n_sites)?;
        check_site(self.target, n_sites)
    }
}

/// `<target| exp(-i t H) |source> = sum_i v_{i,source} v_{i,target} exp(-i t E_i)`.
pub fn amplitude(spec: &SpectralDecomposition, source: usize, target: usize, t: f64) -> Complex64 {
    spec.eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let w = spec.component(i, source) * spec.component(i, target);
            Complex64::from_polar(w, -t * e)
        })
        .sum()
}

/// Squared modulus of the transition amplitude; the revival probability when
/// source and target coincide.
pub fn fidelity(spec: &SpectralDecomposition, transfer: &TransferSpec, t: f64) -> f64 {
    amplitude(spec, transfer.source, transfer.target, t).norm_sqr()
}

/// Fidelity at the transfer's fixed retrieval time, if it has one.
pub fn fidelity_at_retrieval(spec: &SpectralDecomposition, transfer: &TransferSpec) -> Option<f64> {
    transfer.retrieval_time.map(|t| fidelity(spec, transfer, t))
}

/// Site occupation probabilities on a uniform, closed time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// `probabilities[s][k]` is the occupation of site `k + 1` at `times[s]`.
    pub probabilities: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    pub fn n_sites(&self) -> usize {
        self.probabilities.first().map_or(0, Vec::len)
    }

    pub fn final_row(&self) -> &[f64] {
        self.probabilities.last().map_or(&[], Vec::as_slice)
    }

    /// CSV with header `time,p1,...,pN`, shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let n = self.n_sites();
        let mut out = String::from("time");
        for k in 1..=n {
            out.push_str(&format!(",p{k}"));
        }
        out.push('\n');
        let mut buf = ryu::Buffer::new();
        for (t, row) in self.times.iter().zip(&self.probabilities) {
            out.push_str(buf.format(*t));
            for p in row {
                out.push(',');
                out.push_str(buf.format(*p));
            }
            out.push('\n');
        }
        out
    }
}

pub fn trajectory(h: &HamiltonianMatrix, source: usize, t_max: f64, steps: usize) -> Result<TrajectoryRecord> {
    check_site(source, h.n_sites())?;
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "trajectory needs at least 2 steps, got {steps}"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    let spec = decompose(h)?;
    let n = h.n_sites();
    let last = (steps - 1) as f64;
    let times: Vec<f64> = (0..steps)
        .map(|s| if s + 1 == steps { t_max } else { t_max * s as f64 / last })
        .collect();
    let probabilities = times
        .par_iter()
        .map(|&t| (1..=n).map(|k| amplitude(&spec, source, k, t).norm_sqr()).collect())
        .collect();
    Ok(TrajectoryRecord { times, probabilities })
}
