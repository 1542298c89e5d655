//! Criterion 1 (equal eigenvector moduli) and the combined PST check.

use std::f64::consts::PI;

use serde::Serialize;

use super::commensurability::{check_commensurability, CommensurabilityReport};
use crate::dynamics::amplitude;
use crate::error::Result;
use crate::spectral::SpectralDecomposition;

pub const DEFAULT_CRITERION1_TOL: f64 = 1e-8;
/// Fidelity must reach `1 - DEFAULT_FIDELITY_TOL` to count as perfect.
pub const DEFAULT_FIDELITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion1Report {
    pub satisfied: bool,
    /// `||v_im| - |v_in||` for every eigenvector, in ascending-energy order.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Set when the spectrum has degenerate clusters: the eigenbasis, and so
    /// the result, depends on an arbitrary choice inside each cluster.
    pub degenerate: bool,
}

pub fn check_criterion1(
    spec: &SpectralDecomposition,
    source: usize,
    target: usize,
    tol: f64,
) -> Result<Criterion1Report> {
    spec.check_site(source)?;
    spec.check_site(target)?;
    let residuals: Vec<f64> = (0..spec.n_sites())
        .map(|i| (spec.component(i, source).abs() - spec.component(i, target).abs()).abs())
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(Criterion1Report {
        satisfied: max_residual <= tol,
        residuals,
        max_residual,
        degenerate: spec.is_degenerate(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PstTolerances {
    pub criterion1: f64,
    pub max_denominator: i64,
    pub tol_ratio: f64,
    pub fidelity: f64,
}

impl Default for PstTolerances {
    fn default() -> Self {
        PstTolerances {
            criterion1: DEFAULT_CRITERION1_TOL,
            max_denominator: super::commensurability::DEFAULT_MAX_DENOMINATOR,
            tol_ratio: super::commensurability::DEFAULT_TOL_RATIO,
            fidelity: DEFAULT_FIDELITY_TOL,
        }
    }
}

impl PstTolerances {
    /// Tolerances matched to profiles whose couplings are quoted to about six
    /// significant figures.
    pub fn rounded_data() -> Self {
        PstTolerances {
            criterion1: 1e-5,
            max_denominator: 64,
            tol_ratio: 1e-5,
            fidelity: 1e-5,
        }
    }

    /// Tolerances for profiles returned by a numerical search, whose
    /// couplings are accurate to a few parts in 1e8. Near-transfer through an
    /// almost-cut link can exceed `1 - 1e-9` in fidelity while missing the
    /// criterion by 1e-5 or more, so criterion 1 stays the deciding test.
    pub fn optimized() -> Self {
        PstTolerances {
            criterion1: 1e-6,
            max_denominator: 64,
            tol_ratio: 1e-6,
            fidelity: DEFAULT_FIDELITY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PstWitness {
    pub time: f64,
    pub fidelity: f64,
    pub commensurability: CommensurabilityReport,
}

/// Smallest `t* > 0` with `|<target| e^{-i t* H} |source>| >= 1 - tol`.
///
/// Criterion 1 is checked per energy cluster through the spectral projector
/// (`|P_mn| = P_mm = P_nn`), which is basis independent and reduces to
/// `|v_im| = |v_in|` for a simple spectrum. The cluster energies must then be
/// commensurate, `E = k g`. Perfect transfer requires all phase differences
/// `(k_i - k_j) g t` to be multiples of `pi`, so candidate times are
/// `j pi / (d g)` with `d = gcd(k_i - k_j)`; the modulus of the amplitude is
/// periodic in `2 pi / (d g)`, so `j = 1, 2` covers every case.
pub fn check_pst(
    spec: &SpectralDecomposition,
    source: usize,
    target: usize,
    tol: &PstTolerances,
) -> Result<Option<PstWitness>> {
    spec.check_site(source)?;
    spec.check_site(target)?;

    let clusters = spec.clusters();
    let mut energies = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let (mut pmm, mut pnn, mut pmn) = (0.0, 0.0, 0.0);
        for i in cluster.clone() {
            let vm = spec.component(i, source);
            let vn = spec.component(i, target);
            pmm += vm * vm;
            pnn += vn * vn;
            pmn += vm * vn;
        }
        let equal = (pmm.sqrt() - pnn.sqrt()).abs() <= tol.criterion1
            && (pmm.sqrt() - pmn.abs().sqrt()).abs() <= tol.criterion1;
        if !equal {
            return Ok(None);
        }
        let mean = cluster.clone().map(|i| spec.eigenvalues()[i]).sum::<f64>() / cluster.len() as f64;
        energies.push(mean);
    }

    let report = check_commensurability(&energies, tol.max_denominator, tol.tol_ratio);
    if !report.commensurate {
        return Ok(None);
    }
    let k = &report.integer_spectrum;
    let d = k.iter().map(|&x| (x - k[0]).unsigned_abs()).fold(0u64, gcd);
    let d = d.max(1) as f64;

    for j in 1..=2 {
        let t = j as f64 * PI / (d * report.base_unit);
        let f = amplitude(spec, source, target, t).norm_sqr();
        if f >= 1.0 - tol.fidelity {
            return Ok(Some(PstWitness {
                time: t,
                fidelity: f,
                commensurability: report,
            }));
        }
    }
    Ok(None)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
