//! Rendering of command results as JSON, CSV or text.

use std::fmt::Write;

use pst_forge::design::DesignSearch;
use pst_forge::optimizer::OptimizationResult;
use pst_forge::reachability::{CommensurabilityReport, Criterion1Report, PstWitness, ReachabilityVerdict};
use pst_forge::Complex64;
use pst_forge::{CouplingProfile, Error, Geometry, SpectralDecomposition, TrajectoryRecord};
use serde::Serialize;

use crate::Format;

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output is serializable");
    s.push('\n');
    s
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

pub fn error_json(e: &Error) -> String {
    let kind = match e {
        Error::NonPositiveCoupling { .. } => "non-positive-coupling",
        Error::CouplingCount { .. } => "coupling-count",
        Error::TooFewSites { .. } => "too-few-sites",
        Error::SiteOutOfRange { .. } => "site-out-of-range",
        Error::NoConvergence { .. } => "no-convergence",
        Error::EvolutionRange { .. } => "evolution-range",
        Error::ReconstructionBreakdown { .. } => "reconstruction-breakdown",
        Error::NoSolution { .. } => "no-solution",
        Error::InvalidArgument(_) => "invalid-argument",
    };
    serde_json::json!({ "error": { "kind": kind, "message": e.to_string() } }).to_string()
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    n: usize,
    eigenvalues: &'a [f64],
    eigenvectors: Vec<&'a [f64]>,
    degenerate_clusters: Vec<Vec<usize>>,
}

pub fn spectrum(spec: &SpectralDecomposition, format: Format) -> String {
    let n = spec.n_sites();
    match format {
        Format::Json => json(&SpectrumOut {
            n,
            eigenvalues: spec.eigenvalues(),
            eigenvectors: (0..n).map(|i| spec.eigenvector(i)).collect(),
            degenerate_clusters: spec.degenerate_clusters().iter().map(|r| r.clone().collect()).collect(),
        }),
        Format::Csv => {
            let mut out = String::from("index,eigenvalue");
            for k in 1..=n {
                let _ = write!(out, ",v{k}");
            }
            out.push('\n');
            for i in 0..n {
                let _ = write!(out, "{},{}", i + 1, spec.eigenvalues()[i]);
                for x in spec.eigenvector(i) {
                    let _ = write!(out, ",{x}");
                }
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = format!("eigenvalues: {}\n", list(spec.eigenvalues()));
            for i in 0..n {
                let _ = writeln!(
                    out,
                    "v{} ({}): {}",
                    i + 1,
                    spec.eigenvalues()[i],
                    list(spec.eigenvector(i))
                );
            }
            if spec.is_degenerate() {
                let _ = writeln!(out, "degenerate clusters: {:?}", spec.degenerate_clusters());
            }
            out
        }
    }
}

pub fn fidelity(from: usize, to: usize, time: f64, a: Complex64, format: Format) -> String {
    let f = a.norm_sqr();
    match format {
        Format::Json => json(&serde_json::json!({
            "from": from,
            "to": to,
            "time": time,
            "amplitude": [a.re, a.im],
            "fidelity": f,
        })),
        _ => format!("fidelity {from}->{to} at t = {time}: {f}\n"),
    }
}

pub fn trajectory(record: &TrajectoryRecord, format: Format) -> String {
    match format {
        Format::Json => json(record),
        Format::Csv => record.to_csv(),
        Format::Text => {
            let last = record.final_row();
            let peak = last
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map_or(0, |(i, _)| i + 1);
            format!(
                "{} samples up to t = {}\nfinal occupations: {}\npeak at site {peak}\n",
                record.times.len(),
                record.times.last().copied().unwrap_or(0.0),
                list(last)
            )
        }
    }
}

#[derive(Serialize)]
struct CheckOut<'a> {
    profile: &'a CouplingProfile,
    from: usize,
    to: usize,
    criterion1: &'a Criterion1Report,
    commensurability: &'a CommensurabilityReport,
    pst: Option<&'a PstWitness>,
}

pub fn check(
    profile: &CouplingProfile,
    from: usize,
    to: usize,
    c1: &Criterion1Report,
    comm: &CommensurabilityReport,
    pst: Option<&PstWitness>,
    format: Format,
) -> String {
    match format {
        Format::Json => json(&CheckOut {
            profile,
            from,
            to,
            criterion1: c1,
            commensurability: comm,
            pst,
        }),
        _ => {
            let mut out = format!(
                "criterion 1 ({from}->{to}): {} (max residual {:e}){}\n",
                if c1.satisfied { "satisfied" } else { "violated" },
                c1.max_residual,
                if c1.degenerate { ", degenerate spectrum" } else { "" }
            );
            if comm.commensurate {
                let _ = writeln!(
                    out,
                    "commensurate: E = k * {} with k = {:?}, period {}",
                    comm.base_unit, comm.integer_spectrum, comm.period
                );
            } else {
                out.push_str("commensurate: no\n");
            }
            match pst {
                Some(w) => {
                    let _ = writeln!(out, "perfect transfer at t* = {} (fidelity {})", w.time, w.fidelity);
                }
                None => out.push_str("perfect transfer: not found\n"),
            }
            out
        }
    }
}

#[derive(Serialize)]
struct VerdictOut<'a> {
    n: usize,
    geometry: Geometry,
    from: usize,
    to: usize,
    #[serde(flatten)]
    verdict: &'a ReachabilityVerdict,
}

pub fn verdict(
    n: usize,
    geometry: Geometry,
    from: usize,
    to: usize,
    v: &ReachabilityVerdict,
    format: Format,
) -> String {
    match format {
        Format::Json => json(&VerdictOut {
            n,
            geometry,
            from,
            to,
            verdict: v,
        }),
        _ => {
            let status = match v.symbol() {
                'R' => "Reachable",
                'X' => "Excluded",
                _ => "Undetermined",
            };
            let mut out = format!("{geometry} N={n} {from}->{to}: {status}");
            if let Some(rule) = v.rule {
                let _ = write!(out, ", rule {rule}");
            }
            if v.numerical_evidence {
                out.push_str(" (numerical evidence)");
            }
            out.push('\n');
            out
        }
    }
}

pub fn optimization(result: &OptimizationResult, format: Format) -> String {
    match format {
        Format::Json => json(result),
        _ => {
            let successes = result.per_restart.iter().filter(|r| r.fidelity >= 1.0 - 1e-9).count();
            format!(
                "best fidelity {} at t = {}\ncouplings: {}\nrestarts: {} ({successes} reached 1 - 1e-9), evaluations: {}\nprofile: {}\n",
                result.best_fidelity,
                result.best_time,
                list(result.best_profile.couplings()),
                result.per_restart.len(),
                result.evaluations,
                result.best_profile.to_json()
            )
        }
    }
}

pub fn designs(search: &DesignSearch, format: Format) -> String {
    match format {
        Format::Json => json(search),
        _ => {
            let mut out = String::new();
            for s in &search.solutions {
                let _ = writeln!(
                    out,
                    "spectrum {:?} x {} -> t* = {}, fidelity {}\n  {}",
                    s.spectrum.integers,
                    s.spectrum.base_unit,
                    s.time,
                    s.fidelity,
                    s.profile.to_json()
                );
            }
            let _ = writeln!(
                out,
                "{} design(s) from {} spectra, {} sign patterns{}",
                search.solutions.len(),
                search.spectra_examined,
                search.problems_solved,
                if search.truncated {
                    " (spectrum budget reached)"
                } else {
                    ""
                }
            );
            out
        }
    }
}
