use thiserror::Error;

use crate::chain::Geometry;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coupling J_{index} = {value} is not strictly positive and finite")]
    NonPositiveCoupling { index: usize, value: f64 },

    #[error("{geometry} chain with {n_sites} sites needs {expected} couplings, got {found}")]
    CouplingCount {
        geometry: Geometry,
        n_sites: usize,
        expected: usize,
        found: usize,
    },

    #[error("{geometry} chain needs at least {min} sites, got {n_sites}")]
    TooFewSites {
        geometry: Geometry,
        n_sites: usize,
        min: usize,
    },

    #[error("site {site} is outside 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("eigensolver did not converge after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("evolution argument |t|*||H|| = {scale:e} exceeds the supported range")]
    EvolutionRange { scale: f64 },

    #[error("Jacobi reconstruction broke down at pivot {pivot} (value {value:e})")]
    ReconstructionBreakdown { pivot: usize, value: f64 },

    #[error("no coupling profile solves the design problem (best residual {best:e})")]
    NoSolution { best: f64, residuals: Vec<f64> },

    #[error("{0}")]
    InvalidArgument(String),
}

pub(crate) fn check_site(site: usize, n_sites: usize) -> Result<()> {
    if site == 0 || site > n_sites {
        Err(Error::SiteOutOfRange { site, n_sites })
    } else {
        Ok(())
    }
}
