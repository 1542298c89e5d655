//! Chain geometries, coupling profiles and the single-excitation Hamiltonian.
//!
//! Sites are 1-indexed at every public boundary. Coupling `J_k` (1-indexed)
//! joins sites `k` and `k + 1`; on a closed ring `J_N` joins site `N` back to
//! site 1. Open chains simply have no `J_N`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_site, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Open,
    Closed,
}

impl Geometry {
    /// Number of couplings a chain of `n_sites` carries.
    pub fn coupling_count(self, n_sites: usize) -> usize {
        match self {
            Geometry::Open => n_sites.saturating_sub(1),
            Geometry::Closed => n_sites,
        }
    }

    pub fn min_sites(self) -> usize {
        match self {
            Geometry::Open => 2,
            Geometry::Closed => 3,
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Open => f.write_str("open"),
            Geometry::Closed => f.write_str("closed"),
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "open" => Ok(Geometry::Open),
            "closed" | "ring" => Ok(Geometry::Closed),
            other => Err(Error::InvalidArgument(format!(
                "unknown geometry {other:?} (expected open or closed)"
            ))),
        }
    }
}

/// A validated coupling profile: geometry plus strictly positive couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRecord", into = "ProfileRecord")]
pub struct CouplingProfile {
    geometry: Geometry,
    n_sites: usize,
    couplings: Vec<f64>,
}

/// Wire form shared by every CLI command: `{"geometry", "n", "couplings"}`.
#[derive(Serialize, Deserialize)]
struct ProfileRecord {
    geometry: Geometry,
    n: usize,
    couplings: Vec<f64>,
}

impl TryFrom<ProfileRecord> for CouplingProfile {
    type Error = Error;

    fn try_from(rec: ProfileRecord) -> Result<Self> {
        CouplingProfile::with_sites(rec.geometry, rec.n, rec.couplings)
    }
}

impl From<CouplingProfile> for ProfileRecord {
    fn from(p: CouplingProfile) -> Self {
        ProfileRecord {
            geometry: p.geometry,
            n: p.n_sites,
            couplings: p.couplings,
        }
    }
}

impl CouplingProfile {
    /// Builds a profile, inferring the site count from the coupling count.
    pub fn new(geometry: Geometry, couplings: Vec<f64>) -> Result<Self> {
        let n_sites = match geometry {
            Geometry::Open => couplings.len() + 1,
            Geometry::Closed => couplings.len(),
        };
        Self::with_sites(geometry, n_sites, couplings)
    }

    pub fn open(couplings: Vec<f64>) -> Result<Self> {
        Self::new(Geometry::Open, couplings)
    }

    pub fn closed(couplings: Vec<f64>) -> Result<Self> {
        Self::new(Geometry::Closed, couplings)
    }

    /// Builds a profile with an explicit site count, checking it against the
    /// coupling vector.
    pub fn with_sites(geometry: Geometry, n_sites: usize, couplings: Vec<f64>) -> Result<Self> {
        if n_sites < geometry.min_sites() {
            return Err(Error::TooFewSites {
                geometry,
                n_sites,
                min: geometry.min_sites(),
            });
        }
        let expected = geometry.coupling_count(n_sites);
        if couplings.len() != expected {
            return Err(Error::CouplingCount {
                geometry,
                n_sites,
                expected,
                found: couplings.len(),
            });
        }
        if let Some((i, &value)) = couplings
            .iter()
            .enumerate()
            .find(|(_, j)| !(j.is_finite() && **j > 0.0))
        {
            return Err(Error::NonPositiveCoupling { index: i + 1, value });
        }
        Ok(CouplingProfile {
            geometry,
            n_sites,
            couplings,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Profile with the coupling vector reversed (the mirror image of an open chain).
    pub fn reversed(&self) -> Self {
        let mut couplings = self.couplings.clone();
        couplings.reverse();
        CouplingProfile { couplings, ..*self }
    }

    /// Multiplies every coupling by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_sites(
            self.geometry,
            self.n_sites,
            self.couplings.iter().map(|j| j * factor).collect(),
        )
    }

    pub fn hamiltonian(&self) -> HamiltonianMatrix {
        build_hamiltonian(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad profile JSON: {e}")))
    }
}

/// Dense real symmetric single-excitation Hamiltonian, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    n_sites: usize,
    entries: Vec<f64>,
}

impl HamiltonianMatrix {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Entry at 1-indexed (row, col).
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        assert!(row >= 1 && row <= self.n_sites && col >= 1 && col <= self.n_sites);
        self.at(row - 1, col - 1)
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n_sites + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n_sites).map(|r| r.to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Places `J_k` on the first off-diagonals and, for a ring, `J_N` on the corners.
pub fn build_hamiltonian(profile: &CouplingProfile) -> HamiltonianMatrix {
    let n = profile.n_sites;
    let mut entries = vec![0.0; n * n];
    for (k, &j) in profile.couplings.iter().enumerate() {
        let a = k;
        let b = (k + 1) % n;
        entries[a * n + b] = j;
        entries[b * n + a] = j;
    }
    HamiltonianMatrix { n_sites: n, entries }
}

/// Reflection of site `m` about the centre of an `n_sites` chain.
pub fn mirror_index(n_sites: usize, site: usize) -> Result<usize> {
    check_site(site, n_sites)?;
    Ok(n_sites + 1 - site)
}
