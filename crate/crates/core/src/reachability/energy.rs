//! Energy polynomials: the criterion `|v_m| = |v_n|` written as a polynomial
//! in the eigenvalue `E` by propagating the open-chain eigenvector recurrence.
//!
//! With `v_1 = 1`, the recurrence `J_k v_{k+1} = E v_k - J_{k-1} v_{k-1}` gives
//! `v_k = q_k(E) / (J_1 ... J_{k-1})` where `q_k` are the continuants
//! `q_1 = 1, q_2 = E, q_{k+1} = E q_k - J_{k-1}^2 q_{k-1}`. For a pair `m < n`
//! the polynomial for sign `s` is
//!
//! ```text
//! P_s(E) = q_n(E) + s * q_m(E) * J_m J_{m+1} ... J_{n-1}
//! ```
//!
//! so that its roots are the energies with `v_n / v_m = -s`. For `m = 1, n = 3`
//! this is `E^2 - J_1^2 + s J_1 J_2`.

use serde::{Deserialize, Serialize};

use crate::chain::Geometry;
use crate::error::{check_site, Error, Result};
use crate::poly::{continuants, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelativeSign {
    Plus,
    Minus,
}

impl RelativeSign {
    pub fn value(self) -> f64 {
        match self {
            RelativeSign::Plus => 1.0,
            RelativeSign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            RelativeSign::Plus => RelativeSign::Minus,
            RelativeSign::Minus => RelativeSign::Plus,
        }
    }

    /// The sign class whose polynomial vanishes when `v_target / v_source` has sign `ratio`.
    pub fn for_ratio(ratio: f64) -> Self {
        if ratio < 0.0 {
            RelativeSign::Plus
        } else {
            RelativeSign::Minus
        }
    }

    pub fn both() -> [RelativeSign; 2] {
        [RelativeSign::Plus, RelativeSign::Minus]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyPolynomial {
    /// Ascending-degree coefficients in `E`.
    pub coefficients: Vec<f64>,
    pub sign: RelativeSign,
    pub source: usize,
    pub target: usize,
}

impl EnergyPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, e: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * e + c)
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coefficients.clone())
    }
}

/// Energy polynomial for transfer `1 -> target` on an open chain.
pub fn energy_polynomial_open(couplings: &[f64], target: usize, sign: RelativeSign) -> Result<EnergyPolynomial> {
    energy_polynomial_between(couplings, 1, target, sign)
}

/// Energy polynomial for transfer `source -> target` on an open chain, built
/// from the recurrence anchored at site 1. Degree is `max(source, target) - 1`.
pub fn energy_polynomial_between(
    couplings: &[f64],
    source: usize,
    target: usize,
    sign: RelativeSign,
) -> Result<EnergyPolynomial> {
    let n_sites = couplings.len() + 1;
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;
    if source == target {
        return Err(Error::InvalidArgument(
            "energy polynomial of a site with itself is the identity".into(),
        ));
    }
    let (lo, hi) = (source.min(target), source.max(target));
    // q_k(E) = det(E - H restricted to sites 1..k-1)
    let q = continuants(&couplings[..hi.saturating_sub(2)]);
    let q_hi = q[hi - 1].clone();
    let q_lo = q[lo - 1].clone();
    let link: f64 = couplings[lo - 1..hi - 1].iter().product();
    let p = q_hi + q_lo.scale(sign.value() * link);
    Ok(EnergyPolynomial {
        coefficients: p.into_coeffs(),
        sign,
        source,
        target,
    })
}

/// Degree of the energy polynomials that govern transfer between `source`
/// and `target`. For an open chain this is the lower of the degrees obtained
/// by anchoring the recurrence at either end; for a ring it is `N - 2`
/// (even `N`) or `N - 1` (odd `N`), independent of the pair.
pub fn structural_degree(geometry: Geometry, n_sites: usize, source: usize, target: usize) -> Result<usize> {
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;
    if source == target {
        return Ok(0);
    }
    Ok(match geometry {
        Geometry::Open => {
            let direct = source.max(target) - 1;
            let mirrored = n_sites - source.min(target);
            direct.min(mirrored)
        }
        Geometry::Closed if n_sites.is_multiple_of(2) => n_sites - 2,
        Geometry::Closed => n_sites - 1,
    })
}
