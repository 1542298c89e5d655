//! Dense real polynomials in one variable, coefficients in ascending degree.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Polynomial::constant(1.0), |p, &r| p * Polynomial::new(vec![-r, 1.0]))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// Continuant polynomials of a path with hopping `couplings`:
/// `q_0 = 1, q_1 = x, q_{k+1} = x q_k - J_k^2 q_{k-1}`.
///
/// `q_k` is the characteristic polynomial `det(xI - H)` of the open chain
/// built from the first `k - 1` couplings. Returns `q_0 ..= q_{len+1}`.
pub(crate) fn continuants(couplings: &[f64]) -> Vec<Polynomial> {
    let mut out = Vec::with_capacity(couplings.len() + 2);
    out.push(Polynomial::constant(1.0));
    out.push(Polynomial::x());
    for (k, &j) in couplings.iter().enumerate() {
        let next = Polynomial::x() * out[k + 1].clone() - out[k].scale(j * j);
        out.push(next);
    }
    out
}

/// `det(xI - H)` for a chain with zero on-site energies.
pub fn characteristic_polynomial(profile: &crate::chain::CouplingProfile) -> Polynomial {
    let j = profile.couplings();
    let n = profile.n_sites();
    match profile.geometry() {
        crate::chain::Geometry::Open => continuants(j).swap_remove(n),
        crate::chain::Geometry::Closed => {
            // Periodic continuant: open path 1..N minus the wrap-around terms.
            let path = continuants(&j[..n - 1]).swap_remove(n);
            let inner = continuants(&j[1..n - 2]).swap_remove(n - 2);
            let product: f64 = j.iter().product();
            path - inner.scale(j[n - 1] * j[n - 1]) - Polynomial::constant(2.0 * product)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::CouplingProfile;

    #[test]
    fn arithmetic() {
        let p = Polynomial::from_roots(&[1.0, -2.0]);
        assert_eq!(p.coeffs(), &[-2.0, 1.0, 1.0]);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(-2.0), 0.0);
        let q = p.clone() - p;
        assert_eq!(q.degree(), 0);
        assert_eq!(q.coeff(0), 0.0);
    }

    #[test]
    fn triangle_characteristic() {
        let p = characteristic_polynomial(&CouplingProfile::closed(vec![1.0; 3]).unwrap());
        // (E - 2)(E + 1)^2
        assert_eq!(p.coeffs(), &[-2.0, -3.0, 0.0, 1.0]);
    }

    #[test]
    fn three_site_open_characteristic() {
        let p = characteristic_polynomial(&CouplingProfile::open(vec![1.0, 1.0]).unwrap());
        assert_eq!(p.coeffs(), &[0.0, -2.0, 0.0, 1.0]);
    }
}
