//! Eigendecomposition of the chain Hamiltonian and a matrix-exponential
//! propagator used as an independent check on the spectral dynamics.

use std::ops::Range;

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::HamiltonianMatrix;
use crate::error::{check_site, Error, Result};

/// Residual bound for `H v = E v` accepted from the eigensolver.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Eigenvalues closer than this (relative to the spectral radius) form a degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralDecomposition {
    n_sites: usize,
    eigenvalues: Vec<f64>,
    /// Eigenvector `i` occupies `vectors[i * n .. (i + 1) * n]`, indexed by site - 1.
    vectors: Vec<f64>,
    degenerate_clusters: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `i` (0-based, ascending energy), indexed by `site - 1`.
    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n_sites..(i + 1) * self.n_sites]
    }

    /// Component of eigenvector `i` on the 1-indexed `site`.
    #[inline]
    pub fn component(&self, i: usize, site: usize) -> f64 {
        self.vectors[i * self.n_sites + site - 1]
    }

    /// Index ranges of eigenvalue clusters with gaps below [`DEGENERACY_GAP`].
    pub fn degenerate_clusters(&self) -> &[Range<usize>] {
        &self.degenerate_clusters
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_clusters.is_empty()
    }

    /// Groups eigenvalue indices into clusters of (numerically) equal energy.
    pub fn clusters(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(self.n_sites);
        let mut i = 0;
        while i < self.n_sites {
            match self.degenerate_clusters.iter().find(|r| r.start == i) {
                Some(r) => {
                    out.push(r.clone());
                    i = r.end;
                }
                None => {
                    out.push(i..i + 1);
                    i += 1;
                }
            }
        }
        out
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        check_site(site, self.n_sites)
    }
}

/// Cyclic Jacobi diagonalization of the (symmetric) chain matrix.
pub fn decompose(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    let n = h.n_sites();
    let mut a = h.entries().to_vec();
    // Accumulated rotations, row-major: column i holds eigenvector i.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let max_sweeps = 100 * n;
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-3 * f64::EPSILON * scale {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        vectors.extend((0..n).map(|k| v[k * n + i]));
    }

    let radius = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let gap = DEGENERACY_GAP * radius.max(1.0);
    let mut degenerate_clusters = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || eigenvalues[i] - eigenvalues[i - 1] >= gap {
            if i - start > 1 {
                degenerate_clusters.push(start..i);
            }
            start = i;
        }
    }
    for cluster in &degenerate_clusters {
        reorthogonalize(&mut vectors, n, cluster.clone());
    }
    for i in 0..n {
        fix_sign(&mut vectors[i * n..(i + 1) * n]);
    }

    let decomposition = SpectralDecomposition {
        n_sites: n,
        eigenvalues,
        vectors,
        degenerate_clusters,
    };
    let residual = max_residual(h, &decomposition);
    if residual > RESIDUAL_TOL * h.max_abs().max(1.0) {
        return Err(Error::NoConvergence {
            iterations: sweeps,
            residual,
        });
    }
    Ok(decomposition)
}

/// `max_i |H v_i - E_i v_i|_inf`.
pub fn max_residual(h: &HamiltonianMatrix, spec: &SpectralDecomposition) -> f64 {
    let n = h.n_sites();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let v = spec.eigenvector(i);
        let e = spec.eigenvalues[i];
        for r in 0..n {
            let hv: f64 = (0..n).map(|c| h.at(r, c) * v[c]).sum();
            worst = worst.max((hv - e * v[r]).abs());
        }
    }
    worst
}

fn reorthogonalize(vectors: &mut [f64], n: usize, cluster: Range<usize>) {
    for i in cluster.clone() {
        for j in cluster.start..i {
            let dot: f64 = (0..n).map(|k| vectors[i * n + k] * vectors[j * n + k]).sum();
            for k in 0..n {
                vectors[i * n + k] -= dot * vectors[j * n + k];
            }
        }
        let norm = vectors[i * n..(i + 1) * n].iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut vectors[i * n..(i + 1) * n] {
            *x /= norm;
        }
    }
}

/// Gauge: the first component that is not numerically zero is positive.
fn fix_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-10) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Upper bound on `|t| * ||H||_1` accepted by [`evolve_oracle`].
pub const MAX_EVOLUTION_SCALE: f64 = 1e7;

/// Column `site` of `exp(-i t H)`, computed by scaling and squaring a Taylor series.
pub fn evolve_oracle(h: &HamiltonianMatrix, site: usize, t: f64) -> Result<Vec<Complex64>> {
    let n = h.n_sites();
    check_site(site, n)?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    let norm1 = (0..n)
        .map(|c| (0..n).map(|r| h.at(r, c).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let scale = t.abs() * norm1;
    if scale > MAX_EVOLUTION_SCALE {
        return Err(Error::EvolutionRange { scale });
    }

    let squarings = if scale > 0.5 {
        (scale / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let step = t / f64::from(2u32.pow(squarings));
    // A = -i * step * H
    let a: Vec<Complex64> = h.entries().iter().map(|&x| Complex64::new(0.0, -step * x)).collect();

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = matmul(&term, &a, n);
        let inv = 1.0 / k as f64;
        term.iter_mut().for_each(|x| *x *= inv);
        let mut biggest: f64 = 0.0;
        for (r, x) in result.iter_mut().zip(&term) {
            *r += x;
            biggest = biggest.max(x.norm());
        }
        if biggest < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, n);
    }
    Ok((0..n).map(|r| result[r * n + site - 1]).collect())
}

fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}
