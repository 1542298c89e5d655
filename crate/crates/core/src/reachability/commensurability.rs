//! Detection of commensurate (integer-lattice) spectra via continued fractions.

use std::f64::consts::TAU;

use serde::Serialize;

pub const DEFAULT_MAX_DENOMINATOR: i64 = 64;
pub const DEFAULT_TOL_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommensurabilityReport {
    pub commensurate: bool,
    /// Largest unit `g` with `E_i ~ k_i g`; zero when not commensurate.
    pub base_unit: f64,
    pub integer_spectrum: Vec<i64>,
    /// Common revival period `2 pi / g`.
    pub period: f64,
}

impl CommensurabilityReport {
    fn incommensurate() -> Self {
        CommensurabilityReport {
            commensurate: false,
            base_unit: 0.0,
            integer_spectrum: Vec::new(),
            period: f64::INFINITY,
        }
    }
}

/// Convergents `p/q` of the continued fraction of `x`, stopping once `q`
/// exceeds `max_denominator`.
pub fn convergents(x: f64, max_denominator: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    out.push((p, q));
    for _ in 0..64 {
        if frac.abs() < 1e-300 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if a > 1e15 {
            break;
        }
        frac = inv - a;
        let a = a as i64;
        let (p_next, q_next) = match (
            a.checked_mul(p).and_then(|x| x.checked_add(p_prev)),
            a.checked_mul(q).and_then(|x| x.checked_add(q_prev)),
        ) {
            (Some(pn), Some(qn)) => (pn, qn),
            _ => break,
        };
        if q_next > max_denominator {
            break;
        }
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        out.push((p, q));
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Decides whether all eigenvalues are integer multiples of one unit `g`.
///
/// Each ratio `E_i / E_ref` (with `E_ref` the eigenvalue of largest modulus)
/// is matched to its first continued-fraction convergent within `tol_ratio`
/// whose denominator is at most `max_denominator`. The unit is then
/// `|E_ref| / lcm(q_i)`, enlarged by the gcd of the resulting integers.
pub fn check_commensurability(eigenvalues: &[f64], max_denominator: i64, tol_ratio: f64) -> CommensurabilityReport {
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return CommensurabilityReport::incommensurate();
    }
    let reference = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if reference == 0.0 {
        return CommensurabilityReport::incommensurate();
    }

    let mut fractions = Vec::with_capacity(eigenvalues.len());
    for &e in eigenvalues {
        let r = e / reference;
        let hit = convergents(r, max_denominator)
            .into_iter()
            .find(|&(p, q)| (r - p as f64 / q as f64).abs() <= tol_ratio);
        match hit {
            Some(f) => fractions.push(f),
            None => return CommensurabilityReport::incommensurate(),
        }
    }

    let mut lcm: i128 = 1;
    for &(_, q) in &fractions {
        let q = q as i128;
        lcm = match (lcm / gcd(lcm, q)).checked_mul(q) {
            Some(l) if l <= i64::MAX as i128 => l,
            _ => return CommensurabilityReport::incommensurate(),
        };
    }
    let mut ints: Vec<i128> = fractions.iter().map(|&(p, q)| p as i128 * (lcm / q as i128)).collect();
    let common = ints.iter().fold(0, |g, &k| gcd(g, k));
    ints.iter_mut().for_each(|k| *k /= common);
    let base_unit = reference * common as f64 / lcm as f64;
    let integer_spectrum: Vec<i64> = ints.iter().map(|&k| k as i64).collect();

    let worst = eigenvalues
        .iter()
        .zip(&integer_spectrum)
        .map(|(e, &k)| (e - k as f64 * base_unit).abs())
        .fold(0.0, f64::max);
    if worst > (tol_ratio + 16.0 * f64::EPSILON) * reference {
        return CommensurabilityReport::incommensurate();
    }

    CommensurabilityReport {
        commensurate: true,
        base_unit,
        integer_spectrum,
        period: TAU / base_unit,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{SQRT_2, TAU};

    use super::*;

    #[test]
    fn integer_spectrum() {
        let r = check_commensurability(&[-2.0, -1.0, 1.0, 2.0], 64, 1e-9);
        assert!(r.commensurate);
        assert!((r.base_unit - 1.0).abs() < 1e-12);
        assert_eq!(r.integer_spectrum, vec![-2, -1, 1, 2]);
        assert!((r.period - TAU).abs() < 1e-12);
    }

    #[test]
    fn zero_plus_pair() {
        let r = check_commensurability(&[-SQRT_2, 0.0, SQRT_2], 64, 1e-9);
        assert!(r.commensurate);
        assert!((r.base_unit - SQRT_2).abs() < 1e-12);
        assert_eq!(r.integer_spectrum, vec![-1, 0, 1]);
    }

    #[test]
    fn irrational_ratio() {
        let r = check_commensurability(&[1.0, SQRT_2], 64, 1e-9);
        assert!(!r.commensurate);
    }

    #[test]
    fn odd_lattice_keeps_odd_integers() {
        let r = check_commensurability(&[-3.0, -1.0, 1.0, 3.0], 64, 1e-9);
        assert_eq!(r.integer_spectrum, vec![-3, -1, 1, 3]);
        assert!((r.base_unit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_rational_spectrum() {
        let g = 0.37;
        let r = check_commensurability(&[-5.0 * g, 2.0 * g, 3.0 * g], 64, 1e-9);
        assert!(r.commensurate);
        assert_eq!(r.integer_spectrum, vec![-5, 2, 3]);
        assert!((r.base_unit - g).abs() < 1e-12);
    }

    #[test]
    fn convergents_of_root_two() {
        let c = convergents(SQRT_2 / 2.0, 64);
        assert_eq!(c, vec![(0, 1), (1, 1), (2, 3), (5, 7), (12, 17), (29, 41)]);
    }
}
