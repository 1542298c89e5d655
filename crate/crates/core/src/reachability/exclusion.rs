//! Analytic exclusion rules for open chains and the worked exclusion instances
//! together with certificates that re-check their arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::energy::{energy_polynomial_open, structural_degree, RelativeSign};
use crate::chain::{mirror_index, Geometry};
use crate::error::{check_site, Result};

/// Stable identifiers of every rule `classify` can cite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "revival")]
    Revival,
    #[serde(rename = "mirror-pair")]
    MirrorPair,
    #[serde(rename = "counting")]
    Counting,
    #[serde(rename = "odd-parity")]
    OddParity,
    #[serde(rename = "first-to-penultimate")]
    FirstToPenultimate,
    #[serde(rename = "vieta-parity-6-1-4")]
    VietaParity6x1x4,
    #[serde(rename = "vieta-parity-7-1-5")]
    VietaParity7x1x5,
    #[serde(rename = "closed-three")]
    ClosedThree,
    #[serde(rename = "closed-odd")]
    ClosedOdd,
    #[serde(rename = "closed-even")]
    ClosedEven,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::Revival,
        Rule::MirrorPair,
        Rule::Counting,
        Rule::OddParity,
        Rule::FirstToPenultimate,
        Rule::VietaParity6x1x4,
        Rule::VietaParity7x1x5,
        Rule::ClosedThree,
        Rule::ClosedOdd,
        Rule::ClosedEven,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::Revival => "revival",
            Rule::MirrorPair => "mirror-pair",
            Rule::Counting => "counting",
            Rule::OddParity => "odd-parity",
            Rule::FirstToPenultimate => "first-to-penultimate",
            Rule::VietaParity6x1x4 => "vieta-parity-6-1-4",
            Rule::VietaParity7x1x5 => "vieta-parity-7-1-5",
            Rule::ClosedThree => "closed-three",
            Rule::ClosedOdd => "closed-odd",
            Rule::ClosedEven => "closed-even",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Two energy polynomials of degree `d` host at most `2d` eigenvalues; if
/// that is fewer than `N`, criterion 1 cannot hold for every eigenvector.
///
/// For open chains this forbids every pair lying in the same half of the
/// chain: indices `<= N/2` (even `N`) or `<= (N+1)/2` (odd `N`), and mirrors.
pub fn counting_exclusion(n_sites: usize, geometry: Geometry, source: usize, target: usize) -> Result<Option<Rule>> {
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;
    if source == target {
        return Ok(None);
    }
    let degree = structural_degree(geometry, n_sites, source, target)?;
    Ok((2 * degree < n_sites).then_some(Rule::Counting))
}

/// On an odd open chain the zero eigenvalue would have to be a root of an
/// energy polynomial whose constant term is a product of couplings whenever
/// the two sites have opposite parity.
pub fn parity_exclusion_odd_open(n_sites: usize, source: usize, target: usize) -> Result<Option<Rule>> {
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;
    Ok((n_sites % 2 == 1 && (source + target) % 2 == 1).then_some(Rule::OddParity))
}

/// A worked exclusion stored with everything needed to re-verify it.
#[derive(Debug, Clone, Serialize)]
pub struct ExclusionCertificate {
    pub rule: Rule,
    pub n_sites: usize,
    pub source: usize,
    pub target: usize,
    /// Sign class whose roots carry the parity contradiction.
    pub sign: RelativeSign,
    /// Retrieval time class (`pi` or `pi/2`) assumed by the parity argument.
    pub retrieval_time: &'static str,
    pub argument: &'static str,
}

/// Worked exclusion instances. Mirror images are matched by [`named_exclusion`].
pub fn exclusion_catalog() -> [ExclusionCertificate; 2] {
    [
        ExclusionCertificate {
            rule: Rule::VietaParity6x1x4,
            n_sites: 6,
            source: 1,
            target: 4,
            sign: RelativeSign::Plus,
            retrieval_time: "pi/2",
            argument: "each cubic has no E^2 term, so its three roots sum to zero; \
                       at t*=pi/2 every eigenvalue is an odd integer and three odd integers \
                       cannot sum to zero",
        },
        ExclusionCertificate {
            rule: Rule::VietaParity7x1x5,
            n_sites: 7,
            source: 1,
            target: 5,
            sign: RelativeSign::Plus,
            retrieval_time: "pi",
            argument: "the s=+ quartic has roots +-E1, +-E2 with E1^2+E2^2 = J1^2+J2^2+J3^2; \
                       the zero eigenvalue forces the s=- quartic to E^2 (E^2 - E3^2) with the \
                       same E3^2; at t*=pi E1, E2 are odd and E3 even, but a sum of two odd \
                       squares is 2 mod 4 while an even square is 0 mod 4",
        },
    ]
}

/// Looks up a worked exclusion for the pair or its mirror image.
pub fn named_exclusion(
    n_sites: usize,
    geometry: Geometry,
    source: usize,
    target: usize,
) -> Result<Option<ExclusionCertificate>> {
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;
    if geometry != Geometry::Open {
        return Ok(None);
    }
    let pair = (source.min(target), source.max(target));
    let mirrored = {
        let a = mirror_index(n_sites, source)?;
        let b = mirror_index(n_sites, target)?;
        (a.min(b), a.max(b))
    };
    Ok(exclusion_catalog()
        .into_iter()
        .find(|c| c.n_sites == n_sites && ((c.source, c.target) == pair || (c.source, c.target) == mirrored)))
}

impl ExclusionCertificate {
    /// Re-checks the certificate: the structural polynomial facts on random
    /// positive couplings, and the parity contradiction by exhaustive integer
    /// arithmetic over residue classes.
    pub fn verify(&self) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.n_sites as u64);
        let structure = (0..32).all(|_| {
            let j: Vec<f64> = (0..self.n_sites - 1).map(|_| rng.gen_range(0.2..3.0)).collect();
            self.polynomial_structure_holds(&j)
        });
        structure && self.parity_contradiction_holds()
    }

    fn polynomial_structure_holds(&self, j: &[f64]) -> bool {
        let Ok(plus) = energy_polynomial_open(j, self.target, RelativeSign::Plus) else {
            return false;
        };
        let Ok(minus) = energy_polynomial_open(j, self.target, RelativeSign::Minus) else {
            return false;
        };
        let scale = j.iter().fold(0.0f64, |m, x| m.max(*x)).powi(plus.degree() as i32);
        let tiny = |x: f64| x.abs() <= 1e-12 * scale;
        match self.rule {
            Rule::VietaParity6x1x4 => {
                // Both cubics: monic, zero E^2 coefficient, so roots sum to zero.
                [&plus, &minus]
                    .iter()
                    .all(|p| p.degree() == 3 && (p.coefficients[3] - 1.0).abs() < 1e-15 && tiny(p.coefficients[2]))
            }
            Rule::VietaParity7x1x5 => {
                let sum_sq = j[0] * j[0] + j[1] * j[1] + j[2] * j[2];
                // Even quartics sharing the E^2 coefficient -(J1^2+J2^2+J3^2).
                let shape = [&plus, &minus].iter().all(|p| {
                    p.degree() == 4
                        && tiny(p.coefficients[1])
                        && tiny(p.coefficients[3])
                        && (p.coefficients[2] + sum_sq).abs() <= 1e-12 * scale
                });
                // E = 0 cannot be a root of the s=+ quartic: its constant term is positive.
                let plus_excludes_zero = plus.coefficients[0] > 0.0;
                // Imposing the zero root on the s=- quartic (J1 J3 = J2 J4) leaves E^2 (E^2 - sum_sq).
                let mut forced = j.to_vec();
                forced[3] = j[0] * j[2] / j[1];
                let forced_ok = energy_polynomial_open(&forced, self.target, RelativeSign::Minus)
                    .map(|p| tiny(p.coefficients[0]) && (p.coefficients[2] + sum_sq).abs() <= 1e-12 * scale)
                    .unwrap_or(false);
                shape && plus_excludes_zero && forced_ok
            }
            _ => false,
        }
    }

    fn parity_contradiction_holds(&self) -> bool {
        match self.rule {
            // Odd integers are 1 or 3 mod 4; no three of them sum to 0 mod 4
            // (they do not even sum to an even number).
            Rule::VietaParity6x1x4 => {
                let odd = [1i64, 3];
                odd.iter()
                    .all(|&a| odd.iter().all(|&b| odd.iter().all(|&c| (a + b + c).rem_euclid(2) != 0)))
            }
            // a, b odd and c even: a^2 + b^2 = c^2 fails mod 4 for every residue.
            Rule::VietaParity7x1x5 => {
                let odd = [1i64, 3];
                let even = [0i64, 2];
                odd.iter().all(|&a| {
                    odd.iter()
                        .all(|&b| even.iter().all(|&c| (a * a + b * b - c * c).rem_euclid(4) != 0))
                })
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_examples() {
        assert_eq!(
            counting_exclusion(6, Geometry::Open, 1, 3).unwrap(),
            Some(Rule::Counting)
        );
        assert_eq!(
            counting_exclusion(6, Geometry::Open, 4, 6).unwrap(),
            Some(Rule::Counting)
        );
        assert_eq!(counting_exclusion(6, Geometry::Open, 1, 6).unwrap(), None);
        assert_eq!(counting_exclusion(6, Geometry::Open, 1, 4).unwrap(), None);
        assert_eq!(
            counting_exclusion(6, Geometry::Open, 2, 3).unwrap(),
            Some(Rule::Counting)
        );
        assert_eq!(
            counting_exclusion(7, Geometry::Open, 1, 4).unwrap(),
            Some(Rule::Counting)
        );
        assert_eq!(counting_exclusion(7, Geometry::Open, 1, 5).unwrap(), None);
        for n in 3..10 {
            for m in 1..=n {
                for k in 1..=n {
                    assert_eq!(counting_exclusion(n, Geometry::Closed, m, k).unwrap(), None);
                }
            }
        }
    }

    #[test]
    fn counting_matches_first_site_bounds() {
        for n in 2..20usize {
            for target in 2..=n {
                let bound = if n % 2 == 0 { n / 2 } else { n.div_ceil(2) };
                let excluded = counting_exclusion(n, Geometry::Open, 1, target).unwrap().is_some();
                assert_eq!(excluded, target <= bound, "N={n} 1->{target}");
            }
        }
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity_exclusion_odd_open(7, 2, 5).unwrap(), Some(Rule::OddParity));
        assert_eq!(parity_exclusion_odd_open(7, 1, 5).unwrap(), None);
        assert_eq!(parity_exclusion_odd_open(6, 2, 5).unwrap(), None);
    }

    #[test]
    fn catalog_lookup_includes_mirrors() {
        assert_eq!(
            named_exclusion(6, Geometry::Open, 1, 4).unwrap().unwrap().rule,
            Rule::VietaParity6x1x4
        );
        assert_eq!(
            named_exclusion(6, Geometry::Open, 6, 3).unwrap().unwrap().rule,
            Rule::VietaParity6x1x4
        );
        assert_eq!(
            named_exclusion(7, Geometry::Open, 3, 7).unwrap().unwrap().rule,
            Rule::VietaParity7x1x5
        );
        assert!(named_exclusion(7, Geometry::Closed, 1, 5).unwrap().is_none());
        assert!(named_exclusion(8, Geometry::Open, 1, 4).unwrap().is_none());
    }

    #[test]
    fn certificates_verify() {
        for c in exclusion_catalog() {
            assert!(c.verify(), "{}", c.rule);
        }
    }

    #[test]
    fn rule_ids_are_stable() {
        for r in Rule::ALL {
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.id()));
        }
    }
}
