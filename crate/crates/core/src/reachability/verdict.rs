//! Reachability classification of `(geometry, N, m, n)` transfers.

use rayon::prelude::*;
use serde::Serialize;

use super::exclusion::{counting_exclusion, named_exclusion, parity_exclusion_odd_open, Rule};
use crate::chain::Geometry;
use crate::error::{check_site, Error, Result};

/// Largest ring for which the closed-chain rules are backed by exhaustive
/// search in this crate; larger rings carry the numerical-evidence flag.
pub const CLOSED_VERIFIED_MAX: usize = 8;
pub const MAP_MAX_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Reachable,
    Excluded,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Evidence {
    /// A profile and retrieval time that realise the transfer.
    Constructive { couplings: Vec<f64>, time: f64 },
    /// Best fidelity found by a multi-start search.
    Search { best_fidelity: f64, restarts: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachabilityVerdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    /// The rule rests on numerical evidence rather than a proof.
    pub numerical_evidence: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
}

impl ReachabilityVerdict {
    fn reachable(rule: Rule) -> Self {
        ReachabilityVerdict {
            status: Status::Reachable,
            rule: Some(rule),
            numerical_evidence: false,
            evidence: None,
        }
    }

    fn excluded(rule: Rule) -> Self {
        ReachabilityVerdict {
            status: Status::Excluded,
            rule: Some(rule),
            numerical_evidence: false,
            evidence: None,
        }
    }

    fn flagged(mut self, numerical: bool) -> Self {
        self.numerical_evidence = numerical;
        self
    }

    pub fn undetermined() -> Self {
        ReachabilityVerdict {
            status: Status::Undetermined,
            rule: None,
            numerical_evidence: false,
            evidence: None,
        }
    }

    pub fn with_evidence(mut self, evidence: Evidence) -> Self {
        self.evidence = Some(evidence);
        self
    }

    pub fn is_excluded(&self) -> bool {
        self.status == Status::Excluded
    }

    pub fn is_reachable(&self) -> bool {
        self.status == Status::Reachable
    }

    /// Short label used in tables: `R`, `X` or `?`.
    pub fn symbol(&self) -> char {
        match self.status {
            Status::Reachable => 'R',
            Status::Excluded => 'X',
            Status::Undetermined => '?',
        }
    }
}

/// Applies the rule catalogue in order; the first rule that fires decides.
pub fn classify(n_sites: usize, geometry: Geometry, source: usize, target: usize) -> Result<ReachabilityVerdict> {
    if n_sites < geometry.min_sites() {
        return Err(Error::TooFewSites {
            geometry,
            n_sites,
            min: geometry.min_sites(),
        });
    }
    check_site(source, n_sites)?;
    check_site(target, n_sites)?;

    if source == target {
        return Ok(ReachabilityVerdict::reachable(Rule::Revival));
    }
    let n = n_sites;
    match geometry {
        Geometry::Open => {
            if source + target == n + 1 {
                return Ok(ReachabilityVerdict::reachable(Rule::MirrorPair));
            }
            if let Some(rule) = counting_exclusion(n, geometry, source, target)? {
                return Ok(ReachabilityVerdict::excluded(rule));
            }
            if n % 2 == 1 {
                if let Some(rule) = parity_exclusion_odd_open(n, source, target)? {
                    return Ok(ReachabilityVerdict::excluded(rule));
                }
            }
            let pair = (source.min(target), source.max(target));
            if n.is_multiple_of(2) && (pair == (1, n - 1) || pair == (2, n)) {
                return Ok(ReachabilityVerdict::reachable(Rule::FirstToPenultimate).flagged(true));
            }
            if let Some(cert) = named_exclusion(n, geometry, source, target)? {
                return Ok(ReachabilityVerdict::excluded(cert.rule));
            }
            Ok(ReachabilityVerdict::undetermined())
        }
        Geometry::Closed => {
            let numerical = n > CLOSED_VERIFIED_MAX;
            Ok(if n == 3 {
                ReachabilityVerdict::reachable(Rule::ClosedThree)
            } else if n % 2 == 1 {
                ReachabilityVerdict::excluded(Rule::ClosedOdd).flagged(numerical)
            } else {
                ReachabilityVerdict::reachable(Rule::ClosedEven).flagged(numerical)
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictMap {
    pub n_sites: usize,
    pub geometry: Geometry,
    /// `verdicts[m - 1][n - 1]` classifies transfer `m -> n`.
    pub verdicts: Vec<Vec<ReachabilityVerdict>>,
}

impl VerdictMap {
    pub fn get(&self, source: usize, target: usize) -> &ReachabilityVerdict {
        &self.verdicts[source - 1][target - 1]
    }

    /// Aligned text table of `R` / `X` / `?` symbols, with a legend of the rules used.
    pub fn to_table(&self) -> String {
        let n = self.n_sites;
        let starred = self.verdicts.iter().flatten().any(|v| v.numerical_evidence);
        let width = n.to_string().len().max(1 + starred as usize) + 1;
        let mut out = format!("{} chain, N = {}\n", self.geometry, n);
        out.push_str(&" ".repeat(width));
        for c in 1..=n {
            out.push_str(&format!("{c:>width$}"));
        }
        out.push('\n');
        for r in 1..=n {
            out.push_str(&format!("{r:>width$}"));
            for c in 1..=n {
                let v = self.get(r, c);
                let mark = if v.numerical_evidence {
                    format!("{}*", v.symbol())
                } else {
                    v.symbol().to_string()
                };
                out.push_str(&format!("{mark:>width$}"));
            }
            out.push('\n');
        }
        let mut rules: Vec<Rule> = self.verdicts.iter().flatten().filter_map(|v| v.rule).collect();
        rules.sort_by_key(|r| Rule::ALL.iter().position(|x| x == r));
        rules.dedup();
        out.push_str("R reachable, X excluded, ? undetermined, * numerical evidence\n");
        out.push_str("rules: ");
        out.push_str(&rules.iter().map(|r| r.id()).collect::<Vec<_>>().join(", "));
        out.push('\n');
        out
    }
}

pub fn reachability_map(n_sites: usize, geometry: Geometry) -> Result<VerdictMap> {
    if n_sites > MAP_MAX_SITES {
        return Err(Error::InvalidArgument(format!(
            "reachability maps are limited to N <= {MAP_MAX_SITES}"
        )));
    }
    if n_sites < geometry.min_sites() {
        return Err(Error::TooFewSites {
            geometry,
            n_sites,
            min: geometry.min_sites(),
        });
    }
    let verdicts = (1..=n_sites)
        .into_par_iter()
        .map(|m| {
            (1..=n_sites)
                .map(|k| classify(n_sites, geometry, m, k))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerdictMap {
        n_sites,
        geometry,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let v = classify(6, Geometry::Open, 1, 4).unwrap();
        assert_eq!((v.status, v.rule), (Status::Excluded, Some(Rule::VietaParity6x1x4)));
        let v = classify(7, Geometry::Open, 1, 5).unwrap();
        assert_eq!((v.status, v.rule), (Status::Excluded, Some(Rule::VietaParity7x1x5)));
        assert!(classify(6, Geometry::Closed, 1, 3).unwrap().is_reachable());
        let v = classify(5, Geometry::Closed, 1, 2).unwrap();
        assert_eq!((v.status, v.rule), (Status::Excluded, Some(Rule::ClosedOdd)));
        assert!(classify(3, Geometry::Closed, 1, 3).unwrap().is_reachable());
        assert_eq!(classify(7, Geometry::Open, 2, 5).unwrap().rule, Some(Rule::OddParity));
        assert_eq!(classify(6, Geometry::Open, 4, 6).unwrap().rule, Some(Rule::Counting));
    }

    #[test]
    fn rule_order() {
        // mirror pairs win over every exclusion rule
        assert_eq!(classify(7, Geometry::Open, 3, 5).unwrap().rule, Some(Rule::MirrorPair));
        assert_eq!(classify(7, Geometry::Open, 4, 4).unwrap().rule, Some(Rule::Revival));
        let v = classify(8, Geometry::Open, 2, 8).unwrap();
        assert_eq!(v.rule, Some(Rule::FirstToPenultimate));
        assert!(v.numerical_evidence);
        assert_eq!(classify(6, Geometry::Open, 2, 4).unwrap().status, Status::Undetermined);
        assert!(classify(10, Geometry::Closed, 1, 4).unwrap().numerical_evidence);
        assert!(!classify(8, Geometry::Closed, 1, 4).unwrap().numerical_evidence);
    }

    #[test]
    fn rejects_invalid() {
        assert!(classify(5, Geometry::Open, 0, 2).is_err());
        assert!(classify(5, Geometry::Open, 1, 6).is_err());
        assert!(classify(2, Geometry::Closed, 1, 2).is_err());
        assert!(reachability_map(65, Geometry::Open).is_err());
    }

    #[test]
    fn maps() {
        let m = reachability_map(4, Geometry::Closed).unwrap();
        assert!(m.verdicts.iter().flatten().all(|v| v.is_reachable()));
        let m = reachability_map(5, Geometry::Closed).unwrap();
        for r in 1..=5 {
            for c in 1..=5 {
                assert_eq!(m.get(r, c).is_excluded(), r != c);
            }
        }
        let m = reachability_map(4, Geometry::Open).unwrap();
        for (a, b) in [(1, 4), (2, 3), (1, 3), (2, 4)] {
            assert!(m.get(a, b).is_reachable(), "{a}->{b}");
        }
        for (a, b) in [(1, 2), (3, 4)] {
            assert!(m.get(a, b).is_excluded(), "{a}->{b}");
        }
        let table = m.to_table();
        assert!(table.contains("counting"));
        assert_eq!(table.lines().count(), 8);
        let table = reachability_map(6, Geometry::Open).unwrap().to_table();
        let rows: Vec<&str> = table.lines().skip(1).take(7).collect();
        assert!(rows.iter().all(|r| r.len() == rows[0].len()));
        assert!(rows[1].contains(" R*  R"));
    }

    #[test]
    fn symmetric_and_mirror_invariant() {
        for geometry in [Geometry::Open, Geometry::Closed] {
            for n in geometry.min_sites()..=12 {
                let m = reachability_map(n, geometry).unwrap();
                for a in 1..=n {
                    for b in 1..=n {
                        assert_eq!(m.get(a, b), m.get(b, a));
                        if geometry == Geometry::Open {
                            assert_eq!(m.get(a, b), m.get(n + 1 - a, n + 1 - b));
                        }
                    }
                }
            }
        }
    }
}
