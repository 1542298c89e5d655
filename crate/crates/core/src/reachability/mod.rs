//! The two reachability criteria, energy polynomials, analytic exclusion
//! rules and the pairwise classification built from them.

mod commensurability;
mod criteria;
mod energy;
mod exclusion;
mod verdict;

pub use commensurability::{
    check_commensurability, convergents, CommensurabilityReport, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL_RATIO,
};
pub use criteria::{
    check_criterion1, check_pst, Criterion1Report, PstTolerances, PstWitness, DEFAULT_CRITERION1_TOL,
    DEFAULT_FIDELITY_TOL,
};
pub use energy::{
    energy_polynomial_between, energy_polynomial_open, structural_degree, EnergyPolynomial, RelativeSign,
};
pub use exclusion::{
    counting_exclusion, exclusion_catalog, named_exclusion, parity_exclusion_odd_open, ExclusionCertificate, Rule,
};
pub use verdict::{
    classify, reachability_map, Evidence, ReachabilityVerdict, Status, VerdictMap, CLOSED_VERIFIED_MAX, MAP_MAX_SITES,
};
