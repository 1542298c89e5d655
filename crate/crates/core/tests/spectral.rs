use proptest::prelude::*;
use pst_forge::spectral::max_residual;
use pst_forge::{amplitude, decompose, evolve_oracle, CouplingProfile};

fn any_profile(max_sites: usize) -> impl Strategy<Value = CouplingProfile> {
    prop_oneof![
        (1..max_sites)
            .prop_flat_map(|n| prop::collection::vec(0.05f64..5.0, n))
            .prop_map(|j| CouplingProfile::open(j).unwrap()),
        (3..=max_sites)
            .prop_flat_map(|n| prop::collection::vec(0.05f64..5.0, n))
            .prop_map(|j| CouplingProfile::closed(j).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn orthonormal_and_reconstructs(p in any_profile(16)) {
        let h = p.hamiltonian();
        let s = decompose(&h).unwrap();
        let n = p.n_sites();
        for a in 0..n {
            for b in 0..n {
                let d: f64 = s.eigenvector(a).iter().zip(s.eigenvector(b)).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((d - want).abs() < 1e-12);
            }
        }
        prop_assert!(max_residual(&h, &s) <= 1e-10 * h.max_abs().max(1.0));
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn scale_covariance(p in any_profile(12), c in 0.1f64..10.0) {
        let a = decompose(&p.hamiltonian()).unwrap();
        let b = decompose(&p.scaled(c).unwrap().hamiltonian()).unwrap();
        let radius = a.spectral_radius().max(1.0);
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x * c - y).abs() <= 1e-9 * radius * c);
        }
        if !a.is_degenerate() {
            for i in 0..p.n_sites() {
                for (x, y) in a.eigenvector(i).iter().zip(b.eigenvector(i)) {
                    prop_assert!((x - y).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn open_spectrum_is_simple(j in (1usize..16).prop_flat_map(|n| prop::collection::vec(0.05f64..5.0, n))) {
        let s = decompose(&CouplingProfile::open(j).unwrap().hamiltonian()).unwrap();
        let gap = s.eigenvalues().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        prop_assert!(gap > 1e-12 * s.spectral_radius());
        prop_assert!(!s.is_degenerate());
    }

    #[test]
    fn spectral_sum_matches_oracle(p in any_profile(12), t in 0.0f64..20.0, site in 0usize..12) {
        let h = p.hamiltonian();
        let m = site % p.n_sites() + 1;
        let psi = evolve_oracle(&h, m, t).unwrap();
        let s = decompose(&h).unwrap();
        for k in 1..=p.n_sites() {
            prop_assert!((amplitude(&s, m, k, t) - psi[k - 1]).norm() <= 1e-10);
        }
    }
}
