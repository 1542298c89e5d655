use proptest::prelude::*;
use pst_forge::design::solve_mirror;
use pst_forge::reachability::check_commensurability;
use pst_forge::{decompose, fidelity, trajectory, CouplingProfile, TransferSpec};

fn any_profile() -> impl Strategy<Value = CouplingProfile> {
    prop_oneof![
        (1usize..12)
            .prop_flat_map(|n| prop::collection::vec(0.05f64..5.0, n))
            .prop_map(|j| CouplingProfile::open(j).unwrap()),
        (3usize..=12)
            .prop_flat_map(|n| prop::collection::vec(0.05f64..5.0, n))
            .prop_map(|j| CouplingProfile::closed(j).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn unitarity(p in any_profile(), t in 0.0f64..50.0, site in 0usize..12) {
        let s = decompose(&p.hamiltonian()).unwrap();
        let m = site % p.n_sites() + 1;
        let total: f64 = (1..=p.n_sites()).map(|k| fidelity(&s, &TransferSpec::new(m, k), t)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn trajectories_conserve_probability(p in any_profile(), t_max in 0.1f64..30.0) {
        let tr = trajectory(&p.hamiltonian(), 1, t_max, 41).unwrap();
        for row in &tr.probabilities {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn reciprocity(p in any_profile(), t in 0.0f64..50.0, a in 0usize..12, b in 0usize..12) {
        let s = decompose(&p.hamiltonian()).unwrap();
        let (m, n) = (a % p.n_sites() + 1, b % p.n_sites() + 1);
        prop_assert_eq!(
            fidelity(&s, &TransferSpec::new(m, n), t).to_bits(),
            fidelity(&s, &TransferSpec::new(n, m), t).to_bits()
        );
    }

    #[test]
    fn mirror_covariance(j in (1usize..12).prop_flat_map(|n| prop::collection::vec(0.05f64..5.0, n)),
                         t in 0.0f64..30.0, a in 0usize..12, b in 0usize..12) {
        let p = CouplingProfile::open(j).unwrap();
        let n = p.n_sites();
        let (m, k) = (a % n + 1, b % n + 1);
        let s = decompose(&p.hamiltonian()).unwrap();
        let r = decompose(&p.reversed().hamiltonian()).unwrap();
        let f = fidelity(&s, &TransferSpec::new(m, k), t);
        let g = fidelity(&r, &TransferSpec::new(n + 1 - m, n + 1 - k), t);
        prop_assert!((f - g).abs() <= 1e-10);
    }

    #[test]
    fn commensurate_spectra_revive(
        half in prop::collection::btree_set(1i64..12, 1..6),
        zero in any::<bool>(),
        g in 0.2f64..3.0,
    ) {
        let positive: Vec<f64> = half.iter().map(|&k| k as f64 * g).collect();
        let mut spectrum: Vec<f64> = positive.iter().rev().map(|e| -e).collect();
        if zero {
            spectrum.push(0.0);
        }
        spectrum.extend(&positive);
        let p = solve_mirror(spectrum.len(), &spectrum).unwrap();
        let s = decompose(&p.hamiltonian()).unwrap();
        let report = check_commensurability(s.eigenvalues(), 64, 1e-9);
        prop_assert!(report.commensurate);
        for m in 1..=p.n_sites() {
            prop_assert!(fidelity(&s, &TransferSpec::new(m, m), report.period) >= 1.0 - 1e-8);
        }
    }
}
