mod common;

use common::*;
use hornlab::structure::{direct_product, projection, support, tuples_with_support};
use hornlab::{Homomorphism, KStructure};
use proptest::prelude::*;

fn closed_under_set_laws(s: &KStructure) -> bool {
    s.relation().iter().all(|t| {
        tuples_with_support(&support(t), s.arity())
            .iter()
            .all(|u| s.contains(u))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent_monotone_and_lawful(seed in any::<u64>(), k in 2usize..4, n in 1usize..5) {
        let mut r = rng(seed);
        let a = random_structure(&mut r, k, n, 0.15);
        let extra = random_structure(&mut r, k, n, 0.15);
        let b = KStructure::with_size(
            k,
            n,
            a.relation().iter().chain(extra.relation()).cloned().collect::<Vec<_>>(),
        )
        .unwrap();
        let ca = a.set_closure();
        prop_assert_eq!(&ca.set_closure(), &ca);
        prop_assert!(ca.relation().is_subset(b.set_closure().relation()));
        prop_assert!(a.relation().is_subset(ca.relation()));
        prop_assert!(closed_under_set_laws(&ca));
        prop_assert_eq!(ca.is_set_closed(), true);
        if a.is_loop_free() {
            prop_assert!(ca.is_loop_free());
        }
        if a.is_uniform() && k >= 2 {
            prop_assert!(a.is_loop_free());
        }
    }

    #[test]
    fn hypergraph_encoding_is_lawful_and_round_trips(seed in any::<u64>(), k in 2usize..5, n in 2usize..7, m in 0usize..6) {
        let mut r = rng(seed);
        let h = random_hypergraph(&mut r, n, m, k);
        let s = h.to_kstructure(k).unwrap();
        prop_assert!(closed_under_set_laws(&s));
        prop_assert_eq!(s.to_hypergraph().unwrap(), h);
    }

    #[test]
    fn projections_are_homomorphisms(seed in any::<u64>(), k in 2usize..4) {
        let mut r = rng(seed);
        let parts: Vec<KStructure> = (0..2).map(|_| random_structure(&mut r, k, 3, 0.3)).collect();
        let product = direct_product(&parts).unwrap();
        for i in 0..parts.len() {
            let p = projection(&parts, i);
            prop_assert!(p.is_valid(&product, &parts[i]));
        }
    }

    #[test]
    fn induced_on_everything_is_identity(seed in any::<u64>(), n in 1usize..6) {
        let s = random_structure(&mut rng(seed), 2, n, 0.3);
        let all: Vec<usize> = (0..n).collect();
        prop_assert_eq!(s.induced_substructure(&all).unwrap(), s.clone());
        prop_assert!(Homomorphism::identity(&s).is_valid(&s, &s));
    }

    #[test]
    fn homomorphisms_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_structure(&mut r, 2, 3, 0.3);
        let b = random_structure(&mut r, 2, 3, 0.5);
        let c = random_structure(&mut r, 2, 3, 0.6);
        if let (Some(f), Some(g)) = (brute_homs(&a, &b).pop(), brute_homs(&b, &c).pop()) {
            let f = Homomorphism::new(&a, &b, f).unwrap();
            let g = Homomorphism::new(&b, &c, g).unwrap();
            prop_assert!(f.compose(&g).is_valid(&a, &c));
        }
    }
}
