//! Hypergraph quantities against brute force over vertex subsets.

use num_rational::Rational64;
use proptest::prelude::*;
use satphase::hypergraph::{
    c_star, c_star_lower_bound, c_star_witness, deficiency, is_xy_sparse, max_deficiency,
    private_variable_ordering, verify_private_ordering, Hypergraph, Sparsity,
};
use satphase::instance::{gen_ksat, Instance};

/// `(edges inside S, |S|)` for every nonempty vertex set `S`.
fn vertex_sets(h: &Hypergraph) -> Vec<(usize, usize, u32)> {
    (1u32..1 << h.n)
        .map(|s| {
            let e = h.edges.iter().filter(|ed| ed.iter().all(|&v| s >> v & 1 == 1)).count();
            (e, s.count_ones() as usize, s)
        })
        .collect()
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 3usize..=10, 1usize..=12, any::<u64>()).prop_filter_map("n < k", |(k, n, m, seed)| {
        (n >= k).then(|| gen_ksat(k, n, m, seed).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn c_star_is_the_densest_vertex_set(inst in arb_instance()) {
        let h = Hypergraph::from_instance(&inst);
        let oracle = vertex_sets(&h)
            .into_iter()
            .filter(|&(e, _, _)| e > 0)
            .map(|(e, s, _)| Rational64::new(e as i64, s as i64))
            .max()
            .unwrap();
        prop_assert_eq!(c_star(&inst).unwrap(), oracle);
        let (r, arg) = c_star_witness(&inst).unwrap();
        let sub = inst.subset(&arg);
        prop_assert_eq!(Rational64::new(sub.len() as i64, sub.used_vars().len() as i64), r);
        prop_assert!(c_star_lower_bound(&inst).unwrap().ratio <= oracle);
    }

    #[test]
    fn max_deficiency_matches_oracle(inst in arb_instance(), p in 1i64..=3, q in 1i64..=3) {
        let r = Rational64::new(p, q);
        let h = Hypergraph::from_instance(&inst);
        let oracle = vertex_sets(&h)
            .into_iter()
            .filter(|&(e, _, _)| e > 0)
            .map(|(e, s, _)| r * e as i64 - Rational64::from(s as i64))
            .max()
            .unwrap();
        let got = max_deficiency(&inst, r).unwrap();
        prop_assert_eq!(got, oracle);
        prop_assert!(got >= deficiency(&inst, r));
    }

    #[test]
    fn sparsity_matches_oracle(inst in arb_instance(), x in 0.1f64..1.0, y in 0.2f64..1.5) {
        let h = Hypergraph::from_instance(&inst);
        let cap = (x * h.n as f64 + 1e-9).floor() as usize;
        let violation = vertex_sets(&h)
            .into_iter()
            .any(|(e, s, _)| s <= cap && e as f64 > y * s as f64 + 1e-9);
        match is_xy_sparse(&h, x, y) {
            Sparsity::Sparse => prop_assert!(!violation),
            Sparsity::NotSparse(set) => {
                prop_assert!(violation);
                prop_assert!(set.len() <= cap);
                let mut member = vec![false; h.n];
                for &v in &set {
                    member[v] = true;
                }
                prop_assert!(h.edges_inside(&member) as f64 > y * set.len() as f64);
            }
            Sparsity::Unknown => prop_assert!(false, "exact mode for small n"),
        }
    }

    #[test]
    fn private_orderings_verify(inst in arb_instance()) {
        match private_variable_ordering(&inst) {
            Ok(order) => prop_assert!(verify_private_ordering(&inst, &order)),
            Err(stuck) => prop_assert!(!stuck.is_empty()),
        }
    }
}

#[test]
fn empty_instance_is_an_error() {
    let inst = gen_ksat(3, 5, 0, 1).unwrap();
    assert!(c_star(&inst).is_err());
}

#[test]
fn oversized_instances_are_refused() {
    let inst = gen_ksat(3, 40, 21, 1).unwrap();
    assert!(c_star(&inst).is_err());
    assert!(c_star_lower_bound(&inst).is_ok());
}
