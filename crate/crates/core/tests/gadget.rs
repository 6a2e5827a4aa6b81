//! The four-constraint 1-in-k gadget that is minimally unsatisfiable.
//!
//! Each constraint is `1-in-k(a, fresh…, b)` with `k − 2` private variables.
//! Such a constraint forbids exactly the pair `a = b = 1`, so four of them
//! over the literals of `x, y` can exclude all four assignments of `(x, y)`.

use num_rational::Rational64;
use satphase::cnf::{Clause, Lit};
use satphase::constraint::{implicates_up_to, ConstraintTemplate};
use satphase::hypergraph::c_star;
use satphase::instance::{AppliedConstraint, Instance};
use satphase::solver::instance_satisfiable;
use satphase::spine::is_minimally_unsat;

const X: usize = 0;
const Y: usize = 1;

/// `pairs[i] = (x positive, y positive)` for constraint `i`; `x` sits in the
/// first slot and `y` in the last.
fn gadget(k: usize, pairs: &[(bool, bool)]) -> Instance {
    let mut templates = Vec::new();
    let mut constraints = Vec::new();
    let mut next = 2;
    for &(xp, yp) in pairs {
        let mask = (!xp as usize) | (!yp as usize) << (k - 1);
        templates.push(ConstraintTemplate::one_in_k(k).unwrap().with_negations(mask));
        let mut vars = vec![X];
        vars.extend(next..next + k - 2);
        next += k - 2;
        vars.push(Y);
        constraints.push(AppliedConstraint {
            template: templates.len() - 1,
            vars,
        });
    }
    Instance::new(next, templates, constraints).unwrap()
}

/// Excludes `(1,1)`, `(1,0)`, `(0,0)` and `(0,1)` in turn.
fn reconstructed(k: usize) -> Instance {
    gadget(k, &[(true, true), (true, false), (false, false), (false, true)])
}

fn brute_sat(inst: &Instance) -> bool {
    (0u64..1 << inst.n).any(|a| {
        let tau: Vec<bool> = (0..inst.n).map(|v| a >> v & 1 == 1).collect();
        inst.eval(&tau)
    })
}

#[test]
fn reconstructed_gadget_is_minimally_unsat() {
    for k in 3..=5 {
        let g = reconstructed(k);
        assert_eq!(g.n, 4 * k - 6);
        assert!(!brute_sat(&g) && !instance_satisfiable(&g), "k = {}", k);
        assert!(is_minimally_unsat(&g), "k = {}", k);
        for drop in 0..4 {
            let keep: Vec<usize> = (0..4).filter(|&i| i != drop).collect();
            assert!(brute_sat(&g.subset(&keep)), "k = {}, without {}", k, drop);
        }
    }
}

#[test]
fn each_constraint_forbids_one_pair() {
    for k in 3..=5 {
        let g = reconstructed(k);
        for (i, c) in g.constraints.iter().enumerate() {
            let t = &g.templates[c.template];
            let (xp, yp) = [(true, true), (true, false), (false, false), (false, true)][i];
            let expect = Clause::new(vec![Lit::new(0, !xp), Lit::new(k - 1, !yp)]).unwrap();
            let imps = implicates_up_to(t, 2, true);
            assert!(imps.contains(&expect), "k = {}, constraint {}: {:?}", k, i, imps);
        }
    }
}

#[test]
fn reconstructed_gadget_ratio() {
    for k in 3..=6 {
        let g = reconstructed(k);
        let whole = Rational64::new(4, g.n as i64);
        assert_eq!(whole, Rational64::new(2, 2 * k as i64 - 3));
        if k <= 5 {
            assert_eq!(c_star(&g).unwrap(), whole);
        }
        assert!(whole > Rational64::new(1, k as i64 - 1));
    }
}

#[test]
fn sign_pattern_repeating_the_first_pair_is_satisfiable() {
    // The first and fourth constraints both forbid (1,1); x = 0, y = 1 survives.
    for k in 3..=5 {
        let g = gadget(k, &[(true, true), (true, false), (false, false), (true, true)]);
        assert!(brute_sat(&g), "k = {}", k);
        let witness = (0u64..1 << g.n)
            .map(|a| (0..g.n).map(|v| a >> v & 1 == 1).collect::<Vec<_>>())
            .find(|t| g.eval(t))
            .unwrap();
        assert!(!witness[X] && witness[Y]);
    }
}
