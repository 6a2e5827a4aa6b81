use crate::cnf::Cnf;
use crate::error::{Error, Result};

use super::{Method, SolveResult, Status};

pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Tries all `2^n` assignments in lexicographic order of `x1 x2 … xn` and
/// returns the first model.
pub fn brute_force_solve(f: &Cnf) -> Result<SolveResult> {
    let n = f.n;
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::TooLarge {
            what: "brute force",
            size: n,
            cap: BRUTE_FORCE_MAX_VARS,
            hint: "",
        });
    }
    // x_i lives in bit n-1-i so counting order is lexicographic order
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(p, q), l| {
                let bit = 1u32 << (n - 1 - l.var());
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let found = (0u32..1 << n).find(|&a| masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0));
    Ok(match found {
        Some(a) => SolveResult {
            status: Status::Sat,
            witness: Some((0..n).map(|i| a >> (n - 1 - i) & 1 == 1).collect()),
            tree_size: 0,
            max_depth: 0,
            method: Method::Brute,
        },
        None => SolveResult {
            status: Status::Unsat,
            witness: None,
            tree_size: 0,
            max_depth: 0,
            method: Method::Brute,
        },
    })
}
