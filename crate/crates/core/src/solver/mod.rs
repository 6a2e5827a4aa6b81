//! Satisfiability checking: an instrumented DPLL, Gaussian elimination for
//! XOR systems, and an exhaustive oracle for small formulas.

mod brute;
mod dpll;
mod gauss;

use std::fmt;

pub use brute::{brute_force_solve, BRUTE_FORCE_MAX_VARS};
pub use dpll::{dpll_solve, Dpll, DpllRun, Heuristic};
pub use gauss::{gauss_solve_xor, gauss_solve_xor_counted, gauss_unsat_core, GaussRun};

use crate::cnf::Cnf;
use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    BudgetExceeded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::BudgetExceeded => "BUDGET_EXCEEDED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Dpll,
    Gauss,
    Brute,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dpll => "dpll",
            Method::Gauss => "gauss",
            Method::Brute => "brute",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dpll" => Ok(Method::Dpll),
            "gauss" => Ok(Method::Gauss),
            "brute" => Ok(Method::Brute),
            _ => Err(format!("unknown method `{}` (dpll|gauss|brute)", s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Present iff `status == Sat`.
    pub witness: Option<Vec<bool>>,
    /// Branching nodes explored by DPLL; 0 for the other methods.
    pub tree_size: u64,
    pub max_depth: u32,
    pub method: Method,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }

    pub fn is_unsat(&self) -> bool {
        self.status == Status::Unsat
    }

    pub fn witness_string(&self) -> String {
        match &self.witness {
            Some(w) => w.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            None => "-".into(),
        }
    }

    /// Single-line `key=value` record.
    pub fn record(&self) -> String {
        format!(
            "status={} method={} tree_size={} max_depth={} witness={}",
            self.status,
            self.method,
            self.tree_size,
            self.max_depth,
            self.witness_string()
        )
    }
}

/// Satisfiability of a CNF by DPLL with lookahead branching (fast, no
/// tree-size guarantees).
pub fn is_satisfiable(cnf: &Cnf) -> bool {
    Dpll::new(cnf)
        .heuristic(Heuristic::Lookahead)
        .run()
        .result
        .is_sat()
}

pub fn instance_satisfiable(inst: &Instance) -> bool {
    is_satisfiable(&inst.to_cnf())
}
