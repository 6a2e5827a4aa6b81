//! Literals, clauses and CNF formulas over 0-based variable indices.
//!
//! Text formats use 1-based indices (DIMACS convention); everything in memory
//! is 0-based.

use std::fmt;

use crate::error::{Error, Result};

/// A literal, encoded as `2 * var + negated`.
///
/// The derived ordering sorts by variable first and puts the positive literal
/// before the negative one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        Lit((var as u32) << 1 | (!positive) as u32)
    }

    pub fn pos(var: usize) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: usize) -> Self {
        Self::new(var, false)
    }

    #[inline]
    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Signed 1-based DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 {
            return None;
        }
        Some(Lit::new(x.unsigned_abs() as usize - 1, x > 0))
    }

    /// True under `assignment` (indexed by variable).
    #[inline]
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var()] == self.is_positive()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var() + 1)
        } else {
            write!(f, "¬x{}", self.var() + 1)
        }
    }
}

/// A disjunction of literals over pairwise distinct variables. The empty
/// clause is allowed and stands for falsity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Result<Self> {
        let mut vars: Vec<usize> = lits.iter().map(|l| l.var()).collect();
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTemplate(format!(
                "clause {:?} mentions a variable twice",
                lits
            )));
        }
        Ok(Clause { lits })
    }

    /// Builds a clause the caller knows has distinct variables.
    pub(crate) fn from_lits_unchecked(lits: Vec<Lit>) -> Self {
        debug_assert!(Clause::new(lits.clone()).is_ok());
        Clause { lits }
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(assignment))
    }

    /// Every literal of `self` also occurs in `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        self.lits.iter().all(|l| other.lits.contains(l))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.lits.iter().map(|l| l.var()).max()
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lits)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cnf {
    pub n: usize,
    pub clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        for c in &clauses {
            if let Some(v) = c.max_var() {
                if v >= n {
                    return Err(Error::InvalidTemplate(format!(
                        "clause {} mentions x{} but n = {}",
                        c,
                        v + 1,
                        n
                    )));
                }
            }
        }
        Ok(Cnf { n, clauses })
    }

    /// Convenience constructor from signed 1-based literals, as in DIMACS.
    pub fn from_dimacs_clauses(n: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| Clause::new(c.iter().filter_map(|&x| Lit::from_dimacs(x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        Cnf::new(n, clauses)
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS CNF text. Comment lines start with `c`; clauses may span
    /// lines and are terminated by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: "expected `p cnf <vars> <clauses>`".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        reason: format!("bad count `{}`", s),
                    })
                };
                header = Some((parse(parts[2])?, parse(parts[3])?));
                continue;
            }
            let (n, _) = header.ok_or(Error::Parse {
                line: line_no,
                reason: "clause before header".into(),
            })?;
            for tok in line.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("bad literal `{}`", tok),
                })?;
                match Lit::from_dimacs(x) {
                    None => {
                        let clause = Clause::new(std::mem::take(&mut current)).map_err(|e| {
                            Error::Parse {
                                line: line_no,
                                reason: e.to_string(),
                            }
                        })?;
                        clauses.push(clause);
                    }
                    Some(l) if l.var() >= n => {
                        return Err(Error::Parse {
                            line: line_no,
                            reason: format!("literal {} out of range", x),
                        })
                    }
                    Some(l) => current.push(l),
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            reason: "missing header".into(),
        })?;
        if !current.is_empty() {
            return Err(Error::Parse {
                line: text.lines().count(),
                reason: "unterminated clause".into(),
            });
        }
        if clauses.len() != m {
            return Err(Error::Parse {
                line: 0,
                reason: format!("header declares {} clauses, found {}", m, clauses.len()),
            });
        }
        Cnf::new(n, clauses)
    }
}
