//! Random instances of Molloy's model and its named specializations.

use crate::cnf::{Clause, Cnf, Lit};
use crate::constraint::{
    clause_templates, parity_template, ConstraintDistribution, ConstraintTemplate,
};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// A template applied to an ordered tuple of distinct variables (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AppliedConstraint {
    pub template: usize,
    pub vars: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Instance {
    pub n: usize,
    pub templates: Vec<ConstraintTemplate>,
    pub constraints: Vec<AppliedConstraint>,
    /// Ordered key/value metadata (generator, seed, density, ...).
    pub meta: Vec<(String, String)>,
}

impl Instance {
    pub fn new(
        n: usize,
        templates: Vec<ConstraintTemplate>,
        constraints: Vec<AppliedConstraint>,
    ) -> Result<Self> {
        let inst = Instance {
            n,
            templates,
            constraints,
            meta: Vec::new(),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for (idx, c) in self.constraints.iter().enumerate() {
            let t = self
                .templates
                .get(c.template)
                .ok_or(Error::UnknownTemplate(c.template))?;
            if t.arity() != c.vars.len() {
                return Err(Error::InvalidTemplate(format!(
                    "constraint {} has {} variables for a template of arity {}",
                    idx,
                    c.vars.len(),
                    t.arity()
                )));
            }
            let mut vs = c.vars.clone();
            vs.sort_unstable();
            if vs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidTemplate(format!(
                    "constraint {} repeats a variable",
                    idx
                )));
            }
            if let Some(&v) = vs.last() {
                if v >= self.n {
                    return Err(Error::InvalidTemplate(format!(
                        "constraint {} uses x{} but n = {}",
                        idx,
                        v + 1,
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Largest template arity (0 without templates).
    pub fn max_arity(&self) -> usize {
        self.templates.iter().map(|t| t.arity()).max().unwrap_or(0)
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    pub fn density(&self) -> f64 {
        self.constraints.len() as f64 / self.n as f64
    }

    pub fn constraint_satisfied(&self, c: &AppliedConstraint, assignment: &[bool]) -> bool {
        let code = c
            .vars
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &v)| acc | (assignment[v] as usize) << i);
        self.templates[c.template].satisfied_by_code(code)
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.constraints
            .iter()
            .all(|c| self.constraint_satisfied(c, assignment))
    }

    /// Same variables and templates, only the listed constraints (in the
    /// given order).
    pub fn subset(&self, indices: &[usize]) -> Instance {
        Instance {
            n: self.n,
            templates: self.templates.clone(),
            constraints: indices.iter().map(|&i| self.constraints[i].clone()).collect(),
            meta: Vec::new(),
        }
    }

    /// Sorted distinct variables that occur in some constraint.
    pub fn used_vars(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for c in &self.constraints {
            for &v in &c.vars {
                seen[v] = true;
            }
        }
        (0..self.n).filter(|&v| seen[v]).collect()
    }

    pub fn to_cnf(&self) -> Cnf {
        self.to_cnf_with_origin().0
    }

    /// Maxterm expansion: one clause per falsifying assignment of each
    /// constraint. The second vector maps each clause to its constraint.
    pub fn to_cnf_with_origin(&self) -> (Cnf, Vec<usize>) {
        let mut clauses = Vec::new();
        let mut origin = Vec::new();
        for (idx, c) in self.constraints.iter().enumerate() {
            for cl in constraint_clauses(&self.templates[c.template], &c.vars) {
                clauses.push(cl);
                origin.push(idx);
            }
        }
        (Cnf { n: self.n, clauses }, origin)
    }
}

/// CNF of one template application.
pub fn constraint_clauses(t: &ConstraintTemplate, vars: &[usize]) -> Vec<Clause> {
    t.falsifying()
        .map(|a| {
            Clause::from_lits_unchecked(
                vars.iter()
                    .enumerate()
                    .map(|(i, &v)| Lit::new(v, a >> i & 1 == 0))
                    .collect(),
            )
        })
        .collect()
}

fn check_n(n: usize, k: usize) -> Result<()> {
    if n < k {
        return Err(Error::TooFewVariables { n, k });
    }
    Ok(())
}

fn finish(mut inst: Instance, generator: String, seed: u64) -> Instance {
    let density = inst.density();
    inst.set_meta("generator", generator);
    inst.set_meta("seed", seed.to_string());
    inst.set_meta("density", format!("{}", density));
    inst
}

/// `m` constraints, each a `𝒫`-random template applied to a uniformly random
/// ordered tuple of distinct variables. Constraint `i` is drawn from stream
/// `(seed, i)`.
pub fn gen_molloy(d: &ConstraintDistribution, n: usize, m: usize, seed: u64) -> Result<Instance> {
    let k = d.arity();
    check_n(n, k)?;
    let (weights, total) = d.integer_weights()?;
    let constraints = (0..m)
        .map(|i| {
            let mut s = Stream::new(seed, i as u64);
            let vars = s.distinct_tuple(n, k);
            let template = s.weighted(&weights, total);
            AppliedConstraint { template, vars }
        })
        .collect();
    let inst = Instance {
        n,
        templates: d.templates().to_vec(),
        constraints,
        meta: Vec::new(),
    };
    Ok(finish(inst, "molloy".into(), seed))
}

pub fn gen_ksat(k: usize, n: usize, m: usize, seed: u64) -> Result<Instance> {
    let d = ConstraintDistribution::uniform(clause_templates(k)?)?;
    let mut inst = gen_molloy(&d, n, m, seed)?;
    inst.set_meta("generator", format!("ksat k={}", k));
    Ok(inst)
}

/// Clause counts of a (2+p)-SAT instance: `(three, two)`.
pub fn two_plus_p_counts(p: f64, c: f64, n: usize) -> (usize, usize) {
    let total = (c * n as f64 + 0.5).floor() as usize;
    let three = ((p * c * n as f64 + 0.5).floor() as usize).min(total);
    (three, total - three)
}

/// Random 3-clauses followed by random 2-clauses. Template ids 0..8 are the
/// 3-clause sign patterns and 8..12 the 2-clause ones.
pub fn gen_2p_sat(p: f64, c: f64, n: usize, seed: u64) -> Result<Instance> {
    check_n(n, 3)?;
    if !(0.0..=1.0).contains(&p) || !(c >= 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "(2+p)-SAT needs p in [0,1] and c >= 0, got p = {}, c = {}",
            p, c
        )));
    }
    let (m3, m2) = two_plus_p_counts(p, c, n);
    let mut templates = clause_templates(3)?;
    templates.extend(clause_templates(2)?);
    let constraints = (0..m3 + m2)
        .map(|i| {
            let mut s = Stream::new(seed, i as u64);
            if i < m3 {
                let vars = s.distinct_tuple(n, 3);
                AppliedConstraint {
                    template: s.below(8) as usize,
                    vars,
                }
            } else {
                let vars = s.distinct_tuple(n, 2);
                AppliedConstraint {
                    template: 8 + s.below(4) as usize,
                    vars,
                }
            }
        })
        .collect();
    let inst = Instance {
        n,
        templates,
        constraints,
        meta: Vec::new(),
    };
    Ok(finish(inst, format!("2p p={}", p), seed))
}

/// Random `k`-XOR equations; template 0 is even parity, 1 is odd.
pub fn gen_kxorsat(k: usize, n: usize, m: usize, seed: u64) -> Result<Instance> {
    check_n(n, k)?;
    if k == 0 || k > crate::constraint::MAX_ARITY {
        return Err(Error::InvalidTemplate(format!("xor arity {}", k)));
    }
    let templates = vec![parity_template(k, false), parity_template(k, true)];
    let constraints = (0..m)
        .map(|i| {
            let mut s = Stream::new(seed, i as u64);
            let vars = s.distinct_tuple(n, k);
            AppliedConstraint {
                template: s.coin() as usize,
                vars,
            }
        })
        .collect();
    let inst = Instance {
        n,
        templates,
        constraints,
        meta: Vec::new(),
    };
    Ok(finish(inst, format!("kxor k={}", k), seed))
}
