//! Order parameters: generalized spine, literal spine, backbone, and
//! minimally unsatisfiable cores.
//!
//! The exact spine reduces to a two-level question. Since satisfiable
//! subformulas are closed downward, `x` is in the spine iff some assignment
//! `τ` and some candidate `C ∋ x` make `Φ_τ ∧ C` unsatisfiable, where `Φ_τ`
//! is the set of constraints `τ` satisfies. Each candidate is decided by
//! counterexample-guided refinement over `τ`.

use std::collections::BTreeSet;

use crate::cnf::{Clause, Cnf, Lit};
use crate::constraint::{ConstraintDistribution, ConstraintTemplate, TruthTable};
use crate::error::{Error, Result};
use crate::instance::{constraint_clauses, Instance};
use crate::rng::Stream;
use crate::solver::{brute_force_solve, gauss_unsat_core, Dpll, Heuristic, BRUTE_FORCE_MAX_VARS};

/// Size cap for exact spine computation.
pub const EXACT_SPINE_MAX_VARS: usize = 60;
/// Cap on `(variable tuples) × (distinct candidate tables)`.
pub const EXACT_SPINE_MAX_CANDIDATES: usize = 5_000_000;
const SPINE_MSS_SAMPLES: usize = 16;
const SPINE_SAMPLE_SEED: u64 = 0x5350_494e_45;
const SPINE_INITIAL_BUDGET: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpineMethod {
    ExactDefinition,
    MusLowerBound,
}

impl std::fmt::Display for SpineMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpineMethod::ExactDefinition => "exact",
            SpineMethod::MusLowerBound => "mus",
        })
    }
}

impl std::str::FromStr for SpineMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(SpineMethod::ExactDefinition),
            "mus" => Ok(SpineMethod::MusLowerBound),
            _ => Err(format!("unknown spine mode `{}` (exact|mus)", s)),
        }
    }
}

/// `xi` is satisfiable, `xi ∧ offending` is not, and `var` occurs in
/// `offending`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpineCertificate {
    pub var: usize,
    pub xi: Vec<usize>,
    pub template: ConstraintTemplate,
    pub vars: Vec<usize>,
}

impl SpineCertificate {
    /// Re-checks the certificate with an independent solver configuration.
    pub fn verify(&self, inst: &Instance) -> bool {
        if !self.vars.contains(&self.var) || self.template.arity() != self.vars.len() {
            return false;
        }
        let mut cnf = inst.subset(&self.xi).to_cnf();
        if !check_sat(&cnf) {
            return false;
        }
        cnf.clauses.extend(constraint_clauses(&self.template, &self.vars));
        !check_sat(&cnf)
    }
}

fn check_sat(cnf: &Cnf) -> bool {
    if cnf.n <= 16 {
        brute_force_solve(cnf).map(|r| r.is_sat()).unwrap_or(false)
    } else {
        Dpll::new(cnf).heuristic(Heuristic::MaxOccurrence).run().result.is_sat()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpineReport {
    /// Sorted.
    pub variables: Vec<usize>,
    pub fraction: f64,
    pub method: SpineMethod,
    /// One per spine variable, in variable order.
    pub certificates: Vec<SpineCertificate>,
}

impl SpineReport {
    fn new(n: usize, method: SpineMethod, mut certificates: Vec<SpineCertificate>) -> Self {
        certificates.sort_by_key(|c| c.var);
        let variables: Vec<usize> = certificates.iter().map(|c| c.var).collect();
        let fraction = if n == 0 { 0.0 } else { variables.len() as f64 / n as f64 };
        SpineReport {
            variables,
            fraction,
            method,
            certificates,
        }
    }

    pub fn verify(&self, inst: &Instance) -> bool {
        self.certificates.iter().all(|c| c.verify(inst))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MusReport {
    /// Sorted constraint indices.
    pub core: Vec<usize>,
    /// Sorted variables occurring in the core.
    pub core_vars: Vec<usize>,
    /// `(|core|, |core_vars|)`.
    pub sizes: (usize, usize),
}

/// Satisfiability over subsets of a fixed list of clause groups.
struct Groups {
    n: usize,
    groups: Vec<Vec<Clause>>,
    /// `groups` with `¬s_D` appended, `s_D = n + D`.
    guarded: Vec<Clause>,
}

struct Witness {
    model: Vec<bool>,
    violated: Vec<usize>,
}

impl Groups {
    fn new(n: usize, groups: Vec<Vec<Clause>>) -> Self {
        let mut guarded = Vec::new();
        for (d, g) in groups.iter().enumerate() {
            for cl in g {
                let mut lits = cl.lits().to_vec();
                lits.push(Lit::neg(n + d));
                guarded.push(Clause::from_lits_unchecked(lits));
            }
        }
        Groups { n, groups, guarded }
    }

    fn satisfies(&self, d: usize, model: &[bool]) -> bool {
        self.groups[d].iter().all(|c| c.eval(model))
    }

    fn witness(&self, model: Vec<bool>) -> Witness {
        let violated = (0..self.groups.len())
            .filter(|&d| !self.satisfies(d, &model))
            .collect();
        Witness { model, violated }
    }

    fn solve(&self, members: &[usize], extra: &[Clause]) -> Option<Vec<bool>> {
        let mut clauses: Vec<Clause> = members
            .iter()
            .flat_map(|&d| self.groups[d].iter().cloned())
            .collect();
        clauses.extend(extra.iter().cloned());
        let cnf = Cnf { n: self.n, clauses };
        Dpll::new(&cnf)
            .heuristic(Heuristic::Lookahead)
            .run()
            .result
            .witness
    }

    /// Extends `model` until the set of groups it satisfies is maximal among
    /// models of `extra` (a maximal satisfiable subset relative to `extra`).
    fn grow(&self, mut model: Vec<bool>, extra: &[Clause]) -> Witness {
        let mut sat: Vec<bool> = (0..self.groups.len()).map(|d| self.satisfies(d, &model)).collect();
        for d in 0..self.groups.len() {
            if sat[d] {
                continue;
            }
            let mut members: Vec<usize> = (0..self.groups.len()).filter(|&i| sat[i]).collect();
            members.push(d);
            if let Some(m) = self.solve(&members, extra) {
                model = m;
                sat = (0..self.groups.len()).map(|d| self.satisfies(d, &model)).collect();
            }
        }
        let violated = (0..self.groups.len()).filter(|&d| !sat[d]).collect();
        Witness { model, violated }
    }

    /// Decides whether some `Ξ = Φ_τ` makes `Ξ ∧ cand` unsatisfiable,
    /// within `budget` refinement steps. `neg` is a CNF of `¬cand`; `τ` must
    /// satisfy it because `τ` models `Φ_τ`, which entails `¬cand`. `pool`
    /// carries counterexamples across calls: a model `σ` of `cand` rules out
    /// every `τ` that satisfies only groups `σ` satisfies.
    fn refute(
        &self,
        cand: &[Clause],
        neg: &[Clause],
        pool: &mut Vec<Witness>,
        budget: Option<usize>,
    ) -> Refutation {
        let blocking = |w: &Witness| {
            Clause::from_lits_unchecked(w.violated.iter().map(|&d| Lit::pos(self.n + d)).collect())
        };
        let mut abs = Cnf {
            n: self.n + self.groups.len(),
            clauses: self.guarded.clone(),
        };
        abs.clauses.extend(neg.iter().cloned());
        for w in pool.iter() {
            if cand.iter().all(|c| c.eval(&w.model)) {
                if w.violated.is_empty() {
                    return Refutation::Fails;
                }
                abs.clauses.push(blocking(w));
            }
        }
        let mut steps = 0;
        loop {
            if budget.is_some_and(|b| steps >= b) {
                return Refutation::Unknown;
            }
            steps += 1;
            let Some(tau) = Dpll::new(&abs).heuristic(Heuristic::Lookahead).run().result.witness
            else {
                return Refutation::Fails;
            };
            let grown = self.grow(tau[..self.n].to_vec(), neg);
            let xi: Vec<usize> = (0..self.groups.len())
                .filter(|&d| self.satisfies(d, &grown.model))
                .collect();
            match self.solve(&xi, cand) {
                None => return Refutation::Refuted(xi),
                Some(sigma) => {
                    let w = self.grow(sigma, cand);
                    if w.violated.is_empty() {
                        pool.push(w);
                        return Refutation::Fails;
                    }
                    abs.clauses.push(blocking(&w));
                    pool.push(w);
                }
            }
        }
    }

    /// A maximal satisfiable subset grown from a pseudo-random assignment in
    /// a pseudo-random group order.
    fn sample_mss(&self, stream: &mut Stream) -> Vec<usize> {
        let m = self.groups.len();
        let mut order: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            order.swap(i, stream.below(i as u64 + 1) as usize);
        }
        let tau: Vec<bool> = (0..self.n).map(|_| stream.coin()).collect();
        let mut inside: Vec<bool> = (0..m).map(|d| self.satisfies(d, &tau)).collect();
        for &d in &order {
            if inside[d] {
                continue;
            }
            let mut members: Vec<usize> = (0..m).filter(|&i| inside[i]).collect();
            members.push(d);
            if let Some(model) = self.solve(&members, &[]) {
                for (i, slot) in inside.iter_mut().enumerate() {
                    *slot = *slot || self.satisfies(i, &model);
                }
            }
        }
        (0..m).filter(|&i| inside[i]).collect()
    }
}

enum Refutation {
    Refuted(Vec<usize>),
    Fails,
    Unknown,
}

fn instance_groups(inst: &Instance) -> Groups {
    Groups::new(
        inst.n,
        inst.constraints
            .iter()
            .map(|c| constraint_clauses(&inst.templates[c.template], &c.vars))
            .collect(),
    )
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    fn rec(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, out);
            p.swap(i, j);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// Distinct relations obtained by applying a template of the support to a
/// sorted variable tuple in some order, as templates over sorted positions.
pub fn candidate_tables(d: &ConstraintDistribution) -> Vec<ConstraintTemplate> {
    let perms = permutations(d.arity());
    let mut seen: BTreeSet<TruthTable> = BTreeSet::new();
    let mut out = Vec::new();
    for t in d.templates() {
        for p in &perms {
            let r = t.reorder(p);
            if seen.insert(*r.table()) {
                out.push(r);
            }
        }
    }
    out.sort_by(|a, b| a.table().cmp(b.table()));
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn cover(
    in_spine: &mut [bool],
    certs: &mut Vec<SpineCertificate>,
    xi: &[usize],
    t: &ConstraintTemplate,
    tuple: &[usize],
) {
    for &v in tuple {
        if !in_spine[v] {
            in_spine[v] = true;
            certs.push(SpineCertificate {
                var: v,
                xi: xi.to_vec(),
                template: t.clone(),
                vars: tuple.to_vec(),
            });
        }
    }
}

/// Generalized spine by its definition: `x` is included iff some satisfiable
/// `Ξ ⊆ inst` and some template of `supp(d)` applied to a tuple containing
/// `x` form an unsatisfiable pair.
pub fn spine(inst: &Instance, d: &ConstraintDistribution) -> Result<SpineReport> {
    let n = inst.n;
    if n > EXACT_SPINE_MAX_VARS {
        return Err(Error::TooLarge {
            what: "exact spine",
            size: n,
            cap: EXACT_SPINE_MAX_VARS,
            hint: "use the MUS lower bound (mode `mus`)",
        });
    }
    let k = d.arity();
    let tables = candidate_tables(d);
    let total = binomial(n, k).saturating_mul(tables.len());
    if total > EXACT_SPINE_MAX_CANDIDATES {
        return Err(Error::TooLarge {
            what: "exact spine candidates",
            size: total,
            cap: EXACT_SPINE_MAX_CANDIDATES,
            hint: "use the MUS lower bound (mode `mus`)",
        });
    }
    let mut certs = Vec::new();
    if k == 0 || k > n {
        return Ok(SpineReport::new(n, SpineMethod::ExactDefinition, certs));
    }
    if let Some(report) = parity_spine(inst, d) {
        return Ok(report);
    }

    // a tautological candidate is never refuted
    let tables: Vec<ConstraintTemplate> = tables
        .into_iter()
        .filter(|t| t.popcount() < 1 << k)
        .collect();
    let complement: Vec<ConstraintTemplate> = tables
        .iter()
        .map(|t| {
            ConstraintTemplate::from_fn(k, |a| !t.satisfied_by_code(a)).expect("nonempty complement")
        })
        .collect();
    let groups = instance_groups(inst);
    let mut pool = Vec::new();
    let all: Vec<usize> = (0..inst.len()).collect();
    let satisfiable = match groups.solve(&all, &[]) {
        Some(model) => {
            pool.push(groups.witness(model));
            true
        }
        None => false,
    };

    let mut in_spine = vec![false; n];
    // Positive phase: a satisfiable Ξ that fixes every variable of a tuple
    // refutes each candidate falsified by the fixed values.
    let samples = if satisfiable { 1 } else { SPINE_MSS_SAMPLES };
    for s in 0..samples {
        let xi = if satisfiable {
            all.clone()
        } else {
            groups.sample_mss(&mut Stream::new(SPINE_SAMPLE_SEED, s as u64))
        };
        let sub = inst.subset(&xi).to_cnf();
        let bb = backbone_probe(&sub).expect("Ξ is satisfiable");
        let mut fixed: Vec<Option<bool>> = vec![None; n];
        for l in &bb {
            fixed[l.var()] = Some(l.is_positive());
        }
        let bvars: Vec<usize> = bb.iter().map(|l| l.var()).collect();
        if bvars.len() < k {
            continue;
        }
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let tuple: Vec<usize> = pick.iter().map(|&i| bvars[i]).collect();
            if tuple.iter().any(|&v| !in_spine[v]) {
                let code = tuple
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, &v)| acc | ((fixed[v] == Some(true)) as usize) << i);
                if let Some(t) = tables.iter().find(|t| !t.satisfied_by_code(code)) {
                    cover(&mut in_spine, &mut certs, &xi, t, &tuple);
                }
            }
            if !next_combination(&mut pick, bvars.len()) {
                break;
            }
        }
        if in_spine.iter().all(|&b| b) {
            break;
        }
    }

    // Exhaustive phase. Budgets grow per round so that easy refutations of
    // one variable are not held up by hard failures of another.
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut tuple: Vec<usize> = (0..k).collect();
    loop {
        tuples.push(tuple.clone());
        if !next_combination(&mut tuple, n) {
            break;
        }
    }
    let mut dead = vec![false; tuples.len() * tables.len()];
    let mut budget = SPINE_INITIAL_BUDGET;
    loop {
        let mut open = false;
        for (ti, tuple) in tuples.iter().enumerate() {
            for (i, t) in tables.iter().enumerate() {
                let slot = ti * tables.len() + i;
                if dead[slot] || tuple.iter().all(|&v| in_spine[v]) {
                    continue;
                }
                let cand = constraint_clauses(t, tuple);
                let neg = constraint_clauses(&complement[i], tuple);
                match groups.refute(&cand, &neg, &mut pool, Some(budget)) {
                    Refutation::Refuted(xi) => cover(&mut in_spine, &mut certs, &xi, t, tuple),
                    Refutation::Fails => dead[slot] = true,
                    Refutation::Unknown => open = true,
                }
            }
        }
        if !open {
            break;
        }
        budget = budget.saturating_mul(4);
    }
    Ok(SpineReport::new(n, SpineMethod::ExactDefinition, certs))
}

/// Basis vector over GF(2): variables in `lhs`, original rows in `combo`.
struct ParityRow {
    lhs: u64,
    rhs: bool,
    combo: Vec<u64>,
}

impl ParityRow {
    fn add(&mut self, other: &ParityRow) {
        self.lhs ^= other.lhs;
        self.rhs ^= other.rhs;
        for (a, b) in self.combo.iter_mut().zip(&other.combo) {
            *a ^= b;
        }
    }
}

/// Exact spine of a parity instance whose support holds both parities of
/// arity `k`. A parity candidate on a tuple is refuted by a satisfiable `Ξ`
/// iff the tuple's indicator vector lies in the row span of `Ξ`, and any
/// vector of the full row span is a sum of linearly independent (hence
/// jointly satisfiable) rows. `None` when the shortcut does not apply.
fn parity_spine(inst: &Instance, d: &ConstraintDistribution) -> Option<SpineReport> {
    let k = d.arity();
    let support: Vec<Option<bool>> = d.templates().iter().map(|t| t.parity()).collect();
    let even = d.templates().iter().find(|t| t.parity() == Some(false))?;
    let odd = d.templates().iter().find(|t| t.parity() == Some(true))?;
    if support.contains(&None) || inst.n > 64 || inst.templates.iter().any(|t| t.parity().is_none()) {
        return None;
    }
    let words = inst.len().div_ceil(64);
    let mut basis: Vec<(usize, ParityRow)> = Vec::new();
    for (i, c) in inst.constraints.iter().enumerate() {
        let mut row = ParityRow {
            lhs: c.vars.iter().fold(0u64, |acc, &v| acc ^ 1 << v),
            rhs: inst.templates[c.template].parity() == Some(true),
            combo: vec![0; words],
        };
        row.combo[i / 64] |= 1 << (i % 64);
        for (pivot, b) in &basis {
            if row.lhs >> pivot & 1 == 1 {
                row.add(b);
            }
        }
        if row.lhs != 0 {
            basis.push((row.lhs.trailing_zeros() as usize, row));
        }
    }

    let n = inst.n;
    let mut in_spine = vec![false; n];
    let mut certs = Vec::new();
    let mut tuple: Vec<usize> = (0..k).collect();
    loop {
        if tuple.iter().any(|&v| !in_spine[v]) {
            let mut row = ParityRow {
                lhs: tuple.iter().fold(0u64, |acc, &v| acc | 1 << v),
                rhs: false,
                combo: vec![0; words],
            };
            for (pivot, b) in &basis {
                if row.lhs >> pivot & 1 == 1 {
                    row.add(b);
                }
            }
            if row.lhs == 0 {
                let xi: Vec<usize> = (0..inst.len()).filter(|&i| row.combo[i / 64] >> (i % 64) & 1 == 1).collect();
                // Ξ forces parity `row.rhs` on the tuple; the other parity conflicts.
                let t = if row.rhs { even } else { odd };
                cover(&mut in_spine, &mut certs, &xi, t, &tuple);
            }
        }
        if !next_combination(&mut tuple, n) {
            break;
        }
    }
    Some(SpineReport::new(n, SpineMethod::ExactDefinition, certs))
}

/// Spine lower bound from one minimally unsatisfiable core: every core
/// variable is certified by the core minus a constraint containing it.
/// Empty for satisfiable instances.
pub fn spine_mus(inst: &Instance) -> Result<SpineReport> {
    let mut certs = Vec::new();
    if let Some(mus) = try_extract_mus(inst)? {
        for &v in &mus.core_vars {
            let &c = mus
                .core
                .iter()
                .find(|&&c| inst.constraints[c].vars.contains(&v))
                .expect("core variable occurs in the core");
            let ac = &inst.constraints[c];
            certs.push(SpineCertificate {
                var: v,
                xi: mus.core.iter().copied().filter(|&i| i != c).collect(),
                template: inst.templates[ac.template].clone(),
                vars: ac.vars.clone(),
            });
        }
    }
    Ok(SpineReport::new(inst.n, SpineMethod::MusLowerBound, certs))
}

/// Literal spine: `l` is included iff some satisfiable `Ξ ⊆ f` entails `l`.
pub fn spine_literals(f: &Cnf) -> Result<Vec<Lit>> {
    if f.n > EXACT_SPINE_MAX_VARS {
        return Err(Error::TooLarge {
            what: "literal spine",
            size: f.n,
            cap: EXACT_SPINE_MAX_VARS,
            hint: "",
        });
    }
    let groups = Groups::new(f.n, f.clauses.iter().map(|c| vec![c.clone()]).collect());
    let mut pool = Vec::new();
    let all: Vec<usize> = (0..f.clauses.len()).collect();
    if let Some(model) = groups.solve(&all, &[]) {
        pool.push(groups.witness(model));
    }
    let mut out = Vec::new();
    for v in 0..f.n {
        for l in [Lit::pos(v), Lit::neg(v)] {
            let cand = [Clause::from_lits_unchecked(vec![!l])];
            let neg = [Clause::from_lits_unchecked(vec![l])];
            if let Refutation::Refuted(_) = groups.refute(&cand, &neg, &mut pool, None) {
                out.push(l);
            }
        }
    }
    Ok(out)
}

/// Literals true in every model of a satisfiable formula. Exhaustive for
/// `n ≤ 24`, solver probing beyond.
pub fn backbone(f: &Cnf) -> Result<Vec<Lit>> {
    if f.n <= BRUTE_FORCE_MAX_VARS {
        backbone_enumerate(f)
    } else {
        backbone_probe(f)
    }
}

pub fn backbone_enumerate(f: &Cnf) -> Result<Vec<Lit>> {
    let n = f.n;
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::TooLarge {
            what: "backbone enumeration",
            size: n,
            cap: BRUTE_FORCE_MAX_VARS,
            hint: "use probing",
        });
    }
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(p, q), l| {
                let bit = 1u32 << l.var();
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let (mut always, mut never, mut any) = (u32::MAX, u32::MAX, false);
    for a in 0u32..1 << n {
        if masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0) {
            always &= a;
            never &= !a;
            any = true;
        }
    }
    if !any {
        return Err(Error::Unsatisfiable("backbone needs a satisfiable formula"));
    }
    let mut out = Vec::new();
    for v in 0..n {
        if always >> v & 1 == 1 {
            out.push(Lit::pos(v));
        } else if never >> v & 1 == 1 {
            out.push(Lit::neg(v));
        }
    }
    Ok(out)
}

/// `l` is in the backbone iff `f ∧ ¬l` is unsatisfiable; models found along
/// the way discard candidates in bulk.
pub fn backbone_probe(f: &Cnf) -> Result<Vec<Lit>> {
    let solve = |cnf: &Cnf| {
        Dpll::new(cnf)
            .heuristic(Heuristic::Lookahead)
            .run()
            .result
            .witness
    };
    let first = solve(f).ok_or(Error::Unsatisfiable("backbone needs a satisfiable formula"))?;
    let mut cand: Vec<Option<bool>> = first.iter().map(|&b| Some(b)).collect();
    let mut probe = f.clone();
    for v in 0..f.n {
        let Some(val) = cand[v] else { continue };
        probe.clauses.push(Clause::from_lits_unchecked(vec![Lit::new(v, !val)]));
        if let Some(m) = solve(&probe) {
            for (c, &b) in cand.iter_mut().zip(&m) {
                if *c == Some(!b) {
                    *c = None;
                }
            }
        }
        probe.clauses.pop();
    }
    Ok(cand
        .iter()
        .enumerate()
        .filter_map(|(v, c)| c.map(|b| Lit::new(v, b)))
        .collect())
}

fn all_parity(inst: &Instance) -> bool {
    let used: BTreeSet<usize> = inst.constraints.iter().map(|c| c.template).collect();
    used.iter().all(|&t| inst.templates[t].parity().is_some())
}

/// Unsatisfiable core of a constraint subset, as constraint indices of
/// `inst`, or `None` if the subset is satisfiable.
fn subset_core(inst: &Instance, members: &[usize], parity: bool) -> Option<Vec<usize>> {
    let sub = inst.subset(members);
    if parity {
        let core = gauss_unsat_core(&sub).expect("parity templates");
        return core.map(|c| c.into_iter().map(|i| members[i]).collect());
    }
    let (cnf, origin) = sub.to_cnf_with_origin();
    let run = Dpll::new(&cnf).heuristic(Heuristic::Lookahead).track_core(true).run();
    run.core.map(|clauses| {
        let set: BTreeSet<usize> = clauses.into_iter().map(|c| members[origin[c]]).collect();
        set.into_iter().collect()
    })
}

fn try_extract_mus(inst: &Instance) -> Result<Option<MusReport>> {
    let parity = all_parity(inst);
    let all: Vec<usize> = (0..inst.len()).collect();
    let Some(mut current) = subset_core(inst, &all, parity) else {
        return Ok(None);
    };
    // Constraints are visited in index order; a successful deletion shrinks
    // `current` to the solver's core of the remainder, which keeps every
    // constraint already shown necessary.
    let mut necessary: BTreeSet<usize> = BTreeSet::new();
    let mut idx = 0;
    while let Some(&c) = current.iter().find(|&&c| c >= idx && !necessary.contains(&c)) {
        let rest: Vec<usize> = current.iter().copied().filter(|&i| i != c).collect();
        match subset_core(inst, &rest, parity) {
            Some(core) => current = core,
            None => {
                necessary.insert(c);
            }
        }
        idx = c + 1;
    }
    let mut core_vars: Vec<usize> = current
        .iter()
        .flat_map(|&c| inst.constraints[c].vars.iter().copied())
        .collect();
    core_vars.sort_unstable();
    core_vars.dedup();
    Ok(Some(MusReport {
        sizes: (current.len(), core_vars.len()),
        core: current,
        core_vars,
    }))
}

/// Minimally unsatisfiable subformula by deletion in constraint index order,
/// with core-guided shrinking. Deterministic.
pub fn extract_mus(inst: &Instance) -> Result<MusReport> {
    try_extract_mus(inst)?.ok_or(Error::Satisfiable("MUS extraction needs an unsatisfiable instance"))
}

fn instance_sat(inst: &Instance) -> bool {
    if all_parity(inst) {
        return gauss_unsat_core(inst).expect("parity templates").is_none();
    }
    let cnf = inst.to_cnf();
    Dpll::new(&cnf).heuristic(Heuristic::Lookahead).run().result.is_sat()
}

/// Unsatisfiable, and satisfiable after deleting any single constraint.
pub fn is_minimally_unsat(inst: &Instance) -> bool {
    if instance_sat(inst) {
        return false;
    }
    (0..inst.len()).all(|skip| {
        let rest: Vec<usize> = (0..inst.len()).filter(|&i| i != skip).collect();
        instance_sat(&inst.subset(&rest))
    })
}
