//! Boolean constraint templates, their implicates, and the sharp/coarse
//! threshold classification of random models built from them.
//!
//! A template of arity `k` is a truth table over `2^k` assignments. Assignment
//! `a` gives `x_{i+1}` the value of bit `i` of `a`. Positions are 0-based in
//! this API and printed 1-based.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::cnf::{Clause, Lit};
use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 8;

pub type Prob = Ratio<u64>;

/// Fixed-size truth table, up to `2^MAX_ARITY = 256` bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TruthTable([u64; 4]);

impl TruthTable {
    #[inline]
    pub fn get(&self, a: usize) -> bool {
        self.0[a >> 6] >> (a & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, a: usize, value: bool) {
        if value {
            self.0[a >> 6] |= 1 << (a & 63);
        } else {
            self.0[a >> 6] &= !(1 << (a & 63));
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    /// Little-endian bytes: byte `j` holds bits `8j..8j+8`.
    pub fn to_bytes(&self, arity: usize) -> Vec<u8> {
        let nbytes = ((1usize << arity) + 7) / 8;
        (0..nbytes)
            .map(|j| (self.0[j / 8] >> ((j % 8) * 8)) as u8)
            .collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut t = TruthTable::default();
        for (j, &b) in bytes.iter().enumerate().take(32) {
            t.0[j / 8] |= (b as u64) << ((j % 8) * 8);
        }
        t
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:016x}{:016x}{:016x}{:016x}",
            self.0[3], self.0[2], self.0[1], self.0[0]
        )
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintTemplate {
    arity: usize,
    table: TruthTable,
    pub name: Option<String>,
}

/// Templates compare by relation only; the label is ignored.
impl PartialEq for ConstraintTemplate {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.table == other.table
    }
}
impl Eq for ConstraintTemplate {}

impl std::hash::Hash for ConstraintTemplate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.table.hash(state);
    }
}

impl ConstraintTemplate {
    pub fn new(arity: usize, table: TruthTable) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::InvalidTemplate(format!(
                "arity {} outside 1..={}",
                arity, MAX_ARITY
            )));
        }
        let size = 1usize << arity;
        if (size..256).any(|a| table.get(a)) {
            return Err(Error::InvalidTemplate(format!(
                "table has bits set beyond 2^{}",
                arity
            )));
        }
        if table.count_ones() == 0 {
            return Err(Error::InvalidTemplate("empty relation".into()));
        }
        Ok(ConstraintTemplate {
            arity,
            table,
            name: None,
        })
    }

    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut table = TruthTable::default();
        if arity <= MAX_ARITY {
            for a in 0..1usize << arity {
                table.set(a, f(a));
            }
        }
        Self::new(arity, table)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    #[inline]
    pub fn satisfied_by_code(&self, a: usize) -> bool {
        self.table.get(a)
    }

    pub fn eval(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: assignment.len(),
            });
        }
        Ok(self.table.get(encode(assignment)))
    }

    /// Number of satisfying assignments.
    pub fn popcount(&self) -> u32 {
        self.table.count_ones()
    }

    pub fn satisfying(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.arity).filter(move |&a| self.table.get(a))
    }

    pub fn falsifying(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.arity).filter(move |&a| !self.table.get(a))
    }

    /// The template obtained by complementing the inputs selected by `mask`:
    /// `t'(a) = t(a ^ mask)`.
    pub fn with_negations(&self, mask: usize) -> Self {
        let size = 1usize << self.arity;
        let mut table = TruthTable::default();
        for a in 0..size {
            table.set(a, self.table.get(a ^ (mask & (size - 1))));
        }
        ConstraintTemplate {
            arity: self.arity,
            table,
            name: None,
        }
    }

    /// Moves input `i` to position `target[i]`. `target` must be a
    /// permutation of `0..arity`.
    pub fn reorder(&self, target: &[usize]) -> Self {
        debug_assert_eq!(target.len(), self.arity);
        let mut table = TruthTable::default();
        for b in 0..1usize << self.arity {
            let mut a = 0;
            for (i, &t) in target.iter().enumerate() {
                a |= (b >> t & 1) << i;
            }
            table.set(b, self.table.get(a));
        }
        ConstraintTemplate {
            arity: self.arity,
            table,
            name: None,
        }
    }

    /// Even parity (`x1 ⊕ … ⊕ xk = 0`) or odd parity, if this template is one.
    pub fn parity(&self) -> Option<bool> {
        if *self == parity_template(self.arity, false) {
            Some(false)
        } else if *self == parity_template(self.arity, true) {
            Some(true)
        } else {
            None
        }
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("t{}:{:?}", self.arity, self.table),
        }
    }

    // Named templates.

    pub fn or3() -> Self {
        clause_template(&[true, true, true]).named("OR3")
    }

    pub fn nae3() -> Self {
        Self::from_fn(3, |a| a != 0 && a != 7).unwrap().named("NAE3")
    }

    pub fn xor3(odd: bool) -> Self {
        parity_template(3, odd).named(if odd { "XOR3_ODD" } else { "XOR3_EVEN" })
    }

    pub fn one_in_k(k: usize) -> Result<Self> {
        Ok(Self::from_fn(k, |a| a.count_ones() == 1)?.named(format!("ONE_IN_{}", k)))
    }
}

impl fmt::Display for ConstraintTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

pub fn encode(assignment: &[bool]) -> usize {
    assignment
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as usize) << i)
}

pub fn decode(a: usize, k: usize) -> Vec<bool> {
    (0..k).map(|i| a >> i & 1 == 1).collect()
}

pub fn parity_template(k: usize, odd: bool) -> ConstraintTemplate {
    ConstraintTemplate::from_fn(k, |a| (a.count_ones() % 2 == 1) == odd).expect("k in range")
}

/// OR of literals on positions `0..signs.len()`; `signs[i] = true` means the
/// literal on position `i` is positive.
pub fn clause_template(signs: &[bool]) -> ConstraintTemplate {
    let k = signs.len();
    let falsifier = signs
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &pos)| acc | (!pos as usize) << i);
    let name: String = signs.iter().map(|&s| if s { '+' } else { '-' }).collect();
    ConstraintTemplate::from_fn(k, |a| a != falsifier)
        .expect("arity checked by caller")
        .named(format!("CLAUSE{}:{}", k, name))
}

/// The `2^k` clause relations of arity `k`, one per sign pattern, in
/// lexicographic sign order with `+` before `-`.
pub fn clause_templates(k: usize) -> Result<Vec<ConstraintTemplate>> {
    if k == 0 || k > MAX_ARITY {
        return Err(Error::InvalidTemplate(format!(
            "clause arity {} outside 1..={}",
            k, MAX_ARITY
        )));
    }
    Ok((0..1usize << k)
        .map(|j| {
            let signs: Vec<bool> = (0..k).map(|i| j >> (k - 1 - i) & 1 == 0).collect();
            clause_template(&signs)
        })
        .collect())
}

/// Parses a named shorthand (`OR3`, `NAE3`, `XOR3_EVEN`, `XOR3_ODD`,
/// `ONE_IN_3`, `CLAUSE<k>:<signs>`).
pub fn template_from_name(name: &str) -> Result<ConstraintTemplate> {
    match name {
        "OR3" => Ok(ConstraintTemplate::or3()),
        "NAE3" => Ok(ConstraintTemplate::nae3()),
        "XOR3_EVEN" => Ok(ConstraintTemplate::xor3(false)),
        "XOR3_ODD" => Ok(ConstraintTemplate::xor3(true)),
        "ONE_IN_3" => ConstraintTemplate::one_in_k(3),
        _ => {
            let rest = name
                .strip_prefix("CLAUSE")
                .ok_or_else(|| Error::InvalidTemplate(format!("unknown template `{}`", name)))?;
            let (k, signs) = rest
                .split_once(':')
                .ok_or_else(|| Error::InvalidTemplate(format!("expected CLAUSE<k>:<signs>, got `{}`", name)))?;
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidTemplate(format!("bad clause arity in `{}`", name)))?;
            let signs = signs
                .chars()
                .map(|c| match c {
                    '+' => Ok(true),
                    '-' => Ok(false),
                    _ => Err(Error::InvalidTemplate(format!("bad sign `{}` in `{}`", c, name))),
                })
                .collect::<Result<Vec<bool>>>()?;
            if signs.len() != k || k == 0 || k > MAX_ARITY {
                return Err(Error::InvalidTemplate(format!(
                    "`{}` needs exactly k signs with 1 <= k <= {}",
                    name, MAX_ARITY
                )));
            }
            Ok(clause_template(&signs))
        }
    }
}

/// Hex encoding of a table: bytes little-endian, each byte as two hex digits.
pub fn table_to_hex(t: &ConstraintTemplate) -> String {
    t.table
        .to_bytes(t.arity)
        .iter()
        .map(|b| format!("{:02x}", b))
        .collect()
}

pub fn table_from_hex(arity: usize, hex: &str) -> Result<ConstraintTemplate> {
    if arity == 0 || arity > MAX_ARITY {
        return Err(Error::InvalidTemplate(format!("arity {} outside 1..={}", arity, MAX_ARITY)));
    }
    let nbytes = ((1usize << arity) + 7) / 8;
    // a single nibble is accepted for arity <= 2
    let hex = if hex.len() == 1 && arity <= 2 {
        format!("0{}", hex)
    } else {
        hex.to_string()
    };
    if hex.len() != 2 * nbytes {
        return Err(Error::InvalidTemplate(format!(
            "arity {} needs {} hex digits, got `{}`",
            arity,
            2 * nbytes,
            hex
        )));
    }
    let bytes = (0..nbytes)
        .map(|j| {
            u8::from_str_radix(&hex[2 * j..2 * j + 2], 16)
                .map_err(|_| Error::InvalidTemplate(format!("bad hex `{}`", hex)))
        })
        .collect::<Result<Vec<u8>>>()?;
    ConstraintTemplate::new(arity, TruthTable::from_bytes(&bytes))
}

// ---------------------------------------------------------------------------
// Implicates

fn clause_holds(clause: &Clause, a: usize) -> bool {
    clause
        .lits()
        .iter()
        .any(|l| (a >> l.var() & 1 == 1) == l.is_positive())
}

/// Every satisfying assignment of `t` satisfies `clause` (positions as
/// variables).
pub fn is_implicate(t: &ConstraintTemplate, clause: &Clause) -> bool {
    t.satisfying().all(|a| clause_holds(clause, a))
}

/// All implicate clauses of `t` with between 1 and `max_len` literals,
/// ordered by length and then lexicographically. With `minimal_only`, clauses
/// subsumed by a shorter implicate are dropped.
pub fn implicates_up_to(t: &ConstraintTemplate, max_len: usize, minimal_only: bool) -> Vec<Clause> {
    let k = t.arity();
    let max_len = max_len.min(k);
    let mut found: Vec<Clause> = Vec::new();
    // subsets of positions as bitmasks, signs as a second mask over the subset
    for vars in 1usize..1 << k {
        let len = vars.count_ones() as usize;
        if len > max_len {
            continue;
        }
        let positions: Vec<usize> = (0..k).filter(|&i| vars >> i & 1 == 1).collect();
        for signs in 0usize..1 << len {
            let lits: Vec<Lit> = positions
                .iter()
                .enumerate()
                .map(|(j, &p)| Lit::new(p, signs >> j & 1 == 0))
                .collect();
            let c = Clause::from_lits_unchecked(lits);
            if is_implicate(t, &c) {
                found.push(c);
            }
        }
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.lits().cmp(b.lits())));
    if minimal_only {
        let all = found.clone();
        found.retain(|c| !all.iter().any(|d| d.len() < c.len() && d.subsumes(c)));
    }
    found
}

/// Some `(position, value)` fixed by every satisfying assignment.
pub fn strongly_depends_on_literal(t: &ConstraintTemplate) -> Option<(usize, bool)> {
    (0..t.arity()).find_map(|i| {
        let mut values = t.satisfying().map(|a| a >> i & 1 == 1);
        let first = values.next()?;
        values.all(|v| v == first).then_some((i, first))
    })
}

/// Some pair `(i, j)`, `i < j`, with `x_i != x_j` in every satisfying
/// assignment.
pub fn strongly_depends_on_2xor(t: &ConstraintTemplate) -> Option<(usize, usize)> {
    let k = t.arity();
    (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| t.satisfying().all(|a| (a >> i & 1) != (a >> j & 1)))
}

// ---------------------------------------------------------------------------
// Distributions

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintDistribution {
    templates: Vec<ConstraintTemplate>,
    probs: Vec<Prob>,
}

impl ConstraintDistribution {
    pub fn new(templates: Vec<ConstraintTemplate>, probs: Vec<Prob>) -> Result<Self> {
        if templates.is_empty() {
            return Err(Error::EmptySupport);
        }
        if templates.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} templates but {} probabilities",
                templates.len(),
                probs.len()
            )));
        }
        let k = templates[0].arity();
        if let Some(t) = templates.iter().find(|t| t.arity() != k) {
            return Err(Error::InvalidDistribution(format!(
                "mixed arities {} and {} ({})",
                k,
                t.arity(),
                t
            )));
        }
        if let Some(p) = probs.iter().find(|p| p.is_zero() || **p > Prob::one()) {
            return Err(Error::InvalidDistribution(format!("probability {} outside (0,1]", p)));
        }
        let total = probs
            .iter()
            .try_fold(Prob::zero(), |acc, p| checked_add(acc, *p))
            .ok_or_else(|| Error::InvalidDistribution("probability sum overflows".into()))?;
        if total != Prob::one() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {}, not 1", total)));
        }
        Ok(ConstraintDistribution { templates, probs })
    }

    pub fn uniform(templates: Vec<ConstraintTemplate>) -> Result<Self> {
        let m = templates.len() as u64;
        if m == 0 {
            return Err(Error::EmptySupport);
        }
        let probs = vec![Prob::new(1, m); templates.len()];
        Self::new(templates, probs)
    }

    pub fn templates(&self) -> &[ConstraintTemplate] {
        &self.templates
    }

    pub fn probs(&self) -> &[Prob] {
        &self.probs
    }

    pub fn arity(&self) -> usize {
        self.templates[0].arity()
    }

    /// Integer weights over a common denominator, for exact sampling.
    pub(crate) fn integer_weights(&self) -> Result<(Vec<u64>, u64)> {
        let lcm = self
            .probs
            .iter()
            .try_fold(1u64, |acc, p| {
                let g = acc.gcd(p.denom());
                acc.checked_mul(p.denom() / g)
            })
            .ok_or_else(|| Error::InvalidDistribution("common denominator overflows".into()))?;
        let weights: Vec<u64> = self
            .probs
            .iter()
            .map(|p| p.numer() * (lcm / p.denom()))
            .collect();
        Ok((weights, lcm))
    }
}

fn checked_add(a: Prob, b: Prob) -> Option<Prob> {
    let l = a.denom().lcm(b.denom());
    let an = a.numer().checked_mul(l / a.denom())?;
    let bn = b.numer().checked_mul(l / b.denom())?;
    Some(Prob::new(an.checked_add(bn)?, l))
}

/// Parses `p/q` or an integer.
pub fn parse_prob(s: &str) -> Result<Prob> {
    let bad = || Error::InvalidDistribution(format!("bad probability `{}`", s));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Prob::new(p, q))
        }
        None => Ok(Prob::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThresholdClass {
    TriviallySatisfiable,
    /// Template `template` has the unit implicate `x_{position} = value`.
    CoarseUnitImplicate {
        template: usize,
        position: usize,
        value: bool,
    },
    /// Template `template` has `x_i != x_j` as an implicate.
    CoarseTwoXorImplicate { template: usize, i: usize, j: usize },
    Sharp,
}

impl ThresholdClass {
    pub fn is_coarse(&self) -> bool {
        matches!(
            self,
            ThresholdClass::CoarseUnitImplicate { .. } | ThresholdClass::CoarseTwoXorImplicate { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ThresholdClass::TriviallySatisfiable => "trivially-satisfiable",
            ThresholdClass::CoarseUnitImplicate { .. } => "coarse-unit-implicate",
            ThresholdClass::CoarseTwoXorImplicate { .. } => "coarse-2xor-implicate",
            ThresholdClass::Sharp => "sharp",
        }
    }

    /// The implicate clauses that justify a coarse verdict, over the
    /// witnessing template's positions.
    pub fn witness_clauses(&self) -> Vec<Clause> {
        match *self {
            ThresholdClass::CoarseUnitImplicate { position, value, .. } => {
                vec![Clause::from_lits_unchecked(vec![Lit::new(position, value)])]
            }
            ThresholdClass::CoarseTwoXorImplicate { i, j, .. } => vec![
                Clause::from_lits_unchecked(vec![Lit::pos(i), Lit::pos(j)]),
                Clause::from_lits_unchecked(vec![Lit::neg(i), Lit::neg(j)]),
            ],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for ThresholdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ThresholdClass::CoarseUnitImplicate {
                template,
                position,
                value,
            } => write!(
                f,
                "{} (template {}: {}x{})",
                self.kind(),
                template,
                if value { "" } else { "¬" },
                position + 1
            ),
            ThresholdClass::CoarseTwoXorImplicate { template, i, j } => write!(
                f,
                "{} (template {}: x{} ≠ x{})",
                self.kind(),
                template,
                i + 1,
                j + 1
            ),
            _ => write!(f, "{}", self.kind()),
        }
    }
}

/// All-zeros or all-ones satisfies every template.
pub fn templates_trivially_satisfiable(templates: &[ConstraintTemplate]) -> bool {
    templates.iter().all(|t| t.satisfied_by_code(0))
        || templates
            .iter()
            .all(|t| t.satisfied_by_code((1usize << t.arity()) - 1))
}

pub fn is_trivially_satisfiable(d: &ConstraintDistribution) -> bool {
    templates_trivially_satisfiable(d.templates())
}

/// Classification over a support set; templates may have different arities.
/// Checks run in the order trivial, unit implicate, 2-XOR implicate.
pub fn classify_templates(templates: &[ConstraintTemplate]) -> Result<ThresholdClass> {
    if templates.is_empty() {
        return Err(Error::EmptySupport);
    }
    if templates_trivially_satisfiable(templates) {
        return Ok(ThresholdClass::TriviallySatisfiable);
    }
    for (idx, t) in templates.iter().enumerate() {
        if let Some((position, value)) = strongly_depends_on_literal(t) {
            return Ok(ThresholdClass::CoarseUnitImplicate {
                template: idx,
                position,
                value,
            });
        }
    }
    for (idx, t) in templates.iter().enumerate() {
        if let Some((i, j)) = strongly_depends_on_2xor(t) {
            return Ok(ThresholdClass::CoarseTwoXorImplicate { template: idx, i, j });
        }
    }
    Ok(ThresholdClass::Sharp)
}

pub fn classify_threshold(d: &ConstraintDistribution) -> Result<ThresholdClass> {
    classify_templates(d.templates())
}
