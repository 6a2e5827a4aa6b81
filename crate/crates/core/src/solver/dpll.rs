use crate::cnf::{Cnf, Lit};

use super::{Method, SolveResult, Status};

/// Branching rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Lowest-index unassigned variable of an unsatisfied clause, `false`
    /// first. Fixed rule for reproducible tree sizes.
    #[default]
    LowestIndex,
    /// Variable with the most weighted occurrences in unsatisfied clauses,
    /// both polarities combined multiplicatively; binary clauses weigh ten
    /// times ternary ones. Heavier polarity first.
    MaxOccurrence,
    /// `MaxOccurrence` candidates refined by failed-literal probing. Fastest
    /// for status queries; forced literals are not counted as branch nodes.
    Lookahead,
}

const LOOKAHEAD_CANDIDATES: usize = 10;

enum Probe {
    Forced,
    Conflict,
    Branch(Lit),
}

impl std::str::FromStr for Heuristic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lowest" | "lowest-index" => Ok(Heuristic::LowestIndex),
            "maxocc" | "max-occurrence" => Ok(Heuristic::MaxOccurrence),
            "lookahead" => Ok(Heuristic::Lookahead),
            _ => Err(format!("unknown heuristic `{}` (lowest|maxocc|lookahead)", s)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DpllRun {
    pub result: SolveResult,
    /// For UNSAT runs with core tracking: indices of the clauses used by the
    /// refutation. They form an unsatisfiable subformula on their own.
    pub core: Option<Vec<usize>>,
}

/// Complete DPLL with unit propagation and pure-literal elimination. No
/// learning, no restarts.
pub struct Dpll<'a> {
    cnf: &'a Cnf,
    heuristic: Heuristic,
    budget: Option<u64>,
    track_core: bool,
}

pub fn dpll_solve(f: &Cnf, budget: Option<u64>) -> SolveResult {
    let mut d = Dpll::new(f);
    d.budget = budget;
    d.run().result
}

impl<'a> Dpll<'a> {
    pub fn new(cnf: &'a Cnf) -> Self {
        Dpll {
            cnf,
            heuristic: Heuristic::LowestIndex,
            budget: None,
            track_core: false,
        }
    }

    pub fn heuristic(mut self, h: Heuristic) -> Self {
        self.heuristic = h;
        self
    }

    pub fn budget(mut self, limit: Option<u64>) -> Self {
        self.budget = limit;
        self
    }

    pub fn track_core(mut self, yes: bool) -> Self {
        self.track_core = yes;
        self
    }

    pub fn run(self) -> DpllRun {
        let mut s = State::new(self.cnf, self.heuristic, self.budget, self.track_core);
        let outcome = if s.has_empty_clause() {
            if let Some(c) = s.first_empty_clause() {
                s.in_core[c] = true;
            }
            Outcome::Unsat
        } else {
            s.search(0)
        };
        let (status, witness) = match outcome {
            Outcome::Sat => {
                let w: Vec<bool> = s.value.iter().map(|&v| v == TRUE).collect();
                debug_assert!(self.cnf.eval(&w));
                (Status::Sat, Some(w))
            }
            Outcome::Unsat => (Status::Unsat, None),
            Outcome::Budget => (Status::BudgetExceeded, None),
        };
        let core = (self.track_core && status == Status::Unsat)
            .then(|| (0..s.in_core.len()).filter(|&c| s.in_core[c]).collect());
        DpllRun {
            result: SolveResult {
                status,
                witness,
                tree_size: s.tree_size,
                max_depth: s.max_depth,
                method: Method::Dpll,
            },
            core,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Sat,
    Unsat,
    Budget,
}

const UNASSIGNED: i8 = -1;
const TRUE: i8 = 1;
const FALSE: i8 = 0;

struct State {
    n: usize,
    heuristic: Heuristic,
    budget: Option<u64>,
    track_core: bool,

    lits: Vec<Lit>,
    start: Vec<usize>,
    occurs: Vec<Vec<u32>>,

    value: Vec<i8>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    n_true: Vec<u32>,
    n_false: Vec<u32>,
    /// Occurrences of each literal in not-yet-satisfied clauses.
    active: Vec<u32>,
    satisfied: usize,
    queue: Vec<u32>,
    conflict: Option<u32>,

    in_core: Vec<bool>,
    seen: Vec<u32>,
    stamp: u32,

    tree_size: u64,
    max_depth: u32,
}

impl State {
    fn new(cnf: &Cnf, heuristic: Heuristic, budget: Option<u64>, track_core: bool) -> Self {
        let n = cnf.n;
        let m = cnf.clauses.len();
        let mut lits = Vec::new();
        let mut start = Vec::with_capacity(m + 1);
        let mut occurs = vec![Vec::new(); 2 * n];
        let mut active = vec![0u32; 2 * n];
        for (ci, c) in cnf.clauses.iter().enumerate() {
            start.push(lits.len());
            for &l in c.lits() {
                lits.push(l);
                occurs[l.code()].push(ci as u32);
                active[l.code()] += 1;
            }
        }
        start.push(lits.len());
        let mut s = State {
            n,
            heuristic,
            budget,
            track_core,
            lits,
            start,
            occurs,
            value: vec![UNASSIGNED; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            n_true: vec![0; m],
            n_false: vec![0; m],
            active,
            satisfied: 0,
            queue: Vec::new(),
            conflict: None,
            in_core: vec![false; if track_core { m } else { 0 }],
            seen: vec![0; n],
            stamp: 0,
            tree_size: 0,
            max_depth: 0,
        };
        for c in 0..m {
            if s.clause_len(c) == 1 {
                s.queue.push(c as u32);
            }
        }
        s
    }

    #[inline]
    fn clause(&self, c: usize) -> &[Lit] {
        &self.lits[self.start[c]..self.start[c + 1]]
    }

    #[inline]
    fn clause_len(&self, c: usize) -> usize {
        self.start[c + 1] - self.start[c]
    }

    fn has_empty_clause(&self) -> bool {
        self.first_empty_clause().is_some()
    }

    fn first_empty_clause(&self) -> Option<usize> {
        (0..self.n_true.len()).find(|&c| self.clause_len(c) == 0)
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        match self.value[l.var()] {
            UNASSIGNED => UNASSIGNED,
            v => (v == TRUE) as i8 ^ (!l.is_positive()) as i8,
        }
    }

    /// Makes `l` true. Records new unit clauses and the first conflict.
    fn assign(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var();
        debug_assert_eq!(self.value[v], UNASSIGNED);
        self.value[v] = if l.is_positive() { TRUE } else { FALSE };
        self.reason[v] = reason;
        self.trail.push(l);
        let occ = std::mem::take(&mut self.occurs[l.code()]);
        for &c in &occ {
            let c = c as usize;
            self.n_true[c] += 1;
            if self.n_true[c] == 1 {
                self.satisfied += 1;
                for &x in &self.lits[self.start[c]..self.start[c + 1]] {
                    self.active[x.code()] -= 1;
                }
            }
        }
        self.occurs[l.code()] = occ;
        let nl = !l;
        let occ = std::mem::take(&mut self.occurs[nl.code()]);
        for &c in &occ {
            let c = c as usize;
            self.n_false[c] += 1;
            if self.n_true[c] == 0 {
                let len = (self.start[c + 1] - self.start[c]) as u32;
                if self.n_false[c] == len {
                    if self.conflict.is_none() {
                        self.conflict = Some(c as u32);
                    }
                } else if self.n_false[c] + 1 == len {
                    self.queue.push(c as u32);
                }
            }
        }
        self.occurs[nl.code()] = occ;
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let l = self.trail.pop().unwrap();
            let occ = std::mem::take(&mut self.occurs[l.code()]);
            for &c in &occ {
                let c = c as usize;
                self.n_true[c] -= 1;
                if self.n_true[c] == 0 {
                    self.satisfied -= 1;
                    for &x in &self.lits[self.start[c]..self.start[c + 1]] {
                        self.active[x.code()] += 1;
                    }
                }
            }
            self.occurs[l.code()] = occ;
            for &c in &self.occurs[(!l).code()] {
                self.n_false[c as usize] -= 1;
            }
            self.value[l.var()] = UNASSIGNED;
            self.reason[l.var()] = None;
        }
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        while self.conflict.is_none() {
            let Some(c) = self.queue.pop() else { break };
            let ci = c as usize;
            if self.n_true[ci] > 0 {
                continue;
            }
            let unit = self
                .clause(ci)
                .iter()
                .copied()
                .find(|&l| self.lit_value(l) == UNASSIGNED);
            match unit {
                Some(l) => self.assign(l, Some(c)),
                None => self.conflict = Some(c),
            }
        }
        self.queue.clear();
        self.conflict.take()
    }

    /// Marks the conflict clause and, transitively, the reasons of its
    /// propagated literals.
    fn collect_core(&mut self, conflict: u32) {
        if !self.track_core {
            return;
        }
        self.stamp += 1;
        let stamp = self.stamp;
        let mut stack = vec![conflict];
        while let Some(c) = stack.pop() {
            let ci = c as usize;
            self.in_core[ci] = true;
            for j in self.start[ci]..self.start[ci + 1] {
                let v = self.lits[j].var();
                if self.seen[v] == stamp {
                    continue;
                }
                self.seen[v] = stamp;
                if let Some(r) = self.reason[v] {
                    stack.push(r);
                }
            }
        }
    }

    fn eliminate_pure(&mut self) {
        loop {
            let mut changed = false;
            for v in 0..self.n {
                if self.value[v] != UNASSIGNED {
                    continue;
                }
                let p = self.active[Lit::pos(v).code()];
                let q = self.active[Lit::neg(v).code()];
                if p > 0 && q == 0 {
                    self.assign(Lit::pos(v), None);
                    changed = true;
                } else if q > 0 && p == 0 {
                    self.assign(Lit::neg(v), None);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // pure assignments only satisfy clauses
        debug_assert!(self.conflict.is_none() && self.queue.is_empty());
    }

    /// Weighted occurrence counts per literal over unsatisfied clauses;
    /// binary clauses dominate.
    fn occurrence_scores(&self) -> Vec<f64> {
        let mut score = vec![0f64; 2 * self.n];
        for c in 0..self.n_true.len() {
            if self.n_true[c] > 0 {
                continue;
            }
            let free = self.clause_len(c) - self.n_false[c] as usize;
            let w = (0.1f64).powi(free as i32);
            for &l in self.clause(c) {
                if self.value[l.var()] == UNASSIGNED {
                    score[l.code()] += w;
                }
            }
        }
        score
    }

    fn combined(score: &[f64], v: usize) -> f64 {
        let (a, b) = (score[2 * v], score[2 * v + 1]);
        a * b * 1024.0 + a + b
    }

    fn heavier(score: &[f64], v: usize) -> Lit {
        if score[2 * v] >= score[2 * v + 1] {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    }

    fn choose(&self) -> Option<Lit> {
        match self.heuristic {
            Heuristic::LowestIndex => (0..self.n)
                .find(|&v| {
                    self.value[v] == UNASSIGNED
                        && self.active[Lit::pos(v).code()] + self.active[Lit::neg(v).code()] > 0
                })
                .map(Lit::neg),
            Heuristic::MaxOccurrence | Heuristic::Lookahead => {
                let score = self.occurrence_scores();
                let mut best: Option<(f64, usize)> = None;
                for v in 0..self.n {
                    if self.value[v] != UNASSIGNED {
                        continue;
                    }
                    let s = Self::combined(&score, v);
                    if s > 0.0 && best.map_or(true, |(b, _)| s > b) {
                        best = Some((s, v));
                    }
                }
                best.map(|(_, v)| Self::heavier(&score, v))
            }
        }
    }

    /// Probes both polarities of the best-scoring candidates. A polarity
    /// whose propagation fails forces the opposite literal.
    fn lookahead(&mut self) -> Probe {
        let score = self.occurrence_scores();
        let mut cands: Vec<(f64, usize)> = (0..self.n)
            .filter(|&v| self.value[v] == UNASSIGNED)
            .map(|v| (Self::combined(&score, v), v))
            .filter(|&(s, _)| s > 0.0)
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
        if cands.len() > LOOKAHEAD_CANDIDATES {
            cands.select_nth_unstable_by(LOOKAHEAD_CANDIDATES, order);
            cands.truncate(LOOKAHEAD_CANDIDATES);
        }
        cands.sort_by(order);
        let mut best: Option<(u64, usize)> = None;
        let mut forced = false;
        'cand: for &(_, v) in &cands {
            if self.value[v] != UNASSIGNED {
                continue;
            }
            let mut counts = [0u64; 2];
            for (side, lit) in [Lit::pos(v), Lit::neg(v)].into_iter().enumerate() {
                let mark = self.trail.len();
                self.assign(lit, None);
                if let Some(c) = self.propagate() {
                    self.collect_core(c);
                    self.undo_to(mark);
                    self.assign(!lit, None);
                    forced = true;
                    if let Some(c) = self.propagate() {
                        self.collect_core(c);
                        return Probe::Conflict;
                    }
                    continue 'cand;
                }
                counts[side] = (self.trail.len() - mark) as u64;
                self.undo_to(mark);
            }
            let s = (counts[0] + 1) * (counts[1] + 1);
            if best.map_or(true, |(b, _)| s > b) {
                best = Some((s, v));
            }
        }
        match best {
            Some((_, v)) if self.value[v] == UNASSIGNED => Probe::Branch(Self::heavier(&score, v)),
            _ => {
                debug_assert!(forced);
                Probe::Forced
            }
        }
    }

    fn search(&mut self, depth: u32) -> Outcome {
        let first = loop {
            if let Some(c) = self.propagate() {
                self.collect_core(c);
                return Outcome::Unsat;
            }
            self.eliminate_pure();
            if self.satisfied == self.n_true.len() {
                return Outcome::Sat;
            }
            if self.heuristic == Heuristic::Lookahead {
                match self.lookahead() {
                    Probe::Forced => continue,
                    Probe::Conflict => return Outcome::Unsat,
                    Probe::Branch(l) => break l,
                }
            }
            // every unsatisfied clause has an unassigned literal here
            break self.choose().expect("branching variable");
        };
        if let Some(limit) = self.budget {
            if self.tree_size >= limit {
                return Outcome::Budget;
            }
        }
        self.tree_size += 1;
        self.max_depth = self.max_depth.max(depth + 1);
        let mark = self.trail.len();
        for lit in [first, !first] {
            self.assign(lit, None);
            match self.search(depth + 1) {
                Outcome::Unsat => self.undo_to(mark),
                other => return other,
            }
        }
        Outcome::Unsat
    }
}
