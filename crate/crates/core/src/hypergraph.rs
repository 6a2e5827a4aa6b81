//! Structural quantities of the formula hypergraph: subformula density `c*`,
//! `r`-deficiency, `(x, y)`-sparsity, the sparsity bound for random
//! hypergraphs, and private-variable orderings.

use std::fmt;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Cap on constraints for exact subformula enumeration.
pub const SUBSET_MAX_CONSTRAINTS: usize = 20;
/// Cap on vertices for exact sparsity checks.
pub const SPARSITY_MAX_VERTICES: usize = 24;

const FLOAT_SLACK: f64 = 1e-9;

/// One edge per applied constraint: its sorted variable set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn from_instance(inst: &Instance) -> Self {
        Hypergraph {
            n: inst.n,
            edges: inst
                .constraints
                .iter()
                .map(|c| {
                    let mut e = c.vars.clone();
                    e.sort_unstable();
                    e
                })
                .collect(),
        }
    }

    /// Edges whose vertices all lie in `set` (given as a membership mask).
    pub fn edges_inside(&self, member: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|e| e.iter().all(|&v| member[v]))
            .count()
    }
}

/// Visits every nonempty subset of edges in Gray-code order, reporting
/// `(|G|, |vars(G)|, edge membership)`.
fn for_each_subformula(h: &Hypergraph, mut visit: impl FnMut(usize, usize, &[bool])) -> Result<()> {
    let m = h.edges.len();
    if m == 0 {
        return Err(Error::EmptyInstance);
    }
    if m > SUBSET_MAX_CONSTRAINTS {
        return Err(Error::TooLarge {
            what: "subformula enumeration",
            size: m,
            cap: SUBSET_MAX_CONSTRAINTS,
            hint: "use the peeling lower bound",
        });
    }
    let mut mult = vec![0u32; h.n];
    let mut inside = vec![false; m];
    let (mut edges, mut verts) = (0usize, 0usize);
    for step in 1u64..1 << m {
        let j = step.trailing_zeros() as usize;
        inside[j] = !inside[j];
        if inside[j] {
            edges += 1;
            for &v in &h.edges[j] {
                mult[v] += 1;
                if mult[v] == 1 {
                    verts += 1;
                }
            }
        } else {
            edges -= 1;
            for &v in &h.edges[j] {
                mult[v] -= 1;
                if mult[v] == 0 {
                    verts -= 1;
                }
            }
        }
        visit(edges, verts, &inside);
    }
    Ok(())
}

/// `c*`: the maximum of `|constraints(G)| / |vars(G)|` over nonempty
/// subformulas `G`, exact.
pub fn c_star(inst: &Instance) -> Result<Rational64> {
    c_star_witness(inst).map(|(r, _)| r)
}

/// `c*` with a maximizing subformula (sorted constraint indices).
pub fn c_star_witness(inst: &Instance) -> Result<(Rational64, Vec<usize>)> {
    let h = Hypergraph::from_instance(inst);
    let mut best = (0usize, 1usize);
    let mut arg = Vec::new();
    for_each_subformula(&h, |e, v, inside| {
        if e * best.1 > best.0 * v {
            best = (e, v);
            arg = (0..inside.len()).filter(|&i| inside[i]).collect();
        }
    })?;
    Ok((Rational64::new(best.0 as i64, best.1 as i64), arg))
}

/// `δ_r = r·|constraints| − |vars|` of the whole instance.
pub fn deficiency(inst: &Instance, r: Rational64) -> Rational64 {
    r * inst.len() as i64 - Rational64::from(inst.used_vars().len() as i64)
}

/// `δ*_r`: the maximum deficiency over nonempty subformulas.
pub fn max_deficiency(inst: &Instance, r: Rational64) -> Result<Rational64> {
    let h = Hypergraph::from_instance(inst);
    let (p, q) = (*r.numer(), *r.denom());
    let mut best: Option<i64> = None;
    for_each_subformula(&h, |e, v, _| {
        let val = p * e as i64 - q * v as i64;
        if best.map_or(true, |b| val > b) {
            best = Some(val);
        }
    })?;
    Ok(Rational64::new(best.expect("nonempty"), q))
}

/// Lower bound on `c*` by peeling: repeatedly delete a minimum-degree vertex
/// (lowest index on ties) with its edges, keeping the densest remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct PeelBound {
    pub ratio: Rational64,
    /// Vertices of the densest remainder, sorted.
    pub vertices: Vec<usize>,
}

pub fn c_star_lower_bound(inst: &Instance) -> Result<PeelBound> {
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let h = Hypergraph::from_instance(inst);
    let order = peel_order(&h);
    let mut alive = vec![true; h.n];
    let mut best: Option<(usize, usize, usize)> = None;
    for (step, &v) in order.iter().enumerate() {
        let e = h.edges_inside(&alive);
        let touched = touched_vertices(&h, &alive);
        if touched > 0 && best.map_or(true, |(be, bv, _)| e * bv > be * touched) {
            best = Some((e, touched, step));
        }
        alive[v] = false;
    }
    let (e, v, step) = best.expect("some edge");
    let mut alive = vec![true; h.n];
    for &u in &order[..step] {
        alive[u] = false;
    }
    let mut vertices: Vec<usize> = Vec::new();
    for edge in &h.edges {
        if edge.iter().all(|&u| alive[u]) {
            vertices.extend(edge);
        }
    }
    vertices.sort_unstable();
    vertices.dedup();
    Ok(PeelBound {
        ratio: Rational64::new(e as i64, v as i64),
        vertices,
    })
}

fn touched_vertices(h: &Hypergraph, alive: &[bool]) -> usize {
    let mut seen = vec![false; h.n];
    for e in &h.edges {
        if e.iter().all(|&v| alive[v]) {
            for &v in e {
                seen[v] = true;
            }
        }
    }
    seen.iter().filter(|&&b| b).count()
}

/// Vertex removal order of min-degree peeling over all `n` vertices.
fn peel_order(h: &Hypergraph) -> Vec<usize> {
    let mut alive = vec![true; h.n];
    let mut edge_alive = vec![true; h.edges.len()];
    let mut deg = vec![0usize; h.n];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); h.n];
    for (i, e) in h.edges.iter().enumerate() {
        for &v in e {
            deg[v] += 1;
            incident[v].push(i);
        }
    }
    let mut order = Vec::with_capacity(h.n);
    for _ in 0..h.n {
        let v = (0..h.n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("alive vertex");
        alive[v] = false;
        for &i in &incident[v] {
            if edge_alive[i] {
                edge_alive[i] = false;
                for &u in &h.edges[i] {
                    deg[u] -= 1;
                }
            }
        }
        order.push(v);
    }
    order
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sparsity {
    Sparse,
    /// A vertex set of size at most `xn` spanning more than `y·|S|` edges.
    NotSparse(Vec<usize>),
    /// Heuristic mode found no violation; sparsity is not established.
    Unknown,
}

impl Sparsity {
    pub fn is_sparse(&self) -> Option<bool> {
        match self {
            Sparsity::Sparse => Some(true),
            Sparsity::NotSparse(_) => Some(false),
            Sparsity::Unknown => None,
        }
    }
}

fn violates(edges: usize, size: usize, y: f64) -> bool {
    edges as f64 > y * size as f64 + FLOAT_SLACK
}

fn max_set_size(n: usize, x: f64) -> usize {
    ((x * n as f64 + FLOAT_SLACK).floor().max(0.0) as usize).min(n)
}

/// `(x, y)`-sparsity: every set of `s ≤ xn` vertices spans at most `ys`
/// edges. Exact for `n ≤ 24` (sets visited by size, then in increasing mask
/// order); peeling heuristic beyond.
pub fn is_xy_sparse(h: &Hypergraph, x: f64, y: f64) -> Sparsity {
    if h.n <= SPARSITY_MAX_VERTICES {
        is_xy_sparse_exact(h, x, y)
    } else {
        is_xy_sparse_peeling(h, x, y)
    }
}

pub fn is_xy_sparse_exact(h: &Hypergraph, x: f64, y: f64) -> Sparsity {
    assert!(h.n <= SPARSITY_MAX_VERTICES, "exact sparsity check limited to 24 vertices");
    let masks: Vec<u32> = h
        .edges
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let smax = max_set_size(h.n, x);
    for s in 1..=smax {
        let mut set: u32 = (1u32 << s) - 1;
        let limit: u32 = if h.n == 32 { u32::MAX } else { 1u32 << h.n };
        while set < limit {
            let e = masks.iter().filter(|&&m| m & !set == 0).count();
            if violates(e, s, y) {
                return Sparsity::NotSparse((0..h.n).filter(|&v| set >> v & 1 == 1).collect());
            }
            // next mask with the same popcount
            let c = set & set.wrapping_neg();
            let r = set + c;
            if r == 0 {
                break;
            }
            set = (((r ^ set) >> 2) / c) | r;
        }
    }
    Sparsity::Sparse
}

/// Checks each remainder of min-degree peeling. Only finds violations.
pub fn is_xy_sparse_peeling(h: &Hypergraph, x: f64, y: f64) -> Sparsity {
    let smax = max_set_size(h.n, x);
    let order = peel_order(h);
    let mut alive = vec![true; h.n];
    for (step, &v) in order.iter().enumerate() {
        let size = h.n - step;
        if size <= smax && size > 0 && violates(h.edges_inside(&alive), size, y) {
            return Sparsity::NotSparse((0..h.n).filter(|&u| alive[u]).collect());
        }
        alive[v] = false;
    }
    Sparsity::Unknown
}

/// Parameters of the sparsity bound for random `k`-uniform hypergraphs with
/// `cn` edges: for `(k−1)y > 1`, `ε = y − 1/(k−1)` and
/// `x = ((1/(2e))·(y/(ce))^y)^(1/ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsityParams {
    pub k: usize,
    pub c: f64,
    pub y: f64,
    pub epsilon: f64,
    pub x: f64,
    /// `ln x`, which stays finite when `x` underflows.
    pub ln_x: f64,
}

impl fmt::Display for SparsityParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} c={} y={} epsilon={:.11e} x={:.11e}",
            self.k, self.c, self.y, self.epsilon, self.x
        )
    }
}

pub fn cs_sparsity_params(k: usize, c: f64, y: f64) -> Result<SparsityParams> {
    if k < 2 || (k - 1) as f64 * y <= 1.0 {
        return Err(Error::Hypothesis(format!(
            "the bound requires (k-1)y > 1, got k = {}, y = {}",
            k, y
        )));
    }
    if !(c > 0.0) || !c.is_finite() || !y.is_finite() {
        return Err(Error::Hypothesis(format!("the bound requires c > 0, got c = {}", c)));
    }
    let epsilon = y - 1.0 / (k - 1) as f64;
    // ln x = (−ln 2 − 1 + y (ln y − ln c − 1)) / ε
    let ln_x = (-std::f64::consts::LN_2 - 1.0 + y * (y.ln() - c.ln() - 1.0)) / epsilon;
    Ok(SparsityParams {
        k,
        c,
        y,
        epsilon,
        x: ln_x.exp(),
        ln_x,
    })
}

/// An ordering `C_1, …, C_m` of all constraints in which each `C_i` of arity
/// `k_i` has at least `k_i − 2` variables occurring in no `C_j`, `j < i`.
/// Built by peeling from the back; on failure returns the constraints
/// (sorted indices) left when no constraint has enough private variables.
pub fn private_variable_ordering(inst: &Instance) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let m = inst.len();
    let mut deg = vec![0usize; inst.n];
    for c in &inst.constraints {
        for &v in &c.vars {
            deg[v] += 1;
        }
    }
    let mut alive = vec![true; m];
    let mut back = Vec::with_capacity(m);
    for _ in 0..m {
        let pick = (0..m).find(|&i| {
            alive[i] && {
                let c = &inst.constraints[i];
                let private = c.vars.iter().filter(|&&v| deg[v] == 1).count();
                private + 2 >= c.vars.len()
            }
        });
        let Some(i) = pick else {
            return Err((0..m).filter(|&i| alive[i]).collect());
        };
        alive[i] = false;
        for &v in &inst.constraints[i].vars {
            deg[v] -= 1;
        }
        back.push(i);
    }
    back.reverse();
    Ok(back)
}

/// Independent check of a private-variable ordering.
pub fn verify_private_ordering(inst: &Instance, order: &[usize]) -> bool {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..inst.len()).collect::<Vec<_>>() {
        return false;
    }
    let mut seen = vec![false; inst.n];
    for &i in order {
        let vars = &inst.constraints[i].vars;
        let fresh = vars.iter().filter(|&&v| !seen[v]).count();
        if fresh + 2 < vars.len() {
            return false;
        }
        for &v in vars {
            seen[v] = true;
        }
    }
    true
}

/// Variables occurring exactly once in the subformula `subset`.
pub fn private_variable_count(inst: &Instance, subset: &[usize]) -> usize {
    let mut deg = vec![0u32; inst.n];
    for &i in subset {
        for &v in &inst.constraints[i].vars {
            deg[v] += 1;
        }
    }
    deg.iter().filter(|&&d| d == 1).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::clause_templates;
    use crate::instance::AppliedConstraint;

    fn inst(n: usize, k: usize, edges: &[&[usize]]) -> Instance {
        Instance::new(
            n,
            clause_templates(k).unwrap(),
            edges
                .iter()
                .enumerate()
                .map(|(i, e)| AppliedConstraint {
                    template: i % (1 << k),
                    vars: e.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn c_star_examples() {
        assert_eq!(c_star(&inst(5, 3, &[&[0, 1, 2]])).unwrap(), Rational64::new(1, 3));
        let mu = inst(2, 2, &[&[0, 1], &[0, 1], &[0, 1], &[0, 1]]);
        assert_eq!(c_star(&mu).unwrap(), Rational64::from(2));
        assert_eq!(c_star(&Instance { n: 3, ..Default::default() }), Err(Error::EmptyInstance));
    }

    #[test]
    fn deficiency_examples() {
        for k in 2..6usize {
            let one = inst(k, k, &[&(0..k).collect::<Vec<_>>()]);
            let r = Rational64::from(2 * k as i64 - 3);
            assert_eq!(deficiency(&one, r), Rational64::from(k as i64 - 3));
        }
        let mu = inst(2, 2, &[&[0, 1], &[0, 1], &[0, 1], &[0, 1]]);
        assert_eq!(max_deficiency(&mu, Rational64::from(1)).unwrap(), Rational64::from(2));
    }

    #[test]
    fn sparsity_boundary_is_inclusive() {
        let h = Hypergraph {
            n: 9,
            edges: vec![vec![0, 1, 2]],
        };
        let x = 3.0 / 9.0;
        assert_eq!(is_xy_sparse(&h, x, 1.0 / 3.0), Sparsity::Sparse);
        assert_eq!(is_xy_sparse(&h, x, 0.3), Sparsity::NotSparse(vec![0, 1, 2]));
        let empty = Hypergraph { n: 6, edges: vec![] };
        assert_eq!(is_xy_sparse(&empty, 1.0, 0.01), Sparsity::Sparse);
    }

    #[test]
    fn cs_params_reference_point() {
        let p = cs_sparsity_params(3, 1.0, 1.0).unwrap();
        assert_eq!(p.epsilon, 0.5);
        let want = 1.0 / (4.0 * 4f64.exp());
        assert!((p.x - want).abs() / want < 1e-12);
        assert!(matches!(cs_sparsity_params(3, 1.0, 0.5), Err(Error::Hypothesis(_))));
        assert!(cs_sparsity_params(3, 2.0, 1.0).unwrap().x < p.x);
    }

    #[test]
    fn private_orderings() {
        let disjoint = inst(6, 3, &[&[0, 1, 2], &[3, 4, 5]]);
        let o = private_variable_ordering(&disjoint).unwrap();
        assert!(verify_private_ordering(&disjoint, &o));
        let mu = inst(2, 2, &[&[0, 1], &[0, 1], &[0, 1], &[0, 1]]);
        assert!(verify_private_ordering(&mu, &private_variable_ordering(&mu).unwrap()));
        let chain = inst(7, 3, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6]]);
        let o = private_variable_ordering(&chain).unwrap();
        assert!(verify_private_ordering(&chain, &o));
        // every vertex of the Fano plane has degree 3, so nothing peels
        let fano = inst(7, 3, &[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6], &[1, 3, 5], &[1, 4, 6], &[2, 3, 6], &[2, 4, 5]]);
        assert_eq!(private_variable_ordering(&fano), Err((0..7).collect()));
        assert!(!verify_private_ordering(&fano, &(0..7).collect::<Vec<_>>()));
    }

    #[test]
    fn peeling_bound_is_below_exact() {
        let i = inst(6, 3, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3], &[3, 4, 5]]);
        let lb = c_star_lower_bound(&i).unwrap();
        assert_eq!(lb.ratio, Rational64::new(1, 1));
        assert_eq!(lb.vertices, vec![0, 1, 2, 3]);
        assert_eq!(c_star(&i).unwrap(), Rational64::new(1, 1));
    }
}
