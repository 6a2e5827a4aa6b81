use crate::error::{Error, Result};
use crate::instance::Instance;

use super::{Method, SolveResult, Status};

#[derive(Clone, Debug)]
pub struct GaussRun {
    pub result: SolveResult,
    /// Row additions performed.
    pub row_ops: u64,
    /// Bit operations: each row addition touches `n + 1` bits.
    pub bit_ops: u64,
}

pub fn gauss_solve_xor(inst: &Instance) -> Result<SolveResult> {
    gauss_solve_xor_counted(inst).map(|r| r.result)
}

/// Gauss-Jordan elimination over GF(2). Each constraint must be an even or
/// odd parity relation; free variables are set to 0 in the witness.
pub fn gauss_solve_xor_counted(inst: &Instance) -> Result<GaussRun> {
    let n = inst.n;
    let words = (n + 1 + 63) / 64;
    let rhs_bit = n;
    let mut parity_of = Vec::with_capacity(inst.templates.len());
    for t in &inst.templates {
        parity_of.push(t.parity());
    }
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(inst.len());
    for c in &inst.constraints {
        let odd = parity_of[c.template].ok_or(Error::NonParityTemplate(c.template))?;
        let mut row = vec![0u64; words];
        for &v in &c.vars {
            row[v / 64] ^= 1 << (v % 64);
        }
        if odd {
            row[rhs_bit / 64] |= 1 << (rhs_bit % 64);
        }
        rows.push(row);
    }

    let get = |row: &[u64], i: usize| row[i / 64] >> (i % 64) & 1 == 1;
    let mut row_ops = 0u64;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| get(&rows[r], col)) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot, tail) = tail.split_first_mut().expect("pivot row");
        let pivot = &*pivot;
        for row in head.iter_mut().chain(tail.iter_mut()) {
            if get(row, col) {
                for (a, b) in row.iter_mut().zip(pivot) {
                    *a ^= b;
                }
                row_ops += 1;
            }
        }
        pivots.push((rank, col));
        rank += 1;
    }
    let bit_ops = row_ops * (n as u64 + 1);

    let inconsistent = rows[rank..].iter().any(|row| get(row, rhs_bit));
    let result = if inconsistent {
        SolveResult {
            status: Status::Unsat,
            witness: None,
            tree_size: 0,
            max_depth: 0,
            method: Method::Gauss,
        }
    } else {
        let mut w = vec![false; n];
        for &(r, col) in &pivots {
            w[col] = get(&rows[r], rhs_bit);
        }
        debug_assert!(inst.eval(&w));
        SolveResult {
            status: Status::Sat,
            witness: Some(w),
            tree_size: 0,
            max_depth: 0,
            method: Method::Gauss,
        }
    };
    Ok(GaussRun {
        result,
        row_ops,
        bit_ops,
    })
}

/// For an inconsistent parity system, constraint indices whose equations
/// sum to `0 = 1` (an unsatisfiable subsystem, not necessarily minimal).
/// `None` when the system is consistent.
pub fn gauss_unsat_core(inst: &Instance) -> Result<Option<Vec<usize>>> {
    let n = inst.n;
    let m = inst.len();
    let words = (n + 1 + 63) / 64;
    let tags = (m + 63) / 64;
    let mut rows: Vec<(Vec<u64>, Vec<u64>)> = Vec::with_capacity(m);
    for (idx, c) in inst.constraints.iter().enumerate() {
        let odd = inst.templates[c.template]
            .parity()
            .ok_or(Error::NonParityTemplate(c.template))?;
        let mut row = vec![0u64; words];
        for &v in &c.vars {
            row[v / 64] ^= 1 << (v % 64);
        }
        if odd {
            row[n / 64] |= 1 << (n % 64);
        }
        let mut tag = vec![0u64; tags];
        tag[idx / 64] |= 1 << (idx % 64);
        rows.push((row, tag));
    }
    let get = |row: &[u64], i: usize| row[i / 64] >> (i % 64) & 1 == 1;
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| get(&rows[r].0, col)) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for (row, tag) in tail.iter_mut() {
            if get(row, col) {
                for (a, b) in row.iter_mut().zip(&pivot.0) {
                    *a ^= b;
                }
                for (a, b) in tag.iter_mut().zip(&pivot.1) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    Ok(rows[rank..]
        .iter()
        .filter(|(row, _)| get(row, n))
        .min_by_key(|(_, tag)| tag.iter().map(|w| w.count_ones()).sum::<u32>())
        .map(|(_, tag)| (0..m).filter(|&i| get(tag, i)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{parity_template, ConstraintTemplate};
    use crate::instance::AppliedConstraint;

    fn xor_instance(n: usize, eqs: &[(&[usize], bool)]) -> Instance {
        let k = eqs[0].0.len();
        Instance::new(
            n,
            vec![parity_template(k, false), parity_template(k, true)],
            eqs.iter()
                .map(|(vs, odd)| AppliedConstraint {
                    template: *odd as usize,
                    vars: vs.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn odd_triangle_is_unsat() {
        let inst = xor_instance(3, &[(&[0, 1], true), (&[1, 2], true), (&[0, 2], true)]);
        assert_eq!(gauss_solve_xor(&inst).unwrap().status, Status::Unsat);
    }

    #[test]
    fn even_equation_zero_witness() {
        let inst = xor_instance(3, &[(&[0, 1, 2], false)]);
        let r = gauss_solve_xor(&inst).unwrap();
        assert_eq!(r.witness_string(), "000");
    }

    #[test]
    fn witness_satisfies_system() {
        let inst = xor_instance(4, &[(&[0, 1, 2], true), (&[1, 2, 3], false), (&[0, 2, 3], true)]);
        let r = gauss_solve_xor(&inst).unwrap();
        assert!(inst.eval(r.witness.as_ref().unwrap()));
    }

    #[test]
    fn rejects_non_parity() {
        let inst = Instance::new(
            3,
            vec![ConstraintTemplate::or3()],
            vec![AppliedConstraint { template: 0, vars: vec![0, 1, 2] }],
        )
        .unwrap();
        assert_eq!(gauss_solve_xor(&inst), Err(Error::NonParityTemplate(0)));
    }

    #[test]
    fn core_of_odd_triangle_plus_noise() {
        let inst = xor_instance(
            5,
            &[(&[3, 4], false), (&[0, 1], true), (&[1, 2], true), (&[2, 3], false), (&[0, 2], true)],
        );
        let core = gauss_unsat_core(&inst).unwrap().unwrap();
        assert_eq!(core, vec![1, 2, 4]);
        assert!(gauss_solve_xor(&inst.subset(&core)).unwrap().is_unsat());
        let sat = xor_instance(3, &[(&[0, 1], true)]);
        assert_eq!(gauss_unsat_core(&sat).unwrap(), None);
    }

    #[test]
    fn empty_system() {
        let inst = Instance { n: 4, ..Default::default() };
        assert!(gauss_solve_xor(&inst).unwrap().is_sat());
    }
}
