//! Brute-force reference implementations, independent of the circuit code.
//! Used by tests and by the verify command of the command line tool.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::bitset::{BitSet, TruthTable};
use crate::circuit::{Assignment, Gate, NodeId, StructuredCircuit};
use crate::formula::{Cnf, Qbf, Quant, Var};
use crate::{Error, Result};

/// Largest number of variables the oracles enumerate.
pub const ORACLE_LIMIT: u32 = 24;

fn check_limit(n: u32) -> Result<()> {
    if n > ORACLE_LIMIT {
        return Err(Error::TooManyVariables {
            count: n as usize,
            limit: ORACLE_LIMIT as usize,
        });
    }
    Ok(())
}

/// Truth table of `f` over `1..=num_vars`, one assignment at a time.
pub fn cnf_truth_table(f: &Cnf) -> Result<TruthTable> {
    let n = f.num_vars();
    check_limit(n)?;
    let mut t = TruthTable::zeros(n);
    for a in 0..1usize << n {
        if f.eval(|v| (a >> (v - 1)) & 1 == 1) {
            t.set(a, true);
        }
    }
    Ok(t)
}

pub fn cnf_model_count(f: &Cnf) -> Result<u64> {
    Ok(cnf_truth_table(f)?.count_ones())
}

/// Truth of a closed formula by expanding the blocks recursively.
pub fn qbf_eval(q: &Qbf) -> Result<bool> {
    if !q.free_vars().is_empty() {
        return Err(Error::InvalidFormula("formula has free variables".into()));
    }
    Ok(qbf_count(q)? == BigUint::from(1u32))
}

/// Number of assignments of the free variables under which the formula is
/// true, by expanding every block recursively for each free assignment.
pub fn qbf_count(q: &Qbf) -> Result<BigUint> {
    let n = q.matrix().num_vars();
    check_limit(n)?;
    let free = q.free_vars();
    let mut values = vec![false; n as usize + 1];
    let mut count = 0u64;
    for bits in 0..1u64 << free.len() {
        for (i, &v) in free.iter().enumerate() {
            values[v as usize] = (bits >> i) & 1 == 1;
        }
        if expand(q, 0, &mut values) {
            count += 1;
        }
    }
    Ok(count.into())
}

fn expand(q: &Qbf, block: usize, values: &mut Vec<bool>) -> bool {
    let Some(b) = q.prefix().get(block) else {
        return q.matrix().eval(|v| values[v as usize]);
    };
    let want = b.quant == Quant::Exists;
    for bits in 0..1u64 << b.vars.len() {
        for (i, &v) in b.vars.iter().enumerate() {
            values[v as usize] = (bits >> i) & 1 == 1;
        }
        if expand(q, block + 1, values) == want {
            return want;
        }
    }
    !want
}

/// Truth table over all variables in which the quantified variables have
/// been eliminated innermost first, by combining cofactors variable by
/// variable. The result does not depend on the quantified variables.
pub fn qbf_table(q: &Qbf) -> Result<TruthTable> {
    let mut t = cnf_truth_table(q.matrix())?;
    for block in q.prefix().iter().rev() {
        for &v in block.vars.iter().rev() {
            let bit = 1usize << (v - 1);
            for a in 0..t.len() {
                if a & bit == 0 {
                    let (lo, hi) = (t.get(a), t.get(a | bit));
                    let r = match block.quant {
                        Quant::Exists => lo || hi,
                        Quant::Forall => lo && hi,
                    };
                    t.set(a, r);
                    t.set(a | bit, r);
                }
            }
        }
    }
    Ok(t)
}

/// Model count over the free variables via [`qbf_table`].
pub fn qbf_count_by_table(q: &Qbf) -> Result<BigUint> {
    let t = qbf_table(q)?;
    let quantified: usize = q.prefix().iter().map(|b| b.vars.len()).sum();
    Ok(BigUint::from(t.count_ones()) >> quantified)
}

/// Value of every gate under a full assignment, by recursion on the gate
/// structure with memoization.
fn gate_values(c: &StructuredCircuit, a: &Assignment) -> Vec<Option<bool>> {
    fn value(c: &StructuredCircuit, g: usize, a: &Assignment, memo: &mut Vec<Option<bool>>) -> bool {
        if let Some(v) = memo[g] {
            return v;
        }
        let v = match c.gate(g) {
            Gate::Lit(l) => l.eval(a.get(l.var()).unwrap_or(false)),
            Gate::Const(b) => *b,
            Gate::And(x, y) => value(c, *x, a, memo) && value(c, *y, a, memo),
            Gate::Or(ch) => ch.iter().any(|&x| value(c, x, a, memo)),
        };
        memo[g] = Some(v);
        v
    }
    let mut memo = vec![None; c.len()];
    for g in 0..c.len() {
        value(c, g, a, &mut memo);
    }
    memo
}

/// The set of non-And gates at `t` (by position, ascending ids) satisfied by
/// some extension of `tau` to the variables of `z` below `t`.
pub fn shape_oracle(c: &StructuredCircuit, t: NodeId, z: &[Var], tau: &Assignment) -> BitSet {
    let gates: Vec<usize> = c
        .lambda(t)
        .iter()
        .copied()
        .filter(|&g| !matches!(c.gate(g), Gate::And(..)))
        .collect();
    let hidden: Vec<Var> = c
        .vtree()
        .vars_under(t)
        .into_iter()
        .filter(|v| z.contains(v))
        .collect();
    let mut shape = BitSet::new();
    for bits in 0..1u64 << hidden.len() {
        let mut a = tau.clone();
        for (i, &v) in hidden.iter().enumerate() {
            a.set(v, (bits >> i) & 1 == 1);
        }
        let values = gate_values(c, &a);
        for (i, &g) in gates.iter().enumerate() {
            if values[g] == Some(true) {
                shape.insert(i);
            }
        }
    }
    shape
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_qbf_oracles_agree() {
        let f = Cnf::from_dimacs_clauses(3, &[&[1, 2], &[-1, -2], &[2, 3]]).unwrap();
        let q = Qbf::new([(Quant::Forall, vec![1]), (Quant::Exists, vec![2])], f).unwrap();
        assert_eq!(qbf_count(&q).unwrap(), qbf_count_by_table(&q).unwrap());
        let f = Cnf::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]).unwrap();
        let q = Qbf::new([(Quant::Forall, vec![1]), (Quant::Exists, vec![2])], f.clone()).unwrap();
        assert!(qbf_eval(&q).unwrap());
        let q = Qbf::new([(Quant::Exists, vec![2]), (Quant::Forall, vec![1])], f).unwrap();
        assert!(!qbf_eval(&q).unwrap());
        assert_eq!(qbf_count_by_table(&q).unwrap(), 0u32.into());
    }
}
