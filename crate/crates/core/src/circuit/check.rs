use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Gate, StructuredCircuit};
use crate::formula::Var;
use crate::{Error, Result};

pub(super) fn check_structuredness(c: &StructuredCircuit) -> Result<()> {
    let vt = c.vtree();
    let bad = |msg: alloc::string::String| Err(Error::NotStructured(msg));
    for (g, gate) in c.gates().iter().enumerate() {
        let t = c.home(g);
        match gate {
            Gate::Lit(l) => {
                if vt.label(t) != Some(l.var()) {
                    return bad(format!("literal {l} (gate {g}) is not at the leaf of its variable"));
                }
            }
            Gate::Const(_) => {
                if !vt.is_unlabeled_leaf(t) {
                    return bad(format!("constant gate {g} is not at an unlabeled leaf"));
                }
            }
            Gate::And(a, b) => {
                let Some((left, right)) = vt.children(t) else {
                    return bad(format!("And gate {g} is at a leaf"));
                };
                if c.home(*a) != left || c.home(*b) != right {
                    return bad(format!(
                        "And gate {g} at node {t} does not take one input from each child in order"
                    ));
                }
                for x in [a, b] {
                    if c.gate(*x).is_and() {
                        return bad(format!("And gate {g} has And input {x}"));
                    }
                }
            }
            Gate::Or(ch) => {
                if vt.is_leaf(t) {
                    return bad(format!("Or gate {g} is at a leaf"));
                }
                for &x in ch {
                    if !c.gate(x).is_and() || c.home(x) != t {
                        return bad(format!(
                            "Or gate {g} has input {x} that is not an And gate at node {t}"
                        ));
                    }
                }
            }
        }
    }
    let mut reach = vec![false; c.len()];
    for &g in c.outputs().values() {
        reach[g] = true;
    }
    for g in (0..c.len()).rev() {
        if reach[g] {
            for x in c.gate(g).inputs() {
                reach[x] = true;
            }
        }
    }
    if let Some(g) = reach.iter().position(|r| !r) {
        return bad(format!("gate {g} is not reachable from any output"));
    }
    Ok(())
}

/// Checks by enumeration that the inputs of every Or gate are pairwise
/// disjoint. Limited to 20 labeled variables.
pub fn check_determinism_bruteforce(c: &StructuredCircuit) -> Result<bool> {
    const LIMIT: usize = 20;
    let vars = c.vtree().vars();
    if vars.len() > LIMIT {
        return Err(Error::TooManyVariables {
            count: vars.len(),
            limit: LIMIT,
        });
    }
    if c.is_empty() {
        return Ok(true);
    }
    let index = |v: Var| vars.binary_search(&v).expect("labeled variable") as u32;
    let tables = c.gate_tables(vars.len() as u32, index, c.len() - 1)?;
    for gate in c.gates() {
        if let Gate::Or(ch) = gate {
            let mut seen = crate::bitset::TruthTable::zeros(vars.len() as u32);
            for &x in ch {
                if seen.intersects(&tables[x]) {
                    return Ok(false);
                }
                seen = seen.or(&tables[x]);
            }
        }
    }
    Ok(true)
}

/// Per-node gate counts compared with the bounds that And-gate
/// deduplication guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AndBound {
    pub width: usize,
    /// Largest `|λ(t)|` over internal nodes.
    pub max_lambda: usize,
    /// Internal nodes with `|λ(t)| > w² + w`.
    pub square_violations: Vec<usize>,
    /// Internal nodes with more gates than `a₁·a₂ + |Or(t)|`, where `aᵢ`
    /// counts the non-And gates at the i-th child.
    pub refined_violations: Vec<usize>,
}

pub fn and_gate_bound(c: &StructuredCircuit) -> AndBound {
    let vt = c.vtree();
    let width = c.width();
    let non_and = |t: usize| c.lambda(t).iter().filter(|&&g| !c.gate(g).is_and()).count();
    let mut max_lambda = 0;
    let mut square_violations = Vec::new();
    let mut refined_violations = Vec::new();
    for t in 0..vt.len() {
        let Some((l, r)) = vt.children(t) else { continue };
        let size = c.lambda(t).len();
        let ors = c.lambda(t).iter().filter(|&&g| c.gate(g).is_or()).count();
        max_lambda = max_lambda.max(size);
        if size > width * width + width {
            square_violations.push(t);
        }
        if size > non_and(l) * non_and(r) + ors {
            refined_violations.push(t);
        }
    }
    AndBound {
        width,
        max_lambda,
        square_violations,
        refined_violations,
    }
}
