//! CNF to complete structured d-DNNF along a nice tree decomposition.
//!
//! For every node `t` of the decomposition and every assignment `τ` of its
//! bag there is one Or gate computing "τ extends to a model of the clauses
//! placed below `t`". Assignments are bitmasks over the ascending bag: bit
//! `i` is the value of the i-th smallest bag variable.

mod clause_index;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use clause_index::{assign_clauses, ClauseIndex};

use crate::circuit::{remove_constant_leaves, CircuitBuilder, GateId, NodeId, StructuredCircuit, Vtree, VtreeBuilder};
use crate::formula::{primal_graph, Cnf, Lit, Var};
use crate::treedec::{decompose, make_nice, NiceKind, NiceTreeDecomposition, Strategy};
use crate::{Budget, Error, Result, OUT_MAIN};

/// Largest bag the compiler accepts, independent of any budget.
pub const MAX_BAG: usize = 30;

/// Decomposes the primal graph with `strategy` and compiles.
pub fn compile_cnf(f: &Cnf, strategy: Strategy) -> Result<StructuredCircuit> {
    let nice = make_nice(&decompose(&primal_graph(f), strategy))?;
    compile(f, &nice)
}

pub fn compile(f: &Cnf, nice: &NiceTreeDecomposition) -> Result<StructuredCircuit> {
    compile_with_budget(f, nice, &Budget::UNLIMITED)
}

/// Compiles and then removes the constant leaves of the extended vtree.
pub fn compile_with_budget(
    f: &Cnf,
    nice: &NiceTreeDecomposition,
    budget: &Budget,
) -> Result<StructuredCircuit> {
    let extended = compile_extended(f, nice, budget)?;
    let mut c = remove_constant_leaves(&extended)?;
    c.set_deterministic(true);
    Ok(c)
}

/// The extended vtree of a nice decomposition, with the vtree node of every
/// decomposition node. Leaves and introduce nodes get an unlabeled leaf,
/// forget nodes the leaf of the forgotten variable.
pub fn extended_vtree(nice: &NiceTreeDecomposition) -> Result<(Vtree, Vec<NodeId>)> {
    let mut b = VtreeBuilder::new();
    let mut at = vec![0; nice.len()];
    for (i, node) in nice.nodes().iter().enumerate() {
        at[i] = match node.kind {
            NiceKind::Leaf => b.leaf(None),
            NiceKind::Introduce { child, .. } => {
                let u = b.leaf(None);
                b.internal(at[child], u)
            }
            NiceKind::Forget { var, child } => {
                let x = b.leaf(Some(var));
                b.internal(at[child], x)
            }
            NiceKind::Join { left, right } => b.internal(at[left], at[right]),
        };
    }
    Ok((b.finish(at[nice.root()])?, at))
}

fn drop_bit(tau: usize, p: usize) -> usize {
    (tau & ((1 << p) - 1)) | ((tau >> (p + 1)) << p)
}

fn insert_bit(tau: usize, p: usize, bit: usize) -> usize {
    (tau & ((1 << p) - 1)) | (bit << p) | ((tau >> p) << (p + 1))
}

/// Compiles over the extended vtree, keeping the constant leaves.
pub fn compile_extended(
    f: &Cnf,
    nice: &NiceTreeDecomposition,
    budget: &Budget,
) -> Result<StructuredCircuit> {
    nice.validate(&primal_graph(f))?;
    let max_bag = nice.max_bag();
    if max_bag > MAX_BAG {
        return Err(Error::BudgetExceeded {
            stage: "compile".into(),
            width: usize::MAX,
            gates: 0,
        });
    }
    let assigned = assign_clauses(f, nice)?;
    let (vtree, at) = extended_vtree(nice)?;
    let vt = vtree.clone();
    let mut b = CircuitBuilder::new(vtree);
    let nodes = nice.nodes();
    // None stands for a gate equivalent to false.
    let mut gates: Vec<Vec<Option<GateId>>> = vec![Vec::new(); nice.len()];
    let mut remaining_parents: Vec<usize> = nodes.iter().map(|_| 0).collect();
    for node in nodes {
        for c in node.children() {
            remaining_parents[c] += 1;
        }
    }

    for (i, node) in nodes.iter().enumerate() {
        let bag = &node.bag;
        let size = 1usize << bag.len();
        let t = at[i];
        let masks = clause_masks(f, &assigned[i], bag)?;
        let falsified = |tau: usize| {
            masks
                .iter()
                .any(|&(pos, neg)| tau & pos == 0 && !tau & neg == 0)
        };
        let mut v: Vec<Option<GateId>> = Vec::with_capacity(size);
        match node.kind {
            NiceKind::Leaf => {
                let value = !falsified(0);
                v.push(Some(b.constant(t, value)));
            }
            NiceKind::Introduce { var, child } => {
                let p = position(bag, var)?;
                let (_, u) = vt.children(t).expect("introduce node is internal");
                let one = b.constant(u, true);
                let mut ands: Vec<Option<GateId>> = vec![None; size / 2];
                for tau in 0..size {
                    let below = drop_bit(tau, p);
                    let g = match gates[child][below] {
                        Some(x) if !falsified(tau) => {
                            let a = *ands[below].get_or_insert_with(|| b.and(t, x, one));
                            Some(b.or(t, vec![a]))
                        }
                        _ => None,
                    };
                    v.push(g);
                }
            }
            NiceKind::Forget { var, child } => {
                let p = position(&nodes[child].bag, var)?;
                let (_, leaf) = vt.children(t).expect("forget node is internal");
                let mut lits: [Option<GateId>; 2] = [None; 2];
                for tau in 0..size {
                    if falsified(tau) {
                        v.push(None);
                        continue;
                    }
                    let mut ands = Vec::with_capacity(2);
                    for value in [1, 0] {
                        if let Some(x) = gates[child][insert_bit(tau, p, value)] {
                            let lit = *lits[value].get_or_insert_with(|| b.lit(leaf, Lit::new(var, value == 1)));
                            ands.push(b.and(t, x, lit));
                        }
                    }
                    v.push(if ands.is_empty() { None } else { Some(b.or(t, ands)) });
                }
            }
            NiceKind::Join { left, right } => {
                for (tau, (&l, &r)) in gates[left].iter().zip(&gates[right]).enumerate().take(size) {
                    let g = match (l, r) {
                        (Some(x), Some(y)) if !falsified(tau) => {
                            let a = b.and(t, x, y);
                            Some(b.or(t, vec![a]))
                        }
                        _ => None,
                    };
                    v.push(g);
                }
            }
        }
        for c in node.children() {
            remaining_parents[c] -= 1;
            if remaining_parents[c] == 0 {
                gates[c] = Vec::new();
            }
        }
        let live = v.iter().flatten().count();
        gates[i] = v;
        budget.check("compile", live, b.len())?;
    }

    let root = nice.root();
    let out = match gates[root][0] {
        Some(g) => g,
        None if vt.is_leaf(at[root]) => b.constant(at[root], false),
        None => b.or(at[root], Vec::new()),
    };
    Ok(b.finish(BTreeMap::from([(OUT_MAIN.into(), out)]), true))
}

fn position(bag: &[Var], var: Var) -> Result<usize> {
    bag.binary_search(&var)
        .map_err(|_| Error::InvalidDecomposition(format!("variable {var} missing from bag")))
}

/// For each clause, the bag positions of its positive and negative literals.
fn clause_masks(f: &Cnf, clauses: &[usize], bag: &[Var]) -> Result<Vec<(usize, usize)>> {
    clauses
        .iter()
        .map(|&ci| {
            let mut pos = 0;
            let mut neg = 0;
            for lit in f.clauses()[ci].lits() {
                let bit = 1 << position(bag, lit.var())?;
                if lit.is_positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            Ok((pos, neg))
        })
        .collect()
}
