use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use super::{Assignment, CircuitBuilder, Gate, GateId, NodeId, StructuredCircuit, Vtree, VtreeBuilder, VtreeNode};
use crate::formula::Lit;
use crate::{Error, Result};

const NEG: u8 = 1;
const POS: u8 = 2;

/// What an old gate turns into once constants are folded away.
#[derive(Debug, Clone)]
enum Val {
    /// The gate's scope is empty.
    Const(bool),
    /// The gate sits (after collapsing) at a labeled leaf: a set of literals
    /// of that variable, `NEG | POS` meaning true and `0` false.
    Lits(u8),
    /// The gate sits at an internal node: the disjunction of these new And
    /// gates, empty meaning false.
    Terms(Vec<GateId>),
}

/// Removes unlabeled leaves from the vtree and folds the constants they hold
/// into the gates above, keeping the circuit complete and structured.
///
/// Subtrees without labeled leaves disappear and their parents are replaced
/// by the other child. When an output becomes a constant at the only
/// remaining leaf, a fresh unlabeled leaf is kept next to it so the output
/// can still be placed at an internal node.
pub fn remove_constant_leaves(c: &StructuredCircuit) -> Result<StructuredCircuit> {
    let vt = c.vtree();
    let mut nb = VtreeBuilder::new();
    let mut m: Vec<Option<NodeId>> = vec![None; vt.len()];
    for &t in vt.post_order() {
        m[t] = match vt.node(t) {
            VtreeNode::Leaf(Some(v)) => Some(nb.leaf(Some(v))),
            VtreeNode::Leaf(None) => None,
            VtreeNode::Internal { left, right } => match (m[left], m[right]) {
                (Some(a), Some(b)) => Some(nb.internal(a, b)),
                (a, None) => a,
                (None, b) => b,
            },
        };
    }
    for (g, gate) in c.gates().iter().enumerate() {
        let t = c.home(g);
        let ok = match gate {
            Gate::Lit(l) => vt.label(t) == Some(l.var()),
            Gate::Const(_) => vt.is_unlabeled_leaf(t),
            Gate::And(..) | Gate::Or(_) => !vt.is_leaf(t),
        };
        if !ok {
            return Err(Error::NotStructured(format!("gate {g} is misplaced")));
        }
    }
    match m[vt.root()] {
        Some(root) if nb.len() > 1 => {
            let new_vt = nb.finish(root)?;
            fold(c, &m, new_vt)
        }
        _ => fold_small(c, &m),
    }
}

/// Restricts the circuit to an assignment of some of its variables.
pub fn condition(c: &StructuredCircuit, a: &Assignment) -> Result<StructuredCircuit> {
    let vt = c.vtree();
    for (v, _) in a.iter() {
        if vt.leaf_of(v).is_none() {
            return Err(Error::UnknownVariable(v));
        }
    }
    let unlabeled = vt.unlabel(|v| a.get(v).is_some());
    let gates = c
        .gates()
        .iter()
        .map(|g| match g {
            Gate::Lit(l) => match a.get(l.var()) {
                Some(value) => Gate::Const(l.eval(value)),
                None => g.clone(),
            },
            other => other.clone(),
        })
        .collect();
    let conditioned = StructuredCircuit::from_parts(
        unlabeled,
        gates,
        c.homes().to_vec(),
        c.outputs().clone(),
        c.is_deterministic(),
    )?;
    remove_constant_leaves(&conditioned)
}

fn zero_at(vt: &Vtree, n: NodeId) -> Val {
    if vt.is_leaf(n) {
        Val::Lits(0)
    } else {
        Val::Terms(Vec::new())
    }
}

fn fold(c: &StructuredCircuit, m: &[Option<NodeId>], new_vt: Vtree) -> Result<StructuredCircuit> {
    let mut b = CircuitBuilder::new(new_vt.clone());
    let mut lit_gates: Vec<[Option<GateId>; 2]> = vec![[None; 2]; new_vt.len()];
    let mut or_memo: Vec<Option<GateId>> = vec![None; c.len()];
    let mut val: Vec<Val> = Vec::with_capacity(c.len());

    let lit_at = |b: &mut CircuitBuilder, lits: &mut Vec<[Option<GateId>; 2]>, n: NodeId, positive: bool| {
        let slot = &mut lits[n][usize::from(positive)];
        *slot.get_or_insert_with(|| {
            let var = new_vt.label(n).expect("labeled leaf");
            b.lit(n, Lit::new(var, positive))
        })
    };

    for (g, gate) in c.gates().iter().enumerate() {
        let t = c.home(g);
        let v = match gate {
            Gate::Lit(l) => Val::Lits(if l.is_positive() { POS } else { NEG }),
            Gate::Const(x) => Val::Const(*x),
            Gate::Or(ch) => match m[t] {
                None => Val::Const(ch.iter().any(|&x| matches!(val[x], Val::Const(true)))),
                Some(n) if new_vt.is_leaf(n) => Val::Lits(
                    ch.iter()
                        .map(|&x| match val[x] {
                            Val::Lits(s) => s,
                            _ => 0,
                        })
                        .fold(0, |a, s| a | s),
                ),
                Some(_) => {
                    let mut terms = Vec::new();
                    let mut seen = HashSet::new();
                    for &x in ch {
                        if let Val::Terms(ts) = &val[x] {
                            for &a in ts {
                                if seen.insert(a) {
                                    terms.push(a);
                                }
                            }
                        }
                    }
                    Val::Terms(terms)
                }
            },
            Gate::And(x, y) => {
                let (tx, ty) = (c.home(*x), c.home(*y));
                match (m[tx], m[ty]) {
                    (None, None) => Val::Const(
                        matches!(val[*x], Val::Const(true)) && matches!(val[*y], Val::Const(true)),
                    ),
                    (None, Some(n)) => match val[*x] {
                        Val::Const(true) => val[*y].clone(),
                        _ => zero_at(&new_vt, n),
                    },
                    (Some(n), None) => match val[*y] {
                        Val::Const(true) => val[*x].clone(),
                        _ => zero_at(&new_vt, n),
                    },
                    (Some(nx), Some(ny)) => {
                        let n = m[t].expect("both children have variables");
                        let mut sides: [Vec<GateId>; 2] = [Vec::new(), Vec::new()];
                        for (side, (&input, node)) in sides.iter_mut().zip([(x, nx), (y, ny)]) {
                            match &val[input] {
                                Val::Lits(s) => {
                                    for (bit, positive) in [(NEG, false), (POS, true)] {
                                        if s & bit != 0 {
                                            side.push(lit_at(&mut b, &mut lit_gates, node, positive));
                                        }
                                    }
                                }
                                Val::Terms(ts) if ts.is_empty() => {}
                                Val::Terms(ts) => {
                                    let id = match or_memo[input] {
                                        Some(id) => id,
                                        None => {
                                            let id = b.or(node, ts.clone());
                                            or_memo[input] = Some(id);
                                            id
                                        }
                                    };
                                    side.push(id);
                                }
                                Val::Const(_) => unreachable!("input scope is not empty"),
                            }
                        }
                        let mut terms = Vec::with_capacity(sides[0].len() * sides[1].len());
                        for &p in &sides[0] {
                            for &q in &sides[1] {
                                terms.push(b.and(n, p, q));
                            }
                        }
                        Val::Terms(terms)
                    }
                }
            }
        };
        val.push(v);
    }

    let mut outputs = BTreeMap::new();
    for (name, &g) in c.outputs() {
        let Some(n) = m[c.home(g)] else {
            return Err(Error::Unsupported(format!(
                "output {name} has no variables below it"
            )));
        };
        let id = match &val[g] {
            Val::Lits(s) if s.count_ones() == 1 => lit_at(&mut b, &mut lit_gates, n, *s == POS),
            Val::Lits(_) | Val::Const(_) => {
                return Err(Error::Unsupported(format!(
                    "output {name} is constant at a leaf below the root"
                )))
            }
            Val::Terms(ts) => match (c.gate(g), or_memo[g]) {
                (Gate::Or(_), Some(id)) => id,
                (Gate::And(..), _) if ts.len() == 1 => ts[0],
                _ => {
                    let id = b.or(n, ts.clone());
                    if c.gate(g).is_or() {
                        or_memo[g] = Some(id);
                    }
                    id
                }
            },
        };
        outputs.insert(name.clone(), id);
    }
    Ok(b.finish(outputs, c.is_deterministic()))
}

/// Folding when at most one labeled variable exists; every gate then
/// reduces to a constant or a literal set.
fn fold_small(c: &StructuredCircuit, m: &[Option<NodeId>]) -> Result<StructuredCircuit> {
    let var = c.vtree().vars().first().copied();
    let mut val: Vec<Val> = Vec::with_capacity(c.len());
    for (g, gate) in c.gates().iter().enumerate() {
        let v = match gate {
            Gate::Lit(l) => Val::Lits(if l.is_positive() { POS } else { NEG }),
            Gate::Const(x) => Val::Const(*x),
            Gate::And(x, y) => match (&val[*x], &val[*y]) {
                (Val::Const(p), Val::Const(q)) => Val::Const(*p && *q),
                (Val::Const(true), other) | (other, Val::Const(true)) => other.clone(),
                _ => zero_small(m[c.home(g)].is_some()),
            },
            Gate::Or(ch) => {
                if m[c.home(g)].is_some() {
                    Val::Lits(ch.iter().fold(0, |a, &x| match val[x] {
                        Val::Lits(s) => a | s,
                        _ => a,
                    }))
                } else {
                    Val::Const(ch.iter().any(|&x| matches!(val[x], Val::Const(true))))
                }
            }
        };
        val.push(v);
    }
    let mask = |v: &Val| match *v {
        Val::Const(true) => NEG | POS,
        Val::Const(false) => 0,
        Val::Lits(s) => s,
        Val::Terms(_) => unreachable!("no internal nodes remain"),
    };

    let Some(var) = var else {
        let vt = Vtree::new(vec![VtreeNode::Leaf(None)], 0)?;
        let mut b = CircuitBuilder::new(vt);
        let mut consts: [Option<GateId>; 2] = [None; 2];
        let mut outputs = BTreeMap::new();
        for (name, &g) in c.outputs() {
            let value = mask(&val[g]) != 0;
            let id = *consts[usize::from(value)].get_or_insert_with(|| b.constant(0, value));
            outputs.insert(name.clone(), id);
        }
        return Ok(b.finish(outputs, c.is_deterministic()));
    };

    let needs_wrap = c
        .outputs()
        .values()
        .any(|&g| mask(&val[g]).count_ones() != 1);
    let mut nb = VtreeBuilder::new();
    let leaf = nb.leaf(Some(var));
    let (root, unlabeled) = if needs_wrap {
        let u = nb.leaf(None);
        (nb.internal(leaf, u), u)
    } else {
        (leaf, leaf)
    };
    let new_vt = nb.finish(root)?;
    let mut b = CircuitBuilder::new(new_vt);
    let mut outputs: BTreeMap<String, GateId> = BTreeMap::new();
    let mut lits: [Option<GateId>; 2] = [None; 2];
    let mut wrapped: [Option<GateId>; 2] = [None; 2];
    for (name, &g) in c.outputs() {
        let s = mask(&val[g]);
        let id = if s.count_ones() == 1 {
            let positive = s == POS;
            *lits[usize::from(positive)].get_or_insert_with(|| b.lit(leaf, Lit::new(var, positive)))
        } else {
            let full = s != 0;
            match wrapped[usize::from(full)] {
                Some(id) => id,
                None => {
                    let id = if full {
                        let one = b.constant(unlabeled, true);
                        let mut ands = Vec::new();
                        for positive in [true, false] {
                            let x = *lits[usize::from(positive)]
                                .get_or_insert_with(|| b.lit(leaf, Lit::new(var, positive)));
                            ands.push(b.and(root, x, one));
                        }
                        b.or(root, ands)
                    } else {
                        b.or(root, Vec::new())
                    };
                    wrapped[usize::from(full)] = Some(id);
                    id
                }
            }
        };
        outputs.insert(name.clone(), id);
    }
    Ok(b.finish(outputs, c.is_deterministic()))
}

fn zero_small(has_var: bool) -> Val {
    if has_var {
        Val::Lits(0)
    } else {
        Val::Const(false)
    }
}
