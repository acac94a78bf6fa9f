//! Boolean combinations of circuits over the same vtree.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::circuit::{Assignment, CircuitBuilder, Gate, GateId, StructuredCircuit, Vtree, VtreeNode};
use crate::formula::Lit;
use crate::project::{normalize_root, project};
use crate::{Error, Result, OUT_EXISTS, OUT_MAIN, OUT_NOT_EXISTS};

/// Renumbers the vtree of `c` to `target` when both are the same tree up to
/// node ids.
pub fn align_vtree(c: &StructuredCircuit, target: &Vtree) -> Result<StructuredCircuit> {
    let src = c.vtree();
    if src == target {
        return Ok(c.clone());
    }
    let mut map = vec![usize::MAX; src.len()];
    let mut stack = vec![(src.root(), target.root())];
    while let Some((s, t)) = stack.pop() {
        match (src.node(s), target.node(t)) {
            (VtreeNode::Leaf(a), VtreeNode::Leaf(b)) if a == b => map[s] = t,
            (VtreeNode::Internal { left: l1, right: r1 }, VtreeNode::Internal { left: l2, right: r2 }) => {
                map[s] = t;
                stack.push((l1, l2));
                stack.push((r1, r2));
            }
            _ => {
                return Err(Error::Unsupported(
                    "vtrees differ beyond node numbering".into(),
                ))
            }
        }
    }
    if src.len() != target.len() {
        return Err(Error::Unsupported("vtrees differ beyond node numbering".into()));
    }
    let homes = c.homes().iter().map(|&t| map[t]).collect();
    StructuredCircuit::from_parts(
        target.clone(),
        c.gates().to_vec(),
        homes,
        c.outputs().clone(),
        c.is_deterministic(),
    )
}

/// `D₁ ∧ D₂` as output `main`. Width is at most the product of the widths.
pub fn conjoin(c1: &StructuredCircuit, o1: &str, c2: &StructuredCircuit, o2: &str) -> Result<StructuredCircuit> {
    let det = c1.is_deterministic() && c2.is_deterministic();
    if let Some(var) = single_variable(c1, c2) {
        return leaf_combination(var, c1, o1, c2, o2, |a, b| a && b, det);
    }
    let c2 = align_or_mismatch(c2, c1.vtree())?;
    let vt = c1.vtree();
    let n1 = normalize_root(c1, o1)?;
    let n2 = normalize_root(&c2, o2)?;
    let roots = [(n1.output(OUT_MAIN)?, n2.output(OUT_MAIN)?)];
    let (mut b, made) = product(&n1, &n2, &roots);
    let out = made[0].unwrap_or_else(|| b.or(vt.root(), Vec::new()));
    let c = b.finish(BTreeMap::from([(OUT_MAIN.into(), out)]), det);
    let bound = n1.width().saturating_mul(n2.width());
    assert!(c.width() <= bound, "conjunction width {} exceeds {bound}", c.width());
    Ok(c)
}

/// `D₁ ∨ D₂` as output `main`, built as the disjoint union of
/// `D₁∧D₂`, `D₁∧¬D₂` and `¬D₁∧D₂`.
pub fn disjoin(c1: &StructuredCircuit, o1: &str, c2: &StructuredCircuit, o2: &str) -> Result<StructuredCircuit> {
    if let Some(var) = single_variable(c1, c2) {
        return leaf_combination(var, c1, o1, c2, o2, |a, b| a || b, true);
    }
    let c2 = align_or_mismatch(c2, c1.vtree())?;
    let d1 = project(c1, o1, &[])?;
    let d2 = align_or_mismatch(&project(&c2, o2, &[])?, d1.vtree())?;
    let vt = d1.vtree();
    let (a1, r1) = (d1.output(OUT_EXISTS)?, d1.output(OUT_NOT_EXISTS)?);
    let (a2, r2) = (d2.output(OUT_EXISTS)?, d2.output(OUT_NOT_EXISTS)?);
    let (mut b, made) = product(&d1, &d2, &[(a1, a2), (a1, r2), (r1, a2)]);
    let mut ands = Vec::new();
    for g in made.into_iter().flatten() {
        if let Gate::Or(ch) = b.gate(g) {
            ands.extend_from_slice(ch);
        }
    }
    let out = b.or(vt.root(), ands);
    let c = b.finish(BTreeMap::from([(OUT_MAIN.into(), out)]), true);
    let exponent = normalize_root(c1, o1)?.width() + normalize_root(&c2, o2)?.width();
    if exponent < usize::BITS as usize - 1 {
        let bound = (1usize << exponent) + 1;
        assert!(c.width() <= bound, "disjunction width {} exceeds {bound}", c.width());
    }
    Ok(c)
}

fn align_or_mismatch(c: &StructuredCircuit, target: &Vtree) -> Result<StructuredCircuit> {
    align_vtree(c, target).map_err(|_| Error::VtreeMismatch)
}

/// Product construction from the given root pairs. Pairs are discovered top
/// down and created in lexicographic order of their ids, which is a
/// topological order of the product. `None` marks a pair equivalent to false.
fn product(
    c1: &StructuredCircuit,
    c2: &StructuredCircuit,
    roots: &[(GateId, GateId)],
) -> (CircuitBuilder, Vec<Option<GateId>>) {
    let mut seen: HashSet<(GateId, GateId)> = HashSet::new();
    let mut stack: Vec<(GateId, GateId)> = roots.to_vec();
    let mut order: Vec<(GateId, GateId)> = Vec::new();
    while let Some((g1, g2)) = stack.pop() {
        if !seen.insert((g1, g2)) {
            continue;
        }
        order.push((g1, g2));
        match (c1.gate(g1), c2.gate(g2)) {
            (Gate::And(x1, y1), Gate::And(x2, y2)) => {
                stack.push((*x1, *x2));
                stack.push((*y1, *y2));
            }
            (Gate::Or(ch1), Gate::Or(ch2)) => {
                for &a in ch1 {
                    for &bb in ch2 {
                        stack.push((a, bb));
                    }
                }
            }
            _ => {}
        }
    }
    order.sort_unstable();
    let mut b = CircuitBuilder::new(c1.vtree().clone());
    let mut made: HashMap<(GateId, GateId), Option<GateId>> = HashMap::with_capacity(order.len());
    for (g1, g2) in order {
        let t = c1.home(g1);
        let value = match (c1.gate(g1), c2.gate(g2)) {
            (Gate::Lit(l1), Gate::Lit(l2)) => (l1 == l2).then(|| b.lit(t, *l1)),
            (Gate::Lit(l), Gate::Const(true)) | (Gate::Const(true), Gate::Lit(l)) => Some(b.lit(t, *l)),
            (Gate::Const(p), Gate::Const(q)) => (p & q).then(|| b.constant(t, true)),
            (Gate::And(x1, y1), Gate::And(x2, y2)) => match (made[&(*x1, *x2)], made[&(*y1, *y2)]) {
                (Some(x), Some(y)) => Some(b.and(t, x, y)),
                _ => None,
            },
            (Gate::Or(ch1), Gate::Or(ch2)) => {
                let mut inputs = Vec::new();
                for &a in ch1 {
                    for &bb in ch2 {
                        if let Some(g) = made[&(a, bb)] {
                            inputs.push(g);
                        }
                    }
                }
                (!inputs.is_empty()).then(|| b.or(t, inputs))
            }
            _ => None,
        };
        made.insert((g1, g2), value);
    }
    let out = roots.iter().map(|p| made[p]).collect();
    (b, out)
}

/// `Some(var)` when both circuits range over the same set of at most one
/// variable. Their vtrees may still differ in unlabeled leaves.
fn single_variable(c1: &StructuredCircuit, c2: &StructuredCircuit) -> Option<Option<crate::Var>> {
    let vars = c1.vtree().vars();
    (vars.len() <= 1 && vars == c2.vtree().vars()).then(|| vars.first().copied())
}

/// Combination of circuits over at most one variable, by evaluation.
fn leaf_combination(
    var: Option<crate::Var>,
    c1: &StructuredCircuit,
    o1: &str,
    c2: &StructuredCircuit,
    o2: &str,
    op: impl Fn(bool, bool) -> bool,
    det: bool,
) -> Result<StructuredCircuit> {
    let mut values = [false; 2];
    for (i, value) in values.iter_mut().enumerate() {
        let mut a = Assignment::new();
        if let Some(x) = var {
            a.set(x, i == 1);
        }
        *value = op(c1.evaluate(o1, &a)?, c2.evaluate(o2, &a)?);
    }
    leaf_function(var, values, det)
}

/// The function `x ↦ values[x]` over a single variable, or a constant when
/// `var` is `None`.
pub(crate) fn leaf_function(var: Option<crate::Var>, values: [bool; 2], det: bool) -> Result<StructuredCircuit> {
    let out = |g: GateId| BTreeMap::from([(OUT_MAIN.into(), g)]);
    let Some(x) = var else {
        let mut b = CircuitBuilder::new(Vtree::new(vec![VtreeNode::Leaf(None)], 0)?);
        let g = b.constant(0, values[0]);
        let o = out(g);
        return Ok(b.finish(o, det));
    };
    if values[0] != values[1] {
        let mut b = CircuitBuilder::new(Vtree::new(vec![VtreeNode::Leaf(Some(x))], 0)?);
        let g = b.lit(0, Lit::new(x, values[1]));
        let o = out(g);
        return Ok(b.finish(o, det));
    }
    let vt = Vtree::new(
        vec![
            VtreeNode::Leaf(Some(x)),
            VtreeNode::Leaf(None),
            VtreeNode::Internal { left: 0, right: 1 },
        ],
        2,
    )?;
    let mut b = CircuitBuilder::new(vt);
    let g = if values[0] {
        let one = b.constant(1, true);
        let p = b.lit(0, Lit::pos(x));
        let n = b.lit(0, Lit::neg(x));
        let a1 = b.and(2, p, one);
        let a2 = b.and(2, n, one);
        b.or(2, vec![a1, a2])
    } else {
        b.or(2, Vec::new())
    };
    let o = out(g);
    Ok(b.finish(o, det))
}
