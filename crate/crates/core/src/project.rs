//! Existential projection of a complete structured d-DNNF.
//!
//! Fix a set `Z` of variables to project away. For a node `t` and an
//! assignment `τ` of `var(t) \ Z`, the *shape* of `τ` is the set of non-And
//! gates at `t` that some extension of `τ` to `var(t) ∩ Z` satisfies. Shapes
//! at a node partition the assignments, so one Or gate per realized shape
//! gives a deterministic circuit, and the shape at a parent depends only on
//! the shapes at its children. At the root only membership of the output
//! gate matters, which yields `∃Z D` and its complement side by side.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::bitset::BitSet;
use crate::circuit::{remove_constant_leaves, CircuitBuilder, Gate, GateId, NodeId, StructuredCircuit, Vtree, VtreeNode};
use crate::formula::{Lit, Var};
use crate::{Budget, Error, Result, OUT_EXISTS, OUT_MAIN, OUT_NOT_EXISTS};

/// Result of a projection together with the data needed to inspect it.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Circuit with outputs `exists` and `not_exists`.
    pub circuit: StructuredCircuit,
    /// The input restricted to the projected output, with the output as an
    /// Or gate at the root. Shape positions refer to this circuit.
    pub normalized: StructuredCircuit,
    /// Largest number of realized shapes at a node.
    pub max_shapes: usize,
    /// Number of child shape pairs combined, over all nodes.
    pub pairs: usize,
    /// Realized shapes per node of `normalized`, when requested. Bit `i`
    /// stands for the i-th non-And gate at the node, by ascending id.
    pub shapes: Option<Vec<Vec<BitSet>>>,
}

/// `∃Z D` and `¬∃Z D` as outputs `exists` and `not_exists`.
pub fn project(c: &StructuredCircuit, output: &str, z: &[Var]) -> Result<StructuredCircuit> {
    Ok(project_detailed(c, output, z, &Budget::UNLIMITED, false)?.circuit)
}

pub fn project_with_budget(
    c: &StructuredCircuit,
    output: &str,
    z: &[Var],
    budget: &Budget,
) -> Result<StructuredCircuit> {
    Ok(project_detailed(c, output, z, budget, false)?.circuit)
}

/// `¬D` as output `main`.
pub fn negate(c: &StructuredCircuit, output: &str) -> Result<StructuredCircuit> {
    project(c, output, &[])?.select_outputs(&[(OUT_NOT_EXISTS, OUT_MAIN)])
}

/// `∀Z D` and `¬∀Z D` as outputs `exists` and `not_exists`, using
/// `∀Z D = ¬∃Z ¬D`.
pub fn forall_project(c: &StructuredCircuit, output: &str, z: &[Var]) -> Result<StructuredCircuit> {
    let neg = negate(c, output)?;
    project(&neg, OUT_MAIN, z)?
        .select_outputs(&[(OUT_EXISTS, OUT_NOT_EXISTS), (OUT_NOT_EXISTS, OUT_EXISTS)])
}

/// `∀Z D` and `¬∀Z D` from a circuit already carrying `D` as `exists` and
/// `¬D` as `not_exists`: the negative side is projected and the names are
/// swapped.
pub fn forall_project_dual(c: &StructuredCircuit, z: &[Var], budget: &Budget) -> Result<StructuredCircuit> {
    c.output(OUT_EXISTS)?;
    project_with_budget(c, OUT_NOT_EXISTS, z, budget)?
        .select_outputs(&[(OUT_EXISTS, OUT_NOT_EXISTS), (OUT_NOT_EXISTS, OUT_EXISTS)])
}

/// Restricts the circuit to `output` and makes it an Or gate at the root.
pub fn normalize_root(c: &StructuredCircuit, output: &str) -> Result<StructuredCircuit> {
    let o = c.output(output)?;
    let restricted = c.select_outputs(&[(output, OUT_MAIN)])?;
    let vt = c.vtree();
    let root = vt.root();
    if c.home(o) != root {
        return Err(Error::Unsupported(format!(
            "output {output} is not placed at the vtree root"
        )));
    }
    if !c.gate(o).is_and() {
        return Ok(restricted);
    }
    let mut b = CircuitBuilder::new(vt.clone());
    for (g, gate) in restricted.gates().iter().enumerate() {
        let t = restricted.home(g);
        match *gate {
            Gate::Lit(l) => b.lit(t, l),
            Gate::Const(v) => b.constant(t, v),
            Gate::And(x, y) => b.and(t, x, y),
            Gate::Or(ref ch) => b.or(t, ch.clone()),
        };
    }
    let a = restricted.output(OUT_MAIN)?;
    let o = b.or(root, vec![a]);
    Ok(b.finish(BTreeMap::from([(OUT_MAIN.into(), o)]), restricted.is_deterministic()))
}

/// Non-And gates at `t`, ascending.
pub fn non_and_gates(c: &StructuredCircuit, t: NodeId) -> Vec<GateId> {
    c.lambda(t).iter().copied().filter(|&g| !c.gate(g).is_and()).collect()
}

/// Shape at internal node `t` obtained from shape `s1` at the left child and
/// `s2` at the right child.
pub fn join_shapes(c: &StructuredCircuit, t: NodeId, s1: &BitSet, s2: &BitSet) -> BitSet {
    let (l, r) = c.vtree().children(t).expect("join at an internal node");
    let pos_l = positions(c, l);
    let pos_r = positions(c, r);
    let mut out = BitSet::new();
    for (i, g) in non_and_gates(c, t).into_iter().enumerate() {
        if let Gate::Or(ch) = c.gate(g) {
            let hit = ch.iter().any(|&a| match *c.gate(a) {
                Gate::And(x, y) => s1.contains(pos_l[&x]) && s2.contains(pos_r[&y]),
                _ => false,
            });
            if hit {
                out.insert(i);
            }
        }
    }
    out
}

fn positions(c: &StructuredCircuit, t: NodeId) -> BTreeMap<GateId, usize> {
    non_and_gates(c, t).into_iter().enumerate().map(|(i, g)| (g, i)).collect()
}

#[derive(Default)]
struct NodeShapes {
    shapes: Vec<BitSet>,
    /// New gates representing each shape, usable as And inputs.
    options: Vec<Vec<GateId>>,
    /// For each shape, the And gates at the parent it can feed, as a word
    /// mask. Filled in when the parent is processed.
    feeds: Vec<Vec<u64>>,
}

pub fn project_detailed(
    c: &StructuredCircuit,
    output: &str,
    z: &[Var],
    budget: &Budget,
    keep_shapes: bool,
) -> Result<Projection> {
    for &v in z {
        if c.vtree().leaf_of(v).is_none() {
            return Err(Error::UnknownVariable(v));
        }
    }
    let n = normalize_root(c, output)?;
    let vt = n.vtree();
    let mut zmask = BitSet::new();
    for &v in z {
        zmask.insert(v as usize);
    }
    let in_z = |v: Var| zmask.contains(v as usize);
    let new_vt = vt.unlabel(in_z);
    let root = vt.root();
    let o = n.output(OUT_MAIN)?;

    if vt.is_leaf(root) {
        let circuit = project_leaf_root(&n, o, &in_z)?;
        return Ok(Projection {
            circuit,
            max_shapes: 1,
            pairs: 0,
            shapes: keep_shapes.then(|| vec![vec![BitSet::from_indices([0])]]),
            normalized: n,
        });
    }

    let mut b = CircuitBuilder::new(new_vt.clone());
    let mut per_node: Vec<NodeShapes> = (0..vt.len()).map(|_| NodeShapes::default()).collect();
    let mut kept: Option<Vec<Vec<BitSet>>> = keep_shapes.then(|| vec![Vec::new(); vt.len()]);
    let mut pos = vec![usize::MAX; n.len()];
    let mut max_shapes = 0;
    let mut pairs = 0;
    let mut outputs = BTreeMap::new();

    for &t in vt.post_order() {
        let o_t = non_and_gates(&n, t);
        for (i, &g) in o_t.iter().enumerate() {
            pos[g] = i;
        }
        let mut ns = NodeShapes::default();
        match vt.node(t) {
            VtreeNode::Leaf(Some(x)) if !in_z(x) => {
                let shape_of = |value: bool| {
                    BitSet::from_indices(o_t.iter().enumerate().filter_map(|(i, &g)| match n.gate(g) {
                        Gate::Lit(l) if l.eval(value) => Some(i),
                        _ => None,
                    }))
                };
                let (s0, s1) = (shape_of(false), shape_of(true));
                let neg = b.lit(t, Lit::neg(x));
                let posl = b.lit(t, Lit::pos(x));
                if s0 == s1 {
                    ns.shapes.push(s0);
                    ns.options.push(vec![neg, posl]);
                } else {
                    ns.shapes.push(s0);
                    ns.options.push(vec![neg]);
                    ns.shapes.push(s1);
                    ns.options.push(vec![posl]);
                }
            }
            VtreeNode::Leaf(label) => {
                let shape = BitSet::from_indices(o_t.iter().enumerate().filter_map(|(i, &g)| {
                    let sat = match n.gate(g) {
                        Gate::Lit(_) => label.is_some(),
                        Gate::Const(v) => *v,
                        _ => false,
                    };
                    sat.then_some(i)
                }));
                let one = b.constant(t, true);
                ns.shapes.push(shape);
                ns.options.push(vec![one]);
            }
            VtreeNode::Internal { left, right } => {
                // And gates at t, each with its Or parents (by position).
                let mut ands: Vec<(usize, usize)> = Vec::new();
                let mut and_parents: Vec<Vec<usize>> = Vec::new();
                let mut and_index: HashMap<GateId, usize> = HashMap::new();
                for (oi, &g) in o_t.iter().enumerate() {
                    let Gate::Or(ch) = n.gate(g) else { continue };
                    for &a in ch {
                        let idx = *and_index.entry(a).or_insert_with(|| {
                            let Gate::And(x, y) = *n.gate(a) else {
                                unreachable!("Or inputs are And gates")
                            };
                            ands.push((pos[x], pos[y]));
                            and_parents.push(Vec::new());
                            ands.len() - 1
                        });
                        and_parents[idx].push(oi);
                    }
                }
                let words = ands.len().div_ceil(64).max(1);
                let mut lns = core::mem::take(&mut per_node[left]);
                let mut rns = core::mem::take(&mut per_node[right]);
                for (side, ns_side) in [(0, &mut lns), (1, &mut rns)] {
                    ns_side.feeds = ns_side
                        .shapes
                        .iter()
                        .map(|s| {
                            let mut m = vec![0u64; words];
                            for (ai, &(px, py)) in ands.iter().enumerate() {
                                let p = if side == 0 { px } else { py };
                                if s.contains(p) {
                                    m[ai / 64] |= 1 << (ai % 64);
                                }
                            }
                            m
                        })
                        .collect();
                }
                let is_root = t == root;
                let mut index: HashMap<BitSet, usize> = HashMap::new();
                let mut buckets: Vec<Vec<GateId>> = if is_root { vec![Vec::new(), Vec::new()] } else { Vec::new() };
                for i1 in 0..lns.shapes.len() {
                    for i2 in 0..rns.shapes.len() {
                        pairs += 1;
                        let mut joined = BitSet::new();
                        for (w, (&a, &bw)) in lns.feeds[i1].iter().zip(&rns.feeds[i2]).enumerate() {
                            let mut both = a & bw;
                            while both != 0 {
                                let ai = w * 64 + both.trailing_zeros() as usize;
                                both &= both - 1;
                                for &oi in &and_parents[ai] {
                                    joined.insert(oi);
                                }
                            }
                        }
                        let slot = if is_root {
                            usize::from(!joined.contains(pos[o]))
                        } else {
                            let next = index.len();
                            let slot = *index.entry(joined.clone()).or_insert(next);
                            if slot == next {
                                ns.shapes.push(joined);
                                buckets.push(Vec::new());
                            }
                            slot
                        };
                        for &p in &lns.options[i1] {
                            for &q in &rns.options[i2] {
                                let a = b.and(t, p, q);
                                buckets[slot].push(a);
                            }
                        }
                    }
                }
                if is_root {
                    let [ex, nex]: [Vec<GateId>; 2] = buckets.try_into().expect("two root buckets");
                    let ex = b.or(t, ex);
                    let nex = b.or(t, nex);
                    outputs.insert(OUT_EXISTS.into(), ex);
                    outputs.insert(OUT_NOT_EXISTS.into(), nex);
                    ns.shapes = vec![BitSet::from_indices([pos[o]]), BitSet::new()];
                } else {
                    for bucket in buckets {
                        let g = b.or(t, bucket);
                        ns.options.push(vec![g]);
                    }
                }
                budget.check("project", ns.shapes.len(), b.len())?;
            }
        }
        max_shapes = max_shapes.max(ns.shapes.len());
        if let Some(k) = kept.as_mut() {
            k[t] = ns.shapes.clone();
        }
        per_node[t] = ns;
    }

    let raw = b.finish(outputs, true);
    let mut circuit = remove_constant_leaves(&raw)?.dedup_and_gates();
    circuit.set_deterministic(true);
    let input_width = n.width();
    debug_assert!(input_width >= 1);
    if input_width < usize::BITS as usize {
        let bound = (1usize << input_width).max(2);
        assert!(
            circuit.width() <= bound,
            "projection width {} exceeds 2^{}",
            circuit.width(),
            input_width
        );
    }
    budget.check("project", circuit.width(), circuit.len())?;
    Ok(Projection {
        circuit,
        normalized: n,
        max_shapes,
        pairs,
        shapes: kept,
    })
}

/// Projection when the vtree is a single leaf holding the output.
fn project_leaf_root(n: &StructuredCircuit, o: GateId, in_z: &impl Fn(Var) -> bool) -> Result<StructuredCircuit> {
    let vt = n.vtree();
    let (exists, not_exists): (Gate, Gate) = match *n.gate(o) {
        Gate::Const(v) => (Gate::Const(v), Gate::Const(!v)),
        Gate::Lit(l) if in_z(l.var()) => (Gate::Const(true), Gate::Const(false)),
        Gate::Lit(l) => (Gate::Lit(l), Gate::Lit(!l)),
        _ => return Err(Error::NotStructured("gate other than an input at a leaf".into())),
    };
    let constant = matches!(exists, Gate::Const(_));
    let new_vt = if constant {
        Vtree::new(vec![VtreeNode::Leaf(None)], 0)?
    } else {
        vt.clone()
    };
    let mut b = CircuitBuilder::new(new_vt);
    let mut outputs = BTreeMap::new();
    for (name, gate) in [(OUT_EXISTS, exists), (OUT_NOT_EXISTS, not_exists)] {
        let g = match gate {
            Gate::Const(v) => b.constant(0, v),
            Gate::Lit(l) => b.lit(vt.root(), l),
            _ => unreachable!(),
        };
        outputs.insert(name.into(), g);
    }
    Ok(b.finish(outputs, true))
}
