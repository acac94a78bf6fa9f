use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{CircuitBuilder, Gate, GateId, StructuredCircuit};

const NONE: GateId = GateId::MAX;

/// Rebuilds the circuit node by node in post-order. At leaves, equal inputs
/// are merged. At internal nodes, And gates are keyed by the positions of
/// their inputs among the non-And gates of the two children, using a
/// `a₁ × a₂` scratch table (a hash map when the table would be sparse).
/// Or gates are never merged; their input lists lose duplicates.
pub(super) fn dedup_and_gates(c: &StructuredCircuit) -> StructuredCircuit {
    let vt = c.vtree();
    let mut b = CircuitBuilder::new(vt.clone());
    let mut map = vec![NONE; c.len()];
    // Position of each new non-And gate among the non-And gates of its node.
    let mut pos: Vec<usize> = Vec::with_capacity(c.len());
    let mut non_and = vec![0usize; vt.len()];
    let mut table: Vec<GateId> = Vec::new();
    let mut sparse: HashMap<(usize, usize), GateId> = HashMap::new();

    for &t in vt.post_order() {
        let gates = c.lambda(t);
        match vt.children(t) {
            None => {
                let mut seen: Vec<(&Gate, GateId)> = Vec::new();
                for &g in gates {
                    let gate = c.gate(g);
                    if let Some(&(_, id)) = seen.iter().find(|(k, _)| *k == gate) {
                        map[g] = id;
                        continue;
                    }
                    let id = match *gate {
                        Gate::Lit(l) => b.lit(t, l),
                        Gate::Const(v) => b.constant(t, v),
                        // Gates misplaced at a leaf are copied as they are.
                        Gate::And(x, y) => b.and(t, map[x], map[y]),
                        Gate::Or(ref ch) => b.or(t, ch.iter().map(|&x| map[x]).collect()),
                    };
                    seen.push((gate, id));
                    map[g] = id;
                    pos.push(non_and[t]);
                    non_and[t] += 1;
                }
            }
            Some((l, r)) => {
                let (a1, a2) = (non_and[l], non_and[r]);
                let ands = gates.iter().filter(|&&g| c.gate(g).is_and()).count();
                let dense = a1.saturating_mul(a2) <= 4 * ands + 64;
                if dense {
                    table.clear();
                    table.resize(a1 * a2, NONE);
                } else {
                    sparse.clear();
                }
                for &g in gates {
                    let Gate::And(x, y) = *c.gate(g) else { continue };
                    let (nx, ny) = (map[x], map[y]);
                    let (px, py) = (pos[nx], pos[ny]);
                    let slot = if dense {
                        &mut table[px * a2 + py]
                    } else {
                        sparse.entry((px, py)).or_insert(NONE)
                    };
                    if *slot == NONE {
                        *slot = b.and(t, nx, ny);
                        pos.push(NONE);
                    }
                    map[g] = *slot;
                }
                for &g in gates {
                    let Gate::Or(ch) = c.gate(g) else { continue };
                    let mut inputs: Vec<GateId> = Vec::with_capacity(ch.len());
                    for &x in ch {
                        let nx = map[x];
                        if !inputs.contains(&nx) {
                            inputs.push(nx);
                        }
                    }
                    map[g] = b.or(t, inputs);
                    pos.push(non_and[t]);
                    non_and[t] += 1;
                }
            }
        }
    }
    let outputs = c
        .outputs()
        .iter()
        .map(|(k, &g)| (k.clone(), map[g]))
        .collect();
    b.finish(outputs, c.is_deterministic())
}
