//! Line-oriented text formats for vtrees and circuits.
//!
//! Vtree:
//!
//! ```text
//! vtree <node-count>
//! L <id> <var>
//! U <id>
//! I <id> <left> <right>
//! ```
//!
//! The last line names the root. Circuit, over a vtree given separately:
//!
//! ```text
//! sdnnf <gate-count> <vtree-node-count>
//! L <id> <signed-lit> <vnode>
//! T <id> <vnode>
//! F <id> <vnode>
//! A <id> <c1> <c2> <vnode>
//! O <id> <k> <c1> ... <ck> <vnode>
//! out <name> <gate-id>
//! det <0|1>
//! ```
//!
//! `det` records the determinism flag and may be omitted, meaning `0`.

use std::collections::BTreeMap;
use std::fmt::Write;

use sdnnf_core::{Gate, Lit, StructuredCircuit, Vtree, VtreeNode};

use crate::{content_lines, token, FormatError, Result};

pub fn write_vtree(vt: &Vtree) -> String {
    let mut out = format!("vtree {}\n", vt.len());
    let ids = (0..vt.len()).filter(|&t| t != vt.root()).chain([vt.root()]);
    for t in ids {
        let _ = match vt.node(t) {
            VtreeNode::Leaf(Some(v)) => writeln!(out, "L {t} {v}"),
            VtreeNode::Leaf(None) => writeln!(out, "U {t}"),
            VtreeNode::Internal { left, right } => writeln!(out, "I {t} {left} {right}"),
        };
    }
    out
}

pub fn parse_vtree(text: &str) -> Result<Vtree> {
    let mut lines = content_lines(text);
    let (hl, ht) = lines.next().ok_or_else(|| FormatError::at(1, "missing `vtree` header"))?;
    let mut it = ht.split_whitespace();
    if it.next() != Some("vtree") {
        return Err(FormatError::at(hl, "expected `vtree <node-count>`"));
    }
    let n: usize = token(it.next(), hl, "node count")?;
    let mut nodes: Vec<Option<VtreeNode>> = vec![None; n];
    let mut root = None;
    for (line, text) in lines {
        let mut it = text.split_whitespace();
        let kind = it.next().unwrap_or_default();
        let id: usize = token(it.next(), line, "node id")?;
        if id >= n {
            return Err(FormatError::at(line, format!("node id {id} out of range")));
        }
        let node = match kind {
            "L" => VtreeNode::Leaf(Some(token(it.next(), line, "variable")?)),
            "U" => VtreeNode::Leaf(None),
            "I" => VtreeNode::Internal {
                left: token(it.next(), line, "left child")?,
                right: token(it.next(), line, "right child")?,
            },
            other => return Err(FormatError::at(line, format!("unknown vtree line `{other}`"))),
        };
        if it.next().is_some() {
            return Err(FormatError::at(line, "trailing tokens"));
        }
        if nodes[id].replace(node).is_some() {
            return Err(FormatError::at(line, format!("node {id} defined twice")));
        }
        root = Some(id);
    }
    let nodes = nodes
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.ok_or_else(|| FormatError::at(hl, format!("node {i} is never defined"))))
        .collect::<Result<Vec<_>>>()?;
    let root = root.ok_or_else(|| FormatError::at(hl, "vtree has no nodes"))?;
    Ok(Vtree::new(nodes, root)?)
}

pub fn write_circuit(c: &StructuredCircuit) -> String {
    let mut out = format!("sdnnf {} {}\n", c.len(), c.vtree().len());
    for (g, gate) in c.gates().iter().enumerate() {
        let t = c.home(g);
        let _ = match gate {
            Gate::Lit(l) => writeln!(out, "L {g} {} {t}", l.to_dimacs()),
            Gate::Const(true) => writeln!(out, "T {g} {t}"),
            Gate::Const(false) => writeln!(out, "F {g} {t}"),
            Gate::And(a, b) => writeln!(out, "A {g} {a} {b} {t}"),
            Gate::Or(ch) => {
                let _ = write!(out, "O {g} {}", ch.len());
                for x in ch {
                    let _ = write!(out, " {x}");
                }
                writeln!(out, " {t}")
            }
        };
    }
    for (name, g) in c.outputs() {
        let _ = writeln!(out, "out {name} {g}");
    }
    let _ = writeln!(out, "det {}", u8::from(c.is_deterministic()));
    out
}

pub fn parse_circuit(text: &str, vtree: &Vtree) -> Result<StructuredCircuit> {
    let mut lines = content_lines(text);
    let (hl, ht) = lines.next().ok_or_else(|| FormatError::at(1, "missing `sdnnf` header"))?;
    let mut it = ht.split_whitespace();
    if it.next() != Some("sdnnf") {
        return Err(FormatError::at(hl, "expected `sdnnf <gate-count> <vtree-node-count>`"));
    }
    let n: usize = token(it.next(), hl, "gate count")?;
    let vn: usize = token(it.next(), hl, "vtree node count")?;
    if vn != vtree.len() {
        return Err(FormatError::at(
            hl,
            format!("circuit expects {vn} vtree nodes but the vtree has {}", vtree.len()),
        ));
    }
    let mut gates: Vec<Option<(Gate, usize)>> = vec![None; n];
    let mut outputs = BTreeMap::new();
    let mut det = false;
    for (line, text) in lines {
        let mut it = text.split_whitespace();
        let kind = it.next().unwrap_or_default();
        match kind {
            "out" => {
                let name: String = token(it.next(), line, "output name")?;
                let g: usize = token(it.next(), line, "gate id")?;
                if outputs.insert(name.clone(), g).is_some() {
                    return Err(FormatError::at(line, format!("output `{name}` defined twice")));
                }
            }
            "det" => {
                det = match it.next() {
                    Some("0") => false,
                    Some("1") => true,
                    _ => return Err(FormatError::at(line, "expected `det 0` or `det 1`")),
                };
            }
            "L" | "T" | "F" | "A" | "O" => {
                let id: usize = token(it.next(), line, "gate id")?;
                if id >= n {
                    return Err(FormatError::at(line, format!("gate id {id} out of range")));
                }
                let gate = match kind {
                    "L" => {
                        let code: i64 = token(it.next(), line, "literal")?;
                        Gate::Lit(Lit::from_dimacs(code).ok_or_else(|| FormatError::at(line, "literal 0"))?)
                    }
                    "T" => Gate::Const(true),
                    "F" => Gate::Const(false),
                    "A" => Gate::And(token(it.next(), line, "input")?, token(it.next(), line, "input")?),
                    _ => {
                        let k: usize = token(it.next(), line, "fan-in")?;
                        let ch = (0..k)
                            .map(|_| token(it.next(), line, "input"))
                            .collect::<Result<Vec<usize>>>()?;
                        Gate::Or(ch)
                    }
                };
                let t: usize = token(it.next(), line, "vtree node")?;
                if gates[id].replace((gate, t)).is_some() {
                    return Err(FormatError::at(line, format!("gate {id} defined twice")));
                }
            }
            other => return Err(FormatError::at(line, format!("unknown circuit line `{other}`"))),
        }
        if it.next().is_some() {
            return Err(FormatError::at(line, "trailing tokens"));
        }
    }
    let mut gs = Vec::with_capacity(n);
    let mut homes = Vec::with_capacity(n);
    for (i, g) in gates.into_iter().enumerate() {
        let (g, t) = g.ok_or_else(|| FormatError::at(hl, format!("gate {i} is never defined")))?;
        gs.push(g);
        homes.push(t);
    }
    Ok(StructuredCircuit::from_parts(vtree.clone(), gs, homes, outputs, det)?)
}
