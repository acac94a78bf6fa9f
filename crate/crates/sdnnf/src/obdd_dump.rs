//! Human-readable OBDD dump for debugging. Not meant to be parsed back.
//!
//! ```text
//! obdd <nodes> <vars>
//! order <v1> ... <vn>
//! N <id> <var> <lo> <hi>
//! root <edge>
//! ```
//!
//! Edges are node ids or the sinks `F` and `T`.

use std::fmt::Write;

use sdnnf_core::obdd::{Edge, Obdd};

fn edge(e: Edge) -> String {
    match e {
        Edge::False => "F".into(),
        Edge::True => "T".into(),
        Edge::Node(i) => i.to_string(),
    }
}

pub fn dump_obdd(b: &Obdd) -> String {
    let mut out = format!("obdd {} {}\norder", b.len(), b.order().len());
    for v in b.order() {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    for (i, u) in b.nodes().iter().enumerate() {
        let _ = writeln!(out, "N {i} {} {} {}", b.order()[u.level], edge(u.lo), edge(u.hi));
    }
    let _ = writeln!(out, "root {}", edge(b.root()));
    out
}
