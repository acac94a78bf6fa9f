//! PACE `.td` files: `s td <bags> <max-bag> <vertices>`, then `b <id> <v>...`
//! lines, then one `<i> <j>` line per tree edge. Bag ids are 1-based.

use std::collections::VecDeque;
use std::fmt::Write;

use sdnnf_core::treedec::TreeDecomposition;
use sdnnf_core::Var;

use crate::{content_lines, token, FormatError, Result};

pub fn write_td(td: &TreeDecomposition, num_vertices: u32) -> String {
    let mut out = format!("s td {} {} {}\n", td.len(), td.max_bag(), num_vertices);
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    for i in 0..td.len() {
        if let Some(p) = td.parent(i) {
            let _ = writeln!(out, "{} {}", p + 1, i + 1);
        }
    }
    out
}

/// Reads a decomposition rooted at bag 1 and returns it with the declared
/// vertex count.
pub fn parse_td(text: &str) -> Result<(TreeDecomposition, u32)> {
    let mut lines = content_lines(text);
    let (hl, ht) = lines.next().ok_or_else(|| FormatError::at(1, "missing `s td` header"))?;
    let mut it = ht.split_whitespace();
    if it.next() != Some("s") || it.next() != Some("td") {
        return Err(FormatError::at(hl, "expected `s td <bags> <max-bag> <vertices>`"));
    }
    let n: usize = token(it.next(), hl, "bag count")?;
    let _max_bag: usize = token(it.next(), hl, "bag size")?;
    let nv: u32 = token(it.next(), hl, "vertex count")?;
    if n == 0 {
        return Err(FormatError::at(hl, "decomposition has no bags"));
    }
    let mut bags: Vec<Option<Vec<Var>>> = vec![None; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = 0;
    let bag_id = |tok: Option<&str>, line: usize| -> Result<usize> {
        let id: usize = token(tok, line, "bag id")?;
        if id == 0 || id > n {
            return Err(FormatError::at(line, format!("bag id {id} out of range")));
        }
        Ok(id - 1)
    };
    for (line, text) in lines {
        let mut it = text.split_whitespace();
        if text.starts_with('b') {
            it.next();
            let id = bag_id(it.next(), line)?;
            let mut bag = Vec::new();
            for tok in it {
                let v: Var = token(Some(tok), line, "vertex")?;
                if v == 0 || v > nv {
                    return Err(FormatError::at(line, format!("vertex {v} out of range")));
                }
                bag.push(v);
            }
            if bags[id].replace(bag).is_some() {
                return Err(FormatError::at(line, format!("bag {} defined twice", id + 1)));
            }
        } else {
            let a = bag_id(it.next(), line)?;
            let b = bag_id(it.next(), line)?;
            if it.next().is_some() {
                return Err(FormatError::at(line, "trailing tokens"));
            }
            adj[a].push(b);
            adj[b].push(a);
            edges += 1;
        }
    }
    if edges + 1 != n {
        return Err(FormatError::at(hl, format!("{n} bags need {} edges, found {edges}", n - 1)));
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| FormatError::at(hl, format!("bag {} is never defined", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !std::mem::replace(&mut seen[w], true) {
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(FormatError::at(hl, "edges do not form a tree"));
    }
    Ok((TreeDecomposition::new(bags, parent)?, nv))
}
