//! Clause placement for compilation.
//!
//! Every occurrence of a variable in a clause is a cell linked into two lists:
//! the clauses of that variable and the variables of that clause. Deleting the
//! clauses of a variable unlinks all their cells, so each cell is touched a
//! constant number of times overall.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::{Cnf, Var};
use crate::treedec::{NiceKind, NiceTreeDecomposition};
use crate::{Error, Result};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ClauseIndex {
    cell_clause: Vec<u32>,
    cell_var: Vec<Var>,
    var_prev: Vec<u32>,
    var_next: Vec<u32>,
    clause_next: Vec<u32>,
    var_head: Vec<u32>,
    clause_head: Vec<u32>,
    alive: Vec<bool>,
    remaining: usize,
}

impl ClauseIndex {
    /// Indexes every non-empty, non-tautological clause of `f`.
    pub fn new(f: &Cnf) -> Self {
        let mut ix = ClauseIndex {
            cell_clause: Vec::with_capacity(f.size()),
            cell_var: Vec::with_capacity(f.size()),
            var_prev: Vec::with_capacity(f.size()),
            var_next: Vec::with_capacity(f.size()),
            clause_next: Vec::with_capacity(f.size()),
            var_head: vec![NIL; f.num_vars() as usize + 1],
            clause_head: vec![NIL; f.clauses().len()],
            alive: vec![false; f.clauses().len()],
            remaining: 0,
        };
        for (ci, clause) in f.clauses().iter().enumerate() {
            if clause.is_empty() || clause.is_tautology() {
                continue;
            }
            ix.alive[ci] = true;
            ix.remaining += 1;
            for lit in clause.lits() {
                let cell = ix.cell_clause.len() as u32;
                let v = lit.var();
                ix.cell_clause.push(ci as u32);
                ix.cell_var.push(v);
                ix.clause_next.push(ix.clause_head[ci]);
                ix.clause_head[ci] = cell;
                let head = ix.var_head[v as usize];
                ix.var_prev.push(NIL);
                ix.var_next.push(head);
                if head != NIL {
                    ix.var_prev[head as usize] = cell;
                }
                ix.var_head[v as usize] = cell;
            }
        }
        ix
    }

    /// Number of clauses still indexed.
    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Removes and returns (ascending) every remaining clause containing `x`.
    pub fn delete_by_variable(&mut self, x: Var) -> Vec<usize> {
        let mut taken = Vec::new();
        if x as usize >= self.var_head.len() {
            return taken;
        }
        while self.var_head[x as usize] != NIL {
            let cell = self.var_head[x as usize] as usize;
            let ci = self.cell_clause[cell] as usize;
            debug_assert!(self.alive[ci]);
            self.alive[ci] = false;
            self.remaining -= 1;
            taken.push(ci);
            let mut c = self.clause_head[ci];
            while c != NIL {
                self.unlink(c as usize);
                c = self.clause_next[c as usize];
            }
        }
        taken.sort_unstable();
        taken
    }

    fn unlink(&mut self, cell: usize) {
        let v = self.cell_var[cell] as usize;
        let (prev, next) = (self.var_prev[cell], self.var_next[cell]);
        if prev == NIL {
            self.var_head[v] = next;
        } else {
            self.var_next[prev as usize] = next;
        }
        if next != NIL {
            self.var_prev[next as usize] = prev;
        }
    }
}

/// Assigns each clause to a node of the nice decomposition whose bag covers
/// it: a clause goes to the child of the first forget node (in post-order)
/// of one of its variables. Empty clauses go to the root; tautologies are
/// dropped.
pub fn assign_clauses(f: &Cnf, nice: &NiceTreeDecomposition) -> Result<Vec<Vec<usize>>> {
    let mut index = ClauseIndex::new(f);
    let mut assigned = vec![Vec::new(); nice.len()];
    for node in nice.nodes() {
        if let NiceKind::Forget { var, child } = node.kind {
            assigned[child].extend(index.delete_by_variable(var));
        }
    }
    if index.remaining() > 0 {
        return Err(Error::InvalidDecomposition(format!(
            "{} clauses mention variables that are never forgotten",
            index.remaining()
        )));
    }
    for (ci, clause) in f.clauses().iter().enumerate() {
        if clause.is_empty() {
            assigned[nice.root()].push(ci);
        }
    }
    Ok(assigned)
}
