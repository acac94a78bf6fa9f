//! CNF and QBF formulas and their primal graphs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A Boolean variable, numbered from 1.
pub type Var = u32;

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    var: Var,
    positive: bool,
}

impl Lit {
    /// Panics if `var` is zero.
    pub fn new(var: Var, positive: bool) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        Lit { var, positive }
    }

    pub fn pos(var: Var) -> Self {
        Lit::new(var, true)
    }

    pub fn neg(var: Var) -> Self {
        Lit::new(var, false)
    }

    /// Builds a literal from its signed DIMACS encoding. Returns `None` for 0.
    pub fn from_dimacs(code: i64) -> Option<Self> {
        if code == 0 || code.unsigned_abs() > u64::from(u32::MAX) {
            return None;
        }
        Some(Lit::new(code.unsigned_abs() as Var, code > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// Value of the literal when its variable is set to `value`.
    pub fn eval(self, value: bool) -> bool {
        value == self.positive
    }
}

impl core::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals.
///
/// Repeated literals are collapsed on construction. A clause that contains a
/// variable in both polarities keeps both literals and is flagged as a
/// tautology; every other clause mentions each variable at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    lits: Vec<Lit>,
    tautology: bool,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut out: Vec<Lit> = Vec::new();
        let mut tautology = false;
        for lit in lits {
            if out.contains(&lit) {
                continue;
            }
            if out.contains(&!lit) {
                tautology = true;
            }
            out.push(lit);
        }
        Clause {
            lits: out,
            tautology,
        }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    /// Number of literals.
    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        self.tautology
    }

    /// Distinct variables of the clause, ascending.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.lits.iter().map(|l| l.var()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Evaluates the clause under a total assignment given as a lookup.
    pub fn eval(&self, mut value: impl FnMut(Var) -> bool) -> bool {
        self.lits.iter().any(|l| l.eval(value(l.var())))
    }
}

/// A conjunction of clauses over variables `1..=num_vars`.
///
/// Declared variables that occur in no clause are genuine, unconstrained
/// variables: they take part in model counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(l) = c.lits().iter().find(|l| l.var() > num_vars) {
                return Err(Error::InvalidFormula(format!(
                    "clause {} mentions variable {} but only {} are declared",
                    i + 1,
                    l.var(),
                    num_vars
                )));
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    /// Convenience constructor from signed DIMACS literals.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i64]]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut lits = Vec::with_capacity(c.len());
            for &code in c.iter() {
                lits.push(
                    Lit::from_dimacs(code)
                        .ok_or_else(|| Error::InvalidFormula(format!("bad literal {code}")))?,
                );
            }
            out.push(Clause::new(lits));
        }
        Cnf::new(num_vars, out)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// `|F|`, the total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    /// Evaluates the formula; `value(v)` gives the value of variable `v`.
    pub fn eval(&self, mut value: impl FnMut(Var) -> bool) -> bool {
        self.clauses
            .iter()
            .all(|c| c.is_tautology() || c.eval(&mut value))
    }
}

/// Quantifier of a prefix block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }
}

/// One block `Q X` of a quantifier prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub quant: Quant,
    pub vars: Vec<Var>,
}

/// A prenex quantified CNF `Q_1 X_1 … Q_ℓ X_ℓ F` with possibly free variables.
///
/// Adjacent blocks always carry different quantifiers: same-quantifier blocks
/// handed to [`Qbf::new`] are merged. The innermost block may be universal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qbf {
    prefix: Vec<Block>,
    matrix: Cnf,
}

impl Qbf {
    pub fn new(blocks: impl IntoIterator<Item = (Quant, Vec<Var>)>, matrix: Cnf) -> Result<Self> {
        let mut seen = vec![false; matrix.num_vars() as usize + 1];
        let mut prefix: Vec<Block> = Vec::new();
        for (quant, vars) in blocks {
            if vars.is_empty() {
                return Err(Error::InvalidFormula("empty quantifier block".into()));
            }
            for &v in &vars {
                if v == 0 || v > matrix.num_vars() {
                    return Err(Error::InvalidFormula(format!(
                        "quantified variable {v} is not declared"
                    )));
                }
                if seen[v as usize] {
                    return Err(Error::InvalidFormula(format!(
                        "variable {v} is quantified twice"
                    )));
                }
                seen[v as usize] = true;
            }
            match prefix.last_mut() {
                Some(last) if last.quant == quant => last.vars.extend(vars),
                _ => prefix.push(Block { quant, vars }),
            }
        }
        Ok(Qbf { prefix, matrix })
    }

    pub fn prefix(&self) -> &[Block] {
        &self.prefix
    }

    pub fn matrix(&self) -> &Cnf {
        &self.matrix
    }

    /// Quantifier alternation `ℓ`, the number of blocks.
    pub fn alternation(&self) -> usize {
        self.prefix.len()
    }

    /// Declared variables bound by no block, ascending.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut bound = vec![false; self.matrix.num_vars() as usize + 1];
        for b in &self.prefix {
            for &v in &b.vars {
                bound[v as usize] = true;
            }
        }
        (1..=self.matrix.num_vars())
            .filter(|&v| !bound[v as usize])
            .collect()
    }
}

/// Undirected simple graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<Var>>,
}

impl Graph {
    pub fn new(num_vertices: u32) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); num_vertices as usize],
        }
    }

    pub fn num_vertices(&self) -> u32 {
        self.adj.len() as u32
    }

    pub fn vertices(&self) -> impl Iterator<Item = Var> {
        1..=self.num_vertices()
    }

    /// Self-loops are ignored.
    pub fn add_edge(&mut self, a: Var, b: Var) {
        if a == b {
            return;
        }
        self.adj[a as usize - 1].insert(b);
        self.adj[b as usize - 1].insert(a);
    }

    pub fn has_edge(&self, a: Var, b: Var) -> bool {
        self.adj[a as usize - 1].contains(&b)
    }

    pub fn neighbors(&self, v: Var) -> &BTreeSet<Var> {
        &self.adj[v as usize - 1]
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.vertices().flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }
}

/// Primal graph: one vertex per declared variable, an edge between two
/// variables whenever some clause contains both.
pub fn primal_graph(f: &Cnf) -> Graph {
    let mut g = Graph::new(f.num_vars());
    for c in f.clauses() {
        let vs = c.vars();
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}
