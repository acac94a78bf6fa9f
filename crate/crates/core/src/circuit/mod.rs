//! Complete structured DNNF circuits over a (possibly extended) vtree.
//!
//! Every gate is placed at a vtree node, its *home*. Gates are stored in
//! topological order: the inputs of a gate always have smaller ids.

mod check;
mod constants;
mod count;
mod dedup;
mod vtree;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::TruthTable;
use crate::formula::{Lit, Var};
use crate::{Error, Result};

pub use check::{and_gate_bound, check_determinism_bruteforce, AndBound};
pub use constants::{condition, remove_constant_leaves};
pub use vtree::{NodeId, Vtree, VtreeBuilder, VtreeNode};

/// Index of a gate inside a circuit.
pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Lit(Lit),
    Const(bool),
    /// Binary conjunction, the first input homed at the left child.
    And(GateId, GateId),
    /// Disjunction over And gates at the same node; empty means false.
    Or(Vec<GateId>),
}

impl Gate {
    pub fn is_and(&self) -> bool {
        matches!(self, Gate::And(..))
    }

    pub fn is_or(&self) -> bool {
        matches!(self, Gate::Or(_))
    }

    pub fn inputs(&self) -> impl Iterator<Item = GateId> + '_ {
        let (pair, list): ([Option<GateId>; 2], &[GateId]) = match self {
            Gate::And(a, b) => ([Some(*a), Some(*b)], &[]),
            Gate::Or(ch) => ([None, None], ch),
            _ => ([None, None], &[]),
        };
        pair.into_iter().flatten().chain(list.iter().copied())
    }
}

/// A structured circuit with named outputs.
#[derive(Debug, Clone)]
pub struct StructuredCircuit {
    vtree: Vtree,
    gates: Vec<Gate>,
    homes: Vec<NodeId>,
    lambda: Vec<Vec<GateId>>,
    outputs: BTreeMap<String, GateId>,
    deterministic: bool,
}

impl StructuredCircuit {
    /// Assembles a circuit from raw parts, checking ids and topological
    /// order. Structuredness is checked separately.
    pub fn from_parts(
        vtree: Vtree,
        gates: Vec<Gate>,
        homes: Vec<NodeId>,
        outputs: BTreeMap<String, GateId>,
        deterministic: bool,
    ) -> Result<Self> {
        if gates.len() != homes.len() {
            return Err(Error::NotStructured("gate and home counts differ".into()));
        }
        for (g, gate) in gates.iter().enumerate() {
            if homes[g] >= vtree.len() {
                return Err(Error::NotStructured(alloc::format!(
                    "gate {g} is placed at missing node {}",
                    homes[g]
                )));
            }
            let ok = match gate {
                Gate::And(a, b) => *a < g && *b < g,
                Gate::Or(ch) => ch.iter().all(|&c| c < g),
                _ => true,
            };
            if !ok {
                return Err(Error::NotStructured(alloc::format!(
                    "gate {g} has an input that is not defined before it"
                )));
            }
        }
        for (name, &g) in &outputs {
            if g >= gates.len() {
                return Err(Error::NotStructured(alloc::format!(
                    "output {name} refers to missing gate {g}"
                )));
            }
        }
        let mut lambda = vec![Vec::new(); vtree.len()];
        for (g, &t) in homes.iter().enumerate() {
            lambda[t].push(g);
        }
        Ok(StructuredCircuit {
            vtree,
            gates,
            homes,
            lambda,
            outputs,
            deterministic,
        })
    }

    pub fn vtree(&self) -> &Vtree {
        &self.vtree
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g]
    }

    pub fn homes(&self) -> &[NodeId] {
        &self.homes
    }

    pub fn home(&self, g: GateId) -> NodeId {
        self.homes[g]
    }

    /// Gates placed at `t`, ascending.
    pub fn lambda(&self, t: NodeId) -> &[GateId] {
        &self.lambda[t]
    }

    pub fn outputs(&self) -> &BTreeMap<String, GateId> {
        &self.outputs
    }

    pub fn output(&self, name: &str) -> Result<GateId> {
        self.outputs
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingOutput(name.into()))
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub(crate) fn set_deterministic(&mut self, value: bool) {
        self.deterministic = value;
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Maximum number of Or gates placed at a single vtree node.
    pub fn width(&self) -> usize {
        self.lambda
            .iter()
            .map(|gs| gs.iter().filter(|&&g| self.gates[g].is_or()).count())
            .max()
            .unwrap_or(0)
    }

    /// Number of Or gates at every node.
    pub fn or_counts(&self) -> Vec<usize> {
        self.lambda
            .iter()
            .map(|gs| gs.iter().filter(|&&g| self.gates[g].is_or()).count())
            .collect()
    }

    /// Keeps only the outputs in `names`, renaming them as given, and drops
    /// unreachable gates.
    pub fn select_outputs(&self, names: &[(&str, &str)]) -> Result<StructuredCircuit> {
        let mut outputs = BTreeMap::new();
        for &(from, to) in names {
            outputs.insert(String::from(to), self.output(from)?);
        }
        Ok(self.with_outputs(outputs))
    }

    pub(crate) fn with_outputs(&self, outputs: BTreeMap<String, GateId>) -> StructuredCircuit {
        let b = CircuitBuilder {
            vtree: self.vtree.clone(),
            gates: self.gates.clone(),
            homes: self.homes.clone(),
        };
        b.finish(outputs, self.deterministic)
    }

    /// Evaluates an output. Every labeled variable must be assigned.
    pub fn evaluate(&self, output: &str, a: &Assignment) -> Result<bool> {
        let out = self.output(output)?;
        for v in self.vtree.vars() {
            if a.get(v).is_none() {
                return Err(Error::Unassigned(v));
            }
        }
        let mut value = vec![false; out + 1];
        for g in 0..=out {
            value[g] = match &self.gates[g] {
                Gate::Lit(l) => l.eval(a.get(l.var()).expect("checked above")),
                Gate::Const(b) => *b,
                Gate::And(x, y) => value[*x] && value[*y],
                Gate::Or(ch) => ch.iter().any(|&c| value[c]),
            };
        }
        Ok(value[out])
    }

    /// Truth table of an output over variables `1..=num_vars`.
    pub fn truth_table(&self, output: &str, num_vars: u32) -> Result<TruthTable> {
        let out = self.output(output)?;
        if let Some(&v) = self.vtree.vars().iter().find(|&&v| v > num_vars) {
            return Err(Error::UnknownVariable(v));
        }
        let tables = self.gate_tables(num_vars, |v| v - 1, out)?;
        Ok(tables.into_iter().nth(out).expect("output table computed"))
    }

    /// Truth tables of gates `0..=last`, with variable `v` read from bit
    /// `index(v)` of the assignment index.
    pub(crate) fn gate_tables(
        &self,
        num_vars: u32,
        index: impl Fn(Var) -> u32,
        last: GateId,
    ) -> Result<Vec<TruthTable>> {
        const LIMIT: u32 = 24;
        if num_vars > LIMIT {
            return Err(Error::TooManyVariables {
                count: num_vars as usize,
                limit: LIMIT as usize,
            });
        }
        let mut tables: Vec<TruthTable> = Vec::with_capacity(last + 1);
        for g in 0..=last {
            let t = match &self.gates[g] {
                Gate::Lit(l) => TruthTable::literal(num_vars, index(l.var()) + 1, l.is_positive()),
                Gate::Const(true) => TruthTable::ones(num_vars),
                Gate::Const(false) => TruthTable::zeros(num_vars),
                Gate::And(x, y) => tables[*x].and(&tables[*y]),
                Gate::Or(ch) => {
                    let mut acc = TruthTable::zeros(num_vars);
                    for &c in ch {
                        for (w, &cw) in acc.words_mut().iter_mut().zip(tables[c].words()) {
                            *w |= cw;
                        }
                    }
                    acc
                }
            };
            tables.push(t);
        }
        Ok(tables)
    }

    /// Model count of an output over all labeled variables of the vtree.
    pub fn count_models(&self, output: &str) -> Result<num_bigint::BigUint> {
        count::count_models(self, self.output(output)?)
    }

    /// Checks the structuredness rules, reporting the first violation.
    pub fn check_structuredness(&self) -> Result<()> {
        check::check_structuredness(self)
    }

    /// Merges And gates with equal inputs and duplicate inputs at leaves.
    pub fn dedup_and_gates(&self) -> StructuredCircuit {
        dedup::dedup_and_gates(self)
    }
}

/// Appends gates in topological order and compacts on `finish`.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    vtree: Vtree,
    gates: Vec<Gate>,
    homes: Vec<NodeId>,
}

impl CircuitBuilder {
    pub fn new(vtree: Vtree) -> Self {
        CircuitBuilder {
            vtree,
            gates: Vec::new(),
            homes: Vec::new(),
        }
    }

    pub fn vtree(&self) -> &Vtree {
        &self.vtree
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn home(&self, g: GateId) -> NodeId {
        self.homes[g]
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g]
    }

    fn push(&mut self, node: NodeId, gate: Gate) -> GateId {
        self.gates.push(gate);
        self.homes.push(node);
        self.gates.len() - 1
    }

    pub fn lit(&mut self, node: NodeId, lit: Lit) -> GateId {
        self.push(node, Gate::Lit(lit))
    }

    pub fn constant(&mut self, node: NodeId, value: bool) -> GateId {
        self.push(node, Gate::Const(value))
    }

    /// And gate at `node`; the inputs are ordered to match the children.
    pub fn and(&mut self, node: NodeId, a: GateId, b: GateId) -> GateId {
        let swap = match self.vtree.children(node) {
            Some((_, right)) => self.homes[a] == right,
            None => false,
        };
        let gate = if swap { Gate::And(b, a) } else { Gate::And(a, b) };
        self.push(node, gate)
    }

    pub fn or(&mut self, node: NodeId, inputs: Vec<GateId>) -> GateId {
        self.push(node, Gate::Or(inputs))
    }

    /// Drops gates unreachable from the outputs and renumbers the rest,
    /// keeping their relative order.
    pub fn finish(self, outputs: BTreeMap<String, GateId>, deterministic: bool) -> StructuredCircuit {
        let n = self.gates.len();
        let mut reach = vec![false; n];
        for &g in outputs.values() {
            reach[g] = true;
        }
        for g in (0..n).rev() {
            if !reach[g] {
                continue;
            }
            match &self.gates[g] {
                Gate::And(a, b) => {
                    reach[*a] = true;
                    reach[*b] = true;
                }
                Gate::Or(ch) => ch.iter().for_each(|&c| reach[c] = true),
                _ => {}
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut gates = Vec::new();
        let mut homes = Vec::new();
        for (g, gate) in self.gates.into_iter().enumerate() {
            if !reach[g] {
                continue;
            }
            map[g] = gates.len();
            gates.push(match gate {
                Gate::And(a, b) => Gate::And(map[a], map[b]),
                Gate::Or(ch) => Gate::Or(ch.into_iter().map(|c| map[c]).collect()),
                other => other,
            });
            homes.push(self.homes[g]);
        }
        let outputs = outputs.into_iter().map(|(k, g)| (k, map[g])).collect();
        StructuredCircuit::from_parts(self.vtree, gates, homes, outputs, deterministic)
            .expect("builder output is topologically ordered")
    }
}

/// A partial assignment indexed by variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    /// Assignment to `1..=num_vars` in which variable `v` takes bit `v - 1`
    /// of `bits`.
    pub fn from_bits(num_vars: u32, bits: u64) -> Self {
        let mut a = Assignment::new();
        for v in 1..=num_vars {
            a.set(v, (bits >> (v - 1)) & 1 == 1);
        }
        a
    }

    pub fn set(&mut self, var: Var, value: bool) {
        let i = var as usize;
        if i >= self.values.len() {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(value);
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(var as usize).copied().flatten()
    }

    /// Assigned variables with their values, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|b| (v as Var, b)))
    }
}

impl FromIterator<(Var, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, bool)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (v, b) in iter {
            a.set(v, b);
        }
        a
    }
}
