//! Ordered binary decision diagrams with a subset-construction projection.
//!
//! An OBDD is *complete* when every path from the root tests every variable
//! of the order exactly once; its width is the largest number of nodes
//! testing the same variable.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::circuit::{Assignment, CircuitBuilder, GateId, StructuredCircuit, Vtree};
use crate::formula::{Cnf, Lit, Var};
use crate::{Error, Result, OUT_MAIN};

/// Target of an OBDD edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    False,
    True,
    Node(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObddNode {
    /// Position of the tested variable in the order.
    pub level: usize,
    pub lo: Edge,
    pub hi: Edge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obdd {
    order: Vec<Var>,
    nodes: Vec<ObddNode>,
    root: Edge,
}

/// Outcome of projecting an OBDD.
#[derive(Debug, Clone)]
pub struct ObddProjection {
    /// `∃Z B` over the order without `Z`.
    pub exists: Obdd,
    /// `¬∃Z B`, sharing the node structure of `exists`.
    pub not_exists: Obdd,
    /// For each node of the projected diagrams, the set of nodes of the
    /// (completed) input it stands for, ascending.
    pub subsets: Vec<Vec<usize>>,
    /// The completed input the subsets refer to.
    pub input: Obdd,
}

impl Obdd {
    pub fn new(order: Vec<Var>, nodes: Vec<ObddNode>, root: Edge) -> Result<Self> {
        let mut seen = order.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) || seen.first() == Some(&0) {
            return Err(Error::InvalidFormula("OBDD order repeats a variable or uses 0".into()));
        }
        let n = order.len();
        let level = |e: Edge, nodes: &[ObddNode]| match e {
            Edge::Node(i) => nodes.get(i).map(|u| u.level),
            _ => Some(n),
        };
        for (i, u) in nodes.iter().enumerate() {
            if u.level >= n {
                return Err(Error::InvalidFormula(alloc::format!("OBDD node {i} has level {} outside the order", u.level)));
            }
            for e in [u.lo, u.hi] {
                match level(e, &nodes) {
                    Some(l) if l > u.level => {}
                    _ => {
                        return Err(Error::InvalidFormula(alloc::format!(
                            "OBDD node {i} has a child that does not come later in the order"
                        )))
                    }
                }
            }
        }
        if level(root, &nodes).is_none() {
            return Err(Error::InvalidFormula("OBDD root is missing".into()));
        }
        Ok(Obdd { order, nodes, root })
    }

    pub fn order(&self) -> &[Var] {
        &self.order
    }

    pub fn nodes(&self) -> &[ObddNode] {
        &self.nodes
    }

    pub fn root(&self) -> Edge {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn level(&self, e: Edge) -> usize {
        match e {
            Edge::Node(i) => self.nodes[i].level,
            _ => self.order.len(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.level(self.root) == 0
            && self
                .nodes
                .iter()
                .all(|u| self.level(u.lo) == u.level + 1 && self.level(u.hi) == u.level + 1)
    }

    /// Largest number of nodes at one level.
    pub fn width(&self) -> usize {
        let mut per = vec![0usize; self.order.len()];
        for u in &self.nodes {
            per[u.level] += 1;
        }
        per.into_iter().max().unwrap_or(0)
    }

    /// Width counting only nodes reachable from the root.
    fn reachable_width(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        if let Edge::Node(i) = self.root {
            stack.push(i);
        }
        let mut per = vec![0usize; self.order.len()];
        while let Some(i) = stack.pop() {
            if core::mem::replace(&mut seen[i], true) {
                continue;
            }
            let u = self.nodes[i];
            per[u.level] += 1;
            for e in [u.lo, u.hi] {
                if let Edge::Node(j) = e {
                    stack.push(j);
                }
            }
        }
        per.into_iter().max().unwrap_or(0)
    }

    /// Nodes per level.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut per = vec![0usize; self.order.len()];
        for u in &self.nodes {
            per[u.level] += 1;
        }
        per
    }

    /// Equivalent complete OBDD, inserting nodes with equal children on
    /// edges that skip levels.
    pub fn complete(&self) -> Obdd {
        let mut nodes: Vec<ObddNode> = self.nodes.clone();
        let mut chain: HashMap<(Edge, usize), Edge> = HashMap::new();
        // Returns an edge reaching `target` that starts at level `from`.
        fn lift(
            nodes: &mut Vec<ObddNode>,
            chain: &mut HashMap<(Edge, usize), Edge>,
            target: Edge,
            target_level: usize,
            from: usize,
        ) -> Edge {
            let mut e = target;
            for level in (from..target_level).rev() {
                e = *chain.entry((target, level)).or_insert_with(|| {
                    nodes.push(ObddNode { level, lo: e, hi: e });
                    Edge::Node(nodes.len() - 1)
                });
            }
            e
        }
        for i in 0..self.nodes.len() {
            let u = self.nodes[i];
            let lo = lift(&mut nodes, &mut chain, u.lo, self.level(u.lo), u.level + 1);
            let hi = lift(&mut nodes, &mut chain, u.hi, self.level(u.hi), u.level + 1);
            nodes[i].lo = lo;
            nodes[i].hi = hi;
        }
        let root = lift(&mut nodes, &mut chain, self.root, self.level(self.root), 0);
        Obdd {
            order: self.order.clone(),
            nodes,
            root,
        }
    }

    pub fn negate(&self) -> Obdd {
        let flip = |e: Edge| match e {
            Edge::False => Edge::True,
            Edge::True => Edge::False,
            other => other,
        };
        Obdd {
            order: self.order.clone(),
            nodes: self
                .nodes
                .iter()
                .map(|u| ObddNode {
                    level: u.level,
                    lo: flip(u.lo),
                    hi: flip(u.hi),
                })
                .collect(),
            root: flip(self.root),
        }
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        let mut e = self.root;
        loop {
            match e {
                Edge::False => return Ok(false),
                Edge::True => return Ok(true),
                Edge::Node(i) => {
                    let u = self.nodes[i];
                    let v = self.order[u.level];
                    e = if a.get(v).ok_or(Error::Unassigned(v))? { u.hi } else { u.lo };
                }
            }
        }
    }

    /// Number of satisfying assignments of the order variables.
    pub fn count_models(&self) -> BigUint {
        let mut count: Vec<BigUint> = vec![BigUint::zero(); self.nodes.len()];
        let mut ids: Vec<usize> = (0..self.nodes.len()).collect();
        ids.sort_by_key(|&i| core::cmp::Reverse(self.nodes[i].level));
        let value = |e: Edge, from: usize, count: &[BigUint]| -> BigUint {
            let gap = self.level(e) - from;
            let base = match e {
                Edge::False => BigUint::zero(),
                Edge::True => BigUint::one(),
                Edge::Node(j) => count[j].clone(),
            };
            base << gap
        };
        for i in ids {
            let u = self.nodes[i];
            count[i] = value(u.lo, u.level + 1, &count) + value(u.hi, u.level + 1, &count);
        }
        value(self.root, 0, &count)
    }

    /// Complete OBDD of `f` along `order`, built by splitting truth tables
    /// and merging equal subfunctions level by level. Limited to 20
    /// variables.
    pub fn from_cnf_bruteforce(f: &Cnf, order: &[Var]) -> Result<Obdd> {
        const LIMIT: usize = 20;
        let n = order.len();
        if n > LIMIT {
            return Err(Error::TooManyVariables { count: n, limit: LIMIT });
        }
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=f.num_vars()).collect::<Vec<_>>() {
            return Err(Error::InvalidFormula("order must list each variable of the formula once".into()));
        }
        // Index bit n-1-j holds the value of order[j].
        let mut pos = vec![0usize; n + 1];
        for (j, &v) in order.iter().enumerate() {
            pos[v as usize] = n - 1 - j;
        }
        let mut table = Table::zeros(n);
        for a in 0..1usize << n {
            if f.eval(|v| (a >> pos[v as usize]) & 1 == 1) {
                table.set(a);
            }
        }
        let mut nodes: Vec<ObddNode> = Vec::new();
        if n == 0 {
            let root = if table.get(0) { Edge::True } else { Edge::False };
            return Obdd::new(Vec::new(), nodes, root);
        }
        let mut level_tables: Vec<Table> = vec![table];
        // Node ids of the current level, aligned with `level_tables`.
        let mut current: Vec<usize> = vec![0];
        nodes.push(ObddNode {
            level: 0,
            lo: Edge::False,
            hi: Edge::False,
        });
        for level in 0..n {
            let mut next_tables: Vec<Table> = Vec::new();
            let mut index: HashMap<Table, usize> = HashMap::new();
            let mut next_ids: Vec<usize> = Vec::new();
            for (k, t) in level_tables.iter().enumerate() {
                let (lo, hi) = t.split();
                let mut edge_for = |half: Table| -> Edge {
                    if level + 1 == n {
                        return if half.get(0) { Edge::True } else { Edge::False };
                    }
                    let next = index.len();
                    let slot = *index.entry(half.clone()).or_insert(next);
                    if slot == next {
                        next_tables.push(half);
                        nodes.push(ObddNode {
                            level: level + 1,
                            lo: Edge::False,
                            hi: Edge::False,
                        });
                        next_ids.push(nodes.len() - 1);
                    }
                    Edge::Node(next_ids[slot])
                };
                let lo_e = edge_for(lo);
                let hi_e = edge_for(hi);
                let id = current[k];
                nodes[id].lo = lo_e;
                nodes[id].hi = hi_e;
            }
            level_tables = next_tables;
            current = next_ids;
        }
        Obdd::new(order.to_vec(), nodes, Edge::Node(0))
    }

    /// Existential projection of the variables in `z` by subset construction.
    /// Each projected node stands for the set of input nodes reachable under
    /// some assignment of the kept variables above it, closed under taking
    /// both children at levels of `z`.
    pub fn project(&self, z: &[Var]) -> Result<ObddProjection> {
        for &v in z {
            if !self.order.contains(&v) {
                return Err(Error::UnknownVariable(v));
            }
        }
        let input = if self.is_complete() { self.clone() } else { self.complete() };
        let n = input.order.len();
        let in_z: Vec<bool> = input.order.iter().map(|v| z.contains(v)).collect();
        let kept: Vec<Var> = input.order.iter().copied().filter(|v| !z.contains(v)).collect();
        let mut new_level = vec![0usize; n];
        let mut c = 0;
        for i in 0..n {
            new_level[i] = c;
            if !in_z[i] {
                c += 1;
            }
        }

        // Closes a set of edges at `level` under both children at Z levels.
        let close = |mut set: Vec<Edge>, mut level: usize| -> (Vec<Edge>, usize) {
            while level < n && in_z[level] {
                let mut next = Vec::with_capacity(2 * set.len());
                for e in &set {
                    if let Edge::Node(i) = *e {
                        let u = input.nodes[i];
                        next.push(u.lo);
                        next.push(u.hi);
                    }
                }
                next.sort_unstable();
                next.dedup();
                set = next;
                level += 1;
            }
            (set, level)
        };

        #[derive(Clone, Copy)]
        enum PEdge {
            Sink { has_false: bool, has_true: bool },
            Node(usize),
        }
        let mut states: Vec<(Vec<Edge>, usize)> = Vec::new();
        let mut index: HashMap<Vec<Edge>, usize> = HashMap::new();
        let mut children: Vec<(PEdge, PEdge)> = Vec::new();
        let mut intern = |set: Vec<Edge>, level: usize, states: &mut Vec<(Vec<Edge>, usize)>| -> PEdge {
            if level == n {
                return PEdge::Sink {
                    has_false: set.contains(&Edge::False),
                    has_true: set.contains(&Edge::True),
                };
            }
            if let Some(&id) = index.get(&set) {
                return PEdge::Node(id);
            }
            index.insert(set.clone(), states.len());
            states.push((set, level));
            PEdge::Node(states.len() - 1)
        };
        let (root_set, root_level) = close(vec![input.root], 0);
        let root = intern(root_set, root_level, &mut states);
        let mut k = 0;
        while k < states.len() {
            let (set, level) = states[k].clone();
            let mut lo = Vec::with_capacity(set.len());
            let mut hi = Vec::with_capacity(set.len());
            for e in &set {
                if let Edge::Node(i) = *e {
                    lo.push(input.nodes[i].lo);
                    hi.push(input.nodes[i].hi);
                }
            }
            for s in [&mut lo, &mut hi] {
                s.sort_unstable();
                s.dedup();
            }
            let (lo, lo_level) = close(lo, level + 1);
            let (hi, hi_level) = close(hi, level + 1);
            let lo = intern(lo, lo_level, &mut states);
            let hi = intern(hi, hi_level, &mut states);
            children.push((lo, hi));
            k += 1;
        }

        let build = |accept: &dyn Fn(bool, bool) -> bool| -> Result<Obdd> {
            let map = |e: PEdge| match e {
                PEdge::Sink { has_false, has_true } => {
                    if accept(has_false, has_true) {
                        Edge::True
                    } else {
                        Edge::False
                    }
                }
                PEdge::Node(i) => Edge::Node(i),
            };
            let nodes = states
                .iter()
                .zip(&children)
                .map(|((_, level), &(lo, hi))| ObddNode {
                    level: new_level[*level],
                    lo: map(lo),
                    hi: map(hi),
                })
                .collect();
            Obdd::new(kept.clone(), nodes, map(root))
        };
        let exists = build(&|_, t| t)?;
        let not_exists = build(&|f, t| f && !t)?;
        let w = input.width();
        if w < 63 {
            assert!(exists.width() <= 1 << w, "projected width {} exceeds 2^{w}", exists.width());
        }
        let subsets = states
            .iter()
            .map(|(set, _)| {
                set.iter()
                    .filter_map(|e| match e {
                        Edge::Node(i) => Some(*i),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        Ok(ObddProjection {
            exists,
            not_exists,
            subsets,
            input,
        })
    }

    /// Complete structured d-DNNF over a right-comb vtree following the
    /// order and closed by an unlabeled leaf. Each OBDD node becomes one Or
    /// gate, so the circuit has the same width as the OBDD.
    pub fn to_circuit(&self) -> Result<StructuredCircuit> {
        let d = if self.is_complete() { self.clone() } else { self.complete() };
        let n = d.order.len();
        let vt = Vtree::right_comb(&d.order, true)?;
        // comb[i] is the vtree node whose left child is the leaf of order[i].
        let mut comb = Vec::with_capacity(n + 1);
        let mut t = vt.root();
        for _ in 0..n {
            comb.push(t);
            t = vt.children(t).expect("comb node").1;
        }
        comb.push(t);
        let mut b = CircuitBuilder::new(vt.clone());
        let mut ids: Vec<usize> = (0..d.nodes.len()).collect();
        ids.sort_by_key(|&i| core::cmp::Reverse(d.nodes[i].level));
        let mut gate: Vec<GateId> = vec![0; d.nodes.len()];
        let mut one: Option<GateId> = None;
        let mut lits: HashMap<(usize, bool), GateId> = HashMap::new();
        for i in ids {
            let u = d.nodes[i];
            let t = comb[u.level];
            let (leaf, _) = vt.children(t).expect("comb node");
            let var = d.order[u.level];
            let mut ands = Vec::with_capacity(2);
            for (e, positive) in [(u.hi, true), (u.lo, false)] {
                let below = match e {
                    Edge::False => continue,
                    Edge::True => *one.get_or_insert_with(|| b.constant(comb[n], true)),
                    Edge::Node(j) => gate[j],
                };
                let lit = *lits
                    .entry((u.level, positive))
                    .or_insert_with(|| b.lit(leaf, Lit::new(var, positive)));
                ands.push(b.and(t, lit, below));
            }
            gate[i] = b.or(t, ands);
        }
        let out = match d.root {
            Edge::Node(i) => gate[i],
            Edge::True | Edge::False if n == 0 => b.constant(comb[0], d.root == Edge::True),
            _ => unreachable!("complete OBDD with variables has a node root"),
        };
        let c = b.finish(BTreeMap::from([(OUT_MAIN.into(), out)]), true);
        if n > 0 {
            assert_eq!(c.width(), d.reachable_width(), "circuit width differs from OBDD width");
        }
        Ok(c)
    }
}

/// Truth table over `2^k` assignments stored in 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Table {
    bits: u32,
    words: Vec<u64>,
}

impl Table {
    fn zeros(k: usize) -> Table {
        Table {
            bits: k as u32,
            words: vec![0; (1usize << k).div_ceil(64)],
        }
    }

    fn set(&mut self, a: usize) {
        self.words[a / 64] |= 1 << (a % 64);
    }

    fn get(&self, a: usize) -> bool {
        self.words[a / 64] & (1 << (a % 64)) != 0
    }

    /// Halves for the most significant index bit being 0 and 1.
    fn split(&self) -> (Table, Table) {
        let k = self.bits - 1;
        if k >= 6 {
            let half = self.words.len() / 2;
            (
                Table {
                    bits: k,
                    words: self.words[..half].to_vec(),
                },
                Table {
                    bits: k,
                    words: self.words[half..].to_vec(),
                },
            )
        } else {
            let width = 1u32 << k;
            let mask = (1u64 << width) - 1;
            let w = self.words[0];
            (
                Table {
                    bits: k,
                    words: vec![w & mask],
                },
                Table {
                    bits: k,
                    words: vec![(w >> width) & mask],
                },
            )
        }
    }
}
