#![allow(dead_code)]

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdnnf_core::bitset::TruthTable;
use sdnnf_core::compile::compile;
use sdnnf_core::formula::primal_graph;
use sdnnf_core::obdd::{Edge, Obdd, ObddNode};
use sdnnf_core::oracle::cnf_truth_table;
use sdnnf_core::treedec::{self, decompose, make_nice, NiceTreeDecomposition};
use sdnnf_core::{Clause, Cnf, Lit, StructuredCircuit, Var};

/// Random CNF with 1..=max_vars variables and up to max_clauses clauses of
/// width 1..=3.
pub fn arb_cnf(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = Cnf> {
    (1..=max_vars).prop_flat_map(move |n| {
        let clause = prop::collection::vec((1..=n, any::<bool>()), 1..=3)
            .prop_map(|lits| Clause::new(lits.into_iter().map(|(v, s)| Lit::new(v, s))));
        prop::collection::vec(clause, 0..=max_clauses).prop_map(move |cs| Cnf::new(n, cs).unwrap())
    })
}

/// Random subset of `1..=n` as a sorted list.
pub fn arb_subset(n: u32) -> impl Strategy<Value = Vec<Var>> {
    prop::collection::vec(any::<bool>(), n as usize)
        .prop_map(|bits| bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as Var + 1).collect())
}

pub fn nice_for(f: &Cnf) -> NiceTreeDecomposition {
    make_nice(&decompose(&primal_graph(f), treedec::Strategy::MinFill)).unwrap()
}

pub fn compiled(f: &Cnf) -> StructuredCircuit {
    compile(f, &nice_for(f)).unwrap()
}

/// Index of assignment `a` with variable `v` set to `value`.
fn with(a: usize, v: Var, value: bool) -> usize {
    let bit = 1usize << (v - 1);
    if value {
        a | bit
    } else {
        a & !bit
    }
}

/// Pointwise existential quantification of a truth table over `z`.
pub fn exists_over(t: &TruthTable, z: &[Var]) -> TruthTable {
    let mut t = t.clone();
    for &v in z {
        let mut next = TruthTable::zeros(t.num_vars());
        for a in 0..t.len() {
            next.set(a, t.get(with(a, v, false)) || t.get(with(a, v, true)));
        }
        t = next;
    }
    t
}

pub fn forall_over(t: &TruthTable, z: &[Var]) -> TruthTable {
    exists_over(&t.not(), z).not()
}

pub fn cnf_table(f: &Cnf) -> TruthTable {
    cnf_truth_table(f).unwrap()
}

/// Two CNFs over the same variables compiled with one shared decomposition,
/// so that both circuits live on the same vtree.
pub fn compile_pair(f1: &Cnf, f2: &Cnf) -> (StructuredCircuit, StructuredCircuit) {
    let n = f1.num_vars().max(f2.num_vars());
    let f1 = Cnf::new(n, f1.clauses().to_vec()).unwrap();
    let f2 = Cnf::new(n, f2.clauses().to_vec()).unwrap();
    let both = Cnf::new(n, f1.clauses().iter().chain(f2.clauses()).cloned().collect()).unwrap();
    let nice = nice_for(&both);
    (compile(&f1, &nice).unwrap(), compile(&f2, &nice).unwrap())
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random complete OBDD over `1..=n` with at most `max_width` nodes per
/// layer; edges only lead to the next layer.
pub fn random_complete_obdd(rng: &mut ChaCha8Rng, n: usize, max_width: usize) -> Obdd {
    let mut order: Vec<Var> = (1..=n as Var).collect();
    order.shuffle(rng);
    let sizes: Vec<usize> = (0..n).map(|l| if l == 0 { 1 } else { rng.random_range(1..=max_width) }).collect();
    let mut first = vec![0; n + 1];
    for l in 0..n {
        first[l + 1] = first[l] + sizes[l];
    }
    let mut nodes = Vec::new();
    for l in 0..n {
        for _ in 0..sizes[l] {
            let mut pick = || {
                if l + 1 == n {
                    if rng.random() { Edge::True } else { Edge::False }
                } else {
                    Edge::Node(first[l + 1] + rng.random_range(0..sizes[l + 1]))
                }
            };
            let lo = pick();
            let hi = pick();
            nodes.push(ObddNode { level: l, lo, hi });
        }
    }
    // Keep only nodes reachable from the source.
    let mut reach = vec![false; nodes.len()];
    reach[0] = true;
    for i in 0..nodes.len() {
        if reach[i] {
            for e in [nodes[i].lo, nodes[i].hi] {
                if let Edge::Node(j) = e {
                    reach[j] = true;
                }
            }
        }
    }
    let mut map = vec![usize::MAX; nodes.len()];
    let mut kept: Vec<ObddNode> = Vec::new();
    for i in 0..nodes.len() {
        if reach[i] {
            map[i] = kept.len();
            kept.push(nodes[i]);
        }
    }
    for u in &mut kept {
        for e in [&mut u.lo, &mut u.hi] {
            if let Edge::Node(j) = *e {
                *e = Edge::Node(map[j]);
            }
        }
    }
    Obdd::new(order, kept, Edge::Node(0)).unwrap()
}

/// Truth table of an OBDD by walking it once per assignment.
pub fn obdd_table(b: &Obdd, num_vars: u32) -> TruthTable {
    let mut t = TruthTable::zeros(num_vars);
    for a in 0..t.len() {
        let mut e = b.root();
        while let Edge::Node(i) = e {
            let u = b.nodes()[i];
            let v = b.order()[u.level];
            e = if (a >> (v - 1)) & 1 == 1 { u.hi } else { u.lo };
        }
        t.set(a, e == Edge::True);
    }
    t
}
