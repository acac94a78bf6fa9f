//! Seeded generators for random instances.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sdnnf_core::obdd::{Edge, Obdd, ObddNode};
use sdnnf_core::{Clause, Cnf, Lit, Qbf, Quant, Var};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lit(rng: &mut TestRng, v: Var) -> Lit {
    Lit::new(v, rng.random())
}

/// `m` clauses over `1..=n`, each with 1 to `max_len` distinct variables.
pub fn random_cnf(rng: &mut TestRng, n: u32, m: usize, max_len: usize) -> Cnf {
    let vars: Vec<Var> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let len = rng.random_range(1..=max_len.min(n as usize).max(1));
            let chosen: Vec<Var> = vars.choose_multiple(rng, len).copied().collect();
            Clause::new(chosen.into_iter().map(|v| lit(rng, v)))
        })
        .collect();
    Cnf::new(n, clauses).expect("variables in range")
}

/// `(x_i ∨ x_{i+1})` for `i < n`.
pub fn chain_cnf(n: u32) -> Cnf {
    let clauses = (1..n).map(|i| Clause::new([Lit::pos(i), Lit::pos(i + 1)])).collect();
    Cnf::new(n, clauses).expect("variables in range")
}

/// Chain of binary clauses with random signs.
pub fn random_chain(rng: &mut TestRng, n: u32) -> Cnf {
    let clauses = (1..n).map(|i| Clause::new([lit(rng, i), lit(rng, i + 1)])).collect();
    Cnf::new(n, clauses).expect("variables in range")
}

/// Binary clauses with random signs along the edges of a `rows × cols` grid,
/// plus a few random unit clauses.
pub fn random_grid(rng: &mut TestRng, rows: u32, cols: u32) -> Cnf {
    let v = |r: u32, c: u32| r * cols + c + 1;
    let mut clauses = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                clauses.push(Clause::new([lit(rng, v(r, c)), lit(rng, v(r, c + 1))]));
            }
            if r + 1 < rows {
                clauses.push(Clause::new([lit(rng, v(r, c)), lit(rng, v(r + 1, c))]));
            }
        }
    }
    for _ in 0..rng.random_range(0..3) {
        let x = rng.random_range(1..=rows * cols);
        clauses.push(Clause::new([lit(rng, x)]));
    }
    Cnf::new(rows * cols, clauses).expect("variables in range")
}

/// A CNF with at most `max_vars` variables and 30 clauses, drawn from the
/// random, chain and grid families.
pub fn random_family(rng: &mut TestRng, max_vars: u32) -> Cnf {
    match rng.random_range(0..4) {
        0 => {
            let n = rng.random_range(1..=max_vars);
            random_chain(rng, n)
        }
        1 => {
            let rows = rng.random_range(1..=3u32);
            let cols = rng.random_range(1..=(max_vars / rows).max(1));
            random_grid(rng, rows, cols)
        }
        _ => {
            let n = rng.random_range(1..=max_vars);
            let m = rng.random_range(0..=30);
            random_cnf(rng, n, m, 3)
        }
    }
}

/// Random subset of `1..=n`, each variable kept with probability `p`.
pub fn random_subset(rng: &mut TestRng, n: u32, p: f64) -> Vec<Var> {
    (1..=n).filter(|_| rng.random_bool(p)).collect()
}

/// Random quantified formula with up to `max_blocks` blocks. Some variables
/// stay free when `free` is set.
pub fn random_qbf(rng: &mut TestRng, max_vars: u32, max_blocks: usize, free: bool) -> Qbf {
    let matrix = random_family(rng, max_vars);
    let n = matrix.num_vars();
    let mut vars: Vec<Var> = (1..=n).collect();
    vars.shuffle(rng);
    if free {
        let nfree = rng.random_range(1..=n as usize);
        vars.truncate(n as usize - nfree);
    }
    let blocks = rng.random_range(1..=max_blocks).min(vars.len().max(1));
    let mut quant = if rng.random() { Quant::Exists } else { Quant::Forall };
    let mut prefix = Vec::new();
    let mut rest = vars.as_slice();
    for i in 0..blocks {
        if rest.is_empty() {
            break;
        }
        let take = if i + 1 == blocks { rest.len() } else { rng.random_range(1..=rest.len()) };
        let (b, r) = rest.split_at(take);
        prefix.push((quant, b.to_vec()));
        rest = r;
        quant = quant.dual();
    }
    Qbf::new(prefix, matrix).expect("blocks are disjoint")
}

/// Random complete OBDD over `1..=n` in a shuffled order with at most
/// `max_width` nodes per layer.
pub fn random_complete_obdd(rng: &mut TestRng, n: u32, max_width: usize) -> Obdd {
    let mut order: Vec<Var> = (1..=n).collect();
    order.shuffle(rng);
    if n == 0 {
        let root = if rng.random() { Edge::True } else { Edge::False };
        return Obdd::new(order, Vec::new(), root).expect("valid OBDD");
    }
    let n = n as usize;
    let sizes: Vec<usize> = (0..n)
        .map(|l| if l == 0 { 1 } else { rng.random_range(1..=max_width) })
        .collect();
    // Node ids by layer; edges only go to the next layer so every path is
    // complete.
    let mut first = vec![0; n + 1];
    for l in 0..n {
        first[l + 1] = first[l] + sizes[l];
    }
    let mut nodes = Vec::with_capacity(first[n]);
    for l in 0..n {
        for _ in 0..sizes[l] {
            let pick = |rng: &mut TestRng| {
                if l + 1 == n {
                    if rng.random() { Edge::True } else { Edge::False }
                } else {
                    Edge::Node(first[l + 1] + rng.random_range(0..sizes[l + 1]))
                }
            };
            let lo = pick(rng);
            let hi = pick(rng);
            nodes.push(ObddNode { level: l, lo, hi });
        }
    }
    prune(order, nodes)
}

/// Drops nodes unreachable from node 0 and renumbers.
fn prune(order: Vec<Var>, nodes: Vec<ObddNode>) -> Obdd {
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
    let mut kept = Vec::new();
    for i in 0..nodes.len() {
        if reach[i] {
            map[i] = kept.len();
            kept.push(nodes[i]);
        }
    }
    let re = |e: Edge| match e {
        Edge::Node(j) => Edge::Node(map[j]),
        other => other,
    };
    for u in &mut kept {
        u.lo = re(u.lo);
        u.hi = re(u.hi);
    }
    Obdd::new(order, kept, Edge::Node(0)).expect("valid OBDD")
}
