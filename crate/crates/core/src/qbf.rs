//! Solving and counting quantified Boolean formulas by eliminating
//! quantifier blocks from the innermost one outwards.
//!
//! The circuit carries both `φ` (output `exists`) and `¬φ` (output
//! `not_exists`). An existential block projects `exists`; a universal block
//! projects `not_exists`, since `∀Z φ = ¬∃Z ¬φ`, and swaps the names.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use crate::circuit::{Assignment, StructuredCircuit};
use crate::compile::compile_with_budget;
use crate::formula::{primal_graph, Qbf, Quant, Var};
use crate::obdd::Obdd;
use crate::project::{forall_project_dual, project_with_budget};
use crate::treedec::{decompose, make_nice, min_fill_order, Strategy};
use crate::{Budget, Result, OUT_EXISTS, OUT_MAIN};

/// Sizes observed while solving.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolveStats {
    /// Largest width over all stages.
    pub width: usize,
    /// Largest gate count over all stages.
    pub gates: usize,
    /// Vtree size of the compiled matrix.
    pub vtree_nodes: usize,
    /// Largest bag of the tree decomposition.
    pub maxbag: usize,
    /// Width after compiling, after building the dual, then after each block.
    pub stage_widths: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct QbfSolution {
    /// Truth value when the formula is closed.
    pub truth: Option<bool>,
    /// Number of assignments of the free variables making the formula true.
    pub model_count: BigUint,
    /// Final circuit over the free variables, with outputs `exists` (the
    /// formula) and `not_exists` (its negation).
    pub circuit: StructuredCircuit,
    pub stats: SolveStats,
}

/// `exp` iterated `height` times on `x`: `x`, `2^x`, `2^(2^x)`, ... or
/// `None` once an exponent exceeds `max_bits`.
pub fn exp_tower(height: usize, x: u64, max_bits: u64) -> Option<BigUint> {
    let mut v = BigUint::from(x);
    for _ in 0..height {
        if v > BigUint::from(max_bits) {
            return None;
        }
        let bits: u64 = v.try_into().expect("bounded by max_bits");
        v = BigUint::one() << bits;
    }
    Some(v)
}

pub fn solve(q: &Qbf, budget: &Budget) -> Result<QbfSolution> {
    solve_with_strategy(q, Strategy::MinFill, budget)
}

pub fn solve_with_strategy(q: &Qbf, strategy: Strategy, budget: &Budget) -> Result<QbfSolution> {
    let f = q.matrix();
    let nice = make_nice(&decompose(&primal_graph(f), strategy))?;
    let compiled = compile_with_budget(f, &nice, budget)?;
    let mut stats = SolveStats {
        vtree_nodes: compiled.vtree().len(),
        maxbag: nice.max_bag(),
        ..SolveStats::default()
    };
    let record = |c: &StructuredCircuit, stats: &mut SolveStats| {
        let w = c.width();
        stats.width = stats.width.max(w);
        stats.gates = stats.gates.max(c.len());
        if let Some(prev) = stats.stage_widths.last() {
            if *prev < 63 {
                assert!(w <= (1usize << prev).max(2), "stage width {w} exceeds 2^{prev}");
            }
        }
        stats.stage_widths.push(w);
    };
    record(&compiled, &mut stats);
    let mut c = project_with_budget(&compiled, OUT_MAIN, &[], budget)?;
    record(&c, &mut stats);
    for block in q.prefix().iter().rev() {
        c = match block.quant {
            Quant::Exists => project_with_budget(&c, OUT_EXISTS, &block.vars, budget)?,
            Quant::Forall => forall_project_dual(&c, &block.vars, budget)?,
        };
        record(&c, &mut stats);
    }
    let truth = if c.vtree().num_vars() == 0 {
        Some(c.evaluate(OUT_EXISTS, &Assignment::new())?)
    } else {
        None
    };
    let model_count = c.count_models(OUT_EXISTS)?;
    Ok(QbfSolution {
        truth,
        model_count,
        circuit: c,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObddSolution {
    pub truth: Option<bool>,
    pub model_count: BigUint,
    /// OBDD width of the matrix, then after each block.
    pub widths: Vec<usize>,
    pub result: Obdd,
}

/// The same elimination on OBDDs, starting from the complete OBDD of the
/// matrix along `order` (a min-fill elimination order when `None`).
pub fn solve_via_obdd(q: &Qbf, order: Option<&[Var]>) -> Result<ObddSolution> {
    let f = q.matrix();
    let order: Vec<Var> = match order {
        Some(o) => o.to_vec(),
        None => min_fill_order(&primal_graph(f)),
    };
    let mut b = Obdd::from_cnf_bruteforce(f, &order)?;
    let mut widths = alloc::vec![b.width()];
    for block in q.prefix().iter().rev() {
        b = match block.quant {
            Quant::Exists => b.project(&block.vars)?.exists,
            Quant::Forall => b.negate().project(&block.vars)?.not_exists,
        };
        widths.push(b.width());
    }
    let truth = b.order().is_empty().then(|| b.evaluate(&Assignment::new())).transpose()?;
    Ok(ObddSolution {
        truth,
        model_count: b.count_models(),
        widths,
        result: b,
    })
}
