mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use common::*;
use sdnnf_core::bitset::BitSet;
use sdnnf_core::circuit::{check_determinism_bruteforce, CircuitBuilder};
use sdnnf_core::compile::compile_cnf;
use sdnnf_core::oracle::shape_oracle;
use sdnnf_core::project::{
    forall_project, forall_project_dual, join_shapes, negate, normalize_root, non_and_gates, project, project_detailed,
};
use sdnnf_core::treedec::Strategy as Decomposer;
use sdnnf_core::{Assignment, Budget, Cnf, Error, Lit, StructuredCircuit, Var, Vtree, VtreeNode, OUT_EXISTS, OUT_MAIN, OUT_NOT_EXISTS};

fn bound(w: usize) -> usize {
    (1usize << w).max(2)
}

/// `(x1 ∨ x2) ∧ x3` with the two disjuncts overlapping, so the root Or is
/// not deterministic.
fn overlapping() -> StructuredCircuit {
    let vt = Vtree::new(
        vec![
            VtreeNode::Leaf(Some(1)),
            VtreeNode::Leaf(Some(2)),
            VtreeNode::Internal { left: 0, right: 1 },
            VtreeNode::Leaf(Some(3)),
            VtreeNode::Internal { left: 2, right: 3 },
        ],
        4,
    )
    .unwrap();
    let mut b = CircuitBuilder::new(vt);
    let (x1, nx1) = (b.lit(0, Lit::pos(1)), b.lit(0, Lit::neg(1)));
    let (x2, nx2) = (b.lit(1, Lit::pos(2)), b.lit(1, Lit::neg(2)));
    let x3 = b.lit(3, Lit::pos(3));
    let both = b.and(2, x1, x2);
    let only1 = b.and(2, x1, nx2);
    let only2 = b.and(2, nx1, x2);
    let a = b.or(2, vec![both, only1]);
    let c = b.or(2, vec![both, only2]);
    let l = b.and(4, a, x3);
    let r = b.and(4, c, x3);
    let out = b.or(4, vec![l, r]);
    b.finish(BTreeMap::from([(OUT_MAIN.into(), out)]), false)
}

/// All assignments of `vars`.
fn assignments(vars: &[Var]) -> Vec<Assignment> {
    (0..1u64 << vars.len())
        .map(|bits| vars.iter().enumerate().map(|(i, &v)| (v, (bits >> i) & 1 == 1)).collect())
        .collect()
}

fn kept_under(c: &StructuredCircuit, t: usize, z: &[Var]) -> Vec<Var> {
    c.vtree().vars_under(t).into_iter().filter(|v| !z.contains(v)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_matches_extension_oracle(f in arb_cnf(10, 24), seed in any::<u16>()) {
        let n = f.num_vars();
        let z: Vec<Var> = (1..=n).filter(|v| (seed >> (v % 16)) & 1 == 1).collect();
        let c = compiled(&f);
        let p = project(&c, OUT_MAIN, &z).unwrap();
        let expected = exists_over(&cnf_table(&f), &z);
        prop_assert_eq!(p.truth_table(OUT_EXISTS, n).unwrap(), expected.clone());
        prop_assert_eq!(p.truth_table(OUT_NOT_EXISTS, n).unwrap(), expected.not());
        prop_assert!(p.width() <= bound(normalize_root(&c, OUT_MAIN).unwrap().width()));
        p.check_structuredness().unwrap();
        prop_assert!(check_determinism_bruteforce(&p).unwrap());
        let kept = (n as usize) - z.len();
        prop_assert_eq!(p.count_models(OUT_EXISTS).unwrap(), (expected.count_ones() >> z.len()).into());
        prop_assert_eq!(
            p.count_models(OUT_EXISTS).unwrap() + p.count_models(OUT_NOT_EXISTS).unwrap(),
            (1u64 << kept).into()
        );
    }

    #[test]
    fn realized_shapes_are_exactly_the_shapes_of_assignments(f in arb_cnf(7, 14), seed in any::<u8>()) {
        let n = f.num_vars();
        let z: Vec<Var> = (1..=n).filter(|v| (seed >> (v % 8)) & 1 == 1).collect();
        let c = compiled(&f);
        let d = project_detailed(&c, OUT_MAIN, &z, &Budget::UNLIMITED, true).unwrap();
        let norm = &d.normalized;
        let shapes = d.shapes.unwrap();
        let w = norm.width();
        let internal = norm.vtree().len() / 2;
        prop_assert!(d.pairs <= (1usize << (2 * w)).saturating_mul(internal.max(1)));
        prop_assert!(d.max_shapes <= bound(w));
        let root = norm.vtree().root();
        for (t, at) in shapes.iter().enumerate() {
            if t == root {
                continue;
            }
            let realized: BTreeSet<Vec<usize>> = at.iter().map(|s| s.iter().collect()).collect();
            prop_assert_eq!(realized.len(), at.len(), "shapes at a node are distinct");
            let seen: BTreeSet<Vec<usize>> = assignments(&kept_under(norm, t, &z))
                .iter()
                .map(|tau| shape_oracle(norm, t, &z, tau).iter().collect())
                .collect();
            prop_assert_eq!(realized, seen);
        }
    }

    #[test]
    fn join_matches_shape_of_union(f in arb_cnf(8, 16), seed in any::<u32>()) {
        let n = f.num_vars();
        let z: Vec<Var> = (1..=n).filter(|v| (seed >> (v % 32)) & 1 == 1).collect();
        let c = normalize_root(&compiled(&f), OUT_MAIN).unwrap();
        let vt = c.vtree();
        let mut pick = seed as u64;
        for t in 0..vt.len() {
            let Some((t1, t2)) = vt.children(t) else { continue };
            let k1 = kept_under(&c, t1, &z);
            let k2 = kept_under(&c, t2, &z);
            for _ in 0..4 {
                pick = pick.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let tau1: Assignment = k1.iter().enumerate().map(|(i, &v)| (v, (pick >> (i + 3)) & 1 == 1)).collect();
                let tau2: Assignment = k2.iter().enumerate().map(|(i, &v)| (v, (pick >> (i + 33)) & 1 == 1)).collect();
                let s1 = shape_oracle(&c, t1, &z, &tau1);
                let s2 = shape_oracle(&c, t2, &z, &tau2);
                let union: Assignment = tau1.iter().chain(tau2.iter()).collect();
                prop_assert_eq!(join_shapes(&c, t, &s1, &s2), shape_oracle(&c, t, &z, &union));
                prop_assert!(join_shapes(&c, t, &BitSet::new(), &s2).is_empty());
            }
        }
    }

    #[test]
    fn negation_is_an_involution(f in arb_cnf(10, 20)) {
        let n = f.num_vars();
        let c = compiled(&f);
        let neg = negate(&c, OUT_MAIN).unwrap();
        let t = c.truth_table(OUT_MAIN, n).unwrap();
        prop_assert_eq!(neg.truth_table(OUT_MAIN, n).unwrap(), t.not());
        prop_assert!(neg.width() <= bound(normalize_root(&c, OUT_MAIN).unwrap().width()));
        prop_assert_eq!(
            neg.count_models(OUT_MAIN).unwrap() + c.count_models(OUT_MAIN).unwrap(),
            (1u64 << n).into()
        );
        let back = negate(&neg, OUT_MAIN).unwrap();
        prop_assert_eq!(back.truth_table(OUT_MAIN, n).unwrap(), t);
    }

    #[test]
    fn universal_projection_matches_oracle(f in arb_cnf(9, 20), seed in any::<u16>()) {
        let n = f.num_vars();
        let z: Vec<Var> = (1..=n).filter(|v| (seed >> (v % 16)) & 1 == 1).collect();
        let c = compiled(&f);
        let expected = forall_over(&cnf_table(&f), &z);
        let p = forall_project(&c, OUT_MAIN, &z).unwrap();
        prop_assert_eq!(p.truth_table(OUT_EXISTS, n).unwrap(), expected.clone());
        prop_assert_eq!(p.truth_table(OUT_NOT_EXISTS, n).unwrap(), expected.not());
        let dual = project(&c, OUT_MAIN, &[]).unwrap();
        let q = forall_project_dual(&dual, &z, &Budget::UNLIMITED).unwrap();
        prop_assert_eq!(q.truth_table(OUT_EXISTS, n).unwrap(), expected);
    }
}

#[test]
fn non_deterministic_input_gives_deterministic_output() {
    let c = overlapping();
    c.check_structuredness().unwrap();
    assert!(!check_determinism_bruteforce(&c).unwrap());
    let t = c.truth_table(OUT_MAIN, 3).unwrap();
    for z in [vec![], vec![1], vec![3], vec![1, 2]] {
        let p = project(&c, OUT_MAIN, &z).unwrap();
        p.check_structuredness().unwrap();
        assert!(p.is_deterministic());
        assert!(check_determinism_bruteforce(&p).unwrap());
        assert_eq!(p.truth_table(OUT_EXISTS, 3).unwrap(), exists_over(&t, &z));
    }
}

#[test]
fn trivial_projections() {
    let f = Cnf::from_dimacs_clauses(3, &[&[1, -2], &[2, 3]]).unwrap();
    let c = compile_cnf(&f, Decomposer::MinFill).unwrap();
    let all = project(&c, OUT_MAIN, &[1, 2, 3]).unwrap();
    assert_eq!(all.vtree().num_vars(), 0);
    assert!(all.evaluate(OUT_EXISTS, &Assignment::new()).unwrap());
    assert!(!all.evaluate(OUT_NOT_EXISTS, &Assignment::new()).unwrap());

    let unsat = compile_cnf(&Cnf::from_dimacs_clauses(2, &[&[1], &[-1, 2], &[-2]]).unwrap(), Decomposer::MinFill).unwrap();
    let all = project(&unsat, OUT_MAIN, &[1, 2]).unwrap();
    assert!(!all.evaluate(OUT_EXISTS, &Assignment::new()).unwrap());

    let taut = compile_cnf(&Cnf::from_dimacs_clauses(3, &[]).unwrap(), Decomposer::MinFill).unwrap();
    assert_eq!(negate(&taut, OUT_MAIN).unwrap().count_models(OUT_MAIN).unwrap(), 0u32.into());

    assert_eq!(project(&c, OUT_MAIN, &[7]).unwrap_err(), Error::UnknownVariable(7));
    assert_eq!(
        forall_project_dual(&c, &[1], &Budget::UNLIMITED).unwrap_err(),
        Error::MissingOutput(OUT_EXISTS.into())
    );
}

#[test]
fn universal_of_literal_and_tautology() {
    let x = compile_cnf(&Cnf::from_dimacs_clauses(1, &[&[1]]).unwrap(), Decomposer::MinFill).unwrap();
    let p = forall_project(&x, OUT_MAIN, &[1]).unwrap();
    assert!(!p.evaluate(OUT_EXISTS, &Assignment::new()).unwrap());
    let taut = compile_cnf(&Cnf::from_dimacs_clauses(1, &[&[1, -1]]).unwrap(), Decomposer::MinFill).unwrap();
    let p = forall_project(&taut, OUT_MAIN, &[1]).unwrap();
    assert!(p.evaluate(OUT_EXISTS, &Assignment::new()).unwrap());
    let p = forall_project(&x, OUT_MAIN, &[]).unwrap();
    assert_eq!(p.truth_table(OUT_EXISTS, 1).unwrap(), x.truth_table(OUT_MAIN, 1).unwrap());
}

#[test]
fn normalizing_compiled_circuits_keeps_semantics() {
    let f = Cnf::from_dimacs_clauses(4, &[&[1, 2], &[-2, 3], &[3, -4]]).unwrap();
    let c = compile_cnf(&f, Decomposer::MinFill).unwrap();
    let n = normalize_root(&c, OUT_MAIN).unwrap();
    assert_eq!(n.truth_table(OUT_MAIN, 4).unwrap(), c.truth_table(OUT_MAIN, 4).unwrap());
    assert!(n.width() <= c.width() + 1);
    assert!(!non_and_gates(&n, n.vtree().root()).is_empty());
}
