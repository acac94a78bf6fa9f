mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::*;
use sdnnf_core::circuit::{and_gate_bound, check_determinism_bruteforce, condition, remove_constant_leaves, CircuitBuilder};
use sdnnf_core::compile::compile_extended;
use sdnnf_core::{Assignment, Budget, Error, Gate, Lit, StructuredCircuit, Vtree, VtreeNode, OUT_MAIN};

/// Parity of x1, x2, x3 on the vtree ((x1, x2), x3). The node above x1 and
/// x2 carries two Or gates.
fn parity3() -> StructuredCircuit {
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
    let (x3, nx3) = (b.lit(3, Lit::pos(3)), b.lit(3, Lit::neg(3)));
    let a = b.and(2, x1, x2);
    let c = b.and(2, nx1, nx2);
    let even = b.or(2, vec![a, c]);
    let a = b.and(2, x1, nx2);
    let c = b.and(2, nx1, x2);
    let odd = b.or(2, vec![a, c]);
    let a = b.and(4, odd, nx3);
    let c = b.and(4, even, x3);
    let out = b.or(4, vec![a, c]);
    b.finish(BTreeMap::from([(OUT_MAIN.into(), out)]), true)
}

fn evaluation_count(c: &StructuredCircuit, n: u32) -> u64 {
    (0..1u64 << n)
        .filter(|&bits| c.evaluate(OUT_MAIN, &Assignment::from_bits(n, bits)).unwrap())
        .count() as u64
}

#[test]
fn two_or_gates_on_one_node_give_width_two() {
    let c = parity3();
    c.check_structuredness().unwrap();
    assert_eq!(c.width(), 2);
    assert!(check_determinism_bruteforce(&c).unwrap());
    assert_eq!(c.count_models(OUT_MAIN).unwrap(), 4u32.into());
    assert_eq!(evaluation_count(&c, 3), 4);
    let bound = and_gate_bound(&c);
    assert!(bound.square_violations.is_empty());
}

#[test]
fn missing_variable_is_an_error() {
    let c = parity3();
    let a: Assignment = [(1, true), (2, false)].into_iter().collect();
    assert_eq!(c.evaluate(OUT_MAIN, &a), Err(Error::Unassigned(3)));
}

#[test]
fn duplicate_and_gates_are_merged() {
    let vt = Vtree::balanced(&[1, 2]).unwrap();
    let root = vt.root();
    let (l, r) = vt.children(root).unwrap();
    let mut b = CircuitBuilder::new(vt);
    let x1 = b.lit(l, Lit::pos(1));
    let x2 = b.lit(r, Lit::pos(2));
    let a1 = b.and(root, x1, x2);
    let a2 = b.and(root, x1, x2);
    let o1 = b.or(root, vec![a1]);
    let o2 = b.or(root, vec![a2]);
    let c = b.finish(BTreeMap::from([("p".into(), o1), ("q".into(), o2)]), true);
    let d = c.dedup_and_gates();
    let ands = |c: &StructuredCircuit| c.gates().iter().filter(|g| g.is_and()).count();
    assert_eq!(ands(&c), 2);
    assert_eq!(ands(&d), 1);
    assert_eq!(d.width(), c.width());
    let again = d.dedup_and_gates();
    assert_eq!(again.len(), d.len());
}

#[test]
fn constant_leaves_fold_away() {
    // (x ∧ 1) over the extended vtree (x, U).
    let vt = Vtree::right_comb(&[1], true).unwrap();
    let root = vt.root();
    let (l, r) = vt.children(root).unwrap();
    let mut b = CircuitBuilder::new(vt.clone());
    let x = b.lit(l, Lit::pos(1));
    let one = b.constant(r, true);
    let a = b.and(root, x, one);
    let o = b.or(root, vec![a]);
    let c = b.finish(BTreeMap::from([(OUT_MAIN.into(), o)]), true);
    let d = remove_constant_leaves(&c).unwrap();
    assert_eq!(d.vtree().len(), 1);
    assert_eq!(d.gate(d.output(OUT_MAIN).unwrap()), &Gate::Lit(Lit::pos(1)));

    // (x ∧ 0) ∨ (¬x ∧ 1) is ¬x.
    let mut b = CircuitBuilder::new(vt);
    let x = b.lit(l, Lit::pos(1));
    let nx = b.lit(l, Lit::neg(1));
    let zero = b.constant(r, false);
    let one = b.constant(r, true);
    let a = b.and(root, x, zero);
    let c2 = b.and(root, nx, one);
    let o = b.or(root, vec![a, c2]);
    let c = b.finish(BTreeMap::from([(OUT_MAIN.into(), o)]), true);
    let d = remove_constant_leaves(&c).unwrap();
    assert_eq!(d.gate(d.output(OUT_MAIN).unwrap()), &Gate::Lit(Lit::neg(1)));
}

#[test]
fn conditioning_everything_gives_the_value() {
    let c = parity3();
    for bits in 0..8 {
        let a = Assignment::from_bits(3, bits);
        let d = condition(&c, &a).unwrap();
        assert_eq!(d.vtree().num_vars(), 0);
        assert_eq!(
            d.evaluate(OUT_MAIN, &Assignment::new()).unwrap(),
            c.evaluate(OUT_MAIN, &a).unwrap()
        );
    }
    let unknown: Assignment = [(9, true)].into_iter().collect();
    assert_eq!(condition(&c, &unknown).unwrap_err(), Error::UnknownVariable(9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_removal_keeps_function_and_width(f in arb_cnf(9, 20)) {
        let nice = nice_for(&f);
        let ext = compile_extended(&f, &nice, &Budget::UNLIMITED).unwrap();
        ext.check_structuredness().unwrap();
        let plain = remove_constant_leaves(&ext).unwrap();
        prop_assert!(!plain.vtree().is_extended() || plain.vtree().num_vars() <= 1);
        prop_assert!(plain.width() <= ext.width());
        plain.check_structuredness().unwrap();
        let n = f.num_vars();
        prop_assert_eq!(plain.truth_table(OUT_MAIN, n).unwrap(), ext.truth_table(OUT_MAIN, n).unwrap());
        prop_assert_eq!(plain.truth_table(OUT_MAIN, n).unwrap(), cnf_table(&f));
    }

    #[test]
    fn dedup_preserves_everything(f in arb_cnf(9, 20)) {
        let c = compiled(&f);
        let d = c.dedup_and_gates();
        prop_assert_eq!(d.width(), c.width());
        prop_assert!(d.len() <= c.len());
        prop_assert_eq!(d.count_models(OUT_MAIN).unwrap(), c.count_models(OUT_MAIN).unwrap());
        prop_assert_eq!(d.truth_table(OUT_MAIN, f.num_vars()).unwrap(), c.truth_table(OUT_MAIN, f.num_vars()).unwrap());
        prop_assert_eq!(d.dedup_and_gates().len(), d.len());
        d.check_structuredness().unwrap();
        let bound = and_gate_bound(&d);
        prop_assert!(bound.refined_violations.is_empty());
    }

    #[test]
    fn conditioning_restricts_the_table(f in arb_cnf(9, 20), mask in any::<u16>(), values in any::<u16>()) {
        let c = compiled(&f);
        let n = f.num_vars();
        let tau: Assignment = (1..=n)
            .filter(|v| (mask >> (v - 1)) & 1 == 1)
            .map(|v| (v, (values >> (v - 1)) & 1 == 1))
            .collect();
        let d = condition(&c, &tau).unwrap();
        prop_assert!(d.width() <= c.width());
        d.check_structuredness().unwrap();
        let t = c.truth_table(OUT_MAIN, n).unwrap();
        let r = d.truth_table(OUT_MAIN, n).unwrap();
        for a in 0..t.len() {
            let mut full = a;
            for (v, b) in tau.iter() {
                let bit = 1 << (v - 1);
                full = if b { full | bit } else { full & !bit };
            }
            prop_assert_eq!(r.get(a), t.get(full));
        }
        if tau.iter().next().is_none() {
            prop_assert_eq!(d.len(), c.len());
        }
    }

    #[test]
    fn count_matches_evaluation(f in arb_cnf(10, 20)) {
        let c = compiled(&f);
        let n = f.num_vars();
        prop_assert_eq!(c.count_models(OUT_MAIN).unwrap(), evaluation_count(&c, n).into());
    }
}
