mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use sdnnf_core::circuit::check_determinism_bruteforce;
use sdnnf_core::obdd::{Edge, Obdd, ObddNode};
use sdnnf_core::{Cnf, Var, OUT_MAIN};

/// Input nodes at `level` reachable from the root under the kept values in
/// `prefix` (indexed by level) and any values of the projected variables.
fn reachable_at(b: &Obdd, z: &[Var], prefix: &[bool], level: usize) -> BTreeSet<usize> {
    let zl: Vec<usize> = (0..level).filter(|&l| z.contains(&b.order()[l])).collect();
    let mut out = BTreeSet::new();
    for ext in 0..1u64 << zl.len() {
        let mut e = b.root();
        while let Edge::Node(i) = e {
            let u = b.nodes()[i];
            if u.level >= level {
                out.insert(i);
                break;
            }
            let value = match zl.iter().position(|&l| l == u.level) {
                Some(k) => (ext >> k) & 1 == 1,
                None => prefix[u.level],
            };
            e = if value { u.hi } else { u.lo };
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bruteforce_construction_matches_cnf(f in arb_cnf(8, 16), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let mut order: Vec<Var> = (1..=f.num_vars()).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let b = Obdd::from_cnf_bruteforce(&f, &order).unwrap();
        prop_assert!(b.is_complete());
        prop_assert_eq!(obdd_table(&b, f.num_vars()), cnf_table(&f));
    }

    #[test]
    fn projection_by_subsets(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=10usize);
        let b = random_complete_obdd(&mut rng, n, 4);
        let z: Vec<Var> = (1..=n as Var).filter(|_| rng.random_bool(0.4)).collect();
        let p = b.project(&z).unwrap();
        let t = obdd_table(&b, n as u32);
        let expected = exists_over(&t, &z);
        prop_assert_eq!(obdd_table(&p.exists, n as u32), expected.clone());
        prop_assert_eq!(obdd_table(&p.not_exists, n as u32), expected.not());
        prop_assert!(p.exists.is_complete());
        prop_assert!(p.exists.width() <= 1 << b.width());

        // Walk five random kept prefixes and compare the subsets.
        let kept_levels: Vec<usize> = (0..n).filter(|&l| !z.contains(&b.order()[l])).collect();
        for _ in 0..5 {
            let prefix: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let mut e = p.exists.root();
            while let Edge::Node(k) = e {
                let level = kept_levels[p.exists.nodes()[k].level];
                let expect = reachable_at(&p.input, &z, &prefix, level);
                let got: BTreeSet<usize> = p.subsets[k].iter().copied().collect();
                prop_assert_eq!(got, expect);
                let u = p.exists.nodes()[k];
                e = if prefix[level] { u.hi } else { u.lo };
            }
        }
    }

    #[test]
    fn negation_and_conversion(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=9usize);
        let b = random_complete_obdd(&mut rng, n, 4);
        let t = obdd_table(&b, n as u32);
        let neg = b.negate();
        prop_assert_eq!(neg.len(), b.len());
        prop_assert_eq!(neg.width(), b.width());
        prop_assert_eq!(obdd_table(&neg, n as u32), t.not());
        prop_assert_eq!(neg.negate(), b.clone());
        let c = b.to_circuit().unwrap();
        c.check_structuredness().unwrap();
        prop_assert!(check_determinism_bruteforce(&c).unwrap());
        prop_assert_eq!(c.width(), b.width());
        prop_assert_eq!(c.truth_table(OUT_MAIN, n as u32).unwrap(), t.clone());
        prop_assert_eq!(c.count_models(OUT_MAIN).unwrap(), b.count_models());
        prop_assert_eq!(b.count_models(), t.count_ones().into());
    }
}

#[test]
fn small_diagrams() {
    let taut = Obdd::from_cnf_bruteforce(&Cnf::from_dimacs_clauses(3, &[]).unwrap(), &[1, 2, 3]).unwrap();
    assert_eq!(taut.width(), 1);
    assert_eq!(taut.negate().count_models(), 0u32.into());

    let x = Obdd::from_cnf_bruteforce(&Cnf::from_dimacs_clauses(1, &[&[1]]).unwrap(), &[1]).unwrap();
    assert_eq!(x.len(), 1);
    let c = x.to_circuit().unwrap();
    assert_eq!(c.width(), 1);
    assert_eq!(c.count_models(OUT_MAIN).unwrap(), 1u32.into());

    // ∃x (x ∧ y) is y.
    let xy = Obdd::from_cnf_bruteforce(&Cnf::from_dimacs_clauses(2, &[&[1], &[2]]).unwrap(), &[1, 2]).unwrap();
    let p = xy.project(&[1]).unwrap();
    assert_eq!(p.exists.order(), &[2]);
    let t = obdd_table(&p.exists, 2);
    assert_eq!((0..4).map(|a| t.get(a)).collect::<Vec<_>>(), vec![false, false, true, true]);
    let same = xy.project(&[]).unwrap();
    assert_eq!(obdd_table(&same.exists, 2), obdd_table(&xy, 2));
}

#[test]
fn completion_inserts_pass_through_nodes() {
    // x1 → x3, skipping x2 on the high edge.
    let b = Obdd::new(
        vec![1, 2, 3],
        vec![
            ObddNode { level: 0, lo: Edge::Node(1), hi: Edge::Node(2) },
            ObddNode { level: 1, lo: Edge::False, hi: Edge::Node(2) },
            ObddNode { level: 2, lo: Edge::False, hi: Edge::True },
        ],
        Edge::Node(0),
    )
    .unwrap();
    assert!(!b.is_complete());
    let c = b.complete();
    assert!(c.is_complete());
    assert!(c.nodes().iter().any(|u| u.level == 1 && u.lo == u.hi));
    assert_eq!(obdd_table(&c, 3), obdd_table(&b, 3));
    assert_eq!(c.complete(), c);
}
