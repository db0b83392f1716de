mod common;

use common::oracle;
use grope::magnus::Monomial;
use grope::{lcs_depth, magnus, CommutatorExpr, Depth, Generator, GroupWord, Letter};
use proptest::prelude::*;

fn raw(w: &GroupWord) -> oracle::RawWord {
    w.letters().iter().map(|l| (l.generator.0, l.inverse)).collect()
}

fn to_word(r: &[(u32, bool)]) -> GroupWord {
    GroupWord::from_letters(r.iter().map(|&(g, inv)| Letter::new(g, inv)))
}

fn letter_strategy(rank: u32) -> impl Strategy<Value = Letter> {
    (0..rank, any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv))
}

fn raw_strategy(rank: u32, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(letter_strategy(rank), 0..max_len)
}

fn expr_strategy(rank: u32) -> impl Strategy<Value = CommutatorExpr> {
    let leaf = letter_strategy(rank).prop_map(CommutatorExpr::Leaf);
    leaf.prop_recursive(4, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(u, v)| CommutatorExpr::comm(u, v)),
            prop::collection::vec(inner, 1..3).prop_map(CommutatorExpr::Prod),
        ]
    })
}

#[test]
fn frozen_expansion_of_commutator() {
    // (1+X)(1+Y)(1-X+X^2)(1-Y+Y^2) truncated at degree 2 is 1 + XY - YX.
    let w = CommutatorExpr::left_normed(&[0, 1]).eval();
    let expected = oracle::expansion(&raw(&w), 2);
    assert_eq!(expected.len(), 2);
    assert_eq!(expected[&vec![0, 1]], 1);
    assert_eq!(expected[&vec![1, 0]], -1);
    let s = magnus(&w, 2).unwrap();
    for (m, c) in &expected {
        let key: Monomial = m.iter().map(|&g| Generator(g)).collect();
        assert_eq!(s.coefficient(&key), *c);
    }
    assert_eq!(s.terms().len(), expected.len());
}

#[test]
fn frozen_depths_from_oracle() {
    assert_eq!(oracle::lowest_degree(&oracle::left_normed(&[0, 1]), 8), Some(2));
    assert_eq!(oracle::lowest_degree(&oracle::left_normed(&[0, 1, 1]), 8), Some(3));
    let xy = CommutatorExpr::left_normed(&[0, 1]).eval();
    let xyy = CommutatorExpr::left_normed(&[0, 1, 1]).eval();
    assert_eq!(lcs_depth(&xy, 8).unwrap(), Depth::Exact(2));
    assert_eq!(lcs_depth(&xyy, 8).unwrap(), Depth::Exact(3));
}

#[test]
fn left_normed_basic_commutators_have_exact_depth() {
    for k in 1..=6u32 {
        let gens: Vec<u32> = (0..k).collect();
        let w = CommutatorExpr::left_normed(&gens).eval();
        assert_eq!(raw(&w), oracle::left_normed(&gens));
        assert_eq!(oracle::lowest_degree(&raw(&w), k as usize), Some(k as usize));
        assert_eq!(lcs_depth(&w, 8).unwrap(), Depth::Exact(k));
    }
}

#[test]
fn expansion_matches_oracle_on_fixed_words() {
    for src in ["x1 x2^-1 x1^-1 x3", "x2^-1 x2^-1 x1 x2", "[[x1, x2], [x1, x3^-1]]"] {
        let w: GroupWord = src.parse().unwrap();
        let expected = oracle::expansion(&raw(&w), 4);
        let got = magnus(&w, 4).unwrap();
        let got: std::collections::BTreeMap<Vec<u32>, i128> = got
            .terms()
            .iter()
            .map(|(m, c)| (m.iter().map(|g| g.0).collect(), *c))
            .collect();
        assert_eq!(got, expected, "{src}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_is_confluent(a in raw_strategy(3, 12), b in raw_strategy(3, 12)) {
        let ra = GroupWord::from_letters(a.clone());
        let rb = GroupWord::from_letters(b.clone());
        let direct = GroupWord::from_letters(a.iter().chain(b.iter()).copied());
        prop_assert_eq!(ra.mul(&rb), direct.clone());
        let via_oracle = to_word(&oracle::reduce(
            &a.iter().chain(b.iter()).map(|l| (l.generator.0, l.inverse)).collect::<Vec<_>>(),
        ));
        prop_assert_eq!(direct.clone(), via_oracle);
        prop_assert_eq!(GroupWord::from_letters(direct.letters().to_vec()), direct);
    }

    #[test]
    fn magnus_is_multiplicative(a in raw_strategy(3, 10), b in raw_strategy(3, 10), cutoff in 1usize..=4) {
        let a = GroupWord::from_letters(a);
        let b = GroupWord::from_letters(b);
        let lhs = magnus(&a.mul(&b), cutoff).unwrap();
        let rhs = magnus(&a, cutoff).unwrap().mul(&magnus(&b, cutoff).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn magnus_agrees_with_oracle(a in raw_strategy(3, 9), cutoff in 1usize..=4) {
        let w = GroupWord::from_letters(a);
        let got: std::collections::BTreeMap<Vec<u32>, i128> = magnus(&w, cutoff)
            .unwrap()
            .terms()
            .iter()
            .map(|(m, c)| (m.iter().map(|g| g.0).collect(), *c))
            .collect();
        prop_assert_eq!(got, oracle::expansion(&raw(&w), cutoff));
    }

    #[test]
    fn commutator_depth_is_superadditive(u in expr_strategy(3), v in expr_strategy(3)) {
        prop_assume!(u.weight() + v.weight() <= 6);
        let c = CommutatorExpr::comm(u.clone(), v.clone());
        let w = c.eval();
        prop_assume!(!w.is_identity());
        let du = lcs_depth(&u.eval(), 8).unwrap();
        let dv = lcs_depth(&v.eval(), 8).unwrap();
        let dc = lcs_depth(&w, 8).unwrap();
        if let Depth::Exact(k) = dc {
            prop_assert!(k >= du.lower_bound() + dv.lower_bound(), "{} {} {} {}", c, du, dv, dc);
        }
        prop_assert!(dc.at_least(c.weight()));
    }
}
