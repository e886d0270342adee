use proptest::prelude::*;

use bs_tiler::group::rectangle;
use bs_tiler::robinson::{
    lift_robinson, robinson_substitution, robinson_substitution_for, row_pair_consistent, structure_check, window_rows,
    RobinsonSystem,
};
use bs_tiler::substitution::{expanding_eigen, ClosedForm};

#[test]
fn robinson_eigendata() {
    let e = expanding_eigen(&robinson_substitution()).unwrap();
    assert_eq!(e.lambda, 5.0);
    assert_eq!(e.closed_form, Some(ClosedForm::Integer { lambda: 5, v: vec![1; 5] }));
    assert_eq!(robinson_substitution_for(3).n, 3);
}

#[test]
fn structure_laws() {
    assert!(structure_check(&["BCBCB", "DDEDD", "CBABC"]).is_valid());
    assert!(!structure_check(&["BCBCB", "BCBCB"]).is_valid());
    assert!(!structure_check(&["CBBCB"]).is_valid());
    assert!(structure_check(&["..B.B", "DD.DD"]).is_valid());
    let r = structure_check(&["BB", "BB"]);
    assert_eq!(r.rows, 2);
    assert!(!r.violations.is_empty());
}

#[test]
fn image_rows() {
    assert!(row_pair_consistent("DE", "BCBCBCBABC", 0));
    assert!(row_pair_consistent("DE", "CBCBCCBABC", 0));
    assert!(!row_pair_consistent("DE", "CBABCBCBCB", 0));
}

#[test]
fn generated_windows_are_structured() {
    let sys = RobinsonSystem::new(2, 40, 1).unwrap();
    let support = rectangle(2, 3, 2);
    for seed in 0..10 {
        let w = sys.window(&support, seed, 3).unwrap();
        let rows = window_rows(&sys, &w);
        assert!(rows.len() >= 4, "seed {seed}: {rows:?}");
        let r = structure_check(&rows);
        assert!(r.is_valid(), "seed {seed}: {:?}", r.violations);
    }
}

#[test]
fn lift_is_valid_for_base_two() {
    let sys = RobinsonSystem::new(2, 200, 1).unwrap();
    let support = rectangle(3, 4, 2);
    let (p, t) = sys.lift_with_tiling(&support, 2).unwrap();
    let r = sys.verify(&p, Some(&t)).unwrap();
    assert!(r.violations.is_empty(), "{}", r.violations[0]);
    assert_eq!(r.sheets.len(), 16);
    for s in &r.sheets {
        assert!(s.structure.is_valid(), "{}: {:?}", s.root, s.structure.violations);
        assert_eq!(s.mismatches, 0);
        assert!(s.pair_violations.is_empty());
    }
    assert!(r.is_valid());
}

#[test]
fn lift_needs_support() {
    assert!(lift_robinson(2, &[], 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn alternating_rows_need_b_on_every_second_position(word in "[ABC]{1,12}") {
        let on = |parity: usize| word.chars().enumerate().all(|(i, c)| (c == 'B') == (i % 2 == parity));
        prop_assert_eq!(structure_check(&[word.as_str()]).is_valid(), on(0) || on(1));
    }
}
