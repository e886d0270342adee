use bs_tiler::group::{phi_inverse, GroupElement};
use bs_tiler::substitution::{expanding_eigen, normalize_unique_size, EigenData, Substitution};
use bs_tiler::tiling::{
    alpha_beta, check_unique_size, classify_at, grow_window, make_tile, shift_window, BoxClass, ChoicePolicy, Scale,
};
use bs_tiler::Dyadic;

fn fib() -> Substitution {
    Substitution::from_strs(&["a", "b"], &[&["aab"], &["ba"]], 2).unwrap()
}

fn fib_normalized() -> (Substitution, EigenData) {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    normalize_unique_size(&s, &e).unwrap()
}

#[test]
fn fibonacci_rows_by_substitution() {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    let w = grow_window(&s, &e, 0, 0, 2, 0.0, &ChoicePolicy::Seeded(1), 0.0).unwrap();
    let words: Vec<String> = w.words().iter().map(|r| s.word_string(r)).collect();
    assert_eq!(words, vec!["a", "aab", "aabaabba"]);
}

#[test]
fn single_tile_window() {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    let w = grow_window(&s, &e, 1, 0, 0, 0.0, &ChoicePolicy::Seeded(3), 0.0).unwrap();
    assert_eq!(w.words(), vec![vec![1]]);
}

#[test]
fn thue_parents_differ() {
    let s = Substitution::from_strs(&["0", "1"], &[&["010"], &["101"]], 2).unwrap();
    let e = expanding_eigen(&s).unwrap();
    let mut parents = std::collections::BTreeSet::new();
    for seed in 0..20 {
        let w = grow_window(&s, &e, 0, 1, 0, 0.0, &ChoicePolicy::Seeded(seed), 0.0).unwrap();
        let t = w.generator().unwrap();
        let parent = t.tiles(0, 0.0, 0.0).into_iter().find(|x| x.left <= 0.0 && x.right() > 0.0).unwrap();
        parents.insert((parent.letter, (parent.left * 1e6).round() as i64));
    }
    assert!(parents.len() >= 2, "{parents:?}");
}

#[test]
fn tile_examples() {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    let sc = Scale::new(&e, 2);
    let a = make_tile(&s, &sc, 0, 0.0, 0.0, 0).unwrap();
    assert!(a.width_defect() < 1e-12);
    assert!((a.width - e.v[0]).abs() < 1e-15);
    assert_eq!(a.edge_count(), 6);
    let b = make_tile(&s, &sc, 1, 0.0, 0.0, 0).unwrap();
    assert_eq!(b.width, e.v[1]);
    let low = make_tile(&s, &sc, 0, 0.0, -sc.height, 0).unwrap();
    assert!((low.width - e.v[0] / e.lambda).abs() < 1e-12);
    assert!(make_tile(&s, &sc, 0, 0.0, 0.0, 1).is_err());
    assert!(make_tile(&s, &sc, 5, 0.0, 0.0, 0).is_err());
}

#[test]
fn width_conservation_and_alignment() {
    let (s, e) = fib_normalized();
    let w = grow_window(&s, &e, 0, 1, 2, 20.0, &ChoicePolicy::Seeded(9), 0.3).unwrap();
    let t = w.generator().unwrap();
    let mut count = 0;
    for row in &w.rows {
        for pair in row.tiles.windows(2) {
            assert!((pair[0].right() - pair[1].left).abs() < 1e-9);
        }
        for tile in &row.tiles {
            let st = make_tile(&s, &t.scale, tile.letter, tile.left, row.top, tile.rule).unwrap();
            assert!(st.width_defect() < 1e-9);
            count += 1;
        }
    }
    assert!(count > 50, "{count}");
}

#[test]
fn shift_examples() {
    let (s, e) = fib_normalized();
    let w = grow_window(&s, &e, 1, 1, 1, 5.0, &ChoicePolicy::Seeded(2), 0.0).unwrap();
    let same = shift_window(&w, 0.0, 0.0);
    assert_eq!(same.rows, w.rows);
    let moved = shift_window(&w, 1.0, 0.0);
    for (a, b) in moved.rows.iter().zip(&w.rows) {
        for (x, y) in a.tiles.iter().zip(&b.tiles) {
            assert!((x.left - y.left - 1.0).abs() < 1e-12);
        }
    }
    let up = shift_window(&w, 0.0, 1.0);
    for (a, b) in up.rows.iter().zip(&w.rows) {
        assert!((a.top - b.top - 1.0).abs() < 1e-12);
        for (x, y) in a.tiles.iter().zip(&b.tiles) {
            assert!((x.width - 2.0 * y.width).abs() < 1e-9);
        }
    }
}

#[test]
fn box_grid_partitions() {
    let (s, e) = fib_normalized();
    let w = grow_window(&s, &e, 0, 2, 1, 40.0, &ChoicePolicy::Seeded(5), 0.37).unwrap();
    let t = w.generator().unwrap();
    let mut seen = std::collections::BTreeMap::new();
    for level in -10..2i64 {
        let b = 2f64.powi(level as i32);
        for c in 0..40 {
            let x = -20.0 * b + c as f64 * b;
            let content = classify_at(t, x, level).unwrap();
            *seen.entry(content.class).or_insert(0) += 1;
        }
    }
    assert_eq!(seen.values().sum::<usize>(), 480);
    assert_eq!(seen.len(), 5, "{seen:?}");
}

#[test]
fn unique_size_on_normalized_windows() {
    let (s, e) = fib_normalized();
    for seed in 0..10 {
        let w = grow_window(&s, &e, (seed % 2) as usize, 1, 2, 10.0, &ChoicePolicy::Seeded(seed), 0.1 * seed as f64)
            .unwrap();
        let r = check_unique_size(&w).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(!r.tiles.is_empty());
    }
    assert_eq!(alpha_beta(12, 3, 2), (2, 1));
}

#[test]
fn corner_classes() {
    let (s, e) = fib_normalized();
    let w = grow_window(&s, &e, 0, 1, 1, 300.0, &ChoicePolicy::Seeded(4), 0.5).unwrap();
    let t = w.generator().unwrap();
    let _ = (phi_inverse(Dyadic::zero(2), 0), GroupElement::identity(2));
    // Boxes at the seed row's line level containing tile corners.
    let level = (0.5f64).ceil() as i64;
    let row = t.line_in_level(level).unwrap().unwrap();
    let mut classes = std::collections::BTreeSet::new();
    for tile in t.tiles(row, -250.0, 250.0) {
        let b = 2f64.powi(level as i32);
        let x0 = (tile.left / b).floor() * b;
        let c = classify_at(t, x0, level).unwrap();
        assert!(c.class.is_corner());
        classes.insert((c.class, tile.continues_up()));
    }
    assert!(classes.contains(&(BoxClass::Cross, true)));
    assert!(classes.contains(&(BoxClass::T, false)));
}
