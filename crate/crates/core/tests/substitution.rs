use bs_tiler::substitution::{
    desubstitute, expanding_eigen, incidence_matrix, is_primitive, language, normalize_unique_size,
    ClosedForm, Substitution,
};
use proptest::prelude::*;

fn fib() -> Substitution {
    Substitution::from_strs(&["a", "b"], &[&["aab"], &["ba"]], 2).unwrap()
}

fn robinson() -> Substitution {
    Substitution::from_strs(
        &["A", "B", "C", "D", "E"],
        &[&["DDEDD"], &["DDDDD"], &["DDEDD"], &["BCBCB", "CBCBC"], &["CBABC"]],
        2,
    )
    .unwrap()
}

fn thue() -> Substitution {
    Substitution::from_strs(&["0", "1"], &[&["010"], &["101"]], 2).unwrap()
}

#[test]
fn incidence_matrices() {
    assert_eq!(incidence_matrix(&thue()).unwrap(), vec![vec![2, 1], vec![1, 2]]);
    let id = Substitution::from_strs(&["x"], &[&["x"]], 2).unwrap();
    assert_eq!(incidence_matrix(&id).unwrap(), vec![vec![1]]);
    assert!(incidence_matrix(&robinson()).is_err());
}

#[test]
fn primitivity() {
    let red = Substitution::from_strs(&["a", "b"], &[&["a"], &["b"]], 2).unwrap();
    assert!(!is_primitive(&red).unwrap());
    let tm = Substitution::from_strs(&["0", "1"], &[&["01"], &["10"]], 2).unwrap();
    assert!(is_primitive(&tm).unwrap());
}

#[test]
fn fibonacci_eigen_matches_closed_form() {
    let e = expanding_eigen(&fib()).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((e.lambda - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    assert!((e.v[0] - phi).abs() < 1e-12);
    assert!((e.v[1] - 1.0).abs() < 1e-12);
    assert!(matches!(e.closed_form, Some(ClosedForm::Quadratic { .. })));
}

#[test]
fn fibonacci_normalization() {
    let s = fib();
    let e = expanding_eigen(&s).unwrap();
    let (p, n) = normalize_unique_size(&s, &e).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert_eq!(n.power, 3);
    assert!((n.lambda - (8.0 * phi + 5.0)).abs() < 1e-9);
    assert_eq!(n.scale_milli, 3000);
    assert_eq!((n.h_box, n.h_rule), (4, 3));
    assert_eq!(n.w, vec![3, 2]);
    assert_eq!(n.m, 21);
    assert_eq!(p.rules[0][0].len(), 21);
    assert!(n.residual < 1e-9);
}

#[test]
fn robinson_eigen_is_exact() {
    let s = robinson();
    let e = expanding_eigen(&s).unwrap();
    assert_eq!(e.closed_form, Some(ClosedForm::Integer { lambda: 5, v: vec![1; 5] }));
    let (_, n) = normalize_unique_size(&s, &e).unwrap();
    assert_eq!((n.power, n.lambda, n.m, n.scale_milli), (2, 25.0, 25, 3000));
    assert_eq!(n.w, vec![2; 5]);
    assert_eq!(n.h_rule, 3);
}

#[test]
fn already_normal_is_fixed() {
    let s = Substitution::from_strs(&["x"], &[&["xxxxxxxxx"]], 2).unwrap();
    let mut e = expanding_eigen(&s).unwrap();
    e.v = vec![3.0];
    let (_, n) = normalize_unique_size(&s, &e).unwrap();
    assert_eq!((n.power, n.scale_milli), (1, 1000));
}

#[test]
fn doubling_eigen() {
    let tm = Substitution::from_strs(&["0", "1"], &[&["01"], &["10"]], 2).unwrap();
    let e = expanding_eigen(&tm).unwrap();
    assert_eq!(e.lambda, 2.0);
    assert_eq!(e.v, vec![1.0, 1.0]);
}

#[test]
fn language_examples() {
    let s = fib();
    let l = language(&s, 2, 0, 8);
    assert!(l.contains(&s.parse_word("aabaabba").unwrap()));
    assert_eq!(language(&s, 0, 1, 5).len(), 1);
    let t = thue();
    let l = language(&t, 4, 0, 12);
    assert!(l.contains(&t.parse_word("010101010101").unwrap()));
}

#[test]
fn thue_row_has_two_parses() {
    let t = thue();
    let row = t.parse_word("010101010101").unwrap();
    let parses = desubstitute(&row, &t);
    let parents: std::collections::BTreeSet<_> = parses.iter().map(|p| p.parent.clone()).collect();
    assert!(parents.len() >= 2);
}

#[test]
fn exact_image_parses_to_its_letter() {
    let s = fib();
    let row = s.parse_word("aab").unwrap();
    assert!(desubstitute(&row, &s).iter().any(|p| p.parent == vec![0] && p.offset == 0));
}

#[test]
fn fibonacci_alignment_oracle() {
    // Every alignment of "aabba" against images of two or three parent letters.
    let s = fib();
    let row = s.parse_word("aabba").unwrap();
    let mut expected = std::collections::BTreeSet::new();
    for len in 1..=4 {
        for code in 0..(1u32 << len) {
            let parent: Vec<usize> = (0..len).map(|b| ((code >> b) & 1) as usize).collect();
            let img = s.apply(&parent);
            let first = s.rules[parent[0]][0].len();
            let last_start = img.len() - s.rules[parent[len - 1]][0].len();
            for off in 0..first {
                let end = off + row.len();
                if end <= img.len() && end > last_start && img[off..end] == row[..] {
                    expected.insert((parent.clone(), off));
                }
            }
        }
    }
    let got: std::collections::BTreeSet<_> =
        desubstitute(&row, &s).into_iter().map(|p| (p.parent, p.offset)).collect();
    assert_eq!(got, expected);
}

fn eigen_power_agrees(s: &Substitution, k: u32) {
    let e1 = expanding_eigen(s).unwrap();
    let ek = expanding_eigen(&s.power(k)).unwrap();
    assert!((ek.lambda - e1.lambda.powi(k as i32)).abs() <= 1e-9 * ek.lambda);
    for (a, b) in e1.v.iter().zip(&ek.v) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn powers_of_eigenvalue() {
    eigen_power_agrees(&fib(), 2);
    eigen_power_agrees(&fib(), 3);
    eigen_power_agrees(&thue(), 2);
    eigen_power_agrees(&robinson(), 2);
}

proptest! {
    #[test]
    fn desubstitute_adjunction(parent in proptest::collection::vec(0usize..2, 1..6), cut in 0usize..3, len in 1usize..30) {
        let s = fib();
        let img = s.apply(&parent);
        let start = cut.min(img.len() - 1);
        let end = (start + len).min(img.len());
        let row = img[start..end].to_vec();
        for p in desubstitute(&row, &s) {
            let image: Vec<usize> = p.parent.iter().zip(&p.rules).flat_map(|(&c, &r)| s.rules[c][r].clone()).collect();
            prop_assert_eq!(&image[p.offset..p.offset + row.len()], &row[..]);
        }
    }

    #[test]
    fn primitivity_matches_reachability(rules in proptest::collection::vec(proptest::collection::vec(0usize..3, 1..4), 3)) {
        let names = ["x", "y", "z"];
        let imgs: Vec<String> = rules.iter().map(|w| w.iter().map(|&c| names[c]).collect()).collect();
        let refs: Vec<Vec<&str>> = imgs.iter().map(|s| vec![s.as_str()]).collect();
        let slices: Vec<&[&str]> = refs.iter().map(|v| v.as_slice()).collect();
        let s = Substitution::from_strs(&names, &slices, 2).unwrap();
        // Primitive iff strongly connected and aperiodic: check positivity of walks of every long length.
        let d = 3;
        let mut reach = vec![vec![false; d]; d];
        for a in 0..d { for &c in &rules[a] { reach[a][c] = true; } }
        let mut walk = reach.clone();
        let mut ok = false;
        for _ in 0..16 {
            if walk.iter().flatten().all(|&b| b) { ok = true; break; }
            let mut next = vec![vec![false; d]; d];
            for i in 0..d { for k in 0..d { if walk[i][k] { for j in 0..d { if reach[k][j] { next[i][j] = true; } } } } }
            walk = next;
        }
        prop_assert_eq!(is_primitive(&s).unwrap(), ok);
    }
}
