use proptest::prelude::*;

use bs_tiler::alphabet::{all_letters, alphabet_size, project_pi, Kind, Label, Letter, Pattern};
use bs_tiler::checker::{check_pattern, harvest_tables, Tables};
use bs_tiler::codec::{
    decode, encode, encode_with_paths, on_sheet, sample_window, sheet_roots, tile_under, vertical_position, Transducer,
};
use bs_tiler::group::{rectangle, GroupElement};
use bs_tiler::substitution::{expanding_eigen, normalize_unique_size, EigenData, Substitution};

fn system() -> &'static (Substitution, EigenData, Tables) {
    thread_local! {
        static SYSTEM: &'static (Substitution, EigenData, Tables) = {
            let s = Substitution::from_strs(&["a", "b"], &[&["aab"], &["ba"]], 2).unwrap();
            let e = expanding_eigen(&s).unwrap();
            let (s, e) = normalize_unique_size(&s, &e).unwrap();
            let t = harvest_tables(&s, &e, 200, 1).unwrap();
            Box::leak(Box::new((s, e, t)))
        };
    }
    SYSTEM.with(|s| *s)
}

#[test]
fn alphabet_cardinality_matches_listing() {
    for (letters, m) in [(1, 1), (1, 3), (2, 2)] {
        assert_eq!(all_letters(letters, m).len() as u128, alphabet_size(letters, m));
    }
}

#[test]
fn encoded_windows_are_admissible() {
    let (s, e, t) = system();
    let support = rectangle(3, 4, 2);
    for seed in 200..220 {
        let w = sample_window(&s, &e, seed).unwrap();
        let p = encode(&w, &support).unwrap();
        assert_eq!(p.len(), support.len());
        let v = check_pattern(&p, &t).unwrap();
        assert!(v.is_empty(), "seed {seed}: {}", v[0]);
        for g in &support {
            assert_eq!(project_pi(p.get(g).unwrap()), tile_under(&w, g).unwrap(), "seed {seed} at {g}");
        }
    }
}

#[test]
fn corrupted_pattern_is_rejected() {
    let (s, e, t) = system();
    let w = sample_window(&s, &e, 7).unwrap();
    let mut p = encode(&w, &rectangle(3, 4, 2)).unwrap();
    let (g, l) = p.cells.iter().find(|(_, l)| l.kind == Kind::T1).map(|(g, l)| (*g, *l)).unwrap();
    p.cells.insert(g, Letter::single(Kind::M3, l.primary));
    let v = check_pattern(&p, &t).unwrap();
    assert!(!v.is_empty());
    assert!(v.iter().any(|x| x.elements.contains(&g)));
}

#[test]
fn pattern_json_round_trip() {
    let (s, e, _) = system();
    let w = sample_window(&s, &e, 3).unwrap();
    let p = encode(&w, &rectangle(2, 3, 2)).unwrap();
    let back = Pattern::from_json(&p.to_json(&s), &s, 2).unwrap();
    assert_eq!(back, p);
}

#[test]
fn transducer_states() {
    let (_, _, t) = system();
    let tr = Transducer::derive(&t);
    let states: Vec<Kind> = tr.states.iter().copied().collect();
    assert_eq!(states, vec![Kind::T1, Kind::T2, Kind::M1, Kind::M2, Kind::B1]);
}

#[test]
fn vertical_position_needs_border_cell() {
    let (_, _, t) = system();
    let tr = Transducer::derive(&t);
    let mut p = Pattern::new();
    let g = GroupElement::identity(2);
    p.cells.insert(g, Letter::single(Kind::M3, Label::new(0, 1)));
    assert!(vertical_position(&p, &tr, &g, 4).is_err());
    assert!(vertical_position(&p, &tr, &g.mul_a(1), 4).is_err());
}

#[test]
fn paths_locate_tile_corners() {
    let (s, e, t) = system();
    let tr = Transducer::derive(&t);
    let support = rectangle(3, 4, 2);
    for seed in 0..10 {
        let w = sample_window(&s, &e, seed).unwrap();
        let p = encode_with_paths(&w, &support, 16).unwrap();
        assert!(check_pattern(&p, &t).unwrap().is_empty());
        let gen = w.generator().unwrap();
        for g in support.iter().filter(|g| matches!(p.get(g).unwrap().kind, Kind::T1 | Kind::T2)) {
            let vp = vertical_position(&p, &tr, g, 16).unwrap();
            assert!(vp.complete);
            let last = vp.cells.last().unwrap().phi_box();
            assert_eq!((last.x, last.width), (vp.lower, vp.width));
            let b = g.phi_box();
            let row = gen.line_in_level(b.y).unwrap().unwrap();
            let (lo, hi) = (vp.lower.to_f64(), (vp.lower + vp.width).to_f64());
            let corner = gen.tiles(row, b.x.to_f64(), b.right().to_f64()).into_iter().any(|u| u.left >= lo - 1e-9 && u.left <= hi + 1e-9);
            assert!(corner, "seed {seed}: no corner in [{lo}, {hi}] below {g}");
        }
    }
}

#[test]
fn decode_recovers_letters() {
    let (s, e, t) = system();
    let tr = Transducer::derive(&t);
    let support = rectangle(4, 5, 2);
    let mut recovered = 0;
    for seed in 0..5 {
        let w = sample_window(&s, &e, seed).unwrap();
        let gen = w.generator().unwrap();
        let p = encode_with_paths(&w, &support, 16).unwrap();
        let d = decode(&p, &tr, &s, &e.v, 16, |_| true).unwrap();
        assert!(d.inconsistencies.is_empty(), "{:?}", d.inconsistencies);
        for row in &d.window.rows {
            for tile in &row.tiles {
                let truth = gen.tile_at(tile.left + tile.width / 2.0, row.top - 1e-3).unwrap();
                assert_eq!(truth.letter, tile.letter);
                assert!((truth.left - tile.left).abs() < 1e-4 * tile.width.max(1.0));
                recovered += 1;
            }
        }
    }
    assert!(recovered > 0);
}

#[test]
fn rectangle_sheets() {
    for (k, l) in [(1, 2), (2, 3), (3, 4)] {
        let cells = rectangle(k, l, 2);
        let roots = sheet_roots(&cells);
        assert_eq!(roots.len(), 1 << l);
        let top = cells.iter().map(GroupElement::level).max().unwrap();
        for g in &cells {
            let sheets = roots.iter().filter(|&&r| on_sheet(g, r)).count();
            assert!(sheets >= 1, "{g}");
            if g.level() == top {
                assert_eq!(sheets, 1, "{g}");
            }
        }
    }
    assert!(sheet_roots(&[]).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_windows_encode_admissibly(seed in 1000u64..100_000) {
        let (s, e, t) = system();
        let w = sample_window(&s, &e, seed).unwrap();
        let p = encode(&w, &rectangle(2, 3, 2)).unwrap();
        prop_assert!(check_pattern(&p, &t).unwrap().is_empty());
    }
}
