use num_rational::Ratio;
use proptest::prelude::*;

use bs_tiler::group::{
    folner_ratio, multiply, normalize, parse_element, parse_word, phi_inverse, rectangle, rectangle_size, rectangle_size_printed,
    Generator, GroupElement,
};
use bs_tiler::Dyadic;

/// Φ of a word computed with exact rationals through the affine action
/// `a: (x, y) ↦ (x + n^y, y)`, `t: (x, y) ↦ (x, y − 1)`.
fn phi_oracle(word: &[Generator], n: u32) -> (Ratio<i128>, i64) {
    let n = n as i128;
    let mut x = Ratio::from_integer(0);
    let mut y = 0i64;
    for g in word {
        let unit = if y >= 0 { Ratio::from_integer(n.pow(y as u32)) } else { Ratio::new(1, n.pow((-y) as u32)) };
        match g {
            Generator::A => x += unit,
            Generator::AInv => x -= unit,
            Generator::T => y -= 1,
            Generator::TInv => y += 1,
        }
    }
    (x, y)
}

fn ratio(d: Dyadic) -> Ratio<i128> {
    Ratio::new(d.numerator(), (d.base() as i128).pow(d.exponent()))
}

fn word() -> impl Strategy<Value = Vec<Generator>> {
    proptest::collection::vec(proptest::sample::select(Generator::ALL.to_vec()), 0..=30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn phi_matches_affine_oracle(w in word(), n in 2u32..=3) {
        let (x, y) = normalize(&w, n).phi();
        prop_assert_eq!((ratio(x), y), phi_oracle(&w, n));
    }

    #[test]
    fn product_is_concatenation(u in word(), v in word(), n in 2u32..=3) {
        let joined: Vec<Generator> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(multiply(&normalize(&u, n), &normalize(&v, n)).unwrap(), normalize(&joined, n));
    }

    #[test]
    fn normal_form_round_trip(w in word(), n in 2u32..=3) {
        let g = normalize(&w, n);
        prop_assert!(g.is_normal());
        prop_assert_eq!(normalize(&g.word(), n), g);
        prop_assert_eq!(parse_element(&g.to_string(), n).unwrap(), g);
        let (x, y) = g.phi();
        prop_assert_eq!(phi_inverse(x, y), g);
    }

    #[test]
    fn inverse_cancels(w in word(), n in 2u32..=3) {
        let g = normalize(&w, n);
        prop_assert!(g.mul(&g.inverse()).is_identity());
    }
}

#[test]
fn a_t_normalizes_to_t_a_n() {
    let g = normalize(&parse_word("a t").unwrap(), 2);
    assert_eq!(g.to_string(), "t^1 a^2 t^0");
    let h = normalize(&parse_word("T a t").unwrap(), 3);
    assert_eq!(h, normalize(&parse_word("a a a").unwrap(), 3));
}

#[test]
fn display_of_negative_power() {
    let g = GroupElement::new(1, 3, 2, 2).unwrap();
    assert_eq!(g.to_string(), "t^1 a^3 t^-2");
    assert!(GroupElement::new(1, 2, 2, 2).is_err());
}

#[test]
fn bad_element_strings() {
    for s in ["", "t^1 a^2", "t^x a^2 t^0", "t^1 b^2 t^0", "t^1 a^2 t^3"] {
        assert!(parse_element(s, 2).is_err(), "{s}");
    }
}

#[test]
fn mismatched_bases() {
    assert!(multiply(&GroupElement::identity(2), &GroupElement::identity(3)).is_err());
}

#[test]
fn rectangle_counts() {
    assert_eq!(rectangle(2, 4, 2).len(), 120);
    for (k, l, n) in [(0, 1, 2), (1, 2, 2), (2, 3, 3), (3, 4, 2)] {
        assert_eq!(rectangle(k, l, n).len() as u128, rectangle_size(k, l, n));
    }
    assert_eq!(rectangle_size_printed(2, 4, 2), 96);
}

#[test]
fn folner_ratio_decreases() {
    let ratios: Vec<f64> = [(2, 4), (4, 6), (8, 8)]
        .iter()
        .map(|&(k, l)| {
            let (b, s) = folner_ratio(k, l, 2);
            b as f64 / s as f64
        })
        .collect();
    assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
}
