//! The group BS(1,n) = ⟨a,t | t⁻¹at = aⁿ⟩ in normal form, and the
//! isomorphism Φ onto ℤ[1/n] ⋊ ℤ.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::{ipow, Dyadic};
use crate::error::{Error, Result};

/// A generator or inverse generator of BS(1,n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `a`
    A,
    /// `a⁻¹`
    AInv,
    /// `t`
    T,
    /// `t⁻¹`
    TInv,
}

impl Generator {
    /// All four generators, in the order `a, a⁻¹, t, t⁻¹`.
    pub const ALL: [Generator; 4] = [Generator::A, Generator::AInv, Generator::T, Generator::TInv];

    /// The generator as a normal-form element.
    pub fn element(self, n: u32) -> GroupElement {
        match self {
            Generator::A => GroupElement::raw(0, 1, 0, n),
            Generator::AInv => GroupElement::raw(0, -1, 0, n),
            Generator::T => GroupElement::raw(1, 0, 0, n),
            Generator::TInv => GroupElement::raw(0, 0, 1, n),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Generator::A),
            "A" | "a-" | "a^-1" | "a⁻¹" => Ok(Generator::AInv),
            "t" => Ok(Generator::T),
            "T" | "t-" | "t^-1" | "t⁻¹" => Ok(Generator::TInv),
            _ => Err(Error::Parse(format!("unknown generator {s:?}"))),
        }
    }
}

/// Parses a whitespace-separated word such as `"a t t a^-1"`.
pub fn parse_word(s: &str) -> Result<Vec<Generator>> {
    s.split_whitespace().map(str::parse).collect()
}

/// The normal form `t^i a^j t^{-k}` of an element of BS(1,n).
///
/// Exactly one of `i = 0`, `k = 0 < i`, or `i, k > 0` with `n ∤ j` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    /// Exponent of the leading `t`.
    pub i: u32,
    /// Exponent of `a`.
    pub j: i128,
    /// Exponent of the trailing `t⁻¹`.
    pub k: u32,
    /// The base n.
    pub n: u32,
}

impl GroupElement {
    fn raw(i: u32, j: i128, k: u32, n: u32) -> Self {
        GroupElement { i, j, k, n }
    }

    /// Builds an element from a triple, rejecting non-normal triples.
    pub fn new(i: u32, j: i128, k: u32, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("base {n} < 2")));
        }
        let g = GroupElement::raw(i, j, k, n);
        if g.is_normal() {
            Ok(g)
        } else {
            Err(Error::Input(format!("t^{i} a^{j} t^-{k} is not a normal form for n={n}")))
        }
    }

    /// The element `t^i a^j t^{-k}` for any triple, normalized.
    pub fn from_triple(i: u32, j: i128, k: u32, n: u32) -> Self {
        let x = Dyadic::new(j, 0, n).scale(-(i as i64));
        phi_inverse(x, k as i64 - i as i64)
    }

    /// The identity of BS(1,n).
    pub fn identity(n: u32) -> Self {
        GroupElement::raw(0, 0, 0, n)
    }

    /// True when the triple satisfies the normal-form side conditions.
    pub fn is_normal(&self) -> bool {
        self.i == 0 || self.k == 0 || self.j.rem_euclid(self.n as i128) != 0
    }

    /// True for the identity.
    pub fn is_identity(&self) -> bool {
        self.i == 0 && self.j == 0 && self.k == 0
    }

    /// The image Φ(g) = (j·n^{-i}, k − i).
    pub fn phi(&self) -> (Dyadic, i64) {
        phi(self)
    }

    /// The Φ level `k − i`.
    pub fn level(&self) -> i64 {
        self.k as i64 - self.i as i64
    }

    /// The product `self · other`.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        multiply(self, other).expect("mixed bases")
    }

    /// The inverse element.
    pub fn inverse(&self) -> GroupElement {
        let (x, y) = self.phi();
        phi_inverse(-x.scale(-y), -y)
    }

    /// Right multiplication by a generator.
    pub fn step(&self, g: Generator) -> GroupElement {
        self.mul(&g.element(self.n))
    }

    /// Right multiplication by `a^m`.
    pub fn mul_a(&self, m: i128) -> GroupElement {
        self.mul(&GroupElement::raw(0, m, 0, self.n))
    }

    /// Right multiplication by `t^m` for any integer `m`.
    pub fn mul_t(&self, m: i64) -> GroupElement {
        if m >= 0 {
            self.mul(&GroupElement::raw(m as u32, 0, 0, self.n))
        } else {
            self.mul(&GroupElement::raw(0, 0, (-m) as u32, self.n))
        }
    }

    /// The canonical word `t^i a^j t^{-k}`.
    pub fn word(&self) -> Vec<Generator> {
        let mut w = vec![Generator::T; self.i as usize];
        let a = if self.j >= 0 { Generator::A } else { Generator::AInv };
        w.extend(std::iter::repeat(a).take(self.j.unsigned_abs() as usize));
        w.extend(std::iter::repeat(Generator::TInv).take(self.k as usize));
        w
    }

    /// The Φ(g)-box of this element.
    pub fn phi_box(&self) -> PhiBox {
        let (x, y) = self.phi();
        PhiBox { x, y, width: Dyadic::base_pow(y, self.n) }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "t^{} a^{} t^0", self.i, self.j)
        } else {
            write!(f, "t^{} a^{} t^-{}", self.i, self.j, self.k)
        }
    }
}

/// Parses `"t^i a^j t^-k"` (or `t^0` for `k = 0`) in base `n`,
/// normalizing the triple.
pub fn parse_element(s: &str, n: u32) -> Result<GroupElement> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let bad = || Error::Parse(format!("expected `t^i a^j t^-k`, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let i: u32 = parts[0].strip_prefix("t^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let j: i128 = parts[1].strip_prefix("a^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let k: u32 = match parts[2] {
        "t^0" => 0,
        p => p.strip_prefix("t^-").ok_or_else(bad)?.parse().map_err(|_| bad())?,
    };
    Ok(GroupElement::from_triple(i, j, k, n))
}

/// Normalizes a word over `{a, a⁻¹, t, t⁻¹}`.
pub fn normalize(word: &[Generator], n: u32) -> GroupElement {
    word.iter().fold(GroupElement::identity(n), |g, &s| g.step(s))
}

/// The product `g · h`, computed through the semidirect law
/// `(x₁,y₁)(x₂,y₂) = (x₁ + n^{y₁}·x₂, y₁ + y₂)`.
pub fn multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    if g.n != h.n {
        return Err(Error::BaseMismatch(g.n, h.n));
    }
    let (x1, y1) = phi(g);
    let (x2, y2) = phi(h);
    Ok(phi_inverse(x1 + x2.scale(y1), y1 + y2))
}

/// Φ(t^i a^j t^{-k}) = (j·n^{-i}, k − i).
pub fn phi(g: &GroupElement) -> (Dyadic, i64) {
    (Dyadic::new(g.j, g.i, g.n), g.k as i64 - g.i as i64)
}

/// The normal form with Φ-image `(x, m)`.
pub fn phi_inverse(x: Dyadic, m: i64) -> GroupElement {
    let n = x.base();
    let mut i = x.exponent() as i64;
    if m + i < 0 {
        i = -m;
    }
    let k = m + i;
    let j = x.numerator() * ipow(n, (i - x.exponent() as i64) as u32);
    GroupElement::raw(i as u32, j, k as u32, n)
}

/// The Φ(g)-box `[x, x + n^y) × (y − 1, y]` where `Φ(g) = (x, y)`.
///
/// The width is `n^{k−i}`, the spacing of the sheet of `g` at level `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhiBox {
    /// Left edge.
    pub x: Dyadic,
    /// Top edge (the Φ level).
    pub y: i64,
    /// Horizontal extent.
    pub width: Dyadic,
}

impl PhiBox {
    /// Right edge, exclusive.
    pub fn right(&self) -> Dyadic {
        self.x + self.width
    }

    /// True when the two half-open boxes share interior points.
    pub fn overlaps(&self, other: &PhiBox) -> bool {
        self.y == other.y && self.x < other.right() && other.x < self.right()
    }
}

/// The elements of the rectangle `R_{k,ℓ}`, sorted.
///
/// `R_{k,ℓ} = {t^ℓ a^i t^{-j} : 0 ≤ i < (k+1)·n^{ℓ−1}, 0 ≤ j ≤ ℓ}`; for `ℓ = 0`
/// the convention is `{a^i : 0 ≤ i ≤ k}`.
pub fn rectangle(k: u32, ell: u32, n: u32) -> Vec<GroupElement> {
    let mut set = BTreeSet::new();
    if ell == 0 {
        for i in 0..=k as i128 {
            set.insert(GroupElement::raw(0, i, 0, n));
        }
    } else {
        let width = (k as i128 + 1) * ipow(n, ell - 1);
        for j in 0..=ell {
            for i in 0..width {
                set.insert(GroupElement::from_triple(ell, i, j, n));
            }
        }
    }
    set.into_iter().collect()
}

/// The closed count `(ℓ+1)(k+1)n^{ℓ−1}` of `R_{k,ℓ}` for `ℓ ≥ 1`.
pub fn rectangle_size(k: u32, ell: u32, n: u32) -> u128 {
    if ell == 0 {
        return k as u128 + 1;
    }
    (ell as u128 + 1) * (k as u128 + 1) * ipow(n, ell - 1) as u128
}

/// The count `ℓ(k+1)n^{ℓ−1}` printed in the zero-entropy argument.
pub fn rectangle_size_printed(k: u32, ell: u32, n: u32) -> u128 {
    if ell == 0 {
        return 0;
    }
    ell as u128 * (k as u128 + 1) * ipow(n, ell - 1) as u128
}

/// `|∂R| / |R|` for `R = R_{k,ℓ}`, where `∂R` holds the elements with a
/// neighbour `g·s`, `s ∈ {a^{±1}, t^{±1}}`, outside `R`.
pub fn folner_ratio(k: u32, ell: u32, n: u32) -> (u64, u64) {
    let elems = rectangle(k, ell, n);
    let set: HashSet<GroupElement> = elems.iter().copied().collect();
    let boundary = elems
        .iter()
        .filter(|g| Generator::ALL.iter().any(|&s| !set.contains(&g.step(s))))
        .count();
    (boundary as u64, elems.len() as u64)
}

/// The cone `{g·a^i·t^{-j} : 0 ≤ i < ℓ, 0 ≤ j ≤ m}`, sorted.
pub fn cone(g: &GroupElement, ell: u32, m: u32) -> Vec<GroupElement> {
    let mut set = BTreeSet::new();
    for i in 0..ell as i128 {
        let base = g.mul_a(i);
        for j in 0..=m as i64 {
            set.insert(base.mul_t(-j));
        }
    }
    set.into_iter().collect()
}

/// The two sheet mates `(g·t·a·t⁻¹, g·t·a⁻¹·t⁻¹)`.
pub fn sheet_mates(g: &GroupElement) -> (GroupElement, GroupElement) {
    let n = g.n;
    let right = normalize(&[Generator::T, Generator::A, Generator::TInv], n);
    let left = normalize(&[Generator::T, Generator::AInv, Generator::TInv], n);
    (g.mul(&right), g.mul(&left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    #[test]
    fn at_equals_t_a_n() {
        assert_eq!(normalize(&[A, T], 2), GroupElement::raw(1, 2, 0, 2));
        assert_eq!(normalize(&[A, T], 3), GroupElement::raw(1, 3, 0, 3));
    }

    #[test]
    fn phi_of_generators() {
        assert_eq!(phi(&A.element(2)), (Dyadic::from_int(1, 2), 0));
        assert_eq!(phi(&T.element(2)), (Dyadic::zero(2), -1));
    }

    #[test]
    fn phi_inverse_examples() {
        assert_eq!(phi_inverse(Dyadic::new(3, 2, 2), 2), GroupElement::raw(2, 3, 4, 2));
        assert_eq!(phi_inverse(Dyadic::from_int(5, 2), -3), GroupElement::raw(3, 40, 0, 2));
    }

    #[test]
    fn rectangle_zero_height_convention() {
        assert_eq!(rectangle(0, 0, 2), vec![GroupElement::identity(2)]);
        assert_eq!(rectangle(3, 0, 2).len(), 4);
    }
}
