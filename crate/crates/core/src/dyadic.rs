//! Exact n-adic rationals `m · n^{-e}`, the coordinate ring ℤ[1/n] of Φ.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// An exact rational `numerator · base^{-exponent}`.
///
/// The canonical form has `exponent == 0` or `base ∤ numerator`, so derived
/// equality and hashing are value equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    numerator: i128,
    exponent: u32,
    base: u32,
}

/// `base^e` as an `i128`, panicking on overflow.
pub(crate) fn ipow(base: u32, e: u32) -> i128 {
    (base as i128)
        .checked_pow(e)
        .unwrap_or_else(|| panic!("{base}^{e} overflows i128"))
}

impl Dyadic {
    /// Builds `numerator · base^{-exponent}` and canonicalizes it.
    pub fn new(numerator: i128, exponent: u32, base: u32) -> Self {
        assert!(base >= 2, "base must be at least 2");
        let mut d = Dyadic { numerator, exponent, base };
        d.canonicalize();
        d
    }

    /// The integer `m` in base `n`.
    pub fn from_int(m: i128, base: u32) -> Self {
        Dyadic::new(m, 0, base)
    }

    /// Zero in base `n`.
    pub fn zero(base: u32) -> Self {
        Dyadic::from_int(0, base)
    }

    /// `n^p` for any integer `p`.
    pub fn base_pow(p: i64, base: u32) -> Self {
        if p >= 0 {
            Dyadic::from_int(ipow(base, p as u32), base)
        } else {
            Dyadic::new(1, (-p) as u32, base)
        }
    }

    fn canonicalize(&mut self) {
        let b = self.base as i128;
        if self.numerator == 0 {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && self.numerator % b == 0 {
            self.numerator /= b;
            self.exponent -= 1;
        }
    }

    /// Numerator of the canonical form.
    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    /// Exponent of the canonical form.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// The base n.
    pub fn base(&self) -> u32 {
        self.base
    }

    /// True when the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    /// Multiplies by `n^p` for any integer `p`.
    pub fn scale(&self, p: i64) -> Self {
        if p >= 0 {
            let p = p as u32;
            if p <= self.exponent {
                Dyadic::new(self.numerator, self.exponent - p, self.base)
            } else {
                let m = self
                    .numerator
                    .checked_mul(ipow(self.base, p - self.exponent))
                    .expect("dyadic overflow");
                Dyadic::new(m, 0, self.base)
            }
        } else {
            Dyadic::new(self.numerator, self.exponent + (-p) as u32, self.base)
        }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> i128 {
        self.numerator.div_euclid(ipow(self.base, self.exponent))
    }

    /// Numerator over `n^e` for a chosen `e ≥ exponent`.
    fn lift(&self, e: u32) -> i128 {
        self.numerator
            .checked_mul(ipow(self.base, e - self.exponent))
            .expect("dyadic overflow")
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / (self.base as f64).powi(self.exponent as i32)
    }

    fn check_base(&self, other: &Dyadic) {
        assert_eq!(self.base, other.base, "mixed bases");
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        self.check_base(&rhs);
        let e = self.exponent.max(rhs.exponent);
        let m = self.lift(e).checked_add(rhs.lift(e)).expect("dyadic overflow");
        Dyadic::new(m, e, self.base)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-self.numerator, self.exponent, self.base)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        self.check_base(&rhs);
        let m = self.numerator.checked_mul(rhs.numerator).expect("dyadic overflow");
        Dyadic::new(m, self.exponent + rhs.exponent, self.base)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check_base(other);
        let e = self.exponent.max(other.exponent);
        self.lift(e).cmp(&other.lift(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}^{}", self.numerator, self.base, self.exponent)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_strips_factors() {
        let d = Dyadic::new(12, 2, 2);
        assert_eq!(d.numerator(), 3);
        assert_eq!(d.exponent(), 0);
        assert_eq!(Dyadic::new(0, 5, 3).exponent(), 0);
    }

    #[test]
    fn arithmetic_is_exact() {
        let half = Dyadic::new(1, 1, 2);
        let quarter = Dyadic::new(1, 2, 2);
        assert_eq!(half + quarter, Dyadic::new(3, 2, 2));
        assert_eq!(half * half, quarter);
        assert_eq!(half - half, Dyadic::zero(2));
        assert!(quarter < half);
        assert_eq!(Dyadic::new(3, 2, 2).scale(2), Dyadic::from_int(3, 2));
        assert_eq!(Dyadic::new(-3, 1, 2).floor(), -2);
    }
}
